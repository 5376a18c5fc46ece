"""Main CLI for LateralScan."""
import argparse
import logging
import sys

from cli_commands import cmd_generate, cmd_scan, cmd_sensors, cmd_simulate, cmd_train
from data_handlers import TOOL_NAME, VERSION

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(verbose: int = 0, quiet: bool = False, log_file: str | None = None):
    level = logging.ERROR if quiet else {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    console = logging.StreamHandler(sys.stderr)
    console.setLevel(level)
    console.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    handlers: list[logging.Handler] = [console]

    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handlers.append(file_handler)

    logging.basicConfig(level=logging.DEBUG if log_file else level, handlers=handlers, force=True)


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="JSON config file (flags override it)")
    parser.add_argument("--verbose", "-v", action="count", default=0, help="More log output (repeatable)")
    parser.add_argument("--quiet", "-q", action="store_true", help="Only report errors")
    parser.add_argument("--log-file", help="Also write a debug log to this file")


def _add_window(parser: argparse.ArgumentParser):
    parser.add_argument("--window", type=int, help="Window length in nt")
    step = parser.add_mutually_exclusive_group()
    step.add_argument("--step", type=int, help="Distance between window starts")
    step.add_argument("--overlap", type=int, help="Overlap between consecutive windows (alternative to --step)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=TOOL_NAME,
        description="Detect laterally transferred DNA with compositional sensors and a neural network",
    )
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="Train a donor-vs-acceptor classifier")
    train.add_argument("donor", help="Donor genome FASTA")
    train.add_argument("acceptor", help="Acceptor genome FASTA")
    train.add_argument("--record", help="Record id used in both FASTAs")
    train.add_argument("--donor-record", help="Record id in the donor FASTA")
    train.add_argument("--acceptor-record", help="Record id in the acceptor FASTA")
    _add_window(train)
    train.add_argument("--hidden", help="Hidden layer sizes, e.g. 5 or 10,5")
    train.add_argument("--fragments", type=int, help="Fragments sampled per genome")
    train.add_argument("--seed", type=int)
    train.add_argument("--lr", type=float, help="Learning rate")
    train.add_argument("--momentum", type=float)
    train.add_argument("--epochs", type=int)
    train.add_argument("--init-scale", type=float, help="Initial weights drawn from [-s, s]")
    train.add_argument("--early-stop", type=float, help="Stop once mean epoch loss falls below this")
    train.add_argument("--log-every", type=int, help="Report loss every N epochs")
    train.add_argument("--workers", type=int)
    train.add_argument("--out", help="Output prefix (.model, .report.tsv, .summary.txt)")
    _add_common(train)
    train.set_defaults(func=cmd_train)

    scan = sub.add_parser("scan", help="Scan a sequence with a trained model")
    scan.add_argument("model", help="Model file from 'train'")
    scan.add_argument("query", help="Query FASTA")
    scan.add_argument("--record", help="Record id in the query FASTA")
    _add_window(scan)
    scan.add_argument("--smooth-k", type=int, help="Odd majority-vote window (1 disables)")
    scan.add_argument("--min-seg-windows", type=int, help="Shortest reported segment, in windows")
    scan.add_argument("--min-seg-score", type=float, help="Lowest mean raw output of a reported segment")
    scan.add_argument("--workers", type=int)
    scan.add_argument("--out", help="Output prefix (.track.tsv, .segments.tsv)")
    _add_common(scan)
    scan.set_defaults(func=cmd_scan)

    simulate = sub.add_parser("simulate", help="Insert a donor fragment into an acceptor")
    simulate.add_argument("donor", help="Donor genome FASTA")
    simulate.add_argument("acceptor", help="Acceptor genome FASTA")
    simulate.add_argument("--record", help="Record id used in both FASTAs")
    simulate.add_argument("--donor-record")
    simulate.add_argument("--acceptor-record")
    simulate.add_argument("--insert-length", type=int)
    simulate.add_argument("--insert-pos", type=int, help="Insert position (default: acceptor midpoint)")
    simulate.add_argument("--seed", type=int)
    simulate.add_argument("--out", help="Output prefix (.fasta, .truth.tsv)")
    _add_common(simulate)
    simulate.set_defaults(func=cmd_simulate)

    sensors = sub.add_parser("sensors", help="Write the sensor vector of every window")
    sensors.add_argument("input", help="Input FASTA")
    sensors.add_argument("--record")
    _add_window(sensors)
    sensors.add_argument("--workers", type=int)
    sensors.add_argument("--out", help="Output TSV")
    _add_common(sensors)
    sensors.set_defaults(func=cmd_sensors)

    generate = sub.add_parser("generate", help="Draw a synthetic genome")
    source = generate.add_mutually_exclusive_group(required=True)
    source.add_argument("--gc", type=float, help="G+C fraction of an order-0 composition")
    source.add_argument("--template", help="FASTA to fit a Markov chain on")
    generate.add_argument("--record", help="Record id in the template FASTA")
    generate.add_argument("--markov-order", type=int)
    generate.add_argument("--length", type=int)
    generate.add_argument("--seed", type=int)
    generate.add_argument("--id", help="Record id of the generated sequence")
    generate.add_argument("--out", help="Output FASTA")
    _add_common(generate)
    generate.set_defaults(func=cmd_generate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse usage errors are input errors
        return 0 if e.code == 0 else 2
    configure_logging(args.verbose, args.quiet, args.log_file)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
