"""Subcommand handlers. Each resolves its config, runs a service and returns an exit code."""

import argparse
import logging

from cli_utils import (
    print_error,
    print_field,
    print_header,
    print_numbered_list,
    print_outputs,
    print_section,
)
from config import resolve
from errors import LateralScanError
from services.progress import ProgressCallbackType, print_progress
from services.results import ServiceResult
from services.scan_service import ScanService, SensorService
from services.simulation_service import GenerationService, SimulationService
from services.training_service import TrainingService

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_INPUT = 2


def _exit_code(result: ServiceResult) -> int:
    if result.success:
        return EXIT_OK
    print_error(result.stage or "runtime", result.message)
    return EXIT_INPUT if result.input_error else EXIT_RUNTIME


def _run(args: argparse.Namespace, service_class, on_progress: ProgressCallbackType):
    try:
        config = resolve(args.command, vars(args), args.config)
    except LateralScanError as e:
        return ServiceResult.failure(e)
    logger.debug("Effective %s config: %s", args.command, config.echo())
    return service_class(config, on_progress=on_progress).run()


def _progress(args: argparse.Namespace) -> ProgressCallbackType:
    if args.quiet:
        return lambda message, level="info": None
    return print_progress


def cmd_train(args: argparse.Namespace) -> int:
    result = _run(args, TrainingService, _progress(args))
    if result.success and not args.quiet:
        report = result.data["report"]
        print_header(result.message)
        print_section("Held-out evaluation")
        print_field("accuracy", f"{report.evaluation.accuracy:.4f}")
        print_field("donor recall", f"{report.evaluation.donor_recall:.4f}")
        print_field("acceptor recall", f"{report.evaluation.acceptor_recall:.4f}")
        print_field("final loss", f"{report.final_loss:.6g} after {report.epochs_run} epochs")
        print_section("Outputs")
        print_outputs(result.outputs)
    return _exit_code(result)


def cmd_scan(args: argparse.Namespace) -> int:
    result = _run(args, ScanService, _progress(args))
    if result.success and not args.quiet:
        summary = result.data["summary"]
        segments = result.data["segments"]
        print_header(result.message)
        print_field("windows", summary.n_windows)
        print_field("no-call", summary.n_no_call)
        print_field("donor fraction", f"{summary.donor_fraction:.4f}")
        print_numbered_list(
            "segments",
            [f"{s.start_nt}-{s.end_nt} ({s.n_windows} windows, mean {s.mean_raw:.3f})" for s in segments],
        )
        print_section("Outputs")
        print_outputs(result.outputs)
    return _exit_code(result)


def cmd_simulate(args: argparse.Namespace) -> int:
    result = _run(args, SimulationService, _progress(args))
    if result.success and not args.quiet:
        record = result.data["bundle"].record
        print_header(result.message)
        print_field("insert", f"{record.insert_position}-{record.insert_end} from '{record.donor_id}'")
        print_outputs(result.outputs)
    return _exit_code(result)


def cmd_sensors(args: argparse.Namespace) -> int:
    result = _run(args, SensorService, _progress(args))
    if result.success and not args.quiet:
        print_field("sensors", result.message)
        print_outputs(result.outputs)
    return _exit_code(result)


def cmd_generate(args: argparse.Namespace) -> int:
    result = _run(args, GenerationService, _progress(args))
    if result.success and not args.quiet:
        print_field("generate", result.message)
        print_outputs(result.outputs)
    return _exit_code(result)
