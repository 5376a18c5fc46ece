import hashlib
import json
from pathlib import Path

from errors import InputFileError
from seqio import NucleotideSequence, read_fasta, select_record
from .globals import TOOL_NAME, VERSION


def file_digest(path: str | Path) -> str:
    """SHA-256 of a file's bytes."""
    digest = hashlib.sha256()
    try:
        with open(path, "rb") as f:
            for block in iter(lambda: f.read(1 << 20), b""):
                digest.update(block)
    except OSError as e:
        raise InputFileError(f"Cannot read {path}: {e.strerror or e}") from e
    return digest.hexdigest()


def config_echo(config: dict) -> str:
    return json.dumps(config, sort_keys=True, separators=(",", ":"))


def header_lines(command: str, config: dict, inputs: dict[str, str | Path]) -> list[str]:
    """Comment lines echoed at the top of every output file.

    They carry no timestamps, so rerunning from the echoed config reproduces
    the file byte for byte.
    """
    lines = [
        f"{TOOL_NAME} {VERSION}",
        f"command: {command}",
        f"config: {config_echo(config)}",
    ]
    for name, path in sorted(inputs.items()):
        lines.append(f"input {name}: {Path(path).name} sha256={file_digest(path)}")
    return lines


def load_record(path: str | Path, record_id: str | None = None) -> NucleotideSequence:
    """One record from a FASTA file: the first, or the one with record_id."""
    try:
        records = read_fasta(path)
    except OSError as e:
        raise InputFileError(f"Cannot read {path}: {e.strerror or e}") from e
    return select_record(records, record_id)
