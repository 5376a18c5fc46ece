"""Tab-separated result files.

Every file opens with '#' comment lines (tool version, command, effective
config and input digests) followed by a column header row.
"""

import csv
from pathlib import Path
from typing import Iterable, TextIO

from errors import ConfigError, InputFileError, LateralScanError
from pipeline import TrainingReport
from scanner import ScanTrack, Segment
from sensors import SENSOR_NAMES, SensorVector
from simgen import InsertionRecord
from .globals import LOSS_COLUMNS, NA, SEGMENT_COLUMNS, TRACK_COLUMNS, TRUTH_COLUMNS


def _full(value: float) -> str:
    return f"{value:.17g}"


def _fixed(value: float | None) -> str:
    return NA if value is None else f"{value:.6f}"


def _write_table(stream: TextIO, header: list[str] | None, columns, rows: Iterable) -> None:
    for line in header or []:
        stream.write(f"# {line}\n")
    writer = csv.writer(stream, delimiter="\t", lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)


def write_track(track: ScanTrack, stream: TextIO, header: list[str] | None = None) -> None:
    rows = (
        (p.index, p.start, p.end, _fixed(p.raw), NA if p.label is None else p.label)
        for p in track.points
    )
    _write_table(stream, header, TRACK_COLUMNS, rows)


def write_segments(segments: list[Segment], stream: TextIO, header: list[str] | None = None) -> None:
    rows = ((s.start_nt, s.end_nt, s.n_windows, _fixed(s.mean_raw)) for s in segments)
    _write_table(stream, header, SEGMENT_COLUMNS, rows)


def write_sensor_track(
    records: list[tuple[int, SensorVector | None]],
    stream: TextIO,
    header: list[str] | None = None,
) -> None:
    """One row per window start; values at full precision, NA for unclean windows."""
    rows = (
        (start, *([NA] * len(SENSOR_NAMES) if vector is None else map(_full, vector)))
        for start, vector in records
    )
    _write_table(stream, header, ("start", *SENSOR_NAMES), rows)


def write_loss_history(history: list[float], stream: TextIO, header: list[str] | None = None) -> None:
    _write_table(stream, header, LOSS_COLUMNS, ((epoch, _full(v)) for epoch, v in enumerate(history, 1)))


def write_truth(record: InsertionRecord, stream: TextIO, header: list[str] | None = None) -> None:
    row = (record.acceptor_id, record.donor_id, record.insert_position, record.insert_length)
    _write_table(stream, header, TRUTH_COLUMNS, [row])


def read_truth(path: str | Path) -> InsertionRecord:
    try:
        with open(path, newline="") as f:
            lines = [line for line in f if line.strip() and not line.startswith("#")]
    except OSError as e:
        raise InputFileError(f"Cannot read {path}: {e.strerror or e}") from e
    rows = list(csv.reader(lines, delimiter="\t"))
    if len(rows) != 2 or tuple(rows[0]) != TRUTH_COLUMNS:
        raise ConfigError(f"{path} is not a truth file")
    acceptor_id, donor_id, position, length = rows[1]
    try:
        return InsertionRecord(acceptor_id, donor_id, int(position), int(length))
    except ValueError as e:
        raise ConfigError(f"{path}: bad coordinates in truth row") from e


def write_summary(report: TrainingReport, stream: TextIO, header: list[str] | None = None) -> None:
    """key: value lines describing a finished training run."""
    for line in header or []:
        stream.write(f"# {line}\n")
    evaluation = report.evaluation
    fields = [
        ("architecture", report.architecture),
        ("window_length", report.window.length),
        ("window_step", report.window.step),
        ("n_train", report.n_train),
        ("n_heldout", evaluation.n_examples),
        ("epochs_run", report.epochs_run),
        ("final_loss", _full(report.final_loss)),
        ("heldout_accuracy", f"{evaluation.accuracy:.6f}"),
        ("donor_recall", f"{evaluation.donor_recall:.6f}"),
        ("acceptor_recall", f"{evaluation.acceptor_recall:.6f}"),
    ]
    for key, value in fields:
        stream.write(f"{key}: {value}\n")


def open_output(path: str | Path) -> TextIO:
    """Open an output file for writing, mapping OS failures to an output-stage error."""
    try:
        return open(path, "w", newline="", encoding="utf-8")
    except OSError as e:
        raise LateralScanError(f"Cannot write {path}: {e.strerror or e}", stage="output") from e
