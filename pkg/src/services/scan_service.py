"""Scan and sensor-track services."""

from pathlib import Path

from config import RunConfig
from data_handlers import (
    header_lines,
    load_model,
    load_record,
    open_output,
    write_segments,
    write_sensor_track,
    write_track,
)
from errors import LateralScanError
from scanner import call_segments, scan, smooth_track, track_summary
from seqio import WindowSpec
from sensors import rolling_scan
from services.progress import ProgressCallbackType, print_progress
from services.results import ServiceResult


def _window(config: RunConfig, fallback: WindowSpec | None) -> WindowSpec:
    """Window from the config, with unset values taken from the model's window."""
    fallback = fallback or WindowSpec()
    length = config.get("window")
    if length is None:
        length = fallback.length
    if config.get("overlap") is not None:
        return WindowSpec.from_overlap(length, config["overlap"])
    if config.get("step") is not None:
        return WindowSpec(length=length, step=config["step"])
    return WindowSpec(length=length, step=min(fallback.step, length))


class ScanService:
    """Scans a query sequence with a trained model and writes track and segments."""

    def __init__(self, config: RunConfig, on_progress: ProgressCallbackType = print_progress):
        self.config = config
        self.on_progress = on_progress

    def output_paths(self) -> dict[str, Path]:
        prefix = self.config["out"]
        return {"track": Path(f"{prefix}.track.tsv"), "segments": Path(f"{prefix}.segments.tsv")}

    def run(self) -> ServiceResult:
        try:
            return self._run()
        except LateralScanError as e:
            return ServiceResult.failure(e)

    def _run(self) -> ServiceResult:
        c = self.config
        model = load_model(c["model"])
        query = load_record(c["query"], c["record"])
        window = _window(c, model.window)

        track = scan(query, model, window=window, workers=c["workers"], on_progress=self.on_progress)
        smoothed = smooth_track(track, c["smooth_k"])
        segments = call_segments(smoothed, c["min_seg_windows"], c["min_seg_score"])
        self.on_progress(f"Called {len(segments)} candidate donor segment(s)", "success")

        header = header_lines("scan", c.echo(), {"model": c["model"], "query": c["query"]})
        header.append(f"model_id: {model.model_id}")
        paths = self.output_paths()
        with open_output(paths["track"]) as f:
            write_track(smoothed, f, header)
        with open_output(paths["segments"]) as f:
            write_segments(segments, f, header)

        summary = track_summary(smoothed)
        return ServiceResult(
            success=True,
            message=f"{summary.n_windows} windows, {len(segments)} segment(s)",
            stage="scan",
            outputs=paths,
            data={"track": smoothed, "raw_track": track, "segments": segments, "summary": summary},
        )


class SensorService:
    """Writes the raw sensor vector of every window of a sequence."""

    def __init__(self, config: RunConfig, on_progress: ProgressCallbackType = print_progress):
        self.config = config
        self.on_progress = on_progress

    def run(self) -> ServiceResult:
        try:
            return self._run()
        except LateralScanError as e:
            return ServiceResult.failure(e)

    def _run(self) -> ServiceResult:
        c = self.config
        seq = load_record(c["input"], c["record"])
        window = WindowSpec(length=c["window"], step=c["step"])
        records = rolling_scan(seq, window, workers=c["workers"])
        n_no_call = sum(1 for _, v in records if v is None)
        self.on_progress(f"Computed sensors for {len(records)} windows ({n_no_call} no-call)", "info")

        header = header_lines("sensors", c.echo(), {"input": c["input"]})
        path = Path(c["out"])
        with open_output(path) as f:
            write_sensor_track(records, f, header)
        return ServiceResult(
            success=True,
            message=f"Wrote {len(records)} sensor rows",
            stage="sensors",
            outputs={"sensors": path},
            data={"records": records},
        )
