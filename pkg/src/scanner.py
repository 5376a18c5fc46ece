"""Prediction stage: slide a window along a sequence, classify, smooth and call segments."""

import logging
from dataclasses import dataclass, replace

import mlp
from errors import ConfigError, DomainError
from mlp import MlpModel
from seqio import NucleotideSequence, WindowSpec
from sensors import rolling_scan
from services.progress import ProgressCallbackType, log_progress

logger = logging.getLogger(__name__)

DEFAULT_SMOOTH_K = 9
DEFAULT_MIN_SEGMENT_WINDOWS = 10
# Mean raw output a run must reach to be reported. A chance-level network
# hovers around 0.5 and must not produce segments.
DEFAULT_MIN_SEGMENT_SCORE = 0.75


@dataclass(frozen=True)
class TrackPoint:
    """One window of a scan. raw and label are None for no-call windows."""
    index: int
    start: int
    end: int
    raw: float | None
    label: int | None

    @property
    def called(self) -> bool:
        return self.label is not None


@dataclass
class ScanTrack:
    points: list[TrackPoint]
    window: WindowSpec
    model_id: str = ""

    def __len__(self) -> int:
        return len(self.points)

    @property
    def labels(self) -> list[int | None]:
        return [p.label for p in self.points]


@dataclass(frozen=True)
class Segment:
    start_nt: int
    end_nt: int
    n_windows: int
    mean_raw: float
    first_index: int
    last_index: int

    @property
    def length(self) -> int:
        return self.end_nt - self.start_nt


@dataclass
class TrackSummary:
    n_windows: int
    n_called: int
    n_no_call: int
    n_donor: int

    @property
    def donor_fraction(self) -> float:
        return self.n_donor / self.n_called if self.n_called else 0.0


def index_to_nt(index: int, step: int) -> int:
    """Start coordinate of window number `index`."""
    return index * step


def nt_to_index(position: int, step: int) -> int:
    """Ordinal of the last window starting at or before `position`."""
    return position // step


def scan(
    seq: NucleotideSequence,
    model: MlpModel,
    window: WindowSpec | None = None,
    workers: int = 1,
    on_progress: ProgressCallbackType = log_progress,
) -> ScanTrack:
    """Classify every window of the sequence.

    The window defaults to the one stored in the model; a different one can be
    passed to scan with another step (or length). Unclean windows become
    no-call points.
    """
    if model.normalization is None:
        raise DomainError("Model has no normalization parameters", stage="scan")
    window = window or model.window or WindowSpec()
    if seq.length < window.length:
        raise DomainError(
            f"Sequence '{seq.id}' ({seq.length} nt) is shorter than one window ({window.length} nt)",
            stage="scan",
        )

    points = []
    for index, (start, vector) in enumerate(rolling_scan(seq, window, workers=workers)):
        if vector is None:
            points.append(TrackPoint(index, start, start + window.length, None, None))
            continue
        raw, label = mlp.classify(model, model.normalization.apply(vector.as_array()))
        points.append(TrackPoint(index, start, start + window.length, raw, label))

    track = ScanTrack(points=points, window=window, model_id=model.model_id)
    summary = track_summary(track)
    on_progress(
        f"Scanned {summary.n_windows} windows of '{seq.id}': {summary.n_donor} donor, "
        f"{summary.n_no_call} no-call",
        "info",
    )
    return track


def smooth_track(track: ScanTrack, k: int = DEFAULT_SMOOTH_K) -> ScanTrack:
    """Majority vote of called labels over a centred k-window neighbourhood.

    No-call points take no part in votes and stay no-call; a tied vote keeps
    the point's own label. Raw values are left untouched.
    """
    if k < 1 or k % 2 == 0:
        raise ConfigError(f"Smoothing window must be a positive odd integer, got {k}")
    if k == 1:
        return replace(track, points=list(track.points))

    half = k // 2
    labels = track.labels
    n = len(labels)
    # running counts of called ones and zeros, prefix style
    ones = [0] * (n + 1)
    zeros = [0] * (n + 1)
    for i, label in enumerate(labels):
        ones[i + 1] = ones[i] + (label == 1)
        zeros[i + 1] = zeros[i] + (label == 0)

    points = []
    for i, point in enumerate(track.points):
        if not point.called:
            points.append(point)
            continue
        lo, hi = max(0, i - half), min(n, i + half + 1)
        n_ones, n_zeros = ones[hi] - ones[lo], zeros[hi] - zeros[lo]
        if n_ones > n_zeros:
            label = 1
        elif n_zeros > n_ones:
            label = 0
        else:
            label = point.label
        points.append(replace(point, label=label))
    return replace(track, points=points)


def call_segments(
    track: ScanTrack,
    min_segment_windows: int = DEFAULT_MIN_SEGMENT_WINDOWS,
    min_score: float = DEFAULT_MIN_SEGMENT_SCORE,
) -> list[Segment]:
    """Maximal runs of consecutive donor-labelled points at least min_segment_windows long.

    No-call points break runs. A segment spans from its first window's start
    to its last window's end. Runs whose mean raw output is below min_score
    are dropped.
    """
    if min_segment_windows < 1:
        raise ConfigError(f"min_segment_windows must be positive, got {min_segment_windows}")
    if not 0.0 <= min_score <= 1.0:
        raise ConfigError(f"min_score must lie in [0, 1], got {min_score}")

    segments = []
    run: list[TrackPoint] = []
    for point in track.points + [None]:
        if point is not None and point.label == 1:
            run.append(point)
            continue
        mean_raw = sum(p.raw for p in run) / len(run) if run else 0.0
        if len(run) >= min_segment_windows and mean_raw >= min_score:
            segments.append(Segment(
                start_nt=run[0].start,
                end_nt=run[-1].end,
                n_windows=len(run),
                mean_raw=mean_raw,
                first_index=run[0].index,
                last_index=run[-1].index,
            ))
        run = []

    logger.info(
        "Called %d segment(s) with at least %d windows and mean score %.2f",
        len(segments), min_segment_windows, min_score,
    )
    return segments


def track_summary(track: ScanTrack) -> TrackSummary:
    called = [p for p in track.points if p.called]
    return TrackSummary(
        n_windows=len(track.points),
        n_called=len(called),
        n_no_call=len(track.points) - len(called),
        n_donor=sum(1 for p in called if p.label == 1),
    )
