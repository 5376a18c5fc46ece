"""The eight window sensors and the rolling genome scan.

Every sensor is a function of two integer tallies over a clean window: the
base counts and the 16 adjacent-pair (dimer) counts. The per-window
functions and the rolling scan both reduce to `vector_from_counts`, so the
rolling scan reproduces per-window recomputation bit for bit.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from errors import DomainError
from seqio import ALPHABET, INVALID_CODE, NucleotideSequence, WindowSpec, to_codes

logger = logging.getLogger(__name__)

SENSOR_NAMES = ("gc", "cpg", "d_yr", "d_ws", "d_mk", "f_h", "f_i", "f_v")
N_SENSORS = len(SENSOR_NAMES)

A, C, G, T = range(4)


@dataclass(frozen=True)
class BinaryEncoding:
    """A two-class reduction of the nucleotide alphabet."""
    name: str
    ones: frozenset[str]

    def class_of(self, symbol: str) -> int:
        if symbol not in ALPHABET:
            raise DomainError(f"Cannot encode symbol '{symbol}'")
        return 1 if symbol in self.ones else 0

    @property
    def bits(self) -> tuple[int, ...]:
        """Class of each base code A, C, G, T."""
        return tuple(self.class_of(s) for s in ALPHABET)

    def encode(self, window: str) -> str:
        return "".join(str(self.class_of(s)) for s in window)


# purines R, strong S, keto K carry the 1
YR = BinaryEncoding("YR", frozenset("AG"))
WS = BinaryEncoding("WS", frozenset("GC"))
MK = BinaryEncoding("MK", frozenset("GT"))
ENCODINGS = (YR, WS, MK)

DIMER_CLASSES = {
    "AA": "L", "AC": "I", "AG": "L", "AT": "I",
    "CA": "V", "CC": "L", "CG": "V", "CT": "L",
    "GA": "H", "GC": "H", "GG": "L", "GT": "I",
    "TA": "V", "TC": "H", "TG": "V", "TT": "L",
}
TWIST_CLASSES = ("H", "L", "I", "V")

# pair index (4 * first + second) for each class
_CLASS_PAIRS = {
    cls: tuple(ALPHABET.index(d[0]) * 4 + ALPHABET.index(d[1]) for d, c in DIMER_CLASSES.items() if c == cls)
    for cls in TWIST_CLASSES
}


class SensorVector(NamedTuple):
    gc: float
    cpg: float
    d_yr: float
    d_ws: float
    d_mk: float
    f_h: float
    f_i: float
    f_v: float

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=np.float64)


@dataclass(frozen=True)
class DimerCounts:
    """Pair and symbol tallies of a binary-encoded window."""
    n00: int
    n01: int
    n10: int
    n11: int
    n0: int
    n1: int

    @property
    def index(self) -> float:
        if self.n0 == 0 or self.n1 == 0:
            return 0.0
        return (self.n00 * self.n11 - self.n10 * self.n01) / (self.n0 * self.n1)


# --- count primitives ---

def _tally(codes) -> tuple[list[int], list[int]]:
    """Base counts (4) and dimer counts (16) of a clean code array."""
    codes = np.asarray(codes, dtype=np.int64)
    bases = np.bincount(codes, minlength=4)[:4].tolist()
    if len(codes) < 2:
        return bases, [0] * 16
    pairs = np.bincount(codes[:-1] * 4 + codes[1:], minlength=16)[:16].tolist()
    return bases, pairs


def _checked_tally(window: str, min_length: int) -> tuple[list[int], list[int]]:
    if len(window) < min_length:
        raise DomainError(f"Window of length {len(window)} is shorter than {min_length}")
    codes = to_codes(window)
    if (codes >= INVALID_CODE).any():
        raise DomainError("Window contains invalid positions")
    return _tally(codes)


def _gc(bases: list[int], length: int) -> float:
    return (bases[C] + bases[G]) / length


def _cpg(pairs: list[int], length: int) -> float:
    return pairs[C * 4 + G] / (length - 1)


def _binary_counts(bases: list[int], pairs: list[int], encoding: BinaryEncoding) -> DimerCounts:
    bits = encoding.bits
    n = [[0, 0], [0, 0]]
    for first in range(4):
        for second in range(4):
            n[bits[first]][bits[second]] += pairs[first * 4 + second]
    n1 = sum(bases[s] for s in range(4) if bits[s])
    n0 = sum(bases) - n1
    return DimerCounts(n00=n[0][0], n01=n[0][1], n10=n[1][0], n11=n[1][1], n0=n0, n1=n1)


def _class_counts(pairs: list[int]) -> dict[str, int]:
    return {cls: sum(pairs[i] for i in idx) for cls, idx in _CLASS_PAIRS.items()}


def _twist(pairs: list[int], length: int) -> tuple[float, float, float]:
    counts = _class_counts(pairs)
    steps = length - 1
    return counts["H"] / steps, counts["I"] / steps, counts["V"] / steps


def vector_from_counts(bases: list[int], pairs: list[int], length: int) -> SensorVector:
    """Assemble the sensor vector of a clean window from its tallies."""
    f_h, f_i, f_v = _twist(pairs, length)
    return SensorVector(
        gc=_gc(bases, length),
        cpg=_cpg(pairs, length),
        d_yr=_binary_counts(bases, pairs, YR).index,
        d_ws=_binary_counts(bases, pairs, WS).index,
        d_mk=_binary_counts(bases, pairs, MK).index,
        f_h=f_h,
        f_i=f_i,
        f_v=f_v,
    )


# --- per-window sensors ---

def gc_content(window: str) -> float:
    bases, _ = _checked_tally(window, 1)
    return _gc(bases, len(window))


def cpg_content(window: str) -> float:
    """Frequency of the CG step among all dimer steps of the window."""
    _, pairs = _checked_tally(window, 2)
    return _cpg(pairs, len(window))


def dimer_counts(window: str, encoding: BinaryEncoding) -> DimerCounts:
    bases, pairs = _checked_tally(window, 2)
    return _binary_counts(bases, pairs, encoding)


def heterogeneity_index(window: str, encoding: BinaryEncoding) -> float:
    """(N00*N11 - N10*N01) / (N0*N1) over the encoded window; 0 when homogeneous."""
    return dimer_counts(window, encoding).index


def dimer_class_counts(window: str) -> dict[str, int]:
    _, pairs = _checked_tally(window, 2)
    return _class_counts(pairs)


def twist_fractions(window: str) -> tuple[float, float, float]:
    """Fractions of H, I and V steps; L is the remainder."""
    _, pairs = _checked_tally(window, 2)
    return _twist(pairs, len(window))


def sensor_vector(window: str) -> SensorVector:
    bases, pairs = _checked_tally(window, 2)
    return vector_from_counts(bases, pairs, len(window))


# --- rolling scan ---

def _scan_range(codes: list[int], spec: WindowSpec, first: int, stop: int) -> list[tuple[int, SensorVector | None]]:
    """Windows with ordinals [first, stop), updating tallies as the window advances.

    Tallies run over a 5-letter alphabet so invalid positions enter and leave
    the window like any other symbol.
    """
    length, step = spec.length, spec.step
    records = []
    start = first * step
    bases = [0] * 5
    pairs = [0] * 25
    for i in range(start, start + length):
        bases[codes[i]] += 1
    for i in range(start, start + length - 1):
        pairs[codes[i] * 5 + codes[i + 1]] += 1

    for index in range(first, stop):
        if index > first:
            new_start = start + step
            for i in range(start, new_start):
                bases[codes[i]] -= 1
            for i in range(start + length, new_start + length):
                bases[codes[i]] += 1
            for i in range(start, min(new_start, start + length - 1)):
                pairs[codes[i] * 5 + codes[i + 1]] -= 1
            for i in range(max(new_start, start + length - 1), new_start + length - 1):
                pairs[codes[i] * 5 + codes[i + 1]] += 1
            start = new_start

        if bases[INVALID_CODE]:
            records.append((start, None))
            continue
        pairs16 = [pairs[f * 5 + s] for f in range(4) for s in range(4)]
        records.append((start, vector_from_counts(bases[:4], pairs16, length)))
    return records


def rolling_scan(seq: NucleotideSequence, spec: WindowSpec, workers: int = 1) -> list[tuple[int, SensorVector | None]]:
    """Sensor vector (or None for unclean windows) at every window start.

    With workers > 1 the window ordinals are split into contiguous blocks
    scanned independently; the concatenation equals the sequential result.
    """
    if seq.length < spec.length:
        raise DomainError(f"Sequence '{seq.id}' ({seq.length} nt) is shorter than one window ({spec.length} nt)")

    codes = seq.codes.tolist()
    n_windows = spec.count(seq.length)
    workers = max(1, min(workers, n_windows))
    if workers == 1:
        records = _scan_range(codes, spec, 0, n_windows)
    else:
        bounds = np.linspace(0, n_windows, workers + 1).astype(int).tolist()
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = [
                executor.submit(_scan_range, codes, spec, lo, hi)
                for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo
            ]
            records = [record for future in futures for record in future.result()]

    no_calls = sum(1 for _, vector in records if vector is None)
    if no_calls:
        logger.warning("%d of %d windows in '%s' contain invalid positions", no_calls, len(records), seq.id)
    logger.debug("Scanned %d windows over '%s'", len(records), seq.id)
    return records
