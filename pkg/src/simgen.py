"""Markov-chain sequence synthesis and in-silico insertion experiments."""

import logging
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from errors import BoundsError, ConfigError, DomainError
from pipeline import SamplingPlan, sample_fragments
from seqio import ALPHABET, INVALID_CODE, NucleotideSequence, window_at

logger = logging.getLogger(__name__)

DEFAULT_MARKOV_ORDER = 3
_PROBABILITY_TOLERANCE = 1e-12
_SYMBOLS = np.frombuffer(ALPHABET.encode("ascii"), dtype=np.uint8)


@dataclass(frozen=True)
class MarkovModel:
    """Order-k chain over ACGT.

    transitions[c] is the distribution of the next symbol after context c,
    where c is the k-mer read as a base-4 number (A=0 ... T=3, first symbol
    most significant). initial is the distribution of the opening k-mer.
    """
    order: int
    transitions: np.ndarray
    initial: np.ndarray

    def __post_init__(self):
        if self.order < 0:
            raise ConfigError(f"Markov order must be non-negative, got {self.order}")
        n_contexts = 4 ** self.order
        transitions = np.asarray(self.transitions, dtype=np.float64)
        initial = np.asarray(self.initial, dtype=np.float64)
        if transitions.shape != (n_contexts, 4) or initial.shape != (n_contexts,):
            raise ConfigError(f"Order-{self.order} chain needs {n_contexts} contexts")
        if np.any(transitions < 0) or np.any(initial < 0):
            raise ConfigError("Probabilities must be non-negative")
        if np.any(np.abs(transitions.sum(axis=1) - 1) > _PROBABILITY_TOLERANCE):
            raise ConfigError("Transition rows must sum to 1")
        if abs(initial.sum() - 1) > _PROBABILITY_TOLERANCE:
            raise ConfigError("Initial distribution must sum to 1")
        object.__setattr__(self, "transitions", transitions)
        object.__setattr__(self, "initial", initial)


@dataclass(frozen=True)
class InsertionRecord:
    acceptor_id: str
    donor_id: str
    insert_position: int
    insert_length: int

    @property
    def insert_end(self) -> int:
        return self.insert_position + self.insert_length


@dataclass(frozen=True)
class ExperimentBundle:
    chimera: NucleotideSequence
    record: InsertionRecord
    donor_start: int


def _context_index(kmers: np.ndarray) -> np.ndarray:
    """Base-4 value of each row of a k-mer code matrix."""
    k = kmers.shape[1]
    if k == 0:
        return np.zeros(kmers.shape[0], dtype=np.int64)
    powers = 4 ** np.arange(k - 1, -1, -1, dtype=np.int64)
    return kmers.astype(np.int64) @ powers


def fit_markov(seq: NucleotideSequence, order: int = DEFAULT_MARKOV_ORDER) -> MarkovModel:
    """Add-one smoothed transition table from the clean (k+1)-mers of a sequence.

    Contexts touching an invalid position are skipped. The initial
    distribution is the observed frequency of clean k-mers.
    """
    if order < 0:
        raise ConfigError(f"Markov order must be non-negative, got {order}")
    codes = seq.codes
    if len(codes) < order + 1:
        raise DomainError(f"Sequence '{seq.id}' is too short for an order-{order} chain")

    grams = sliding_window_view(codes, order + 1)
    grams = grams[(grams != INVALID_CODE).all(axis=1)]
    if len(grams) == 0:
        raise DomainError(f"Sequence '{seq.id}' has no clean {order + 1}-mer")

    n_contexts = 4 ** order
    cells = _context_index(grams[:, :order]) * 4 + grams[:, order]
    counts = np.bincount(cells, minlength=n_contexts * 4).reshape(n_contexts, 4).astype(np.float64)
    transitions = (counts + 1) / (counts.sum(axis=1, keepdims=True) + 4)

    if order == 0:
        initial = np.ones(1)
    else:
        kmers = sliding_window_view(codes, order)
        kmers = kmers[(kmers != INVALID_CODE).all(axis=1)]
        kmer_counts = np.bincount(_context_index(kmers), minlength=n_contexts).astype(np.float64)
        initial = kmer_counts / kmer_counts.sum()

    logger.debug("Fitted order-%d chain on %d transitions from '%s'", order, len(grams), seq.id)
    return MarkovModel(order=order, transitions=transitions, initial=initial)


def composition_model(gc: float) -> MarkovModel:
    """Order-0 chain with the given G+C fraction, split evenly within each pair."""
    if not 0 <= gc <= 1:
        raise ConfigError(f"GC fraction must be in [0, 1], got {gc}")
    at = (1 - gc) / 2
    return MarkovModel(order=0, transitions=np.array([[at, gc / 2, gc / 2, at]]), initial=np.ones(1))


def generate(model: MarkovModel, length: int, seed: int = 0, seq_id: str = "synthetic") -> NucleotideSequence:
    """Draw `length` symbols from the chain; identical seeds give identical sequences."""
    if length < 0:
        raise ConfigError(f"Length must be non-negative, got {length}")
    if length == 0:
        return NucleotideSequence(id=seq_id, residues="")

    rng = np.random.default_rng(seed & 0xFFFFFFFFFFFFFFFF)
    k = model.order
    cdf = np.cumsum(model.transitions, axis=1)

    if k == 0:
        codes = np.searchsorted(cdf[0, :3], rng.random(length), side="right")
    else:
        context = int(rng.choice(len(model.initial), p=model.initial))
        codes = [(context // 4 ** (k - 1 - j)) % 4 for j in range(k)][:length]
        rows = cdf[:, :3].tolist()
        modulus = 4 ** k
        for u in rng.random(max(0, length - k)).tolist():
            row = rows[context]
            symbol = 0 if u < row[0] else 1 if u < row[1] else 2 if u < row[2] else 3
            codes.append(symbol)
            context = (context * 4 + symbol) % modulus
        codes = np.array(codes, dtype=np.int64)

    residues = _SYMBOLS[codes].tobytes().decode("ascii")
    return NucleotideSequence(id=seq_id, residues=residues)


def insert_fragment(
    acceptor: NucleotideSequence,
    fragment: NucleotideSequence,
    position: int,
) -> tuple[NucleotideSequence, InsertionRecord]:
    """acceptor[:position] + fragment + acceptor[position:]."""
    if not 0 <= position <= acceptor.length:
        raise BoundsError(f"Insert position {position} outside [0, {acceptor.length}]", stage="simulate")
    chimera = NucleotideSequence(
        id=f"{acceptor.id}+{fragment.id}@{position}",
        residues=acceptor.residues[:position] + fragment.residues + acceptor.residues[position:],
    )
    record = InsertionRecord(
        acceptor_id=acceptor.id,
        donor_id=fragment.id,
        insert_position=position,
        insert_length=fragment.length,
    )
    return chimera, record


def make_experiment(
    donor: NucleotideSequence,
    acceptor: NucleotideSequence,
    insert_length: int,
    position: int | None = None,
    seed: int = 0,
) -> ExperimentBundle:
    """Insert a random clean donor fragment into the acceptor (midpoint by default)."""
    if insert_length < 1:
        raise ConfigError(f"Insert length must be positive, got {insert_length}")
    if position is None:
        position = acceptor.length // 2
    plan = SamplingPlan(fragments_per_genome=1, fragment_length=insert_length, seed=seed)
    donor_start = sample_fragments(donor, plan)[0]
    fragment = NucleotideSequence(id=donor.id, residues=window_at(donor, donor_start, insert_length))
    chimera, record = insert_fragment(acceptor, fragment, position)
    logger.info(
        "Inserted %d nt of '%s' (from %d) into '%s' at %d",
        insert_length, donor.id, donor_start, acceptor.id, position,
    )
    return ExperimentBundle(chimera=chimera, record=record, donor_start=donor_start)
