"""FASTA ingestion, validated sequences and window extraction."""

import logging
import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import BinaryIO, Iterable, TextIO

import numpy as np

from errors import BoundsError, ConfigError, FastaFormatError

logger = logging.getLogger(__name__)

INVALID = "N"
ALPHABET = "ACGT"
INVALID_CODE = 4

_NON_ACGT = re.compile(r"[^ACGT]")
_COMPLEMENT = str.maketrans("ACGTN", "TGCAN")
_CODE_LOOKUP = np.full(256, INVALID_CODE, dtype=np.uint8)
for _code, _symbol in enumerate(ALPHABET):
    _CODE_LOOKUP[ord(_symbol)] = _code


@dataclass(frozen=True)
class NucleotideSequence:
    """An uppercase DNA sequence over A, C, G, T and the invalid marker N.

    Every IUPAC ambiguity code (and anything else outside ACGT) is collapsed
    to N when the sequence is built, so each position is exactly one of
    A, C, G, T or invalid.
    """
    id: str
    residues: str

    def __post_init__(self):
        normalized = normalize_residues(self.residues)
        if normalized != self.residues:
            object.__setattr__(self, "residues", normalized)

    @property
    def length(self) -> int:
        return len(self.residues)

    def __len__(self) -> int:
        return len(self.residues)

    @cached_property
    def codes(self) -> np.ndarray:
        """Residues as uint8 codes: A=0, C=1, G=2, T=3, invalid=4."""
        return to_codes(self.residues)

    @property
    def invalid_fraction(self) -> float:
        if not self.residues:
            return 0.0
        return self.residues.count(INVALID) / len(self.residues)


@dataclass(frozen=True)
class WindowSpec:
    """Window length and step, in nucleotides."""
    length: int = 300
    step: int = 30

    def __post_init__(self):
        if self.length < 2:
            raise ConfigError(f"Window length must be at least 2, got {self.length}")
        if self.step < 1 or self.step > self.length:
            raise ConfigError(f"Window step must be in [1, {self.length}], got {self.step}")

    @classmethod
    def from_overlap(cls, length: int, overlap: int) -> "WindowSpec":
        """Build a spec from the overlap between consecutive windows."""
        return cls(length=length, step=length - overlap)

    @property
    def overlap(self) -> int:
        return self.length - self.step

    def count(self, sequence_length: int) -> int:
        """Number of windows that fit in a sequence of the given length."""
        if sequence_length < self.length:
            return 0
        return (sequence_length - self.length) // self.step + 1

    def starts(self, sequence_length: int) -> range:
        return range(0, self.count(sequence_length) * self.step, self.step)


def normalize_residues(text: str) -> str:
    return _NON_ACGT.sub(INVALID, text.upper())


def to_codes(text: str) -> np.ndarray:
    """Map residues to uint8 codes (A=0, C=1, G=2, T=3, anything else 4)."""
    raw = np.frombuffer(text.encode("ascii", errors="replace"), dtype=np.uint8)
    return _CODE_LOOKUP[raw]


def parse_fasta(stream: BinaryIO | TextIO | Iterable[bytes | str]) -> list[NucleotideSequence]:
    """Parse FASTA records from a byte or text stream.

    The id is the header text up to the first whitespace. Sequence lines may
    have any width and LF or CRLF endings.
    """
    records = []
    name = None
    chunks: list[str] = []
    for line_number, line in enumerate(stream, 1):
        if isinstance(line, bytes):
            line = line.decode("ascii", errors="replace")
        line = line.strip()
        if not line:
            continue
        if line.startswith(">"):
            if name is not None:
                records.append(NucleotideSequence(id=name, residues="".join(chunks)))
            header = line[1:].split()
            name = header[0] if header else ""
            chunks = []
        else:
            if name is None:
                raise FastaFormatError(f"Sequence data before any '>' header (line {line_number})")
            chunks.append("".join(line.split()))
    if name is not None:
        records.append(NucleotideSequence(id=name, residues="".join(chunks)))

    if not records:
        raise FastaFormatError("No records found in FASTA input")
    logger.debug("Parsed %d FASTA records", len(records))
    return records


def read_fasta(path: str | Path) -> list[NucleotideSequence]:
    """Parse a FASTA file from disk."""
    with open(path, "rb") as f:
        records = parse_fasta(f)
    logger.info("Read %d record(s) from %s", len(records), path)
    return records


def write_fasta(sequences: Iterable[NucleotideSequence], stream: TextIO, width: int = 60):
    for seq in sequences:
        stream.write(f">{seq.id}\n")
        for i in range(0, seq.length, width):
            stream.write(seq.residues[i:i + width] + "\n")


def select_record(records: list[NucleotideSequence], record_id: str | None = None) -> NucleotideSequence:
    """Pick a record by id, or the first record when no id is given."""
    if record_id is None:
        return records[0]
    for record in records:
        if record.id == record_id:
            return record
    raise FastaFormatError(f"No record with id '{record_id}'")


def window_at(seq: NucleotideSequence, start: int, length: int) -> str:
    """Residues [start, start + length) of the sequence."""
    if length < 1 or start < 0 or start + length > seq.length:
        raise BoundsError(
            f"Window [{start}, {start + length}) outside sequence '{seq.id}' of length {seq.length}"
        )
    return seq.residues[start:start + length]


def is_clean(window: str) -> bool:
    """True iff the window holds no invalid positions."""
    return INVALID not in window


def reverse_complement(seq: NucleotideSequence) -> NucleotideSequence:
    return NucleotideSequence(id=seq.id, residues=seq.residues.translate(_COMPLEMENT)[::-1])
