import numpy as np
import pytest

from seqio import ALPHABET, NucleotideSequence
from simgen import composition_model, generate


def random_residues(rng: np.random.Generator, length: int, n_fraction: float = 0.0) -> str:
    letters = np.array(list(ALPHABET + "N"))
    p = np.array([1, 1, 1, 1, 0], dtype=float) * (1 - n_fraction) / 4
    p[4] = n_fraction
    return "".join(rng.choice(letters, size=length, p=p))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def make_sequence(rng):
    def _make(length: int, n_fraction: float = 0.0, seq_id: str = "rand") -> NucleotideSequence:
        return NucleotideSequence(id=seq_id, residues=random_residues(rng, length, n_fraction))
    return _make


@pytest.fixture(scope="session")
def gc_genomes():
    """A low-GC donor and a high-GC acceptor, easy to tell apart."""
    donor = generate(composition_model(0.30), 60_000, seed=1, seq_id="donor")
    acceptor = generate(composition_model(0.70), 60_000, seed=2, seq_id="acceptor")
    return donor, acceptor


@pytest.fixture
def fasta_file(tmp_path):
    def _write(name: str, records: list[NucleotideSequence]):
        from seqio import write_fasta
        path = tmp_path / name
        with open(path, "w") as f:
            write_fasta(records, f)
        return path
    return _write
