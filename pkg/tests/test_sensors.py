import numpy as np
import pytest

from errors import DomainError
from seqio import NucleotideSequence, WindowSpec, reverse_complement
from sensors import (
    MK,
    WS,
    YR,
    BinaryEncoding,
    DIMER_CLASSES,
    SENSOR_NAMES,
    cpg_content,
    dimer_class_counts,
    gc_content,
    heterogeneity_index,
    rolling_scan,
    sensor_vector,
    twist_fractions,
)

from conftest import random_residues


@pytest.mark.parametrize("window, expected", [("ACGT", 0.5), ("GGGG", 1.0), ("AATGC", 0.4)])
def test_gc_content(window, expected):
    assert gc_content(window) == pytest.approx(expected)


@pytest.mark.parametrize("window, expected", [("ACGT", 1 / 3), ("CGCG", 2 / 3), ("AAAA", 0.0)])
def test_cpg_content(window, expected):
    assert cpg_content(window) == pytest.approx(expected)


@pytest.mark.parametrize("window", ["", "A", "ACNT"])
def test_cpg_rejects_short_or_unclean(window):
    with pytest.raises(DomainError):
        cpg_content(window)


def test_gc_rejects_empty():
    with pytest.raises(DomainError):
        gc_content("")


@pytest.mark.parametrize("window", ["acgt", "ACXT", "AC-T"])
def test_unnormalized_windows_are_rejected(window):
    with pytest.raises(DomainError):
        gc_content(window)
    with pytest.raises(DomainError):
        sensor_vector(window)


def test_encodings():
    assert YR.encode("ACGT") == "1010"
    assert WS.encode("ACGT") == "0110"
    assert MK.encode("ACGT") == "0011"


# windows whose encoding under MK spells the binary string
@pytest.mark.parametrize("window, expected", [("AAGG", 0.25), ("AGAG", -0.5), ("AAAA", 0.0)])
def test_heterogeneity_index(window, expected):
    assert heterogeneity_index(window, MK) == pytest.approx(expected)


def test_heterogeneity_is_symmetric_under_class_swap(rng):
    swapped = BinaryEncoding("MK'", frozenset("AC"))
    for _ in range(200):
        window = random_residues(rng, int(rng.integers(2, 60)))
        assert heterogeneity_index(window, swapped) == pytest.approx(heterogeneity_index(window, MK), abs=1e-15)


def test_dimer_class_table_is_complete():
    assert len(DIMER_CLASSES) == 16
    assert set(DIMER_CLASSES.values()) == {"H", "L", "I", "V"}


@pytest.mark.parametrize("window, expected", [
    ("GAGC", (2 / 3, 0, 0)),
    ("ACGT", (0, 2 / 3, 1 / 3)),
    ("AAAA", (0, 0, 0)),
])
def test_twist_fractions(window, expected):
    assert twist_fractions(window) == pytest.approx(expected)


def test_sensor_vector_example():
    vector = sensor_vector("ACGT")
    assert vector == pytest.approx([0.5, 1 / 3, -0.5, -0.25, 0.25, 0, 2 / 3, 1 / 3])
    assert vector._fields == SENSOR_NAMES


def test_homogeneous_window_is_all_zero():
    assert sensor_vector("A" * 300) == tuple([0.0] * 8)


def test_sensor_vector_matches_individual_sensors(rng):
    for _ in range(50):
        window = random_residues(rng, 300)
        v = sensor_vector(window)
        assert v.gc == gc_content(window)
        assert v.cpg == cpg_content(window)
        assert (v.d_yr, v.d_ws, v.d_mk) == tuple(heterogeneity_index(window, e) for e in (YR, WS, MK))
        assert (v.f_h, v.f_i, v.f_v) == twist_fractions(window)
        assert sensor_vector(window) == v


def test_bounds_on_random_windows(rng):
    for _ in range(2000):
        length = int(rng.integers(2, 400))
        window = random_residues(rng, length)
        v = sensor_vector(window)
        for value in (v.gc, v.cpg, v.f_h, v.f_i, v.f_v):
            assert 0.0 <= value <= 1.0
        for value in (v.d_yr, v.d_ws, v.d_mk):
            assert -1.0 <= value <= 1.0
        assert v.f_h + v.f_i + v.f_v <= 1.0 + 1e-12
        assert sum(dimer_class_counts(window).values()) == length - 1


def test_gc_reverse_complement(rng):
    for _ in range(100):
        seq = NucleotideSequence("w", random_residues(rng, 120))
        assert gc_content(seq.residues) == pytest.approx(gc_content(reverse_complement(seq).residues), abs=1e-15)


@pytest.mark.parametrize("length, expected_starts", [(300, [0]), (360, [0, 30, 60])])
def test_rolling_scan_counts(make_sequence, length, expected_starts):
    records = rolling_scan(make_sequence(length), WindowSpec(300, 30))
    assert [start for start, _ in records] == expected_starts


def test_rolling_scan_too_short(make_sequence):
    with pytest.raises(DomainError):
        rolling_scan(make_sequence(299), WindowSpec(300, 30))


def _assert_matches_naive(seq, spec, records):
    assert len(records) == spec.count(seq.length)
    for start, vector in records:
        window = seq.residues[start:start + spec.length]
        if "N" in window:
            assert vector is None
        else:
            assert vector is not None
            np.testing.assert_allclose(vector.as_array(), sensor_vector(window).as_array(), rtol=0, atol=1e-12)


def test_rolling_scan_matches_naive(rng, make_sequence):
    for _ in range(30):
        length = int(rng.integers(500, 3000))
        spec = WindowSpec(int(rng.integers(50, 301)), int(rng.integers(1, 51)))
        seq = make_sequence(length, n_fraction=0.002)
        _assert_matches_naive(seq, spec, rolling_scan(seq, spec))


def test_rolling_scan_step_longer_than_overlap(make_sequence):
    seq = make_sequence(2000, n_fraction=0.01)
    spec = WindowSpec(50, 50)
    _assert_matches_naive(seq, spec, rolling_scan(seq, spec))


def test_rolling_scan_workers_are_identical(make_sequence):
    seq = make_sequence(5000, n_fraction=0.001)
    spec = WindowSpec(300, 7)
    assert rolling_scan(seq, spec, workers=4) == rolling_scan(seq, spec, workers=1)


@pytest.mark.slow
def test_rolling_scan_oracle_large(rng, make_sequence):
    for _ in range(200):
        length = int(rng.integers(500, 20001))
        spec = WindowSpec(int(rng.integers(50, 301)), int(rng.integers(1, 51)))
        seq = make_sequence(length, n_fraction=0.0005)
        _assert_matches_naive(seq, spec, rolling_scan(seq, spec))


@pytest.mark.slow
def test_bounds_on_many_windows(rng):
    for _ in range(100_000):
        window = random_residues(rng, 300)
        v = sensor_vector(window)
        assert all(0.0 <= x <= 1.0 for x in (v.gc, v.cpg, v.f_h, v.f_i, v.f_v))
        assert all(-1.0 <= x <= 1.0 for x in (v.d_yr, v.d_ws, v.d_mk))
        assert v.f_h + v.f_i + v.f_v <= 1.0 + 1e-12
