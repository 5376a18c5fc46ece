"""Scaled-down synthetic insertion experiments, run end to end."""

import pytest

from mlp import TrainConfig
from pipeline import SamplingPlan, train_classifier
from scanner import call_segments, scan, smooth_track
from services.progress import null_progress
from simgen import composition_model, fit_markov, generate, make_experiment

pytestmark = pytest.mark.slow

TRAIN = TrainConfig(learning_rate=0.1, momentum=0.9, epochs=60, seed=0, log_every=0)


def _order3_genome(gc: float, length: int, seed: int, seq_id: str):
    template = generate(composition_model(gc), 200_000, seed=seed, seq_id=f"{seq_id}-template")
    return generate(fit_markov(template, order=3), length, seed=seed + 1, seq_id=seq_id)


def test_inserted_fragment_is_recovered():
    donor = _order3_genome(0.35, 300_000, seed=10, seq_id="donor")
    acceptor = _order3_genome(0.55, 1_000_000, seed=20, seq_id="acceptor")
    bundle = make_experiment(donor, acceptor, insert_length=30_000, seed=7)
    record = bundle.record
    assert record.insert_position == 500_000

    plan = SamplingPlan(fragments_per_genome=2000, fragment_length=300, seed=1)
    model, report = train_classifier(donor, acceptor, plan, train_config=TRAIN, on_progress=null_progress)
    assert report.heldout_accuracy >= 0.99

    track = smooth_track(scan(bundle.chimera, model, on_progress=null_progress), 9)
    segments = call_segments(track, 10)
    assert len(segments) == 1
    segment = segments[0]
    overlap = min(segment.end_nt, record.insert_end) - max(segment.start_nt, record.insert_position)
    union = max(segment.end_nt, record.insert_end) - min(segment.start_nt, record.insert_position)
    assert overlap / union >= 0.9

    lo, hi = record.insert_position - 600, record.insert_end + 600
    outside = [p for p in track.points if p.end <= lo or p.start >= hi]
    false_donor = sum(1 for p in outside if p.label == 1)
    assert false_donor <= 0.01 * len(outside)



def test_null_control_calls_no_segments():
    chain = fit_markov(generate(composition_model(0.5), 200_000, seed=3, seq_id="template"), order=3)
    accuracies, segment_counts = [], []
    for seed in range(5):
        donor = generate(chain, 200_000, seed=10 + seed, seq_id="donor")
        acceptor = generate(chain, 200_000, seed=50 + seed, seq_id="acceptor")
        plan = SamplingPlan(fragments_per_genome=5000, fragment_length=300, seed=seed)
        config = TrainConfig(learning_rate=0.1, momentum=0.9, epochs=10, seed=seed, log_every=0)
        model, report = train_classifier(donor, acceptor, plan, train_config=config, on_progress=null_progress)
        accuracies.append(report.heldout_accuracy)

        track = smooth_track(scan(acceptor, model, on_progress=null_progress), 9)
        segment_counts.append(len(call_segments(track, 10)))

    assert all(0.45 <= a <= 0.55 for a in accuracies), accuracies
    assert sum(1 for n in segment_counts if n == 0) >= 4, segment_counts
