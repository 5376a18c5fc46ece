"""Training stage: fragment sampling, sensor evaluation, normalization and fitting."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

import mlp
from errors import ConfigError, DomainError, SamplingError
from mlp import LabeledExample, MlpModel, NormalizationParams, TrainConfig
from seqio import INVALID_CODE, NucleotideSequence, WindowSpec
from sensors import N_SENSORS, SensorVector, sensor_vector
from services.progress import ProgressCallbackType, log_progress

logger = logging.getLogger(__name__)

DONOR_LABEL = 1
ACCEPTOR_LABEL = 0

# independent random streams derived from one plan seed
TRAIN_DONOR_STREAM = 0
TRAIN_ACCEPTOR_STREAM = 1
HELDOUT_DONOR_STREAM = 2
HELDOUT_ACCEPTOR_STREAM = 3

HELDOUT_FRACTION = 10
_DRAW_BATCH = 4096


@dataclass(frozen=True)
class SamplingPlan:
    fragments_per_genome: int = 10000
    fragment_length: int = 300
    seed: int = 0
    max_resample_attempts: int | None = None

    def __post_init__(self):
        if self.fragments_per_genome < 1:
            raise ConfigError(f"fragments_per_genome must be positive, got {self.fragments_per_genome}")
        if self.fragment_length < 2:
            raise ConfigError(f"fragment_length must be at least 2, got {self.fragment_length}")
        if self.max_resample_attempts is not None and self.max_resample_attempts < 1:
            raise ConfigError(f"max_resample_attempts must be positive, got {self.max_resample_attempts}")

    @property
    def attempt_budget(self) -> int:
        if self.max_resample_attempts is not None:
            return self.max_resample_attempts
        return 1000 * self.fragments_per_genome

    def heldout(self) -> "SamplingPlan":
        """Plan for the independently drawn evaluation set."""
        return SamplingPlan(
            fragments_per_genome=max(1, self.fragments_per_genome // HELDOUT_FRACTION),
            fragment_length=self.fragment_length,
            seed=self.seed,
            max_resample_attempts=self.max_resample_attempts,
        )


@dataclass
class TrainingSet:
    examples: list[LabeledExample]
    donor_id: str
    acceptor_id: str
    plan: SamplingPlan
    donor_starts: list[int] = field(default_factory=list)
    acceptor_starts: list[int] = field(default_factory=list)

    @property
    def provenance(self) -> tuple[str, str, SamplingPlan]:
        return self.donor_id, self.acceptor_id, self.plan

    @property
    def features(self) -> np.ndarray:
        return np.stack([e.features for e in self.examples])

    @property
    def labels(self) -> np.ndarray:
        return np.array([e.label for e in self.examples], dtype=int)


@dataclass
class Evaluation:
    accuracy: float
    donor_recall: float
    acceptor_recall: float
    n_examples: int


@dataclass
class TrainingReport:
    loss_history: list[float]
    evaluation: Evaluation
    n_train: int
    architecture: str
    plan: SamplingPlan
    train_config: TrainConfig
    window: WindowSpec

    @property
    def heldout_accuracy(self) -> float:
        return self.evaluation.accuracy

    @property
    def epochs_run(self) -> int:
        return len(self.loss_history)

    @property
    def final_loss(self) -> float:
        return self.loss_history[-1]


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, stream])


def sample_fragments(seq: NucleotideSequence, plan: SamplingPlan, stream: int = TRAIN_DONOR_STREAM) -> list[int]:
    """Uniform random clean fragment starts, drawn with replacement.

    Starts whose fragment holds an invalid position are rejected and redrawn
    until plan.attempt_budget draws have been spent.
    """
    length = plan.fragment_length
    if seq.length < length:
        raise DomainError(f"Sequence '{seq.id}' ({seq.length} nt) is shorter than a fragment ({length} nt)")

    invalid = np.concatenate(([0], np.cumsum(seq.codes == INVALID_CODE)))
    n_starts = seq.length - length + 1
    rng = _rng(plan.seed, stream)
    wanted = plan.fragments_per_genome
    budget = plan.attempt_budget

    starts: list[int] = []
    drawn = 0
    while len(starts) < wanted:
        if drawn >= budget:
            raise SamplingError(
                f"Found only {len(starts)} of {wanted} clean fragments in '{seq.id}' "
                f"after {drawn} draws"
            )
        batch = rng.integers(0, n_starts, size=_DRAW_BATCH)
        clean = invalid[batch + length] == invalid[batch]
        for start, ok in zip(batch[: budget - drawn].tolist(), clean.tolist()):
            drawn += 1
            if ok:
                starts.append(start)
                if len(starts) == wanted:
                    break

    logger.debug("Sampled %d fragments from '%s' in %d draws", wanted, seq.id, drawn)
    return starts


def _evaluate_fragments(seq: NucleotideSequence, starts: list[int], length: int, workers: int) -> list[SensorVector]:
    windows = (seq.residues[s:s + length] for s in starts)
    if workers <= 1:
        return [sensor_vector(w) for w in windows]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(sensor_vector, windows, chunksize=256))


def build_training_set(
    donor: NucleotideSequence,
    acceptor: NucleotideSequence,
    plan: SamplingPlan,
    workers: int = 1,
    streams: tuple[int, int] = (TRAIN_DONOR_STREAM, TRAIN_ACCEPTOR_STREAM),
    on_progress: ProgressCallbackType = log_progress,
) -> TrainingSet:
    """Donor fragments labelled 1, acceptor fragments labelled 0, raw sensor features."""
    donor_starts = sample_fragments(donor, plan, stream=streams[0])
    acceptor_starts = sample_fragments(acceptor, plan, stream=streams[1])
    on_progress(
        f"Sampled {len(donor_starts)} donor and {len(acceptor_starts)} acceptor fragments "
        f"of {plan.fragment_length} nt",
        "info",
    )

    examples = [
        LabeledExample(features=v.as_array(), label=DONOR_LABEL)
        for v in _evaluate_fragments(donor, donor_starts, plan.fragment_length, workers)
    ]
    examples += [
        LabeledExample(features=v.as_array(), label=ACCEPTOR_LABEL)
        for v in _evaluate_fragments(acceptor, acceptor_starts, plan.fragment_length, workers)
    ]
    return TrainingSet(
        examples=examples,
        donor_id=donor.id,
        acceptor_id=acceptor.id,
        plan=plan,
        donor_starts=donor_starts,
        acceptor_starts=acceptor_starts,
    )


def fit_normalization(examples: list[LabeledExample] | np.ndarray) -> NormalizationParams:
    """Per-feature mean and population standard deviation (floored)."""
    if isinstance(examples, np.ndarray):
        matrix = examples
    else:
        matrix = np.stack([e.features for e in examples]) if examples else np.empty((0, 0))
    if matrix.shape[0] == 0:
        raise ConfigError("Cannot fit normalization on an empty set")
    return NormalizationParams(means=matrix.mean(axis=0), stddevs=matrix.std(axis=0))


def apply_normalization(params: NormalizationParams, features) -> np.ndarray:
    return params.apply(features)


def invert_normalization(params: NormalizationParams, normalized) -> np.ndarray:
    return params.invert(normalized)


def evaluate(model: MlpModel, training_set: TrainingSet) -> Evaluation:
    """Accuracy and per-class recall of a normalizing model on a labelled set."""
    labels = training_set.labels
    raw = mlp.predict_many(model, apply_normalization(model.normalization, training_set.features))
    predicted = (raw >= mlp.DECISION_THRESHOLD).astype(int)
    correct = predicted == labels

    def recall(label: int) -> float:
        mask = labels == label
        return float(correct[mask].mean()) if mask.any() else float("nan")

    return Evaluation(
        accuracy=float(correct.mean()),
        donor_recall=recall(DONOR_LABEL),
        acceptor_recall=recall(ACCEPTOR_LABEL),
        n_examples=len(labels),
    )


def train_classifier(
    donor: NucleotideSequence,
    acceptor: NucleotideSequence,
    plan: SamplingPlan,
    layer_sizes=mlp.DEFAULT_LAYER_SIZES,
    train_config: TrainConfig | None = None,
    scan_step: int = 30,
    workers: int = 1,
    on_progress: ProgressCallbackType = log_progress,
) -> tuple[MlpModel, TrainingReport]:
    """Sample, normalize and train; evaluate on an independently drawn held-out set.

    The returned model carries its normalization parameters and the window
    (fragment length, scan_step) it should be scanned with.
    """
    train_config = train_config or TrainConfig()
    layer_sizes = tuple(layer_sizes)
    if layer_sizes[0] != N_SENSORS or layer_sizes[-1] != 1:
        raise ConfigError(f"Layer sizes must start at {N_SENSORS} and end at 1, got {list(layer_sizes)}")
    window = WindowSpec(length=plan.fragment_length, step=min(scan_step, plan.fragment_length))

    training_set = build_training_set(donor, acceptor, plan, workers=workers, on_progress=on_progress)
    params = fit_normalization(training_set.examples)
    normalized = [
        LabeledExample(features=apply_normalization(params, e.features), label=e.label)
        for e in training_set.examples
    ]

    on_progress(f"Training {'-'.join(map(str, layer_sizes))} network on {len(normalized)} examples", "info")
    model = mlp.init(layer_sizes, seed=train_config.seed, init_scale=train_config.init_scale)
    model, history = mlp.train(model, normalized, train_config, on_progress=on_progress)
    model.normalization = params
    model.window = window

    heldout = build_training_set(
        donor, acceptor, plan.heldout(), workers=workers,
        streams=(HELDOUT_DONOR_STREAM, HELDOUT_ACCEPTOR_STREAM),
        on_progress=on_progress,
    )
    evaluation = evaluate(model, heldout)
    on_progress(f"Held-out accuracy {evaluation.accuracy:.4f} on {evaluation.n_examples} fragments", "success")

    report = TrainingReport(
        loss_history=history,
        evaluation=evaluation,
        n_train=len(normalized),
        architecture=model.architecture,
        plan=plan,
        train_config=train_config,
        window=window,
    )
    return model, report
