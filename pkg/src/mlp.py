"""Feed-forward multilayer perceptron trained by per-example backpropagation."""

import hashlib
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from errors import ConfigError, LateralScanError, ModelFormatError, ShapeError
from seqio import WindowSpec
from sensors import SENSOR_NAMES
from services.progress import ProgressCallbackType, log_progress

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
DEFAULT_LAYER_SIZES = (8, 5, 1)
STDDEV_FLOOR = 1e-8
DECISION_THRESHOLD = 0.5

# pre-activations are clipped so sigmoid outputs stay strictly inside (0, 1)
_Z_LIMIT = 36.0


@dataclass(frozen=True)
class NormalizationParams:
    """Per-feature z-score parameters frozen at training time."""
    means: np.ndarray
    stddevs: np.ndarray

    def __post_init__(self):
        means = np.asarray(self.means, dtype=np.float64)
        stddevs = np.maximum(np.asarray(self.stddevs, dtype=np.float64), STDDEV_FLOOR)
        if means.shape != stddevs.shape or means.ndim != 1:
            raise ShapeError(f"Normalization means {means.shape} and stddevs {stddevs.shape} differ")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "stddevs", stddevs)

    def apply(self, features) -> np.ndarray:
        features = np.asarray(features, dtype=np.float64)
        if features.shape[-1] != self.means.shape[0]:
            raise ShapeError(f"Expected {self.means.shape[0]} features, got {features.shape[-1]}")
        return (features - self.means) / self.stddevs

    def invert(self, normalized) -> np.ndarray:
        return np.asarray(normalized, dtype=np.float64) * self.stddevs + self.means


@dataclass
class MlpModel:
    """Layer sizes, parameters and the metadata needed to scan with the model.

    weights[l] has shape (layer_sizes[l + 1], layer_sizes[l]); biases[l] has
    length layer_sizes[l + 1]. Every non-input layer is a logistic sigmoid.
    """
    layer_sizes: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    normalization: NormalizationParams | None = None
    window: WindowSpec | None = None

    def __post_init__(self):
        self.layer_sizes = tuple(int(n) for n in self.layer_sizes)
        _check_layer_sizes(self.layer_sizes)
        if len(self.weights) != len(self.layer_sizes) - 1 or len(self.biases) != len(self.weights):
            raise ShapeError("Parameter count does not match layer sizes")
        for layer, (w, b) in enumerate(zip(self.weights, self.biases)):
            expected = (self.layer_sizes[layer + 1], self.layer_sizes[layer])
            if w.shape != expected or b.shape != (expected[0],):
                raise ShapeError(f"Layer {layer + 1}: weights {w.shape}, biases {b.shape}, expected {expected}")

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]

    @property
    def architecture(self) -> str:
        return "-".join(str(n) for n in self.layer_sizes)

    @property
    def model_id(self) -> str:
        digest = hashlib.sha256()
        digest.update(self.architecture.encode())
        for w, b in zip(self.weights, self.biases):
            digest.update(np.ascontiguousarray(w).tobytes())
            digest.update(np.ascontiguousarray(b).tobytes())
        return digest.hexdigest()[:12]

    def copy(self) -> "MlpModel":
        return replace(
            self,
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
        )


@dataclass
class TrainConfig:
    learning_rate: float = 0.1
    momentum: float = 0.9
    epochs: int = 500
    seed: int = 0
    init_scale: float = 0.5
    early_stop: float | None = None
    log_every: int = 50

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if not 0 <= self.momentum < 1:
            raise ConfigError(f"momentum must be in [0, 1), got {self.momentum}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be at least 1, got {self.epochs}")
        if not self.init_scale >= 0:
            raise ConfigError(f"init_scale must be non-negative, got {self.init_scale}")


@dataclass
class LabeledExample:
    features: np.ndarray
    label: int

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        if self.label not in (0, 1):
            raise ConfigError(f"Label must be 0 or 1, got {self.label}")


@dataclass
class Gradients:
    weights: list[np.ndarray] = field(default_factory=list)
    biases: list[np.ndarray] = field(default_factory=list)


def _check_layer_sizes(layer_sizes) -> None:
    if len(layer_sizes) < 2:
        raise ConfigError(f"Need at least an input and an output layer, got {list(layer_sizes)}")
    if any(n < 1 for n in layer_sizes):
        raise ConfigError(f"Layer sizes must be positive, got {list(layer_sizes)}")
    if layer_sizes[-1] != 1:
        raise ConfigError(f"Output layer must have exactly one unit, got {list(layer_sizes)}")


def sigmoid(z):
    return 1.0 / (1.0 + np.exp(-np.clip(z, -_Z_LIMIT, _Z_LIMIT)))


def init(layer_sizes=DEFAULT_LAYER_SIZES, seed: int = 0, init_scale: float = 0.5) -> MlpModel:
    """Parameters drawn uniformly from [-init_scale, init_scale], layer by layer."""
    layer_sizes = tuple(layer_sizes)
    _check_layer_sizes(layer_sizes)
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for n_in, n_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        weights.append(rng.uniform(-init_scale, init_scale, size=(n_out, n_in)) + 0.0)
        biases.append(rng.uniform(-init_scale, init_scale, size=n_out) + 0.0)
    return MlpModel(layer_sizes=layer_sizes, weights=weights, biases=biases)


def _as_input(model: MlpModel, features) -> np.ndarray:
    x = np.asarray(features, dtype=np.float64)
    if x.shape != (model.n_inputs,):
        raise ShapeError(f"Expected {model.n_inputs} features, got shape {x.shape}")
    return x


def _forward(weights, biases, x) -> list[np.ndarray]:
    activations = [x]
    for w, b in zip(weights, biases):
        activations.append(sigmoid(w @ activations[-1] + b))
    return activations


def _backward(weights, activations, label) -> tuple[list[np.ndarray], list[np.ndarray]]:
    out = activations[-1]
    delta = (out - label) * out * (1.0 - out)
    grad_w = [None] * len(weights)
    grad_b = [None] * len(weights)
    for layer in range(len(weights) - 1, -1, -1):
        grad_w[layer] = np.outer(delta, activations[layer])
        grad_b[layer] = delta
        if layer:
            a = activations[layer]
            delta = (weights[layer].T @ delta) * a * (1.0 - a)
    return grad_w, grad_b


def forward(model: MlpModel, features) -> tuple[float, list[np.ndarray]]:
    """Network output and the activations of every layer (input first)."""
    activations = _forward(model.weights, model.biases, _as_input(model, features))
    return float(activations[-1][0]), activations


def loss(output: float, label: int) -> float:
    """Halved squared error."""
    return 0.5 * (output - label) ** 2


def gradients(model: MlpModel, example: LabeledExample) -> Gradients:
    activations = _forward(model.weights, model.biases, _as_input(model, example.features))
    grad_w, grad_b = _backward(model.weights, activations, example.label)
    return Gradients(weights=grad_w, biases=grad_b)


def train(
    model: MlpModel,
    examples: list[LabeledExample],
    config: TrainConfig,
    on_progress: ProgressCallbackType = log_progress,
) -> tuple[MlpModel, list[float]]:
    """Stochastic gradient descent with momentum, one update per example.

    Example order is reshuffled every epoch from a generator seeded by
    config.seed. Returns a new model and the mean loss of each epoch, measured
    on the fly as the examples are visited. Training stops early once an
    epoch's mean loss falls below config.early_stop.
    """
    if not examples:
        raise ConfigError("Training set is empty")
    labels = {e.label for e in examples}
    if len(labels) < 2:
        on_progress(f"Training set only contains label {labels.pop()}", "warning")

    X = np.stack([_as_input(model, e.features) for e in examples])
    y = np.array([e.label for e in examples], dtype=np.float64)
    trained = model.copy()
    weights, biases = trained.weights, trained.biases
    vel_w = [np.zeros_like(w) for w in weights]
    vel_b = [np.zeros_like(b) for b in biases]
    rng = np.random.default_rng(config.seed)
    lr, momentum = config.learning_rate, config.momentum

    history = []
    for epoch in range(1, config.epochs + 1):
        total = 0.0
        for i in rng.permutation(len(X)):
            activations = _forward(weights, biases, X[i])
            total += loss(float(activations[-1][0]), y[i])
            grad_w, grad_b = _backward(weights, activations, y[i])
            for layer in range(len(weights)):
                vel_w[layer] *= momentum
                vel_w[layer] -= lr * grad_w[layer]
                weights[layer] += vel_w[layer]
                vel_b[layer] *= momentum
                vel_b[layer] -= lr * grad_b[layer]
                biases[layer] += vel_b[layer]
        mean_loss = total / len(X)
        history.append(mean_loss)

        if not math.isfinite(mean_loss):
            raise LateralScanError(f"Training diverged at epoch {epoch}", stage="training")
        if config.log_every and epoch % config.log_every == 0:
            on_progress(f"Epoch {epoch}/{config.epochs}: mean loss {mean_loss:.6f}", "info")
        if config.early_stop is not None and mean_loss < config.early_stop:
            logger.info("Early stop at epoch %d (mean loss %.6g)", epoch, mean_loss)
            break

    return trained, history


def classify(model: MlpModel, features) -> tuple[float, int]:
    """Raw output and label; a raw output of exactly 0.5 is labelled 1 (donor)."""
    raw, _ = forward(model, features)
    return raw, int(raw >= DECISION_THRESHOLD)


def predict_many(model: MlpModel, matrix) -> np.ndarray:
    """Raw outputs for a batch of feature rows."""
    a = np.asarray(matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[1] != model.n_inputs:
        raise ShapeError(f"Expected rows of {model.n_inputs} features, got shape {a.shape}")
    for w, b in zip(model.weights, model.biases):
        a = sigmoid(a @ w.T + b)
    return a[:, 0]


# --- model file ---

def _fmt(values) -> str:
    return " ".join(format(float(v), ".17g") for v in values)


def serialize(model: MlpModel) -> str:
    """Model file text (see the schema in README.md)."""
    if model.normalization is None:
        raise ModelFormatError("Model has no normalization block")
    if model.window is None:
        raise ModelFormatError("Model has no window specification")
    lines = [
        f"format_version {FORMAT_VERSION}",
        f"sensor_order {','.join(SENSOR_NAMES)}",
        f"layer_sizes {' '.join(str(n) for n in model.layer_sizes)}",
        f"window_length {model.window.length}",
        f"window_step {model.window.step}",
        f"feature_means {_fmt(model.normalization.means)}",
        f"feature_stddevs {_fmt(model.normalization.stddevs)}",
    ]
    for layer, (w, b) in enumerate(zip(model.weights, model.biases), 1):
        lines.append(f"weights {layer}")
        lines.extend(_fmt(row) for row in w)
        lines.append(f"bias {layer} {_fmt(b)}")
    lines.append("end")
    return "\n".join(lines) + "\n"


class _Lines:
    def __init__(self, text: str):
        self._lines = [
            line.split() for line in text.splitlines()
            if line.strip() and not line.lstrip().startswith("#")
        ]
        self._pos = 0

    def take(self, key: str | None = None) -> list[str]:
        if self._pos >= len(self._lines):
            raise ModelFormatError(f"Unexpected end of model file (expected '{key}')")
        tokens = self._lines[self._pos]
        self._pos += 1
        if key is not None:
            if tokens[0] != key:
                raise ModelFormatError(f"Expected '{key}', found '{tokens[0]}'")
            return tokens[1:]
        return tokens

    @property
    def exhausted(self) -> bool:
        return self._pos >= len(self._lines)


def _floats(tokens: list[str], count: int, what: str) -> np.ndarray:
    if len(tokens) != count:
        raise ModelFormatError(f"{what}: expected {count} values, found {len(tokens)}")
    try:
        values = np.array([float(t) for t in tokens], dtype=np.float64)
    except ValueError as e:
        raise ModelFormatError(f"{what}: {e}")
    if not np.all(np.isfinite(values)):
        raise ModelFormatError(f"{what}: non-finite value")
    return values


def _ints(tokens: list[str], what: str) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError as e:
        raise ModelFormatError(f"{what}: {e}")


def deserialize(text: str) -> MlpModel:
    lines = _Lines(text)
    version = _ints(lines.take("format_version"), "format_version")
    if version != [FORMAT_VERSION]:
        raise ModelFormatError(f"Unsupported format_version {version}")
    order = lines.take("sensor_order")
    if order != [",".join(SENSOR_NAMES)]:
        raise ModelFormatError(f"Unknown sensor_order {order}")
    layer_sizes = _ints(lines.take("layer_sizes"), "layer_sizes")
    try:
        _check_layer_sizes(layer_sizes)
    except ConfigError as e:
        raise ModelFormatError(str(e))
    if layer_sizes[0] != len(SENSOR_NAMES):
        raise ModelFormatError(f"Input layer has {layer_sizes[0]} units, sensor_order has {len(SENSOR_NAMES)}")

    window_length = _ints(lines.take("window_length"), "window_length")
    window_step = _ints(lines.take("window_step"), "window_step")
    if len(window_length) != 1 or len(window_step) != 1:
        raise ModelFormatError("window_length and window_step take one value each")
    try:
        window = WindowSpec(length=window_length[0], step=window_step[0])
    except ConfigError as e:
        raise ModelFormatError(str(e))

    means = _floats(lines.take("feature_means"), layer_sizes[0], "feature_means")
    stddevs = _floats(lines.take("feature_stddevs"), layer_sizes[0], "feature_stddevs")
    if np.any(stddevs < STDDEV_FLOOR):
        raise ModelFormatError("feature_stddevs below the floor")

    weights, biases = [], []
    for layer, (n_in, n_out) in enumerate(zip(layer_sizes[:-1], layer_sizes[1:]), 1):
        if _ints(lines.take("weights"), "weights") != [layer]:
            raise ModelFormatError(f"Expected weights block {layer}")
        rows = [_floats(lines.take(), n_in, f"weights {layer}") for _ in range(n_out)]
        weights.append(np.stack(rows))
        tokens = lines.take("bias")
        if not tokens or tokens[0] != str(layer):
            raise ModelFormatError(f"Expected bias block {layer}")
        biases.append(_floats(tokens[1:], n_out, f"bias {layer}"))

    lines.take("end")
    if not lines.exhausted:
        raise ModelFormatError("Trailing content after 'end'")

    return MlpModel(
        layer_sizes=tuple(layer_sizes),
        weights=weights,
        biases=biases,
        normalization=NormalizationParams(means=means, stddevs=stddevs),
        window=window,
    )
