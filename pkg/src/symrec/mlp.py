"""From-scratch multilayer perceptron with momentum gradient descent.

The model is a list of layers; each layer owns an ``(n_in + 1, n_out)``
weight matrix whose last row is the bias (inputs are extended by a
constant 1).  Hidden layers use sigmoid or tanh, the output layer
softmax for classification or linear for reconstruction.

Training minimizes the mean negative log-likelihood via the classic
delta recursion (output delta ``y - o`` for softmax, hidden deltas
scaled by the activation derivative); the monitored cross-entropy
additionally sums the complement terms ``(1 - y) log(1 - o)``, so the
reported loss is not the exact quantity whose gradient drives the
update.  Both are exposed: :func:`nll_loss` is the training objective,
:func:`ce_loss` the monitored metric.

Training schedules: a fixed number of epochs, or adaptive decay that
halves the learning rate once validation improvement falls below a
first threshold and stops once it falls below a second threshold after
a decay has fired.  Layer-wise supervised pretraining and
denoising-auto-encoder pretraining build deep models stage by stage.

Everything is deterministic for a fixed seed: weight draws, epoch
shuffles and mask noise all come from seeded generators, and training
is single-threaded with a fixed reduction order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy.special import expit

from .errors import ModelLoadError, ParameterError, TrainingError
from .recording import SymbolTable

__all__ = [
    "Layer",
    "MlpModel",
    "TrainConfig",
    "init_model",
    "forward",
    "predict_proba",
    "nll_loss",
    "mse_loss",
    "ce_loss",
    "regularization_penalty",
    "backprop",
    "train_step",
    "train",
    "slp_pretrain",
    "dae_pretrain",
    "predict_topk",
    "classification_error",
    "one_hot",
    "serialize_model",
    "deserialize_model",
    "save_model",
    "load_model",
]

ACTIVATIONS = ("sigmoid", "tanh", "softmax", "linear")

_LOG_CLAMP = 1e-12  # outputs are clamped to [eps, 1 - eps] before logs


def _softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _activate(name: str, z: np.ndarray) -> np.ndarray:
    if name == "sigmoid":
        return expit(z)
    if name == "tanh":
        return np.tanh(z)
    if name == "softmax":
        return _softmax(z)
    return z


def _derivative_from_output(name: str, o: np.ndarray) -> np.ndarray:
    if name == "sigmoid":
        return o * (1.0 - o)
    if name == "tanh":
        return 1.0 - o * o
    if name == "linear":
        return np.ones_like(o)
    raise ParameterError("softmax is only supported as the final layer")


class Layer:
    """One fully connected layer: weights with a bias row, an activation."""

    __slots__ = ("weights", "activation")

    def __init__(self, weights: np.ndarray, activation: str):
        weights = np.asarray(weights, dtype=np.float64)
        if weights.ndim != 2 or weights.shape[0] < 2 or weights.shape[1] < 1:
            raise ParameterError(f"invalid layer weight shape {weights.shape}")
        if not np.all(np.isfinite(weights)):
            raise ParameterError("layer weights must be finite")
        if activation not in ACTIVATIONS:
            raise ParameterError(f"unknown activation {activation!r}")
        self.weights = weights
        self.activation = activation

    @property
    def n_in(self) -> int:
        return self.weights.shape[0] - 1

    @property
    def n_out(self) -> int:
        return self.weights.shape[1]

    def copy(self) -> "Layer":
        return Layer(self.weights.copy(), self.activation)


class MlpModel:
    """Layer list plus the symbol table the output neurons map onto.

    Output neuron ``i`` corresponds to ``symbols.ids()[i]`` (ascending
    symbol ids); without a table the neuron index is the symbol id.
    """

    __slots__ = ("layers", "symbols")

    def __init__(self, layers: Sequence[Layer], symbols: SymbolTable | None = None):
        layers = list(layers)
        if not layers:
            raise ParameterError("model needs at least one layer")
        for prev, nxt in zip(layers, layers[1:]):
            if prev.n_out != nxt.n_in:
                raise ParameterError(
                    f"layer dimensions do not chain: {prev.n_out} -> {nxt.n_in}"
                )
        for layer in layers[:-1]:
            if layer.activation == "softmax":
                raise ParameterError("softmax is only allowed on the final layer")
        if symbols is not None and len(symbols) != layers[-1].n_out:
            raise ParameterError(
                f"output width {layers[-1].n_out} != symbol count {len(symbols)}"
            )
        self.layers = layers
        self.symbols = symbols

    @property
    def topology(self) -> list[int]:
        return [self.layers[0].n_in] + [layer.n_out for layer in self.layers]

    @property
    def feature_dim(self) -> int:
        return self.layers[0].n_in

    @property
    def n_classes(self) -> int:
        return self.layers[-1].n_out

    def copy(self) -> "MlpModel":
        return MlpModel([layer.copy() for layer in self.layers], self.symbols)

    def output_symbol_ids(self) -> list[int]:
        if self.symbols is None:
            return list(range(self.n_classes))
        return self.symbols.ids()


def init_model(
    topology: Sequence[int],
    seed: int,
    symbols: SymbolTable | None = None,
    hidden_activation: str = "sigmoid",
    output_activation: str = "softmax",
) -> MlpModel:
    """Random model for a topology, deterministic for a fixed seed.

    Non-bias weights between layers of widths a and b are drawn
    uniformly from +-4 * sqrt(6 / (a + b)), which breaks symmetry while
    keeping sigmoid units out of saturation; bias rows start at 0.
    """
    topology = [int(n) for n in topology]
    if len(topology) < 2 or any(n < 1 for n in topology):
        raise ParameterError(f"invalid topology {topology}")
    rng = np.random.default_rng(seed)
    layers = []
    for li, (n_in, n_out) in enumerate(zip(topology, topology[1:])):
        bound = 4.0 * np.sqrt(6.0 / (n_in + n_out))
        weights = np.zeros((n_in + 1, n_out))
        weights[:-1] = rng.uniform(-bound, bound, size=(n_in, n_out))
        activation = output_activation if li == len(topology) - 2 else hidden_activation
        layers.append(Layer(weights, activation))
    return MlpModel(layers, symbols)


def _as_batch(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return x[None, :] if x.ndim == 1 else x


def forward(model: MlpModel, x: np.ndarray) -> list[np.ndarray]:
    """Per-layer outputs for one vector or a batch; last entry is the
    final output."""
    data = _as_batch(x)
    if data.shape[1] != model.feature_dim:
        raise ParameterError(
            f"input dimension {data.shape[1]} != model feature dim {model.feature_dim}"
        )
    outputs = []
    for layer in model.layers:
        extended = np.concatenate([data, np.ones((data.shape[0], 1))], axis=1)
        data = _activate(layer.activation, extended @ layer.weights)
        outputs.append(data)
    return outputs


def predict_proba(model: MlpModel, x: np.ndarray) -> np.ndarray:
    return forward(model, x)[-1]


def one_hot(labels: np.ndarray, n_classes: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=int)
    out = np.zeros((labels.shape[0], n_classes))
    out[np.arange(labels.shape[0]), labels] = 1.0
    return out


def _clamped(o: np.ndarray) -> np.ndarray:
    return np.clip(o, _LOG_CLAMP, 1.0 - _LOG_CLAMP)


def nll_loss(model: MlpModel, x: np.ndarray, y: np.ndarray) -> float:
    """Mean negative log-likelihood over the batch (training objective)."""
    o = _clamped(predict_proba(model, x))
    y = _as_batch(y)
    return float(-(y * np.log(o)).sum() / y.shape[0])


def mse_loss(model: MlpModel, x: np.ndarray, y: np.ndarray) -> float:
    """Mean summed squared reconstruction error (auto-encoder objective)."""
    o = predict_proba(model, x)
    y = _as_batch(y)
    return float(((o - y) ** 2).sum() / y.shape[0])


def regularization_penalty(model: MlpModel, regularization) -> float:
    """L1/L2 penalty over non-bias weights; 0 when unregularized."""
    if regularization is None:
        return 0.0
    kind, lam = regularization
    total = 0.0
    for layer in model.layers:
        w = layer.weights[:-1]
        total += np.abs(w).sum() if kind == "l1" else (w * w).sum()
    return float(lam * total)


def ce_loss(model: MlpModel, x: np.ndarray, y: np.ndarray, regularization=None) -> float:
    """Monitored cross entropy, summed over the batch.

    Per example both the target and the complement terms are summed:
    ``-(y log o + (1 - y) log(1 - o))`` over all output components,
    with outputs clamped before the logs.  An optional penalty term is
    added on top.
    """
    o = _clamped(predict_proba(model, x))
    y = _as_batch(y)
    per_example = -(y * np.log(o) + (1.0 - y) * np.log(1.0 - o)).sum(axis=1)
    return float(per_example.sum()) + regularization_penalty(model, regularization)


def backprop(
    model: MlpModel, x: np.ndarray, y: np.ndarray, objective: str = "nll"
) -> list[np.ndarray]:
    """Gradients of the mean objective w.r.t. every layer's weights.

    ``objective="nll"`` pairs a softmax output with negative
    log-likelihood (output delta ``o - y``); ``objective="mse"`` pairs
    a linear output with the summed squared error.  Hidden deltas are
    scaled by the activation derivative expressed in the layer output
    (``o (1 - o)`` for sigmoid, ``1 - o^2`` for tanh).
    """
    x = _as_batch(x)
    y = _as_batch(y)
    outputs = forward(model, x)
    n = x.shape[0]
    final = model.layers[-1].activation
    if objective == "nll":
        if final != "softmax":
            raise ParameterError("nll objective requires a softmax output layer")
        dz = (outputs[-1] - y) / n
    elif objective == "mse":
        do = 2.0 * (outputs[-1] - y) / n
        dz = do * _derivative_from_output(final, outputs[-1])
    else:
        raise ParameterError(f"unknown objective {objective!r}")

    grads: list[np.ndarray] = [np.empty(0)] * len(model.layers)
    for li in range(len(model.layers) - 1, -1, -1):
        inputs = x if li == 0 else outputs[li - 1]
        extended = np.concatenate([inputs, np.ones((n, 1))], axis=1)
        grads[li] = extended.T @ dz
        if li > 0:
            back = dz @ model.layers[li].weights[:-1].T
            dz = back * _derivative_from_output(
                model.layers[li - 1].activation, outputs[li - 1]
            )
    return grads


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for gradient-descent training.

    ``batch_size=1`` is stochastic descent, ``batch_size >= len(data)``
    batch descent, anything between mini-batch.  ``mode`` selects a
    fixed epoch count or adaptive decay; the decay thresholds are
    improvements of the validation classification error in percentage
    points (set ``newbob_relative`` for relative percent instead).
    """

    learning_rate: float = 0.1
    momentum: float = 0.1
    batch_size: int = 256
    epochs: int = 1000
    mode: str = "fixed_epochs"  # or "newbob"
    newbob_decay: float = 0.5
    newbob_theta1: float = 0.5
    newbob_theta2: float = 0.5
    newbob_relative: bool = False
    regularization: tuple[str, float] | None = None
    objective: str = "nll"
    seed: int = 0
    shuffle: bool = True

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ParameterError("learning_rate must be >= 0")
        if not 0 <= self.momentum <= 1:
            raise ParameterError("momentum must be in [0, 1]")
        if self.batch_size < 1:
            raise ParameterError("batch_size must be >= 1")
        if self.epochs < 0:
            raise ParameterError("epochs must be >= 0")
        if self.mode not in ("fixed_epochs", "newbob"):
            raise ParameterError(f"unknown training mode {self.mode!r}")
        if self.regularization is not None:
            kind, lam = self.regularization
            if kind not in ("l1", "l2") or lam < 0:
                raise ParameterError(f"invalid regularization {self.regularization!r}")


def _regularization_gradient(weights: np.ndarray, regularization) -> np.ndarray:
    grad = np.zeros_like(weights)
    if regularization is None:
        return grad
    kind, lam = regularization
    # bias row excluded from the penalty
    if kind == "l2":
        grad[:-1] = 2.0 * lam * weights[:-1]
    else:
        grad[:-1] = lam * np.sign(weights[:-1])
    return grad


def train_step(
    model: MlpModel,
    batch: tuple[np.ndarray, np.ndarray],
    config: TrainConfig,
    prev_deltas: list[np.ndarray] | None = None,
    learning_rate: float | None = None,
) -> list[np.ndarray]:
    """One weight update on a batch; mutates the model, returns deltas.

    The update per layer is ``delta = -eta * gradient + momentum *
    previous delta`` with the regularization gradient added when
    configured.  ``learning_rate`` overrides the config value (the
    adaptive schedule decays it between epochs).
    """
    x, y = batch
    eta = config.learning_rate if learning_rate is None else learning_rate
    grads = backprop(model, x, y, objective=config.objective)
    if prev_deltas is None:
        prev_deltas = [np.zeros_like(layer.weights) for layer in model.layers]
    deltas = []
    for layer, grad, prev in zip(model.layers, grads, prev_deltas):
        grad = grad + _regularization_gradient(layer.weights, config.regularization)
        delta = -eta * grad + config.momentum * prev
        if not np.all(np.isfinite(delta)):
            raise TrainingError(
                "non-finite weight update (exploding gradient?); "
                f"eta={eta}, |grad|max={np.abs(grad).max()}"
            )
        layer.weights += delta
        deltas.append(delta)
    return deltas


def classification_error(model: MlpModel, x: np.ndarray, labels: np.ndarray) -> float:
    """Fraction of examples whose argmax output misses the label."""
    predicted = predict_proba(model, x).argmax(axis=1)
    return float(np.mean(predicted != np.asarray(labels)))


def train(
    model: MlpModel,
    train_set: tuple[np.ndarray, np.ndarray],
    config: TrainConfig,
    validation: tuple[np.ndarray, np.ndarray] | None = None,
) -> tuple[MlpModel, list[dict]]:
    """Gradient-descent training; returns a trained copy plus history.

    ``train_set``/``validation`` are (features, integer labels) pairs.
    Each epoch shuffles with a seeded generator (disable via the config
    for strict in-order replication), walks mini-batches of the
    configured size keeping the ragged final batch, and records epoch,
    learning rate, training/validation error and the monitored loss.

    In adaptive mode the validation error is compared epoch over
    epoch: improvement below the first threshold decays the learning
    rate, and improvement below the second threshold stops training
    once a decay has fired.
    """
    if config.mode == "newbob" and validation is None:
        raise ParameterError("newbob mode needs a validation split")
    x, labels = train_set
    x = np.asarray(x, dtype=np.float64)
    labels = np.asarray(labels, dtype=int)
    if x.shape[0] == 0:
        raise ParameterError("training set must not be empty")
    y = one_hot(labels, model.n_classes)

    model = model.copy()
    rng = np.random.default_rng(config.seed)
    eta = config.learning_rate
    deltas: list[np.ndarray] | None = None
    history: list[dict] = []
    decay_fired = False
    prev_valid_err = (
        classification_error(model, validation[0], validation[1])
        if validation is not None
        else None
    )

    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(x.shape[0]) if config.shuffle else np.arange(x.shape[0])
        for start in range(0, x.shape[0], config.batch_size):
            idx = order[start : start + config.batch_size]
            deltas = train_step(model, (x[idx], y[idx]), config, deltas, learning_rate=eta)
        train_err = classification_error(model, x, labels)
        valid_err = (
            classification_error(model, validation[0], validation[1])
            if validation is not None
            else float("nan")
        )
        loss = ce_loss(model, x, y, regularization=config.regularization) / x.shape[0]
        history.append(
            {
                "epoch": epoch,
                "eta": eta,
                "train_err": train_err,
                "valid_err": valid_err,
                "loss": loss,
            }
        )
        if config.mode == "newbob":
            if config.newbob_relative:
                improvement = (
                    100.0 * (prev_valid_err - valid_err) / prev_valid_err
                    if prev_valid_err > 0
                    else 0.0
                )
            else:
                improvement = 100.0 * (prev_valid_err - valid_err)
            prev_valid_err = valid_err
            if decay_fired and improvement < config.newbob_theta2:
                break
            if improvement < config.newbob_theta1:
                eta *= config.newbob_decay
                decay_fired = True
    return model, history


def write_training_log(history: list[dict], path) -> None:
    """Write the per-epoch history as ``epoch,eta,train_err,valid_err,loss``."""
    with open(path, "w") as fh:
        fh.write("epoch,eta,train_err,valid_err,loss\n")
        for row in history:
            fh.write(
                f"{row['epoch']},{row['eta']!r},{row['train_err']!r},"
                f"{row['valid_err']!r},{row['loss']!r}\n"
            )


def slp_pretrain(
    topology: Sequence[int],
    train_set: tuple[np.ndarray, np.ndarray],
    config: TrainConfig,
    validation: tuple[np.ndarray, np.ndarray] | None = None,
    symbols: SymbolTable | None = None,
    stage_callback: Callable[[int, MlpModel], None] | None = None,
) -> MlpModel:
    """Supervised layer-wise pretraining; returns the final full model.

    Stage k trains the sub-topology with the first k hidden layers and
    a fresh output layer, seeding its earlier hidden layers with the
    weights the previous stage learned.  Each stage trains for the full
    configured epoch count.  With a single hidden layer this is plain
    training.  ``stage_callback(stage, model)`` observes every stage's
    model right before its training starts.
    """
    topology = [int(n) for n in topology]
    if len(topology) < 3:
        raise ParameterError("pretraining needs at least one hidden layer")
    hidden = topology[1:-1]
    trained: MlpModel | None = None
    for stage in range(1, len(hidden) + 1):
        stage_topology = [topology[0]] + hidden[:stage] + [topology[-1]]
        model = init_model(
            stage_topology,
            seed=config.seed + stage - 1,
            symbols=symbols,
        )
        if trained is not None:
            for li in range(stage - 1):
                model.layers[li] = trained.layers[li].copy()
        if stage_callback is not None:
            stage_callback(stage, model.copy())
        trained, _ = train(model, train_set, config, validation)
    return trained


def dae_pretrain(
    topology: Sequence[int],
    unlabeled: np.ndarray,
    config: TrainConfig,
    corruption: float = 0.3,
    symbols: SymbolTable | None = None,
) -> MlpModel:
    """Stacked denoising-auto-encoder pretraining of the hidden layers.

    Per hidden layer an auto-encoder (current representation -> hidden
    -> linear reconstruction) is trained with masking noise: every
    input component is independently zeroed with probability
    ``corruption``, freshly drawn per epoch, while the reconstruction
    target stays clean.  The squared-error objective drives the
    encoder; the first hidden layer uses tanh, deeper ones sigmoid.
    Encoder weights initialize the stacked model and a randomly
    initialized softmax output layer is appended (no supervised
    fine-tuning here).
    """
    if not 0 <= corruption < 1:
        raise ParameterError("corruption must be in [0, 1)")
    topology = [int(n) for n in topology]
    if len(topology) < 3:
        raise ParameterError("pretraining needs at least one hidden layer")
    unlabeled = np.asarray(unlabeled, dtype=np.float64)
    if unlabeled.shape[1] != topology[0]:
        raise ParameterError("unlabeled data does not match the input width")

    ae_config = replace(config, objective="mse", mode="fixed_epochs")
    rng = np.random.default_rng(config.seed)
    representation = unlabeled
    encoders: list[Layer] = []
    for li, width in enumerate(topology[1:-1]):
        activation = "tanh" if li == 0 else "sigmoid"
        ae = init_model(
            [representation.shape[1], width, representation.shape[1]],
            seed=config.seed + 101 + li,
            hidden_activation=activation,
            output_activation="linear",
        )
        deltas: list[np.ndarray] | None = None
        for _ in range(ae_config.epochs):
            order = rng.permutation(representation.shape[0])
            for start in range(0, order.shape[0], ae_config.batch_size):
                idx = order[start : start + ae_config.batch_size]
                clean = representation[idx]
                mask = rng.random(clean.shape) >= corruption
                deltas = train_step(ae, (clean * mask, clean), ae_config, deltas)
        encoders.append(ae.layers[0].copy())
        encoder_only = MlpModel([encoders[-1]])
        representation = predict_proba(encoder_only, representation)

    head = init_model(
        [topology[-2], topology[-1]],
        seed=config.seed + 997,
        output_activation="softmax",
    )
    return MlpModel(encoders + [head.layers[0]], symbols)


def predict_topk(model: MlpModel, x: np.ndarray, k: int = 10) -> list[tuple[int, float]]:
    """The k most probable (symbol id, probability) pairs, descending.

    Ties break by ascending symbol id; k larger than the class count
    returns all classes.
    """
    probs = predict_proba(model, x)
    if probs.shape[0] != 1:
        raise ParameterError("predict_topk classifies a single feature vector")
    probs = probs[0]
    ids = np.asarray(model.output_symbol_ids())
    order = np.lexsort((ids, -probs))
    k = max(1, min(k, probs.shape[0]))
    return [(int(ids[i]), float(probs[i])) for i in order[:k]]


# ---------------------------------------------------------------------------
# persistence

_FORMAT = "symrec-mlp"
_FORMAT_VERSION = 1


def serialize_model(model: MlpModel) -> bytes:
    """Versioned JSON document; weights round-trip bit-exact."""
    doc = {
        "format": _FORMAT,
        "version": _FORMAT_VERSION,
        "topology": model.topology,
        "layers": [
            {"activation": layer.activation, "weights": layer.weights.tolist()}
            for layer in model.layers
        ],
        "symbols": (
            {str(i): c for i, c in sorted(model.symbols.to_dict().items())}
            if model.symbols is not None
            else None
        ),
    }
    return json.dumps(doc, separators=(",", ":")).encode()


def deserialize_model(data: bytes) -> MlpModel:
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ModelLoadError(f"model file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != _FORMAT:
        raise ModelLoadError("not a model file")
    if doc.get("version") != _FORMAT_VERSION:
        raise ModelLoadError(f"unsupported model version {doc.get('version')!r}")
    try:
        topology = [int(n) for n in doc["topology"]]
        raw_layers = doc["layers"]
        symbols = doc["symbols"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelLoadError(f"model file is missing fields: {exc}") from exc
    if len(raw_layers) != len(topology) - 1:
        raise ModelLoadError("layer count does not match topology")
    layers = []
    for li, raw in enumerate(raw_layers):
        try:
            weights = np.asarray(raw["weights"], dtype=np.float64)
            activation = raw["activation"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelLoadError(f"layer {li} is malformed: {exc}") from exc
        expected = (topology[li] + 1, topology[li + 1])
        if weights.shape != expected:
            raise ModelLoadError(
                f"layer {li} weight shape {weights.shape} != expected {expected}"
            )
        try:
            layers.append(Layer(weights, activation))
        except ParameterError as exc:
            raise ModelLoadError(str(exc)) from exc
    table = SymbolTable({int(k): v for k, v in symbols.items()}) if symbols else None
    try:
        return MlpModel(layers, table)
    except ParameterError as exc:
        raise ModelLoadError(str(exc)) from exc


def save_model(model: MlpModel, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_model(model))


def load_model(path) -> MlpModel:
    with open(path, "rb") as fh:
        return deserialize_model(fh.read())
