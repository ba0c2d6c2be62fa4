"""Single-hidden-layer perceptron for regression, trained by backpropagation."""

from __future__ import annotations

import copy
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .exceptions import TrainingError

ACTIVATIONS = ("tanh", "sigmoid")


def _sigmoid(s):
    return 0.5 * (1.0 + np.tanh(0.5 * s))


@dataclass
class MlpTrainConfig:
    hidden_neurons: int = 10
    epochs: int = 2000
    learning_rate: float = 0.15
    seed: int = 0
    init_scale: float = 1.0
    activation: str = "tanh"

    def __post_init__(self):
        for name in ("hidden_neurons", "epochs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        for name in ("learning_rate", "init_scale"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"activation must be one of {ACTIVATIONS}, got {self.activation!r}")


@dataclass
class MlpModel:
    """Weights follow ``S_j = sum_i x_i W[i, j] + b[j]``.

    ``weights = [W_hidden (n, h), W_out (h, 1)]``, ``biases = [b_hidden (h,),
    b_out (1,)]``. The output neuron is linear.
    """

    weights: list
    biases: list
    activation: str = "tanh"

    def __post_init__(self):
        self.weights = [np.asarray(w, dtype=float) for w in self.weights]
        self.biases = [np.asarray(b, dtype=float).reshape(-1) for b in self.biases]
        if len(self.weights) != 2 or len(self.biases) != 2:
            raise ValueError("MlpModel has exactly one hidden layer")
        w1, w2 = self.weights
        b1, b2 = self.biases
        if w1.ndim != 2 or w2.shape != (w1.shape[1], 1) or b1.shape != (w1.shape[1],) or b2.shape != (1,):
            raise ValueError(
                f"inconsistent layer shapes: {w1.shape}, {b1.shape}, {w2.shape}, {b2.shape}"
            )
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"activation must be one of {ACTIVATIONS}, got {self.activation!r}")
        if not all(np.all(np.isfinite(p)) for p in self.weights + self.biases):
            raise ValueError("MLP parameters must be finite")

    @classmethod
    def random(cls, n_inputs, hidden, init_scale=1.0, seed=0, activation="tanh") -> "MlpModel":
        rng = np.random.default_rng(seed)
        w1 = rng.uniform(-init_scale, init_scale, size=(n_inputs, hidden))
        b1 = rng.uniform(-init_scale, init_scale, size=hidden)
        w2 = rng.uniform(-init_scale, init_scale, size=(hidden, 1))
        b2 = rng.uniform(-init_scale, init_scale, size=1)
        return cls([w1, w2], [b1, b2], activation)

    @property
    def layer_sizes(self) -> list:
        return [self.weights[0].shape[0], self.weights[0].shape[1], 1]

    def parameter_vector(self) -> np.ndarray:
        """Flattened as W_hidden, b_hidden, W_out, b_out (row-major)."""
        w1, w2 = self.weights
        b1, b2 = self.biases
        return np.concatenate([w1.ravel(), b1, w2.ravel(), b2])

    def with_parameter_vector(self, theta) -> "MlpModel":
        n, h, _ = self.layer_sizes
        theta = np.asarray(theta, dtype=float)
        sizes = [n * h, h, h, 1]
        if theta.shape != (sum(sizes),):
            raise ValueError(f"expected {sum(sizes)} parameters, got {theta.shape}")
        w1, b1, w2, b2 = np.split(theta, np.cumsum(sizes)[:-1])
        return MlpModel([w1.reshape(n, h), w2.reshape(h, 1)], [b1, b2], self.activation)


def _check_inputs(model: MlpModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2 or X.shape[1] != model.layer_sizes[0]:
        raise ValueError(f"expected {model.layer_sizes[0]} input columns, got shape {X.shape}")
    return X


def _hidden(model: MlpModel, X):
    # fixed-order accumulation instead of BLAS so a row's output does not depend on batch size
    s = np.broadcast_to(model.biases[0], (X.shape[0], model.biases[0].size)).copy()
    for i in range(X.shape[1]):
        s += X[:, i, None] * model.weights[0][i]
    if model.activation == "tanh":
        a = np.tanh(s)
        da = 1.0 - a * a
    else:
        a = _sigmoid(s)
        da = a * (1.0 - a)
    return a, da


def _output(model: MlpModel, a):
    out = np.full(a.shape[0], model.biases[1][0])
    for j in range(a.shape[1]):
        out += a[:, j] * model.weights[1][j, 0]
    return out


def predict_batch(model: MlpModel, X) -> np.ndarray:
    X = _check_inputs(model, X)
    a, _ = _hidden(model, X)
    return _output(model, a)


def forward(model: MlpModel, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"forward takes a single input vector, got shape {x.shape}")
    return float(predict_batch(model, x)[0])


def gradient(model: MlpModel, X, Y) -> np.ndarray:
    """Gradient of the SSE, ordered like :meth:`MlpModel.parameter_vector`."""
    X = _check_inputs(model, X)
    Y = np.asarray(Y, dtype=float).ravel()
    if Y.shape[0] != X.shape[0]:
        raise ValueError(f"X has {X.shape[0]} rows but Y has {Y.shape[0]}")
    a, da = _hidden(model, X)
    out = _output(model, a)
    delta_out = 2.0 * (out - Y)  # (N,)
    g_w2 = a.T @ delta_out
    g_b2 = delta_out.sum()
    delta_h = delta_out[:, None] * model.weights[1][:, 0][None, :] * da  # (N, h)
    g_w1 = X.T @ delta_h
    g_b1 = delta_h.sum(axis=0)
    return np.concatenate([g_w1.ravel(), g_b1, g_w2, [g_b2]])


def _rmse(model, X, Y):
    r = predict_batch(model, X) - Y
    return float(np.sqrt(np.mean(r * r)))


def train(config: MlpTrainConfig, X, Y) -> tuple[MlpModel, list]:
    """Full-batch gradient descent on the mean SSE.

    ``history[e]`` is the training RMSE of the parameters at the start of
    epoch ``e``; the returned model is the snapshot with the lowest entry.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float).ravel()
    if X.ndim != 2 or len(X) == 0:
        raise ValueError(f"X must be a non-empty 2-D array, got shape {X.shape}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
        raise ValueError("training data must be finite")
    model = MlpModel.random(X.shape[1], config.hidden_neurons, config.init_scale, config.seed, config.activation)
    theta = model.parameter_vector()
    history = []
    best, best_rmse = None, np.inf
    for epoch in range(config.epochs):
        with np.errstate(over="ignore", invalid="ignore"):
            current = model.with_parameter_vector(theta) if epoch else model
            err = _rmse(current, X, Y)
        if not np.isfinite(err):
            raise TrainingError(f"MLP training loss became non-finite at epoch {epoch}")
        history.append(err)
        if err < best_rmse:
            best, best_rmse = copy.deepcopy(current), err
        with np.errstate(over="ignore", invalid="ignore"):
            theta = theta - config.learning_rate * gradient(current, X, Y) / len(X)
        if not np.all(np.isfinite(theta)):
            raise TrainingError(f"MLP parameters became non-finite at epoch {epoch}")
    return best, history


class MlpRegressor(RegressorMixin, BaseEstimator):
    """One-hidden-layer perceptron regressor with a linear output neuron.

    Parameters
    ----------
    hidden_neurons : int
    epochs : int
    learning_rate : float
    seed : int
        Seeds the uniform weight initialization.
    init_scale : float
        Weights start in ``[-init_scale, init_scale]``.
    activation : {"tanh", "sigmoid"}
    """

    def __init__(self, hidden_neurons=10, epochs=2000, learning_rate=0.15, seed=0, init_scale=1.0,
                 activation="tanh"):
        self.hidden_neurons = hidden_neurons
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.seed = seed
        self.init_scale = init_scale
        self.activation = activation

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64, y_numeric=True)
        config = MlpTrainConfig(self.hidden_neurons, self.epochs, self.learning_rate, self.seed,
                                self.init_scale, self.activation)
        self.model_, self.history_ = train(config, X, y)
        self.n_features_in_ = X.shape[1]
        self.train_rmse_ = min(self.history_)
        return self

    def predict(self, X):
        check_is_fitted(self, "model_")
        X = check_array(X, dtype=np.float64)
        return predict_batch(self.model_, X)

    @classmethod
    def from_model(cls, model: MlpModel, history=None, **params) -> "MlpRegressor":
        est = cls(hidden_neurons=model.layer_sizes[1], activation=model.activation, **params)
        est.model_ = model
        est.history_ = list(history or [])
        est.n_features_in_ = model.layer_sizes[0]
        est.train_rmse_ = min(est.history_) if est.history_ else float("nan")
        return est
