"""First-order Sugeno ANFIS with hybrid (least-squares + gradient) learning.

The network has five layers:

1. premise memberships ``mu[i, k](x_i)``
2. rule firing strengths, the product of one membership per input
3. normalized strengths ``w_r = omega_r / sum(omega)``
4. rule outputs ``f_r = p_r . x + r_r``, weighted by ``w_r``
5. the sum of the weighted rule outputs

Rules form the full grid over the per-input fuzzy sets. Consequents are
linear in the output once the premises are fixed, so each training epoch
solves them exactly by least squares and then takes one gradient step on
the premise parameters.
"""

from __future__ import annotations

import copy
import itertools
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .exceptions import TrainingError
from .membership import MFKind, MembershipFunction, grad_params, init_grid, repair

DEFAULT_MAX_RULES = 1024


@dataclass
class AnfisConfig:
    n_inputs: int
    mfs_per_input: int = 2
    mf_kind: MFKind = MFKind.GBELL
    epochs: int = 200
    learning_rate: float = 0.01
    seed: int = 0
    max_rules: int = DEFAULT_MAX_RULES
    domain: tuple = (0.0, 1.0)

    def __post_init__(self):
        self.mf_kind = MFKind.parse(self.mf_kind)
        if self.n_inputs < 1:
            raise ValueError(f"n_inputs must be >= 1, got {self.n_inputs}")
        if self.mfs_per_input < 1:
            raise ValueError(f"mfs_per_input must be >= 1, got {self.mfs_per_input}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")
        if self.rule_count > self.max_rules:
            raise ValueError(
                f"{self.mfs_per_input}^{self.n_inputs} = {self.rule_count} rules "
                f"exceeds the cap of {self.max_rules}"
            )

    @property
    def rule_count(self) -> int:
        return self.mfs_per_input**self.n_inputs


def build_rule_base(config: AnfisConfig) -> np.ndarray:
    """All MF-index tuples of the grid partition, in lexicographic order.

    Returns an int array of shape ``(rule_count, n_inputs)``.
    """
    if config.rule_count > config.max_rules:
        raise ValueError(f"{config.rule_count} rules exceeds the cap of {config.max_rules}")
    grid = itertools.product(range(config.mfs_per_input), repeat=config.n_inputs)
    return np.array(list(grid), dtype=int).reshape(config.rule_count, config.n_inputs)


@dataclass
class AnfisModel:
    """Premise sets, rule grid and consequent table.

    ``consequents[r]`` holds the linear coefficients for each input followed
    by the constant term.
    """

    config: AnfisConfig
    premise: list  # premise[i][k] is the k-th fuzzy set of input i
    rules: np.ndarray
    consequents: np.ndarray

    @classmethod
    def initial(cls, config: AnfisConfig) -> "AnfisModel":
        lo, hi = config.domain
        premise = [init_grid(config.mf_kind, lo, hi, config.mfs_per_input) for _ in range(config.n_inputs)]
        rules = build_rule_base(config)
        consequents = np.zeros((config.rule_count, config.n_inputs + 1))
        return cls(config, premise, rules, consequents)

    @property
    def n_inputs(self) -> int:
        return self.config.n_inputs

    @property
    def n_premise_params(self) -> int:
        return sum(len(mf.params) for row in self.premise for mf in row)

    def premise_vector(self) -> np.ndarray:
        """Premise parameters flattened input-major, then set, then parameter."""
        return np.array([p for row in self.premise for mf in row for p in mf.params])

    def with_premise_vector(self, theta, clamp: bool = True) -> "AnfisModel":
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.n_premise_params,):
            raise ValueError(f"expected {self.n_premise_params} premise parameters, got {theta.shape}")
        premise, pos = [], 0
        for row in self.premise:
            new_row = []
            for mf in row:
                n = len(mf.params)
                chunk = theta[pos : pos + n]
                pos += n
                new_row.append(repair(mf.kind, chunk) if clamp else MembershipFunction(mf.kind, tuple(chunk)))
            premise.append(new_row)
        return AnfisModel(self.config, premise, self.rules.copy(), self.consequents.copy())

    def with_consequents(self, consequents) -> "AnfisModel":
        consequents = np.asarray(consequents, dtype=float)
        if consequents.shape != self.consequents.shape:
            raise ValueError(f"consequents must have shape {self.consequents.shape}, got {consequents.shape}")
        return AnfisModel(self.config, self.premise, self.rules.copy(), consequents.copy())


@dataclass
class ForwardTrace:
    memberships: np.ndarray  # (n_inputs, mfs_per_input)
    firing: np.ndarray  # (rule_count,)
    normalized: np.ndarray  # (rule_count,)
    rule_outputs: np.ndarray  # (rule_count,)
    output: float
    fallback: bool = False


@dataclass
class _Batch:
    """Vectorized layer outputs for a batch of samples."""

    mu: np.ndarray  # (N, n_inputs, m)
    firing: np.ndarray  # (N, R)
    normalized: np.ndarray  # (N, R)
    rule_outputs: np.ndarray  # (N, R)
    output: np.ndarray  # (N,)
    dead: np.ndarray = field(default=None)  # (N,) bool, no rule fired


def _check_inputs(model: AnfisModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2 or X.shape[1] != model.n_inputs:
        raise ValueError(f"expected {model.n_inputs} input columns, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("ANFIS inputs must be finite")
    return X


def _layers(model: AnfisModel, X: np.ndarray) -> _Batch:
    n, m = model.n_inputs, model.config.mfs_per_input
    mu = np.empty((X.shape[0], n, m))
    for i, row in enumerate(model.premise):
        for k, mf in enumerate(row):
            mu[:, i, k] = mf(X[:, i])
    firing = np.ones((X.shape[0], len(model.rules)))
    for i in range(n):
        firing = firing * mu[:, i, model.rules[:, i]]
    total = firing.sum(axis=1)
    dead = total <= 0
    # elementwise accumulation keeps each row's result independent of batch size
    rule_outputs = np.broadcast_to(model.consequents[:, n], firing.shape).copy()
    for i in range(n):
        rule_outputs += X[:, i, None] * model.consequents[None, :, i]
    normalized = np.empty_like(firing)
    live = ~dead
    normalized[live] = firing[live] / total[live, None]
    # no rule fired: fall back to uniform weights over the rule outputs
    normalized[dead] = 1.0 / firing.shape[1]
    output = np.sum(normalized * rule_outputs, axis=1)
    return _Batch(mu, firing, normalized, rule_outputs, output, dead)


def forward(model: AnfisModel, x) -> tuple[float, ForwardTrace]:
    """Evaluate one input vector, returning the output and all layer values."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"forward takes a single input vector, got shape {x.shape}")
    b = _layers(model, _check_inputs(model, x))
    if b.dead[0]:
        warnings.warn("no ANFIS rule fired; using the mean of the rule outputs", RuntimeWarning)
    trace = ForwardTrace(
        memberships=b.mu[0],
        firing=b.firing[0],
        normalized=b.normalized[0],
        rule_outputs=b.rule_outputs[0],
        output=float(b.output[0]),
        fallback=bool(b.dead[0]),
    )
    return trace.output, trace


def predict_batch(model: AnfisModel, X) -> np.ndarray:
    X = _check_inputs(model, X)
    b = _layers(model, X)
    n_dead = int(b.dead.sum())
    if n_dead:
        warnings.warn(
            f"no ANFIS rule fired for {n_dead} of {len(X)} samples; "
            "used the mean of the rule outputs",
            RuntimeWarning,
        )
    return b.output


def design_matrix(model: AnfisModel, X) -> np.ndarray:
    """Rows ``(w_r x_1, ..., w_r x_n, w_r)`` concatenated over rules ``r``."""
    X = _check_inputs(model, X)
    w = _layers(model, X).normalized
    aug = np.hstack([X, np.ones((len(X), 1))])
    return (w[:, :, None] * aug[:, None, :]).reshape(len(X), -1)


def _targets(Y, n_rows: int) -> np.ndarray:
    Y = np.asarray(Y, dtype=float).ravel()
    if Y.shape[0] != n_rows:
        raise ValueError(f"X has {n_rows} rows but Y has {Y.shape[0]}")
    if not np.all(np.isfinite(Y)):
        raise ValueError("targets must be finite")
    return Y


def fit_consequents_lse(model: AnfisModel, X, Y) -> np.ndarray:
    """Least-squares consequents for fixed premises (minimum-norm if rank deficient)."""
    X = _check_inputs(model, X)
    if len(X) == 0:
        raise ValueError("cannot fit consequents on an empty dataset")
    Y = _targets(Y, len(X))
    A = design_matrix(model, X)
    theta, *_ = np.linalg.lstsq(A, Y, rcond=None)
    return theta.reshape(model.consequents.shape)


def sse(model: AnfisModel, X, Y) -> float:
    X = _check_inputs(model, X)
    resid = _layers(model, X).output - _targets(Y, len(X))
    return float(resid @ resid)


def _rmse(model: AnfisModel, X, Y) -> float:
    return float(np.sqrt(sse(model, X, Y) / len(X)))


def grad_premise(model: AnfisModel, X, Y) -> np.ndarray:
    """Gradient of the SSE w.r.t. :meth:`AnfisModel.premise_vector`.

    Samples where no rule fires contribute nothing (the fallback output
    does not depend on the premises through a defined normalization).
    """
    X = _check_inputs(model, X)
    Y = _targets(Y, len(X))
    b = _layers(model, X)
    n, m = model.n_inputs, model.config.mfs_per_input
    resid = b.output - Y
    total = b.firing.sum(axis=1)
    safe_total = np.where(b.dead, 1.0, total)
    # d out / d omega_r = (f_r - out) / sum(omega)
    d_out_d_firing = (b.rule_outputs - b.output[:, None]) / safe_total[:, None]
    d_out_d_firing[b.dead] = 0.0
    weight = 2.0 * resid[:, None] * d_out_d_firing  # (N, R)

    grads = []
    for i in range(n):
        # product of the other inputs' memberships, avoiding division by mu
        others = np.ones_like(b.firing)
        for j in range(n):
            if j != i:
                others = others * b.mu[:, j, model.rules[:, j]]
        contrib = weight * others  # dSSE/dmu_{i, rules[:, i]} per rule
        for k, mf in enumerate(model.premise[i]):
            d_sse_d_mu = contrib[:, model.rules[:, i] == k].sum(axis=1)  # (N,)
            dmu = grad_params(mf, X[:, i])  # (n_params, N)
            grads.append(dmu @ d_sse_d_mu)
    return np.concatenate(grads) if grads else np.zeros(0)


def train_hybrid(
    config: AnfisConfig,
    X,
    Y,
    on_epoch: Optional[Callable[[int, float, float], None]] = None,
) -> tuple[AnfisModel, list]:
    """Hybrid training; returns the best model seen and the per-epoch RMSE.

    Each epoch solves the consequents by least squares, then takes one
    gradient-descent step on the premises using the mean-SSE gradient, with
    MF constraints repaired afterwards. ``history[e]`` is the training RMSE
    right after epoch ``e``'s least-squares solve. ``on_epoch(e, before,
    after)`` receives the RMSE before and after that solve.
    """
    model = AnfisModel.initial(config)
    X = _check_inputs(model, X)
    if len(X) == 0:
        raise ValueError("cannot train on an empty dataset")
    Y = _targets(Y, len(X))
    history = []
    best, best_rmse = None, np.inf
    for epoch in range(config.epochs):
        before = _rmse(model, X, Y)
        candidate = model.with_consequents(fit_consequents_lse(model, X, Y))
        after = _rmse(candidate, X, Y)
        # lstsq rounding must never make the exact minimizer look worse
        if after <= before or not np.isfinite(before):
            model = candidate
        else:
            after = before
        if not np.isfinite(after):
            raise TrainingError(f"ANFIS training loss became non-finite at epoch {epoch}")
        history.append(after)
        if on_epoch is not None:
            on_epoch(epoch, before, after)
        if after < best_rmse:
            best, best_rmse = copy.deepcopy(model), after
        if epoch == config.epochs - 1:
            break
        g = grad_premise(model, X, Y) / len(X)
        if not np.all(np.isfinite(g)):
            raise TrainingError(f"ANFIS premise gradient became non-finite at epoch {epoch}")
        model = model.with_premise_vector(model.premise_vector() - config.learning_rate * g)
    return best, history


class AnfisRegressor(RegressorMixin, BaseEstimator):
    """Single-output ANFIS regressor.

    Inputs are expected in the MF initialization domain (``[0, 1]`` by
    default), e.g. after min-max scaling.

    Parameters
    ----------
    mf_kind : {"triangular", "trapezoidal", "gbell"}
    mfs_per_input : int
        Fuzzy sets per input; the rule base has ``mfs_per_input ** n_features``
        rules.
    epochs : int
    learning_rate : float
        Step size for the premise gradient step.
    seed : int
        Recorded for provenance; grid initialization is deterministic.
    max_rules : int
    """

    def __init__(self, mf_kind="gbell", mfs_per_input=2, epochs=200, learning_rate=0.01, seed=0,
                 max_rules=DEFAULT_MAX_RULES):
        self.mf_kind = mf_kind
        self.mfs_per_input = mfs_per_input
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.seed = seed
        self.max_rules = max_rules

    def _config(self, n_inputs):
        return AnfisConfig(
            n_inputs=n_inputs,
            mfs_per_input=self.mfs_per_input,
            mf_kind=self.mf_kind,
            epochs=self.epochs,
            learning_rate=self.learning_rate,
            seed=self.seed,
            max_rules=self.max_rules,
        )

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64, y_numeric=True)
        config = self._config(X.shape[1])
        self.model_, self.history_ = train_hybrid(config, X, y)
        self.n_features_in_ = X.shape[1]
        self.train_rmse_ = min(self.history_)
        return self

    def predict(self, X):
        check_is_fitted(self, "model_")
        X = check_array(X, dtype=np.float64)
        return predict_batch(self.model_, X)

    @classmethod
    def from_model(cls, model: AnfisModel, history=None) -> "AnfisRegressor":
        c = model.config
        est = cls(c.mf_kind.value, c.mfs_per_input, c.epochs, c.learning_rate, c.seed, c.max_rules)
        est.model_ = model
        est.history_ = list(history or [])
        est.n_features_in_ = c.n_inputs
        est.train_rmse_ = min(est.history_) if est.history_ else float("nan")
        return est
