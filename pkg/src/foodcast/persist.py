"""Versioned JSON documents for trained models."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .anfis import AnfisConfig, AnfisModel, AnfisRegressor
from .dataset import Scaler
from .membership import MembershipFunction
from .mlp import MlpModel, MlpRegressor

FORMAT = "foodcast-model"
VERSION = 1


@dataclass
class FittedModel:
    """A trained single-target estimator plus what is needed to reuse it."""

    kind: str  # "anfis" | "mlp"
    estimator: object
    target: str
    feature_mode: str
    lags: int
    feature_names: list
    x_scaler: Scaler
    y_scaler: Scaler
    seed: int
    split_ratio: float = 0.7
    extra: dict = field(default_factory=dict)

    @property
    def descriptor(self) -> str:
        if self.kind == "anfis":
            return self.estimator.model_.config.mf_kind.value
        return str(self.estimator.model_.layer_sizes[1])

    def predict(self, X_raw) -> np.ndarray:
        """Predict in original units from unscaled feature rows."""
        scaled = self.x_scaler.transform(np.asarray(X_raw, dtype=float))
        pred = self.estimator.predict(scaled)
        return self.y_scaler.inverse_transform(pred.reshape(-1, 1)).ravel()


def _anfis_payload(est: AnfisRegressor) -> dict:
    m = est.model_
    c = m.config
    return {
        "config": {
            "n_inputs": c.n_inputs,
            "mfs_per_input": c.mfs_per_input,
            "mf_kind": c.mf_kind.value,
            "epochs": c.epochs,
            "learning_rate": c.learning_rate,
            "seed": c.seed,
            "max_rules": c.max_rules,
            "domain": list(c.domain),
        },
        "premise": [[list(mf.params) for mf in row] for row in m.premise],
        "consequents": m.consequents.tolist(),
        "history": [float(v) for v in est.history_],
    }


def _anfis_from_payload(p: dict) -> AnfisRegressor:
    cfg = dict(p["config"])
    cfg["domain"] = tuple(cfg["domain"])
    config = AnfisConfig(**cfg)
    base = AnfisModel.initial(config)
    premise = [[MembershipFunction(config.mf_kind, tuple(params)) for params in row] for row in p["premise"]]
    model = AnfisModel(config, premise, base.rules, np.asarray(p["consequents"], dtype=float))
    return AnfisRegressor.from_model(model, p.get("history"))


def _mlp_payload(est: MlpRegressor) -> dict:
    m = est.model_
    return {
        "layer_sizes": m.layer_sizes,
        "activation": m.activation,
        "weights": [w.tolist() for w in m.weights],
        "biases": [b.tolist() for b in m.biases],
        "train_params": {k: est.get_params()[k] for k in ("epochs", "learning_rate", "seed", "init_scale")},
        "history": [float(v) for v in est.history_],
    }


def _mlp_from_payload(p: dict) -> MlpRegressor:
    model = MlpModel(p["weights"], p["biases"], p["activation"])
    return MlpRegressor.from_model(model, p.get("history"), **p.get("train_params", {}))


def to_document(fm: FittedModel) -> dict:
    payload = _anfis_payload(fm.estimator) if fm.kind == "anfis" else _mlp_payload(fm.estimator)
    return {
        "format": FORMAT,
        "version": VERSION,
        "kind": fm.kind,
        "target": fm.target,
        "feature_mode": fm.feature_mode,
        "lags": fm.lags,
        "feature_names": list(fm.feature_names),
        "seed": fm.seed,
        "split_ratio": fm.split_ratio,
        "x_scaler": fm.x_scaler.to_dict(),
        "y_scaler": fm.y_scaler.to_dict(),
        "model": payload,
        "extra": fm.extra,
    }


def from_document(doc: dict) -> FittedModel:
    if doc.get("format") != FORMAT:
        raise ValueError(f"not a {FORMAT} document")
    if doc.get("version") != VERSION:
        raise ValueError(f"unsupported model document version {doc.get('version')!r} (expected {VERSION})")
    kind = doc["kind"]
    if kind == "anfis":
        est = _anfis_from_payload(doc["model"])
    elif kind == "mlp":
        est = _mlp_from_payload(doc["model"])
    else:
        raise ValueError(f"unknown model kind {kind!r}")
    return FittedModel(kind, est, doc["target"], doc["feature_mode"], doc["lags"], doc["feature_names"],
                       Scaler.from_dict(doc["x_scaler"]), Scaler.from_dict(doc["y_scaler"]), doc["seed"],
                       doc.get("split_ratio", 0.7), doc.get("extra", {}))


def save(fm: FittedModel, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_document(fm), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load(path) -> FittedModel:
    with open(path, encoding="utf-8") as fh:
        return from_document(json.load(fh))
