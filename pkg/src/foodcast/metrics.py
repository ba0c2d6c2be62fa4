"""Accuracy metrics and per-target evaluation reports."""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass

import numpy as np


def _pair(A, P):
    A = np.asarray(A, dtype=float).ravel()
    P = np.asarray(P, dtype=float).ravel()
    if A.shape != P.shape:
        raise ValueError(f"length mismatch: {A.size} targets vs {P.size} predictions")
    if A.size == 0:
        raise ValueError("metrics need at least one sample")
    return A, P


def rmse(A, P) -> float:
    """Root mean squared error between targets ``A`` and predictions ``P``."""
    A, P = _pair(A, P)
    d = A - P
    return float(np.sqrt(np.dot(d, d) / A.size))


def r2_paper(A, P) -> float:
    """``1 - sum((A - P)^2) / sum(A^2)``: uncentered denominator."""
    A, P = _pair(A, P)
    denom = float(np.dot(A, A))
    if denom == 0:
        raise ValueError("r2_paper is undefined when every target is zero")
    d = A - P
    return 1.0 - float(np.dot(d, d)) / denom


def r2_standard(A, P) -> float:
    """Coefficient of determination ``1 - SSE / sum((A - mean(A))^2)``."""
    A, P = _pair(A, P)
    c = A - A.mean()
    denom = float(np.dot(c, c))
    if denom == 0:
        raise ValueError("r2_standard is undefined for constant targets")
    d = A - P
    return 1.0 - float(np.dot(d, d)) / denom


@dataclass(frozen=True)
class TargetScore:
    target: str
    phase: str
    n: int
    rmse: float
    r2_paper: float
    r2_standard: float


def score(target: str, phase: str, A, P) -> TargetScore:
    A, P = _pair(A, P)
    try:
        r2p = r2_paper(A, P)
    except ValueError:
        r2p = float("nan")
    try:
        r2s = r2_standard(A, P)
    except ValueError:
        r2s = float("nan")
    return TargetScore(target, phase, int(A.size), rmse(A, P), r2p, r2s)


class EvalReport(list):
    """List of :class:`TargetScore` rows with CSV output."""

    header = ("target", "phase", "n", "rmse", "r2_paper", "r2_standard")

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.header)
            for row in self:
                d = asdict(row)
                w.writerow([d["target"], d["phase"], d["n"]] + [repr(float(d[k])) for k in self.header[3:]])

    @classmethod
    def from_csv(cls, path) -> "EvalReport":
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        return cls(
            TargetScore(r["target"], r["phase"], int(r["n"]), float(r["rmse"]), float(r["r2_paper"]),
                        float(r["r2_standard"]))
            for r in rows
        )
