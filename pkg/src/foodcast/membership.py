"""Fuzzy membership functions for the ANFIS premise layer.

Three families are supported:

* triangular ``(l, m, r)`` with ``l <= m <= r``
* trapezoidal ``(a, b, c, d)`` with ``a <= b <= c <= d``
* generalized bell ``(a, b, c)``: ``1 / (1 + |(x - c) / a| ** (2 b))`` with
  ``a > 0`` and ``b > 0``

Values are immutable; training produces new instances through
:func:`repair`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

# Lower bound applied to bell width/slope after a gradient step.
GBELL_MIN = 1e-6


class MFKind(str, enum.Enum):
    TRIANGULAR = "triangular"
    TRAPEZOIDAL = "trapezoidal"
    GBELL = "gbell"

    @classmethod
    def parse(cls, value) -> "MFKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().rstrip(".")
        aliases = {"tri": "triangular", "trap": "trapezoidal", "bell": "gbell", "g-bell": "gbell"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(
                f"unknown membership function kind {value!r}; "
                f"expected one of {[k.value for k in cls]}"
            ) from None


N_PARAMS = {MFKind.TRIANGULAR: 3, MFKind.TRAPEZOIDAL: 4, MFKind.GBELL: 3}


@dataclass(frozen=True)
class MembershipFunction:
    kind: MFKind
    params: tuple

    def __post_init__(self):
        kind = MFKind.parse(self.kind)
        object.__setattr__(self, "kind", kind)
        params = tuple(float(p) for p in self.params)
        object.__setattr__(self, "params", params)
        if len(params) != N_PARAMS[kind]:
            raise ValueError(f"{kind.value} takes {N_PARAMS[kind]} parameters, got {len(params)}")
        if not all(np.isfinite(params)):
            raise ValueError(f"{kind.value} parameters must be finite, got {params}")
        if kind is MFKind.GBELL:
            if params[0] <= 0 or params[1] <= 0:
                raise ValueError(f"gbell requires a > 0 and b > 0, got a={params[0]}, b={params[1]}")
        elif any(p > q for p, q in zip(params, params[1:])):
            raise ValueError(f"{kind.value} parameters must be non-decreasing, got {params}")

    def __call__(self, x):
        return evaluate(self, x)

    @property
    def center(self) -> float:
        if self.kind is MFKind.TRIANGULAR:
            return self.params[1]
        if self.kind is MFKind.TRAPEZOIDAL:
            return 0.5 * (self.params[1] + self.params[2])
        return self.params[2]


def triangular(l, m, r) -> MembershipFunction:
    return MembershipFunction(MFKind.TRIANGULAR, (l, m, r))


def trapezoidal(a, b, c, d) -> MembershipFunction:
    return MembershipFunction(MFKind.TRAPEZOIDAL, (a, b, c, d))


def gbell(a, b, c) -> MembershipFunction:
    return MembershipFunction(MFKind.GBELL, (a, b, c))


def _as_input(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("membership input must be finite")
    return arr


def _ramps(x, lo, top_lo, top_hi, hi):
    """Piecewise-linear trapezoid; the triangle is the top_lo == top_hi case."""
    mu = np.zeros_like(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        rising = (x > lo) & (x < top_lo)
        mu = np.where(rising, (x - lo) / (top_lo - lo), mu)
        falling = (x > top_hi) & (x < hi)
        mu = np.where(falling, (hi - x) / (hi - top_hi), mu)
    mu = np.where((x >= top_lo) & (x <= top_hi), 1.0, mu)
    return mu


def evaluate(mf: MembershipFunction, x):
    """Membership degree of ``x`` (scalar or array) in ``mf``."""
    arr = _as_input(x)
    p = mf.params
    if mf.kind is MFKind.GBELL:
        a, b, c = p
        with np.errstate(over="ignore"):
            u = np.abs((arr - c) / a) ** (2.0 * b)
            mu = 1.0 / (1.0 + u)
    elif mf.kind is MFKind.TRIANGULAR:
        mu = _ramps(arr, p[0], p[1], p[1], p[2])
    else:
        mu = _ramps(arr, *p)
    return float(mu) if np.ndim(mu) == 0 else mu


def grad_params(mf: MembershipFunction, x) -> np.ndarray:
    """Partial derivatives of the degree w.r.t. each parameter.

    Returns an array of shape ``(n_params,)`` for scalar ``x`` or
    ``(n_params, len(x))`` for a vector. Piecewise-linear kinks get the
    subgradient 0.
    """
    arr = _as_input(x)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    p = mf.params
    if mf.kind is MFKind.GBELL:
        g = _grad_gbell(arr, *p)
    elif mf.kind is MFKind.TRIANGULAR:
        g = _grad_ramps(arr, p[0], p[1], p[1], p[2])
        # apex parameter drives both slopes
        g = np.stack([g[0], g[1] + g[2], g[3]])
    else:
        g = _grad_ramps(arr, *p)
    return g[:, 0] if scalar else g


def _grad_gbell(x, a, b, c):
    d = x - c
    t = np.abs(d / a)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        u = t ** (2.0 * b)
        mu = 1.0 / (1.0 + u)
        # dmu/du * u, finite even where u overflows
        s = np.where(np.isfinite(u), mu * mu * u, 0.0)
        da = s * 2.0 * b / a
        log_t = np.where(t > 0, np.log(np.where(t > 0, t, 1.0)), 0.0)
        db = -s * 2.0 * log_t
        dc = np.where(d != 0, s * 2.0 * b / np.where(d != 0, d, 1.0), 0.0)
    return np.stack([da, db, dc])


def _grad_ramps(x, lo, top_lo, top_hi, hi):
    zero = np.zeros_like(x)
    g_lo, g_tlo, g_thi, g_hi = zero.copy(), zero.copy(), zero.copy(), zero.copy()
    rising = (x > lo) & (x < top_lo)
    if np.any(rising):
        w = top_lo - lo
        g_lo = np.where(rising, (x - top_lo) / w**2, 0.0)
        g_tlo = np.where(rising, -(x - lo) / w**2, 0.0)
    falling = (x > top_hi) & (x < hi)
    if np.any(falling):
        w = hi - top_hi
        g_thi = np.where(falling, (hi - x) / w**2, 0.0)
        g_hi = np.where(falling, (x - top_hi) / w**2, 0.0)
    return np.stack([g_lo, g_tlo, g_thi, g_hi])


def repair(kind, params) -> MembershipFunction:
    """Build a valid MF from raw (possibly constraint-violating) parameters."""
    kind = MFKind.parse(kind)
    params = np.asarray(params, dtype=float)
    if kind is MFKind.GBELL:
        params = params.copy()
        params[0] = max(params[0], GBELL_MIN)
        params[1] = max(params[1], GBELL_MIN)
    else:
        params = np.sort(params)
    return MembershipFunction(kind, tuple(params))


def init_grid(kind, domain_min: float, domain_max: float, count: int) -> list[MembershipFunction]:
    """Evenly spaced, overlapping MFs covering ``[domain_min, domain_max]``.

    Neighbouring sets cross at degree 0.5 or higher, so every point of the
    domain belongs to some set with degree at least 0.5. A single set is
    centred on the domain and reaches 0.5 at its edges.
    """
    kind = MFKind.parse(kind)
    if not (np.isfinite(domain_min) and np.isfinite(domain_max)) or domain_max <= domain_min:
        raise ValueError(f"degenerate domain [{domain_min}, {domain_max}]")
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    span = domain_max - domain_min
    if count == 1:
        centers, step = [domain_min + 0.5 * span], span
    else:
        step = span / (count - 1)
        centers = [domain_min + k * step for k in range(count)]
        centers[-1] = domain_max
    out = []
    for c in centers:
        if kind is MFKind.GBELL:
            out.append(gbell(step / 2.0, 2.0, c))
        elif kind is MFKind.TRIANGULAR:
            out.append(triangular(c - step, c, c + step))
        else:
            out.append(trapezoidal(c - step, c - step / 4.0, c + step / 4.0, c + step))
    return out
