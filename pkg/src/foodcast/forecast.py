"""Recursive multi-step forecasting with one-step autoregressive models."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

FORECAST_HEADER = ("year", "target", "value", "model", "mf_or_neurons", "seed")


@dataclass
class ForecastResult:
    target: str
    years: list
    values: list
    model: str = ""
    mf_or_neurons: str = ""
    seed: int = 0
    out_of_range: int = field(default=0, compare=False)

    def __post_init__(self):
        if len(self.years) != len(self.values):
            raise ValueError("years and values differ in length")
        if any(b - a != 1 for a, b in zip(self.years, self.years[1:])):
            raise ValueError("forecast years must be consecutive")
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"forecast for {self.target} contains non-finite values")

    @property
    def rows(self):
        return list(zip(self.years, self.values))

    def csv_rows(self):
        for year, value in self.rows:
            yield [int(year), self.target, repr(float(value)), self.model, self.mf_or_neurons, int(self.seed)]


def recursive_forecast(model, scaler, history, horizon: int, *, last_year: int = 0, lags: int = None,
                       target: str = "", feature_mode: str = "autoregressive", model_name: str = "",
                       mf_or_neurons: str = "", seed: int = 0) -> ForecastResult:
    """Iterate a one-step model ``horizon`` times, feeding predictions back.

    ``model.predict`` maps a scaled lag window (oldest first) to the scaled
    next value; ``scaler`` converts between original and scaled units for
    windows and predictions alike. Years are labelled ``last_year + 1``
    onwards. Scaled inputs outside ``[0, 1]`` are used unclamped and
    counted in ``out_of_range``.
    """
    if feature_mode != "autoregressive":
        raise ValueError(
            "recursive forecasting needs a model trained in autoregressive mode; "
            "exogenous inputs for future years are not available (retrain with feature_mode = autoregressive)"
        )
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    history = [float(v) for v in np.asarray(history, dtype=float).ravel()]
    if lags is None:
        lags = getattr(model, "n_features_in_", None) or len(history)
    if len(history) < lags:
        raise ValueError(f"need at least {lags} history values, got {len(history)}")
    if not np.all(np.isfinite(history)):
        raise ValueError("history must be finite")

    window = history[-lags:]
    values, out_of_range = [], 0
    for _ in range(horizon):
        scaled = scaler.transform(np.asarray(window).reshape(1, -1))
        out_of_range += int(np.sum((scaled < 0) | (scaled > 1)))
        pred_scaled = np.asarray(model.predict(scaled), dtype=float).reshape(1, 1)
        value = float(scaler.inverse_transform(pred_scaled)[0, 0]) if np.isfinite(pred_scaled).all() else np.nan
        if not np.isfinite(value):
            raise ValueError(f"forecast for {target or 'series'} diverged at step {len(values) + 1}")
        values.append(value)
        window = window[1:] + [value]
    if out_of_range:
        warnings.warn(
            f"{target or 'forecast'}: {out_of_range} scaled lag inputs fell outside [0, 1] "
            "and were extrapolated",
            RuntimeWarning,
        )
    years = [int(last_year) + k for k in range(1, horizon + 1)]
    return ForecastResult(target, years, values, model_name, str(mf_or_neurons), int(seed), out_of_range)


def write_forecast_csv(results, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FORECAST_HEADER)
        for res in results:
            w.writerows(res.csv_rows())


def read_forecast_csv(path) -> list[ForecastResult]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    grouped: dict = {}
    for r in rows:
        grouped.setdefault(r["target"], []).append(r)
    return [
        ForecastResult(target, [int(r["year"]) for r in rs], [float(r["value"]) for r in rs], rs[0]["model"],
                       rs[0]["mf_or_neurons"], int(rs[0]["seed"]))
        for target, rs in grouped.items()
    ]


def write_forecast_table(results, path):
    """Wide table: one row per year, one column per target."""
    years = sorted({y for res in results for y in res.years})
    lookup = {res.target: dict(res.rows) for res in results}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["year"] + [res.target for res in results])
        for y in years:
            w.writerow([y] + [repr(float(lookup[res.target][y])) if y in lookup[res.target] else "" for res in results])
