"""FAOSTAT ingestion and supervised-set preparation.

Pipeline: :func:`parse_csv` -> :func:`aggregate` -> :func:`build_features`
-> :func:`split_random` -> :func:`fit_scaler`.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import DataError

INPUT_SERIES = ("live_animals", "animals_slaughtered", "livestock_yield", "agri_yield", "agri_losses")
TARGET_SERIES = ("livestock_production", "agri_production")
ALL_SERIES = INPUT_SERIES + TARGET_SERIES

CROP_ITEMS = (
    "Barley", "Beans, dry", "Dates", "Maize", "Millet", "Potatoes", "Rice, paddy", "Soybeans",
    "Wheat", "Rye", "Olives",
)
LIVE_ANIMAL_ITEMS = (
    "Beehives", "Buffaloes", "Camels", "Cattle", "Chickens", "Ducks", "Geese", "Goats", "Pigs",
    "Sheep", "Turkeys",
)
MEAT_ITEMS = (
    "Meat, buffalo", "Meat, camel", "Meat, cattle", "Meat, chicken", "Meat, duck", "Meat, goose",
    "Meat, goat", "Meat, pig", "Meat, sheep", "Meat, turkey",
)
MILK_ITEMS = ("Milk, whole fresh buffalo", "Milk, whole fresh cow", "Milk, whole fresh goat",
              "Milk, whole fresh sheep")

# element -> series fed by it; items disambiguate series sharing an element
DEFAULT_ELEMENT_MAP = {
    "Stocks": ["live_animals"],
    "Producing Animals/Slaughtered": ["animals_slaughtered"],
    "Yield": ["livestock_yield", "agri_yield"],
    "Loss": ["agri_losses"],
    "Production": ["livestock_production", "agri_production"],
}
DEFAULT_ITEMS = {
    "live_animals": LIVE_ANIMAL_ITEMS,
    "animals_slaughtered": MEAT_ITEMS,
    "livestock_yield": MEAT_ITEMS + MILK_ITEMS,
    "agri_yield": CROP_ITEMS,
    "agri_losses": CROP_ITEMS,
    "livestock_production": MEAT_ITEMS + MILK_ITEMS,
    "agri_production": CROP_ITEMS,
}

REQUIRED_COLUMNS = ("Area", "Item", "Element", "Year", "Value")


@dataclass(frozen=True)
class RawRecord:
    area: str
    item: str
    element: str
    year: int
    value: float

    def __post_init__(self):
        if not 1000 <= self.year <= 3000:
            raise DataError(f"year {self.year} outside [1000, 3000]")
        if not math.isfinite(self.value) or self.value < 0:
            raise DataError(f"value must be finite and non-negative, got {self.value}")


def _number(text: str) -> float:
    # FAOSTAT exports quote thousands separators: "1,234"
    return float(text.strip().replace(",", ""))


def parse_csv(path) -> list[RawRecord]:
    """Read a FAOSTAT normalized CSV; columns are located by header name."""
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        lookup = {name.strip().lower(): i for i, name in enumerate(header)}
        missing = [c for c in REQUIRED_COLUMNS if c.lower() not in lookup]
        if missing:
            raise DataError(f"{path}: missing required column(s): {', '.join(missing)}")
        idx = {c: lookup[c.lower()] for c in REQUIRED_COLUMNS}
        records = []
        for row in reader:
            line = reader.line_num
            if not any(cell.strip() for cell in row):
                continue
            if len(row) <= max(idx.values()):
                raise DataError(f"{path}:{line}: expected {len(header)} fields, got {len(row)}")
            raw_value = row[idx["Value"]]
            if not raw_value.strip():
                raise DataError(f"{path}:{line}: empty Value")
            try:
                value = _number(raw_value)
            except ValueError:
                raise DataError(f"{path}:{line}: non-numeric Value {raw_value!r}") from None
            try:
                year = int(row[idx["Year"]].strip())
            except ValueError:
                raise DataError(f"{path}:{line}: non-integer Year {row[idx['Year']]!r}") from None
            try:
                records.append(RawRecord(row[idx["Area"]].strip(), row[idx["Item"]].strip(),
                                         row[idx["Element"]].strip(), year, value))
            except DataError as exc:
                raise DataError(f"{path}:{line}: {exc}") from None
    return records


@dataclass
class SeriesTable:
    years: np.ndarray
    series: dict

    def __post_init__(self):
        self.years = np.asarray(self.years, dtype=int)
        self.series = {k: np.asarray(v, dtype=float) for k, v in self.series.items()}
        if len(self.years) == 0:
            raise DataError("series table is empty")
        if np.any(np.diff(self.years) != 1):
            raise DataError("series table years must be sorted and contiguous")
        for name, values in self.series.items():
            if values.shape != self.years.shape:
                raise DataError(f"series {name} has {values.size} values for {self.years.size} years")

    def coverage(self) -> dict:
        return {name: (int(self.years[0]), int(self.years[-1]), int(self.years.size)) for name in self.series}

    def to_csv(self, path):
        names = list(self.series)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["year"] + names)
            for i, year in enumerate(self.years):
                w.writerow([int(year)] + [repr(float(self.series[n][i])) for n in names])

    @classmethod
    def from_csv(cls, path) -> "SeriesTable":
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = [r for r in reader if r]
        if not header or header[0] != "year":
            raise DataError(f"{path}: not a series table (first column must be 'year')")
        years = [int(r[0]) for r in rows]
        series = {name: [float(r[j + 1]) for r in rows] for j, name in enumerate(header[1:])}
        return cls(years, series)


def aggregate(
    records: Sequence[RawRecord],
    element_map: Mapping[str, Union[str, Sequence[str]]] = None,
    items: Union[None, Sequence[str], Mapping[str, Sequence[str]]] = None,
    gap_policy: str = "error",
    area: Optional[str] = None,
) -> SeriesTable:
    """Sum record values per (series, year) over the allowed items.

    ``element_map`` maps an element name to one or several series names;
    ``items`` is either one allow-list for every series or a per-series
    mapping (``None`` allows everything). The table spans the years common
    to all series. ``gap_policy="interpolate"`` fills single missing
    interior years linearly; anything else is an error.
    """
    if element_map is None:
        element_map = DEFAULT_ELEMENT_MAP
        if items is None:
            items = DEFAULT_ITEMS
    if not element_map:
        raise DataError("element_map must not be empty")
    if gap_policy not in ("error", "interpolate"):
        raise ValueError(f"gap_policy must be 'error' or 'interpolate', got {gap_policy!r}")
    targets = {el: [s] if isinstance(s, str) else list(s) for el, s in element_map.items()}
    series_names = list(dict.fromkeys(s for names in targets.values() for s in names))

    def allowed(series, item):
        if items is None:
            return True
        if isinstance(items, Mapping):
            return series not in items or item in items[series]
        return item in items

    sums: dict = {s: {} for s in series_names}
    for rec in records:
        if area is not None and rec.area != area:
            continue
        for series in targets.get(rec.element, ()):
            if allowed(series, rec.item):
                sums[series][rec.year] = sums[series].get(rec.year, 0.0) + rec.value

    empty = [s for s in series_names if not sums[s]]
    if empty:
        raise DataError(f"no records for series: {', '.join(empty)}")
    first = max(min(v) for v in sums.values())
    last = min(max(v) for v in sums.values())
    if last < first:
        raise DataError("series share no common years")
    years = np.arange(first, last + 1)
    table = {}
    for s in series_names:
        values = np.array([sums[s].get(int(y), np.nan) for y in years])
        missing = np.flatnonzero(np.isnan(values))
        for i in missing:
            single = 0 < i < len(years) - 1 and not np.isnan(values[i - 1]) and not np.isnan(values[i + 1])
            if gap_policy == "interpolate" and single:
                values[i] = 0.5 * (values[i - 1] + values[i + 1])
            else:
                raise DataError(f"series {s} has no value for year {years[i]}")
        table[s] = values
    return SeriesTable(years, table)


@dataclass
class SupervisedSet:
    years: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    feature_names: list
    target_names: list
    mode: str = "exogenous"
    lags: int = 0

    def __post_init__(self):
        self.years = np.asarray(self.years, dtype=int)
        self.X = np.asarray(self.X, dtype=float)
        self.Y = np.asarray(self.Y, dtype=float)
        if self.Y.ndim == 1:
            self.Y = self.Y.reshape(-1, 1)
        n = len(self.years)
        if self.X.shape != (n, len(self.feature_names)) or self.Y.shape != (n, len(self.target_names)):
            raise DataError(f"inconsistent shapes: years {n}, X {self.X.shape}, Y {self.Y.shape}")
        if not (np.all(np.isfinite(self.X)) and np.all(np.isfinite(self.Y))):
            raise DataError("supervised set contains non-finite values")

    def __len__(self):
        return len(self.years)

    def subset(self, idx) -> "SupervisedSet":
        idx = np.asarray(idx, dtype=int)
        return SupervisedSet(self.years[idx], self.X[idx], self.Y[idx], list(self.feature_names),
                             list(self.target_names), self.mode, self.lags)

    def target(self, name: str) -> np.ndarray:
        return self.Y[:, self.target_names.index(name)]

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["year"] + list(self.feature_names) + list(self.target_names))
            for i, year in enumerate(self.years):
                w.writerow([int(year)] + [repr(float(v)) for v in self.X[i]] + [repr(float(v)) for v in self.Y[i]])


def build_features(table: SeriesTable, mode: str = "exogenous", lags: int = 5,
                   target: Optional[str] = None) -> SupervisedSet:
    """Turn a series table into model rows.

    ``mode="exogenous"``: one row per year with the five input series as
    features and both production series as targets.

    ``mode="autoregressive"``: for the ``target`` series, each row holds the
    previous ``lags`` values (oldest first) and the current value.
    """
    if mode == "exogenous":
        missing = [s for s in ALL_SERIES if s not in table.series]
        if missing:
            raise DataError(f"exogenous features need series: {', '.join(missing)}")
        X = np.column_stack([table.series[s] for s in INPUT_SERIES])
        Y = np.column_stack([table.series[s] for s in TARGET_SERIES])
        return SupervisedSet(table.years, X, Y, list(INPUT_SERIES), list(TARGET_SERIES), "exogenous", 0)
    if mode != "autoregressive":
        raise ValueError(f"mode must be 'exogenous' or 'autoregressive', got {mode!r}")
    if target is None:
        raise ValueError("autoregressive mode needs a target series")
    if target not in table.series:
        raise DataError(f"series table has no series {target!r}")
    if lags < 1:
        raise ValueError(f"lags must be >= 1, got {lags}")
    s = table.series[target]
    if len(s) < lags + 1:
        raise DataError(f"{target}: {len(s)} years is too short for {lags} lags")
    X = np.lib.stride_tricks.sliding_window_view(s, lags)[:-1].copy()
    names = [f"{target}_t-{k}" for k in range(lags, 0, -1)]
    return SupervisedSet(table.years[lags:], X, s[lags:], names, [target], "autoregressive", lags)


def split_random(sset: SupervisedSet, ratio: float = 0.7, seed: int = 0) -> tuple[SupervisedSet, SupervisedSet]:
    """Seeded random partition; ``round(ratio * N)`` rows go to training.

    Rows keep their chronological order inside each part.
    """
    if not 0 < ratio < 1:
        raise ValueError(f"ratio must be in (0, 1), got {ratio}")
    n = len(sset)
    n_train = int(math.floor(ratio * n + 0.5))
    if n < 2 or n_train < 1 or n_train >= n:
        raise DataError(f"cannot split {n} rows with ratio {ratio}: train or test would be empty")
    perm = np.random.default_rng(seed).permutation(n)
    return sset.subset(np.sort(perm[:n_train])), sset.subset(np.sort(perm[n_train:]))


class Scaler(TransformerMixin, BaseEstimator):
    """Min-max scaling to ``[0, 1]``.

    A constant column maps to 0.5. With ``shared=True`` one range, taken
    over every entry, applies to all columns; that keeps lag windows and
    targets of one series on the same scale.
    """

    def __init__(self, shared=False):
        self.shared = shared

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64, ensure_all_finite=True)
        if self.shared:
            self.data_min_ = np.array([X.min()])
            self.data_max_ = np.array([X.max()])
        else:
            self.data_min_ = X.min(axis=0)
            self.data_max_ = X.max(axis=0)
        self.n_features_in_ = X.shape[1]
        return self

    def _range(self):
        span = self.data_max_ - self.data_min_
        return span, span > 0

    def transform(self, X):
        check_is_fitted(self, "data_min_")
        X = check_array(X, dtype=np.float64, ensure_all_finite=True)
        span, ok = self._range()
        safe = np.where(ok, span, 1.0)
        return np.where(ok, (X - self.data_min_) / safe, 0.5)

    def inverse_transform(self, X):
        check_is_fitted(self, "data_min_")
        X = check_array(X, dtype=np.float64, ensure_all_finite=True)
        span, ok = self._range()
        return np.where(ok, X * span + self.data_min_, self.data_min_)

    def to_dict(self) -> dict:
        return {"shared": bool(self.shared), "min": self.data_min_.tolist(), "max": self.data_max_.tolist()}

    @classmethod
    def from_dict(cls, d) -> "Scaler":
        s = cls(shared=d["shared"])
        s.data_min_ = np.asarray(d["min"], dtype=float)
        s.data_max_ = np.asarray(d["max"], dtype=float)
        s.n_features_in_ = s.data_min_.size
        return s


def fit_scaler(X, Y, shared: bool = False) -> tuple[Scaler, Scaler]:
    """Scalers for features and targets, fit on training rows only.

    With ``shared=True`` a single scaler covering both is returned twice.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float).reshape(len(X), -1)
    if shared:
        s = Scaler(shared=True).fit(np.hstack([X, Y]).reshape(-1, 1))
        return s, s
    return Scaler().fit(X), Scaler().fit(Y)
