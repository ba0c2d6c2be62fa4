"""Glue between the run configuration and the models: data prep, training,
evaluation and sweeps."""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import metrics
from .anfis import AnfisRegressor
from .config import RunConfig
from .dataset import SeriesTable, SupervisedSet, aggregate, build_features, fit_scaler, parse_csv, split_random
from .membership import MFKind
from .mlp import MlpRegressor
from .persist import FittedModel

ANFIS_DEFAULTS = {"epochs": 200, "learning_rate": 0.01}
MLP_DEFAULTS = {"epochs": 2000, "learning_rate": 0.15}


def load_table(cfg: RunConfig) -> SeriesTable:
    """Series table from either a FAOSTAT CSV or a previously ingested table."""
    path = cfg.data_path
    with open(path, encoding="utf-8-sig") as fh:
        first = fh.readline().strip().lower()
    if first.startswith("year,") or first == "year":
        return SeriesTable.from_csv(path)
    records = parse_csv(path)
    return aggregate(records, cfg.element_map, cfg.items, gap_policy=cfg.gap_policy, area=cfg.area)


def supervised_set(cfg: RunConfig, table: SeriesTable, target: str) -> SupervisedSet:
    if cfg.feature_mode == "autoregressive":
        return build_features(table, "autoregressive", lags=cfg.lags, target=target)
    full = build_features(table, "exogenous")
    col = full.target_names.index(target)
    return SupervisedSet(full.years, full.X, full.Y[:, col], full.feature_names, [target], "exogenous", 0)


def make_estimator(kind: str, descriptor, cfg: RunConfig, seed: int):
    if kind == "anfis":
        return AnfisRegressor(
            mf_kind=MFKind.parse(descriptor).value,
            mfs_per_input=cfg.mfs_per_input,
            epochs=cfg.epochs or ANFIS_DEFAULTS["epochs"],
            learning_rate=cfg.learning_rate or ANFIS_DEFAULTS["learning_rate"],
            seed=seed,
        )
    if kind == "mlp":
        return MlpRegressor(
            hidden_neurons=int(descriptor),
            epochs=cfg.epochs or MLP_DEFAULTS["epochs"],
            learning_rate=cfg.learning_rate or MLP_DEFAULTS["learning_rate"],
            seed=seed,
            init_scale=cfg.init_scale,
        )
    raise ValueError(f"unknown model kind {kind!r}")


def fit_model(cfg: RunConfig, train: SupervisedSet, kind: str, descriptor, seed: int) -> FittedModel:
    shared = train.mode == "autoregressive"
    x_scaler, y_scaler = fit_scaler(train.X, train.Y, shared=shared)
    est = make_estimator(kind, descriptor, cfg, seed)
    est.fit(x_scaler.transform(train.X), y_scaler.transform(train.Y).ravel())
    return FittedModel(kind, est, train.target_names[0], train.mode, train.lags, list(train.feature_names),
                       x_scaler, y_scaler, seed, cfg.split_ratio)


def default_descriptor(cfg: RunConfig):
    return cfg.mf_kind if cfg.model == "anfis" else cfg.neurons


def split_for(cfg: RunConfig, table: SeriesTable, target: str, seed: int = None):
    sset = supervised_set(cfg, table, target)
    return split_random(sset, cfg.split_ratio, cfg.seed if seed is None else seed)


@dataclass(frozen=True)
class Prediction:
    year: int
    target: str
    phase: str
    actual: float
    predicted: float


def predict_rows(fm: FittedModel, sset: SupervisedSet, phase: str) -> list[Prediction]:
    pred = fm.predict(sset.X)
    actual = sset.target(fm.target)
    return [Prediction(int(y), fm.target, phase, float(a), float(p)) for y, a, p in zip(sset.years, actual, pred)]


def score_rows(rows: list[Prediction]) -> metrics.TargetScore:
    return metrics.score(rows[0].target, rows[0].phase, [r.actual for r in rows], [r.predicted for r in rows])


PREDICTION_HEADER = ("year", "target", "phase", "actual", "predicted")


def write_predictions(rows, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PREDICTION_HEADER)
        for r in rows:
            w.writerow([r.year, r.target, r.phase, repr(r.actual), repr(r.predicted)])


def read_predictions(path) -> list[Prediction]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [Prediction(int(r["year"]), r["target"], r["phase"], float(r["actual"]), float(r["predicted"]))
                for r in csv.DictReader(fh)]


# -- sweeps -----------------------------------------------------------------

@dataclass(frozen=True)
class SweepCell:
    index: int
    kind: str
    descriptor: str
    target: str


@dataclass(frozen=True)
class SweepResult:
    cell: SweepCell
    train: metrics.TargetScore
    test: metrics.TargetScore


def sweep_cells(cfg: RunConfig) -> list[SweepCell]:
    cells = []
    for kind, grid in (("mlp", [str(n) for n in cfg.neuron_grid]),
                       ("anfis", [MFKind.parse(k).value for k in cfg.mf_grid])):
        for target in cfg.targets:
            for desc in grid:
                cells.append(SweepCell(len(cells), kind, desc, target))
    return cells


def run_cell(cfg: RunConfig, table: SeriesTable, cell: SweepCell) -> SweepResult:
    train, test = split_for(cfg, table, cell.target)
    fm = fit_model(cfg, train, cell.kind, cell.descriptor, cfg.seed + cell.index)
    return SweepResult(cell, score_rows(predict_rows(fm, train, "train")), score_rows(predict_rows(fm, test, "test")))


def _run_cell_args(args):
    return run_cell(*args)


def run_sweep(cfg: RunConfig, table: SeriesTable, jobs: int = 1) -> list[SweepResult]:
    """Train and score every grid cell; ``jobs > 1`` fans cells out to processes.

    Cell ``i`` trains with seed ``cfg.seed + i`` so results do not depend on
    scheduling.
    """
    cells = sweep_cells(cfg)
    if jobs <= 1:
        return [run_cell(cfg, table, c) for c in cells]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(_run_cell_args, [(cfg, table, c) for c in cells]))
    return sorted(results, key=lambda r: r.cell.index)


SWEEP_TABLES = {
    ("mlp", "train"): "mlp_train_rmse.csv",
    ("anfis", "train"): "anfis_train_rmse.csv",
    ("mlp", "test"): "mlp_test_rmse.csv",
    ("anfis", "test"): "anfis_test_rmse.csv",
}


def sweep_tables(results: list[SweepResult]) -> dict:
    """Rows for the four comparison tables keyed like :data:`SWEEP_TABLES`.

    ``best`` marks, per target, the configuration with the lowest RMSE in
    that table's phase.
    """
    tables = {}
    for (kind, phase) in SWEEP_TABLES:
        rows = [r for r in results if r.cell.kind == kind]
        out = []
        for target in dict.fromkeys(r.cell.target for r in rows):
            group = [r for r in rows if r.cell.target == target]
            scores = [getattr(r, phase).rmse for r in group]
            winner = int(np.argmin(scores))
            for i, r in enumerate(group):
                s = getattr(r, phase)
                out.append([target, r.cell.descriptor, repr(s.rmse), repr(s.r2_standard), int(i == winner)])
        tables[(kind, phase)] = out
    return tables


def write_sweep_tables(results, out_dir) -> list:
    paths = []
    for key, rows in sweep_tables(results).items():
        kind, _ = key
        config_col = "neuron_number" if kind == "mlp" else "mf_type"
        path = out_dir / SWEEP_TABLES[key]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["variable", config_col, "rmse", "r2_standard", "best"])
            w.writerows(rows)
        paths.append(path)
    return paths
