"""Command-line interface: ``foodcast {ingest,train,evaluate,sweep,forecast,plot}``."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
import time
import warnings
from pathlib import Path

from . import persist, pipeline
from .config import RunConfig, load_config
from .dataset import SeriesTable
from .exceptions import DataError, TrainingError
from .forecast import read_forecast_csv, recursive_forecast, write_forecast_csv, write_forecast_table
from .metrics import EvalReport
from .plot import forecast_chart, prediction_charts

_FLAG_FIELDS = [f.name for f in dataclasses.fields(RunConfig) if f.name not in ("element_map", "items")]


def _add_config_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key = value run configuration file")
    for name in _FLAG_FIELDS:
        p.add_argument("--" + name.replace("_", "-"), dest=name, default=None, metavar=name.upper(),
                       help=argparse.SUPPRESS if name in ("neuron_grid", "mf_grid") else None)
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override any configuration key, e.g. items.agri_production='Wheat;Rice, paddy'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="foodcast", description="Neuro-fuzzy and MLP production forecasting")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="aggregate a FAOSTAT CSV into a yearly series table")
    _add_config_flags(p)

    p = sub.add_parser("train", help="train one model per target")
    _add_config_flags(p)

    p = sub.add_parser("evaluate", help="score saved models on the train/test split")
    _add_config_flags(p)
    p.add_argument("--model-file", nargs="+", required=True, dest="model_files")
    p.add_argument("--phase", choices=("train", "test", "all"), default="test")

    p = sub.add_parser("sweep", help="MLP neuron and ANFIS MF-type comparison tables")
    _add_config_flags(p)

    p = sub.add_parser("forecast", help="recursive multi-year forecast from saved models")
    _add_config_flags(p)
    p.add_argument("--model-file", nargs="+", required=True, dest="model_files")

    p = sub.add_parser("plot", help="SVG charts from prediction or forecast CSVs")
    p.add_argument("--predictions", help="predictions.csv written by evaluate")
    p.add_argument("--forecast", help="forecast.csv written by forecast")
    p.add_argument("--history", help="series table CSV to draw before the forecast")
    p.add_argument("--out", default="out")
    return parser


def resolve_config(args) -> RunConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    for name in _FLAG_FIELDS:
        value = getattr(args, name, None)
        if value is not None:
            cfg.update(name, value)
    for item in getattr(args, "set", []):
        if "=" not in item:
            raise ValueError(f"--set expects KEY=VALUE, got {item!r}")
        cfg.update(*item.split("=", 1))
    return cfg.validate()


def _out_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_ingest(cfg: RunConfig) -> int:
    out = _out_dir(cfg.out)
    table = pipeline.load_table(cfg)
    table.to_csv(out / "series_table.csv")
    for name, (first, last, n) in table.coverage().items():
        print(f"{name:22s} {first}-{last} ({n} years)")
    for target in cfg.targets:
        pipeline.supervised_set(cfg, table, target).to_csv(out / f"supervised_{target}.csv")
    print(f"wrote {out / 'series_table.csv'}")
    return 0


def _write_history(fm, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["epoch", "train_rmse_scaled"])
        for i, v in enumerate(fm.estimator.history_):
            w.writerow([i, repr(float(v))])


def cmd_train(cfg: RunConfig) -> int:
    out = _out_dir(cfg.out)
    table = pipeline.load_table(cfg)
    report = EvalReport()
    descriptor = pipeline.default_descriptor(cfg)
    for target in cfg.targets:
        train, _ = pipeline.split_for(cfg, table, target)
        fm = pipeline.fit_model(cfg, train, cfg.model, descriptor, cfg.seed)
        fm.extra["split_seed"] = cfg.seed
        path = out / f"model_{cfg.model}_{target}.json"
        persist.save(fm, path)
        _write_history(fm, out / f"history_{cfg.model}_{target}.csv")
        score = pipeline.score_rows(pipeline.predict_rows(fm, train, "train"))
        report.append(score)
        print(f"{target}: {cfg.model} ({fm.descriptor}) train RMSE {score.rmse:.6g} -> {path}")
    report.to_csv(out / f"train_report_{cfg.model}.csv")
    return 0


def _model_cfg(cfg: RunConfig, fm) -> RunConfig:
    mcfg = dataclasses.replace(cfg, feature_mode=fm.feature_mode, lags=fm.lags or cfg.lags,
                               split_ratio=fm.split_ratio, seed=fm.extra.get("split_seed", fm.seed))
    return mcfg


def cmd_evaluate(cfg: RunConfig, model_files, phase: str) -> int:
    out = _out_dir(cfg.out)
    table = pipeline.load_table(cfg)
    report, rows = EvalReport(), []
    for path in model_files:
        fm = persist.load(path)
        mcfg = _model_cfg(cfg, fm)
        train, test = pipeline.split_for(mcfg, table, fm.target)
        parts = {"train": [train], "test": [test], "all": [train, test]}[phase]
        preds = [p for part, name in zip(parts, ["train", "test"] if phase == "all" else [phase])
                 for p in pipeline.predict_rows(fm, part, name)]
        for ph in dict.fromkeys(p.phase for p in preds):
            report.append(pipeline.score_rows([p for p in preds if p.phase == ph]))
        rows.extend(preds)
    report.to_csv(out / "eval_report.csv")
    pipeline.write_predictions(rows, out / "predictions.csv")
    for s in report:
        print(f"{s.target} [{s.phase}] n={s.n} RMSE={s.rmse:.6g} R2(paper)={s.r2_paper:.4f} "
              f"R2(standard)={s.r2_standard:.4f}")
    return 0


def cmd_sweep(cfg: RunConfig) -> int:
    out = _out_dir(cfg.out)
    table = pipeline.load_table(cfg)
    t0 = time.perf_counter()
    results = pipeline.run_sweep(cfg, table, jobs=cfg.jobs)
    paths = pipeline.write_sweep_tables(results, out)
    for (kind, phase), rows in pipeline.sweep_tables(results).items():
        print(f"{kind} {phase}:")
        for target, desc, rmse, _, best in rows:
            print(f"  {target:22s} {desc:12s} RMSE={float(rmse):.6g}{'  *' if best else ''}")
    print(f"{len(results)} cells in {time.perf_counter() - t0:.1f}s; wrote {', '.join(p.name for p in paths)}")
    return 0


def cmd_forecast(cfg: RunConfig, model_files) -> int:
    out = _out_dir(cfg.out)
    table = pipeline.load_table(cfg)
    results = []
    for path in model_files:
        fm = persist.load(path)
        history = table.series[fm.target]
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            res = recursive_forecast(
                fm.estimator, fm.x_scaler, history, cfg.horizon, last_year=int(table.years[-1]), lags=fm.lags,
                target=fm.target, feature_mode=fm.feature_mode, model_name=fm.kind, mf_or_neurons=fm.descriptor,
                seed=fm.seed,
            )
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        results.append(res)
    write_forecast_csv(results, out / "forecast.csv")
    write_forecast_table(results, out / "forecast_table.csv")
    hist_targets = [r.target for r in results]
    SeriesTable(table.years, {t: table.series[t] for t in hist_targets}).to_csv(out / "forecast_history.csv")
    for res in results:
        print(f"{res.target}: {res.years[0]}-{res.years[-1]} -> {res.values[-1]:.6g}")
    print(f"wrote {out / 'forecast.csv'}")
    return 0


def cmd_plot(args) -> int:
    if not args.predictions and not args.forecast:
        raise ValueError("plot needs --predictions and/or --forecast")
    out = _out_dir(args.out)
    written = []
    if args.predictions:
        for target, svg in prediction_charts(pipeline.read_predictions(args.predictions)).items():
            path = out / f"predictions_{target}.svg"
            path.write_text(svg, encoding="utf-8")
            written.append(path)
    if args.forecast:
        history = None
        if args.history:
            table = SeriesTable.from_csv(args.history)
            history = {k: (table.years, v) for k, v in table.series.items()}
        path = out / "forecast.svg"
        path.write_text(forecast_chart(read_forecast_csv(args.forecast), history), encoding="utf-8")
        written.append(path)
    print("wrote " + ", ".join(str(p) for p in written))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "plot":
            return cmd_plot(args)
        cfg = resolve_config(args)
        if args.command == "ingest":
            return cmd_ingest(cfg)
        if args.command == "train":
            return cmd_train(cfg)
        if args.command == "evaluate":
            return cmd_evaluate(cfg, args.model_files, args.phase)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        if args.command == "forecast":
            return cmd_forecast(cfg, args.model_files)
    except (DataError, TrainingError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"foodcast {args.command}: error: {msg}", file=sys.stderr)
        return 2
    return 1


if __name__ == "__main__":
    sys.exit(main())
