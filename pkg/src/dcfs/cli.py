"""Command-line entry point: ``dcfs {gen,train,eval,sweep,backtest}``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import modelio
from .backtest import BacktestError, run_backtest
from .model import TopologyError, build_topology, forward, train
from .online import OnlineConfig
from .partition import RangeFitError
from .rulegrid import ArityError
from .synth import DatasetError, SynthConfig, make_dataset, mackey_glass, to_index, to_returns
from .wm_train import TrainingError

log = logging.getLogger("dcfs")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_TOPOLOGY = 4
EXIT_IO = 5


class ConfigError(ValueError):
    pass


def rmse(pred, target) -> float:
    e = np.asarray(target) - np.asarray(pred)
    return float(np.sqrt(np.mean(e**2))) if len(e) else float("nan")


def _write_rows(path, header, rows):
    fh = sys.stdout if path in (None, "-") else open(path, "w", newline="", encoding="utf-8")
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if fh is not sys.stdout:
            fh.close()


def _selections(args):
    if not getattr(args, "config", None):
        return None
    cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
    if "selections" not in cfg:
        raise ConfigError(f"{args.config}: no 'selections' block")
    return cfg["selections"]


def _topology(args, q=None):
    return build_topology(args.n, args.m, args.stride, args.q if q is None else q,
                          selections=_selections(args), shared=args.shared, L=args.levels)


def _split(args, ds):
    if args.n_train is not None:
        n_train = args.n_train
    else:
        if not 0.0 < args.train_fraction < 1.0:
            raise ConfigError(f"--train-fraction must lie in (0, 1), got {args.train_fraction}")
        n_train = int(round(len(ds) * args.train_fraction))
    if not 0 < n_train <= len(ds):
        raise ConfigError(f"training rows {n_train} outside 1..{len(ds)}")
    return ds.split(n_train)


def _fit_report(args, q=None):
    returns = modelio.read_returns(args.data)
    ds = make_dataset(returns, args.n)
    tr, te = _split(args, ds)
    topo = _topology(args, q)
    timings = []
    t0 = time.perf_counter()
    model = train(tr, topo, timings=timings, **({} if topo.shared else {"n_jobs": args.jobs}))
    elapsed = time.perf_counter() - t0
    report = {
        "q": topo.q,
        "train_rmse": rmse(forward(model, tr.inputs), tr.targets),
        "test_rmse": rmse(forward(model, te.inputs), te.targets) if len(te) else float("nan"),
        "n_train": len(tr),
        "n_test": len(te),
        "parameters": model.n_parameters,
        "train_seconds": elapsed,
    }
    for l, dt in enumerate(timings, start=1):
        report[f"level_{l}_seconds"] = dt
    return model, report


def cmd_gen(args) -> int:
    n_returns = args.n_points
    cfg = SynthConfig(tau=args.tau, n_points=n_returns + args.warmup + 1, noise_sigma=args.noise_sigma,
                      seed=args.seed, warmup=args.warmup, return_kind=args.return_kind)
    rng = np.random.default_rng(cfg.seed)
    r = to_returns(mackey_glass(cfg), cfg.noise_sigma, cfg.return_kind, rng)
    modelio.write_series(args.returns_out, r, "return")
    if args.prices_out:
        modelio.write_series(args.prices_out, np.concatenate([[args.y0], to_index(r, args.y0)]), "value", t0=0)
    log.info("wrote %d returns to %s", len(r), args.returns_out)
    return EXIT_OK


def cmd_train(args) -> int:
    model, report = _fit_report(args)
    model.online = args.online
    if args.model_out:
        modelio.save_model(model, args.model_out)
    _write_rows(args.report, ["metric", "value"], report.items())
    return EXIT_OK


def cmd_eval(args) -> int:
    model = modelio.load_model(args.model)
    returns = modelio.read_returns(args.data)
    ds = make_dataset(returns, model.topology.n)
    pred = forward(model, ds.inputs)
    if args.predictions_out:
        t = np.arange(len(ds)) + model.topology.n + 1
        _write_rows(args.predictions_out, ["t", "prediction", "realized"],
                    ([int(a), repr(float(b)), repr(float(c))] for a, b, c in zip(t, pred, ds.targets)))
    _write_rows(args.report, ["metric", "value"], [("rmse", rmse(pred, ds.targets)), ("rows", len(ds))])
    return EXIT_OK


def cmd_sweep(args) -> int:
    qs = [int(v) for v in args.q_list.split(",") if v.strip()]
    if not qs:
        raise ConfigError("--q-list is empty")

    def one(q):
        try:
            _, rep = _fit_report(args, q)
            return [q, repr(rep["train_rmse"]), repr(rep["test_rmse"]), ""]
        except (TrainingError, TopologyError, ArityError, RangeFitError) as exc:
            log.error("q=%d failed: %s", q, exc)
            return [q, "", "", str(exc)]

    if args.jobs > 1:
        with ThreadPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(one, qs))
    else:
        rows = [one(q) for q in qs]
    _write_rows(args.out, ["q", "train_rmse", "test_rmse", "error"], rows)
    return EXIT_OK


def cmd_backtest(args) -> int:
    returns = modelio.read_returns(args.data)
    if args.model:
        model = modelio.load_model(args.model)
        ds_rows = len(returns) - model.topology.n
        warm = args.warm_start if args.warm_start is not None else int(round(ds_rows * 2 / 3))
    else:
        ds = make_dataset(returns, args.n)
        warm = args.warm_start if args.warm_start is not None else int(round(len(ds) * 2 / 3))
        if not 0 < warm < len(ds):
            raise ConfigError(f"warm start {warm} outside 1..{len(ds) - 1}")
        model = train(ds.split(warm)[0], _topology(args))
    res = run_backtest(returns, model, OnlineConfig(args.alpha), warm)
    res.to_csv(args.out)
    if args.model_out:
        model.online = True
        modelio.save_model(model, args.model_out)
    _write_rows(args.summary, ["metric", "value"], res.summary().items())
    return EXIT_OK


def _add_topology_args(p):
    p.add_argument("--n", type=int, default=11, help="number of lagged returns fed to the model")
    p.add_argument("--m", type=int, default=3, help="window length")
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--q", type=int, default=20, help="fuzzy sets per input")
    p.add_argument("--levels", type=int, default=None, help="expected level count (checked, not forced)")
    p.add_argument("--shared", action="store_true", help="one shared fuzzy system per level")
    p.add_argument("--config", help="JSON file with an explicit 'selections' block")


def _add_split_args(p):
    p.add_argument("--train-fraction", type=float, default=2 / 3)
    p.add_argument("--n-train", type=int, default=None, help="training rows; overrides --train-fraction")
    p.add_argument("--jobs", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dcfs", description="Deep convolutional fuzzy systems")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic chaotic return series")
    p.add_argument("--returns-out", required=True)
    p.add_argument("--prices-out")
    p.add_argument("--n-points", type=int, default=3000, help="number of returns")
    p.add_argument("--tau", type=int, default=50)
    p.add_argument("--warmup", type=int, default=49, help="leading series values dropped")
    p.add_argument("--noise-sigma", type=float, default=1e-4)
    p.add_argument("--return-kind", choices=("log", "relative"), default="log")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--y0", type=float, default=100.0)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("train", help="train a model offline and report RMSE")
    p.add_argument("--data", required=True)
    _add_topology_args(p)
    _add_split_args(p)
    p.add_argument("--model-out")
    p.add_argument("--online", action="store_true", help="store weights for later online updating")
    p.add_argument("--report", default="-")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a stored model on a series")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--predictions-out")
    p.add_argument("--report", default="-")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="train/test RMSE as a function of q")
    p.add_argument("--data", required=True)
    _add_topology_args(p)
    _add_split_args(p)
    p.add_argument("--q-list", default="5,10,15,20,25,30")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("backtest", help="walk-forward long/short backtest with online updates")
    p.add_argument("--data", required=True)
    _add_topology_args(p)
    p.add_argument("--model", help="start from a stored model instead of training on the warm-start prefix")
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--warm-start", type=int, default=None, help="first traded dataset row")
    p.add_argument("--out", required=True)
    p.add_argument("--summary", default="-")
    p.add_argument("--model-out")
    p.set_defaults(func=cmd_backtest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except TopologyError as exc:
        code, err = EXIT_TOPOLOGY, exc
    except (DatasetError, modelio.ModelFormatError, TrainingError, RangeFitError, ArityError,
            BacktestError) as exc:
        code, err = EXIT_DATA, exc
    except OSError as exc:
        code, err = EXIT_IO, exc
    except ValueError as exc:
        code, err = EXIT_CONFIG, exc
    print(f"dcfs: error: {err}", file=sys.stderr)
    return code

if __name__ == "__main__":
    sys.exit(main())
