"""Walk-forward long/short backtest driven by DCFS return predictions."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import model as dcfs_model
from .model import DcfsModel
from .online import OnlineConfig, update_online
from .synth import make_dataset

CSV_COLUMNS = ("t", "value_index", "value_dcfs", "prediction", "realized", "correct")


class BacktestError(ValueError):
    pass


def sign(x) -> np.ndarray:
    """Sign with ``sign(0) = +1``: flat days and zero predictions count as long."""
    return np.where(np.asarray(x) >= 0, 1, -1)


@dataclass
class BacktestResult:
    t: np.ndarray
    value_index: np.ndarray
    value_dcfs: np.ndarray
    predictions: np.ndarray
    realized: np.ndarray
    correct: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def sign_accuracy(self) -> float:
        return sign_accuracy(self)

    def summary(self) -> dict:
        return {
            "days": int(len(self.t)),
            "value_index_end": float(self.value_index[-1]) if len(self.t) else 100.0,
            "value_dcfs_end": float(self.value_dcfs[-1]) if len(self.t) else 100.0,
            "sign_accuracy": sign_accuracy(self) if len(self.t) else float("nan"),
            **self.meta,
        }

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            for row in zip(self.t, self.value_index, self.value_dcfs, self.predictions, self.realized, self.correct):
                w.writerow([int(row[0]), repr(float(row[1])), repr(float(row[2])),
                            repr(float(row[3])), repr(float(row[4])), int(row[5])])


def sign_accuracy(result: BacktestResult) -> float:
    if len(result.correct) == 0:
        raise BacktestError("empty backtest result")
    return float(np.mean(np.asarray(result.correct) == 1))


def run_strategy(realized, predictions, v0: float = 100.0, t=None) -> BacktestResult:
    """Fund trajectories for given predictions; no model involved."""
    r = np.asarray(realized, dtype=float)
    p = np.asarray(predictions, dtype=float)
    if r.shape != p.shape:
        raise BacktestError("predictions and realized returns differ in length")
    correct = np.where(sign(p) == sign(r), 1, -1)
    vi = v0 * np.cumprod(1.0 + r)
    vd = v0 * np.cumprod(1.0 + correct * np.abs(r))
    t = np.arange(1, len(r) + 1) if t is None else np.asarray(t)
    return BacktestResult(t, vi, vd, p, r, correct, {"sign_zero": "+1"})


def run_backtest(returns, model: DcfsModel, cfg: Optional[OnlineConfig] = OnlineConfig(),
                 warm_start: Optional[int] = None, v0: float = 100.0) -> BacktestResult:
    """Predict each day from the previous ``n`` returns, trade, then learn from the realized return.

    ``warm_start`` is the first dataset row (lag window) traded; ``None``
    means two thirds of the rows. ``cfg=None`` freezes the model. The model
    is updated in place.
    """
    n = model.topology.n
    ds = make_dataset(returns, n)
    if warm_start is None:
        warm_start = int(round(len(ds) * 2 / 3))
    if not 0 <= warm_start < len(ds):
        raise BacktestError(f"warm start row {warm_start} leaves no days to trade (have {len(ds)} rows)")
    days = range(warm_start, len(ds))
    preds = np.empty(len(days))
    for k, row in enumerate(days):
        x = ds.inputs[row]
        preds[k] = dcfs_model.forward(model, x)
        if cfg is not None:
            update_online(model, x, ds.targets[row], cfg)
    # t counts return indices: row k predicts returns[k + n]
    t = np.arange(warm_start, len(ds)) + n
    res = run_strategy(ds.targets[warm_start:], preds, v0, t)
    res.meta.update({
        "warm_start": warm_start,
        "alpha": None if cfg is None else cfg.alpha,
        "algorithm": "shared" if model.topology.shared else "general",
    })
    return res
