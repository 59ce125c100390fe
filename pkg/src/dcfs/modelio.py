"""JSON model files and CSV series ingestion."""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Tuple

import numpy as np

from .model import DcfsModel, DcfsTopology
from .partition import FuzzyPartition
from .rulegrid import FuzzySystem, RuleGrid
from .synth import DatasetError, to_returns

FORMAT = "dcfs-model/1"
FORMAT_ONLINE = "dcfs-model/1+online"


class ModelFormatError(ValueError):
    pass


def model_to_dict(model: DcfsModel) -> dict:
    levels = []
    for lvl in model.systems:
        out = []
        for fs in lvl:
            d = {
                "m": fs.m,
                "q": fs.q,
                "partitions": [p.to_dict() for p in fs.partitions],
                "c": fs.grid.c.tolist(),
            }
            if model.online:
                d["w"] = fs.grid.w.tolist()
            out.append(d)
        levels.append(out)
    return {
        "format": FORMAT_ONLINE if model.online else FORMAT,
        "topology": model.topology.to_dict(),
        "levels": levels,
    }


def model_from_dict(d: dict) -> DcfsModel:
    fmt = d.get("format")
    if fmt not in (FORMAT, FORMAT_ONLINE):
        raise ModelFormatError(f"unknown model format {fmt!r}")
    topo = DcfsTopology.from_dict(d["topology"])
    systems = []
    for l, lvl in enumerate(d["levels"], start=1):
        expected = 1 if topo.shared else topo.width(l)
        if len(lvl) != expected:
            raise ModelFormatError(f"level {l} stores {len(lvl)} systems, expected {expected}")
        row = []
        for s in lvl:
            grid = RuleGrid(int(s["m"]), int(s["q"]), c=np.asarray(s["c"], dtype=float))
            grid.covered[:] = True
            if "w" in s:
                grid.w = np.asarray(s["w"], dtype=float)
            row.append(FuzzySystem(grid, [FuzzyPartition.from_dict(p) for p in s["partitions"]]))
        systems.append(row)
    if len(systems) != topo.L:
        raise ModelFormatError(f"file stores {len(systems)} levels, topology has {topo.L}")
    return DcfsModel(topo, systems, online=fmt == FORMAT_ONLINE)


def save_model(model: DcfsModel, path) -> None:
    # json writes floats with repr(), which round-trips float64 exactly
    Path(path).write_text(json.dumps(model_to_dict(model), indent=1) + "\n", encoding="utf-8")


def load_model(path) -> DcfsModel:
    try:
        d = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not a JSON model file ({exc})") from exc
    return model_from_dict(d)


def count_centers(path) -> int:
    d = json.loads(Path(path).read_text(encoding="utf-8"))
    return sum(len(s["c"]) for lvl in d["levels"] for s in lvl)


def read_series(path) -> Tuple[np.ndarray, np.ndarray, str]:
    """Read a ``t,return`` or ``t,value`` CSV; returns ``(t, values, column)``."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DatasetError(f"{path}: empty file") from None
        if len(header) != 2 or header[0] != "t" or header[1] not in ("return", "value"):
            raise DatasetError(f"{path}: header must be 't,return' or 't,value', got {','.join(header)!r}")
        ts, vals = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise DatasetError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            try:
                ts.append(float(row[0]))
                vals.append(float(row[1]))
            except ValueError:
                raise DatasetError(f"{path}:{lineno}: non-numeric field in {row!r}") from None
    t = np.asarray(ts)
    if len(t) > 1 and np.any(np.diff(t) <= 0):
        raise DatasetError(f"{path}: t must be strictly increasing")
    return t, np.asarray(vals), header[1]


def read_returns(path) -> np.ndarray:
    """Return series from a CSV; price files are converted with relative returns."""
    _, vals, col = read_series(path)
    if col == "value":
        if np.any(vals <= 0):
            raise DatasetError(f"{path}: prices must be positive")
        return to_returns(vals, 0.0, "relative")
    return vals


def write_series(path, values, column: str, t0: int = 1) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["t", column])
        for k, v in enumerate(values):
            w.writerow([t0 + k, repr(float(v))])
