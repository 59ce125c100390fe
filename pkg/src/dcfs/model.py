"""Deep convolutional fuzzy systems: topology, layer-wise training, evaluation."""
from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .partition import RangeFitError
from .rulegrid import ArityError, FuzzySystem, cell_coords
from . import wm_train
from .wm_train import TrainingError

log = logging.getLogger(__name__)


class TopologyError(ValueError):
    pass


@dataclass(frozen=True)
class WindowScheme:
    m: int
    stride: int = 1
    selections: Optional[Tuple[Tuple[Tuple[int, ...], ...], ...]] = None

    def __post_init__(self):
        if self.m < 1:
            raise TopologyError(f"window length must be >= 1, got {self.m}")
        if not 1 <= self.stride <= self.m:
            raise TopologyError(f"stride must lie in 1..m={self.m}, got {self.stride}")


@dataclass(frozen=True)
class DcfsTopology:
    n: int
    q: int
    scheme: WindowScheme
    widths: Tuple[int, ...]
    shared: bool = False

    @property
    def L(self) -> int:
        return len(self.widths)

    @property
    def m(self) -> int:
        return self.scheme.m

    def width(self, l: int) -> int:
        """Output width of level ``l``; level 0 is the raw input."""
        return self.n if l == 0 else self.widths[l - 1]

    def to_dict(self) -> dict:
        d = {
            "n": self.n,
            "q": self.q,
            "m": self.scheme.m,
            "stride": self.scheme.stride,
            "shared": self.shared,
            "widths": list(self.widths),
        }
        if self.scheme.selections is not None:
            d["selections"] = [[list(s) for s in lvl] for lvl in self.scheme.selections]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DcfsTopology":
        topo = build_topology(
            d["n"], d["m"], d.get("stride", 1), d["q"],
            selections=d.get("selections"), shared=d.get("shared", False),
        )
        if list(topo.widths) != list(d["widths"]):
            raise TopologyError(f"stored widths {d['widths']} disagree with derived {list(topo.widths)}")
        return topo


def _stride_widths(n: int, m: int, stride: int) -> Tuple[int, ...]:
    widths = []
    w = n
    seq = [n]
    while True:
        if w < m or (w - m) % stride:
            raise TopologyError(f"window chain does not terminate at width 1: {seq}")
        nxt = (w - m) // stride + 1
        widths.append(nxt)
        seq.append(nxt)
        if nxt == 1:
            return tuple(widths)
        if nxt >= w:
            raise TopologyError(f"window chain does not shrink: {seq}")
        w = nxt


def build_topology(n: int, m: int, stride: int = 1, q: int = 20, selections=None,
                   shared: bool = False, L: Optional[int] = None) -> DcfsTopology:
    if n < 1 or q < 2:
        raise TopologyError(f"need n >= 1 and q >= 2, got n={n}, q={q}")
    if selections is not None:
        sel = tuple(tuple(tuple(int(i) for i in s) for s in lvl) for lvl in selections)
        prev = n
        for l, lvl in enumerate(sel, start=1):
            if not lvl:
                raise TopologyError(f"level {l} has no fuzzy systems")
            for i, s in enumerate(lvl, start=1):
                if not s or any(not 1 <= k <= prev for k in s):
                    raise TopologyError(f"level {l} system {i} selects {list(s)} outside 1..{prev}")
            if shared and len({len(s) for s in lvl}) != 1:
                raise TopologyError(f"shared level {l} mixes window lengths")
            prev = len(lvl)
        if prev != 1:
            raise TopologyError(f"top level must hold one fuzzy system, has {prev}")
        widths = tuple(len(lvl) for lvl in sel)
        scheme = WindowScheme(max(len(s) for lvl in sel for s in lvl), 1, sel)
    else:
        if n < m:
            raise TopologyError(f"need n >= m, got n={n}, m={m}")
        scheme = WindowScheme(m, stride)
        widths = _stride_widths(n, m, stride)
    if L is not None and L != len(widths):
        raise TopologyError(f"requested L={L} but the window scheme yields {len(widths)} levels {list(widths)}")
    return DcfsTopology(n, q, scheme, widths, shared)


def level_inputs(topology: DcfsTopology, l: int, i: int) -> Tuple[int, ...]:
    """1-based indices into the level ``l-1`` outputs feeding system ``i`` of level ``l``."""
    if not 1 <= l <= topology.L or not 1 <= i <= topology.width(l):
        raise IndexError(f"no system {i} at level {l}")
    sch = topology.scheme
    if sch.selections is not None:
        return tuple(sch.selections[l - 1][i - 1])
    start = (i - 1) * sch.stride + 1
    return tuple(range(start, start + sch.m))


@dataclass
class DcfsModel:
    topology: DcfsTopology
    systems: List[List[FuzzySystem]] = field(default_factory=list)
    online: bool = False

    @property
    def L(self) -> int:
        return self.topology.L

    @property
    def n_parameters(self) -> int:
        return sum(fs.grid.size for lvl in self.systems for fs in lvl)

    def system(self, l: int, i: int) -> FuzzySystem:
        lvl = self.systems[l - 1]
        return lvl[0] if self.topology.shared else lvl[i - 1]

    def copy(self) -> "DcfsModel":
        return DcfsModel(self.topology, [[fs.copy() for fs in lvl] for lvl in self.systems], self.online)


def _window(topology: DcfsTopology, l: int, i: int) -> np.ndarray:
    return np.asarray(level_inputs(topology, l, i), dtype=np.intp) - 1


def _check_inputs(model: DcfsModel, X0) -> Tuple[np.ndarray, bool]:
    X0 = np.asarray(X0, dtype=float)
    single = X0.ndim == 1
    if single:
        X0 = X0[None, :]
    if X0.shape[1] != model.topology.n:
        raise ArityError(f"model takes {model.topology.n} inputs, got {X0.shape[1]}")
    return X0, single


def propagate(model: DcfsModel, X: np.ndarray, l: int) -> np.ndarray:
    """Outputs of level ``l`` given the (N, width(l-1)) outputs of level ``l-1``."""
    topo = model.topology
    if len(X) == 1:
        row = X[0].tolist()
        out = [model.system(l, i).infer1([row[k - 1] for k in level_inputs(topo, l, i)])
               for i in range(1, topo.width(l) + 1)]
        return np.array([out])
    out = np.empty((len(X), topo.width(l)))
    for i in range(1, topo.width(l) + 1):
        out[:, i - 1] = model.system(l, i).infer_batch(X[:, _window(topo, l, i)])
    return out


def level_outputs(model: DcfsModel, x0, l: int) -> np.ndarray:
    """Outputs of level ``l`` (level 0 is the input itself); accepts one row or a batch."""
    X, single = _check_inputs(model, x0)
    if not 0 <= l <= model.L:
        raise IndexError(f"level {l} outside 0..{model.L}")
    for k in range(1, l + 1):
        X = propagate(model, X, k)
    return X[0] if single else X


def forward(model: DcfsModel, x0):
    out = level_outputs(model, x0, model.L)
    return float(out[0]) if out.ndim == 1 else out[:, 0]


def trace(model: DcfsModel, x0) -> List[List[dict]]:
    """Per system, the max-membership cell and its center for one input vector."""
    X, _ = _check_inputs(model, x0)
    topo = model.topology
    out = []
    for l in range(1, model.L + 1):
        row = []
        for i in range(1, topo.width(l) + 1):
            fs = model.system(l, i)
            xi = X[:, _window(topo, l, i)]
            idx, grade = fs.argmax_grades(xi)
            row.append({
                "level": l,
                "system": i,
                "cell": cell_coords(int(idx[0]), fs.m, fs.q),
                "strength": float(grade[0]),
                "c": float(fs.grid.c[idx[0]]),
            })
        out.append(row)
        X = propagate(model, X, l)
    return out


def _pairs(X: np.ndarray, y: np.ndarray):
    return zip(X, y)


def _train_one(X, y, q, l, i):
    try:
        return wm_train.train_fs(_pairs(X, y), q)
    except (TrainingError, ArityError, RangeFitError) as exc:
        raise TrainingError(f"level {l}, system {i}: {exc}") from exc


def _dataset_arrays(data) -> Tuple[np.ndarray, np.ndarray]:
    if hasattr(data, "inputs"):
        return np.asarray(data.inputs, dtype=float), np.asarray(data.targets, dtype=float)
    X, y = data
    return np.asarray(X, dtype=float), np.asarray(y, dtype=float)


def train_offline(data, topology: DcfsTopology, n_jobs: int = 1, timings: Optional[list] = None) -> DcfsModel:
    """Layer-by-layer one-pass training of a general (non-shared) DCFS."""
    if topology.shared:
        raise TopologyError("topology is shared; use train_offline_shared")
    X, y = _dataset_arrays(data)
    if X.ndim != 2 or X.shape[1] != topology.n:
        raise ArityError(f"dataset has shape {X.shape}, topology expects n={topology.n}")
    if len(X) == 0:
        raise TrainingError("empty dataset")
    model = DcfsModel(topology, [])
    for l in range(1, topology.L + 1):
        t0 = time.perf_counter()
        jobs = [(X[:, _window(topology, l, i)], y, topology.q, l, i) for i in range(1, topology.width(l) + 1)]
        if n_jobs > 1:
            with ThreadPoolExecutor(n_jobs) as pool:
                level = list(pool.map(lambda a: _train_one(*a), jobs))
        else:
            level = [_train_one(*a) for a in jobs]
        model.systems.append(level)
        X = propagate(model, X, l)
        dt = time.perf_counter() - t0
        log.debug("level %d: %d systems trained in %.3fs", l, len(level), dt)
        if timings is not None:
            timings.append(dt)
    return model


def train_offline_shared(data, topology: DcfsTopology, timings: Optional[list] = None) -> DcfsModel:
    """One fuzzy system per level, trained on the windowed pairs of every position pooled together."""
    if not topology.shared:
        raise TopologyError("topology is not shared; use train_offline")
    X, y = _dataset_arrays(data)
    if X.ndim != 2 or X.shape[1] != topology.n:
        raise ArityError(f"dataset has shape {X.shape}, topology expects n={topology.n}")
    if len(X) == 0:
        raise TrainingError("empty dataset")
    model = DcfsModel(topology, [])
    for l in range(1, topology.L + 1):
        t0 = time.perf_counter()
        width = topology.width(l)
        # position-major pooling: all N rows of window 1, then window 2, ...
        Xp = np.vstack([X[:, _window(topology, l, i)] for i in range(1, width + 1)])
        yp = np.tile(y, width)
        model.systems.append([_train_one(Xp, yp, topology.q, l, 1)])
        X = propagate(model, X, l)
        dt = time.perf_counter() - t0
        if timings is not None:
            timings.append(dt)
    return model


def train(data, topology: DcfsTopology, **kw) -> DcfsModel:
    if topology.shared:
        kw.pop("n_jobs", None)
        return train_offline_shared(data, topology, **kw)
    return train_offline(data, topology, **kw)
