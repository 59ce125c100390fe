"""One-pass Wang-Mendel training of a single fuzzy system.

Each training pair adds its firing strength (and strength times target) to
the one cell where it has maximum membership; covered cells take the
weighted mean, and the remaining cells are filled by a synchronous wavefront
that averages the centers of already-covered neighbors.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .partition import FuzzyPartition
from .rulegrid import ArityError, FuzzySystem, RuleGrid


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class CoverageFrontier:
    generation: int
    covered: np.ndarray


def accumulate(grid: RuleGrid, partitions: Sequence[FuzzyPartition], x, y: float) -> RuleGrid:
    x = np.asarray(x, dtype=float)
    if x.shape != (grid.m,) or len(partitions) != grid.m:
        raise ArityError(f"expected {grid.m} inputs and partitions")
    flat = 0
    g = 1.0
    for d, p in enumerate(partitions):
        lo, g_lo, g_hi = p.locate(x[d])
        if g_lo >= g_hi:
            j, gj = int(lo), float(g_lo)
        else:
            j, gj = min(int(lo) + 1, grid.q - 1), float(g_hi)
        flat = flat * grid.q + j
        g *= gj
    grid.w[flat] += g
    grid.u[flat] += g * y
    return grid


def accumulate_batch(fs: FuzzySystem, X: np.ndarray, y: np.ndarray) -> RuleGrid:
    """Vectorized ``accumulate`` over rows of ``X``, summing in row order."""
    idx, g = fs.argmax_grades(X)
    size = fs.grid.size
    fs.grid.w += np.bincount(idx, weights=g, minlength=size)
    fs.grid.u += np.bincount(idx, weights=g * np.asarray(y, dtype=float), minlength=size)
    return fs.grid


def finalize_centers(grid: RuleGrid) -> np.ndarray:
    """Set ``c = u / w`` on data-covered cells and return that coverage mask C(0)."""
    hit = grid.w != 0
    grid.c[hit] = grid.u[hit] / grid.w[hit]
    grid.covered = hit.copy()
    return grid.covered.copy()


def _neighbor_sums(values: np.ndarray, mask: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Sum of masked neighbor values and masked-neighbor count for every cell."""
    vm = np.where(mask, values, 0.0)
    mf = mask.astype(float)
    total = np.zeros_like(vm)
    count = np.zeros_like(mf)
    for axis in range(values.ndim):
        n = values.shape[axis]
        if n < 2:
            continue
        lo = [slice(None)] * values.ndim
        hi = [slice(None)] * values.ndim
        lo[axis] = slice(0, n - 1)
        hi[axis] = slice(1, n)
        lo, hi = tuple(lo), tuple(hi)
        # neighbor at j-1 contributes to cell j, and vice versa
        total[hi] += vm[lo]
        count[hi] += mf[lo]
        total[lo] += vm[hi]
        count[lo] += mf[hi]
    return total, count


def extrapolate(grid: RuleGrid, history: Optional[List[CoverageFrontier]] = None) -> RuleGrid:
    """Fill uncovered cells generation by generation.

    Within a generation every newly reached cell is computed from the frozen
    previous coverage before any of them is committed.
    """
    covered = grid.covered.reshape(grid.shape).copy()
    if not covered.any():
        raise TrainingError("no cell is covered by data; cannot extrapolate")
    c = grid.c.reshape(grid.shape)
    gen = 0
    if history is not None:
        history.append(CoverageFrontier(gen, covered.ravel().copy()))
    while not covered.all():
        total, count = _neighbor_sums(c, covered)
        new = ~covered & (count > 0)
        c[new] = total[new] / count[new]
        covered |= new
        gen += 1
        if history is not None:
            history.append(CoverageFrontier(gen, covered.ravel().copy()))
    grid.covered = covered.ravel()
    return grid


def fit_fs(X, y, q: int, partitions: Optional[Sequence[FuzzyPartition]] = None) -> FuzzySystem:
    """Array form of :func:`train_fs`; ``partitions`` overrides the per-column range fit."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or len(X) == 0:
        raise TrainingError("training data must be a non-empty (N, m) array")
    if len(y) != len(X):
        raise ArityError(f"{len(X)} inputs but {len(y)} targets")
    m = X.shape[1]
    if partitions is None:
        partitions = [FuzzyPartition.fit(X[:, d], q) for d in range(m)]
    fs = FuzzySystem(RuleGrid(m, q), list(partitions))
    accumulate_batch(fs, X, y)
    finalize_centers(fs.grid)
    extrapolate(fs.grid)
    return fs


def train_fs(data: Iterable[Tuple[Sequence[float], float]], q: int) -> FuzzySystem:
    """Train one fuzzy system from ``(x, y)`` pairs, reading each pair once."""
    xs, ys = [], []
    for x, y in data:
        xs.append(np.asarray(x, dtype=float).ravel())
        ys.append(float(y))
    if not xs:
        raise TrainingError("no training data")
    try:
        X = np.vstack(xs)
    except ValueError as exc:
        raise ArityError("training inputs have inconsistent lengths") from exc
    return fit_fs(X, np.asarray(ys), q)
