"""Dense q**m rule grids and single fuzzy-system inference."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from .partition import FuzzyPartition


class ArityError(ValueError):
    pass


def linear_index(coords: Sequence[int], m: int, q: int) -> int:
    """Row-major flat index of 1-based ``coords``; ``coords[0]`` varies slowest."""
    if len(coords) != m:
        raise ArityError(f"expected {m} coordinates, got {len(coords)}")
    idx = 0
    for j in coords:
        if not 1 <= j <= q:
            raise IndexError(f"coordinate {j} outside 1..{q}")
        idx = idx * q + (j - 1)
    return idx


def cell_coords(index: int, m: int, q: int) -> Tuple[int, ...]:
    if not 0 <= index < q**m:
        raise IndexError(f"flat index {index} outside 0..{q**m - 1}")
    out = []
    for _ in range(m):
        index, r = divmod(index, q)
        out.append(r + 1)
    return tuple(reversed(out))


def neighbors(coords: Sequence[int], q: int) -> List[Tuple[int, ...]]:
    out = []
    for r, j in enumerate(coords):
        for step in (-1, 1):
            k = j + step
            if 1 <= k <= q:
                nb = list(coords)
                nb[r] = k
                out.append(tuple(nb))
    return out


@dataclass
class RuleGrid:
    m: int
    q: int
    c: np.ndarray = None
    w: np.ndarray = None
    u: np.ndarray = None
    covered: np.ndarray = None

    def __post_init__(self):
        size = self.q**self.m
        if self.c is None:
            self.c = np.zeros(size)
        if self.w is None:
            self.w = np.zeros(size)
        if self.u is None:
            self.u = np.zeros(size)
        if self.covered is None:
            self.covered = np.zeros(size, dtype=bool)
        for name in ("c", "w", "u", "covered"):
            if getattr(self, name).shape != (size,):
                raise ValueError(f"{name} must have length q**m = {size}")

    @property
    def size(self) -> int:
        return self.q**self.m

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.q,) * self.m

    def copy(self) -> "RuleGrid":
        return RuleGrid(self.m, self.q, self.c.copy(), self.w.copy(), self.u.copy(), self.covered.copy())


@dataclass
class FuzzySystem:
    grid: RuleGrid
    partitions: List[FuzzyPartition] = field(default_factory=list)

    def __post_init__(self):
        if len(self.partitions) != self.grid.m:
            raise ArityError(f"grid has m={self.grid.m} but {len(self.partitions)} partitions were given")
        for p in self.partitions:
            if p.q != self.grid.q:
                raise ValueError(f"partition q={p.q} does not match grid q={self.grid.q}")

    @property
    def m(self) -> int:
        return self.grid.m

    @property
    def q(self) -> int:
        return self.grid.q

    def copy(self) -> "FuzzySystem":
        return FuzzySystem(self.grid.copy(), list(self.partitions))

    def _check(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.m:
            raise ArityError(f"fuzzy system takes {self.m} inputs, got {X.shape[1]}")
        return X

    def argmax_grades(self, X) -> Tuple[np.ndarray, np.ndarray]:
        """Flat index of the max-membership cell of each row and its grade product."""
        X = self._check(X)
        q = self.q
        idx = np.zeros(len(X), dtype=np.intp)
        grade = np.ones(len(X))
        for d, p in enumerate(self.partitions):
            lo, g_lo, g_hi = p.locate(X[:, d])
            take_lo = g_lo >= g_hi
            j = np.where(take_lo, lo, np.minimum(lo + 1, q - 1))
            idx = idx * q + j
            grade = grade * np.where(take_lo, g_lo, g_hi)
        return idx, grade

    def infer_batch(self, X) -> np.ndarray:
        """Evaluate the fuzzy system on each row of ``X`` over its 2**m active cells."""
        X = self._check(X)
        q, m = self.q, self.m
        los, gs = [], []
        for d, p in enumerate(self.partitions):
            lo, g_lo, g_hi = p.locate(X[:, d])
            los.append((lo, np.minimum(lo + 1, q - 1)))
            gs.append((g_lo, g_hi))
        num = np.zeros(len(X))
        den = np.zeros(len(X))
        c = self.grid.c
        for corner in itertools.product((0, 1), repeat=m):
            idx = np.zeros(len(X), dtype=np.intp)
            g = np.ones(len(X))
            for d, s in enumerate(corner):
                idx = idx * q + los[d][s]
                g = g * gs[d][s]
            num += c[idx] * g
            den += g
        return num / den

    def argmax1(self, x: Sequence[float]) -> Tuple[int, float]:
        """Scalar form of :meth:`argmax_grades` for one input vector."""
        q = self.q
        idx = 0
        grade = 1.0
        for p, xd in zip(self.partitions, x):
            lo, g_lo, g_hi = p.locate1(xd)
            if g_lo >= g_hi:
                idx = idx * q + lo
                grade *= g_lo
            else:
                idx = idx * q + min(lo + 1, q - 1)
                grade *= g_hi
        return idx, grade

    def infer1(self, x: Sequence[float]) -> float:
        """Scalar form of :meth:`infer_batch` for one input vector."""
        q = self.q
        terms = [(0, 1.0)]
        for p, xd in zip(self.partitions, x):
            lo, g_lo, g_hi = p.locate1(xd)
            hi = min(lo + 1, q - 1)
            terms = [(k * q + lo, g * g_lo) for k, g in terms] + [(k * q + hi, g * g_hi) for k, g in terms]
        c = self.grid.c
        num = 0.0
        den = 0.0
        for k, g in terms:
            num += c[k] * g
            den += g
        return float(num / den)

    def infer(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.m,):
            raise ArityError(f"fuzzy system takes {self.m} inputs, got shape {x.shape}")
        return self.infer1(x.tolist())

    def active_cells(self, x) -> List[Tuple[Tuple[int, ...], float]]:
        """Cells with nonzero firing strength at ``x`` as ``(coords, strength)``."""
        x = self._check(x)[0]
        per_dim = []
        for d, p in enumerate(self.partitions):
            (j1, g1), (j2, g2) = p.active_pair(x[d])
            opts = [(j1, g1)]
            if g2 > 0 and j2 != j1:
                opts.append((j2, g2))
            per_dim.append(opts)
        out = []
        for combo in itertools.product(*per_dim):
            g = float(np.prod([gj for _, gj in combo]))
            if g > 0:
                out.append((tuple(j for j, _ in combo), g))
        return out


def infer_naive(fs: FuzzySystem, x) -> float:
    """Literal full sum over all q**m cells; slow, used to cross-check ``infer``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (fs.m,):
        raise ArityError(f"fuzzy system takes {fs.m} inputs, got shape {x.shape}")
    grades = [p.grades(x[d]) for d, p in enumerate(fs.partitions)]
    num = 0.0
    den = 0.0
    for coords in itertools.product(range(fs.q), repeat=fs.m):
        g = 1.0
        for d, j in enumerate(coords):
            g *= grades[d][j]
        flat = 0
        for j in coords:
            flat = flat * fs.q + j
        num += fs.grid.c[flat] * g
        den += g
    return num / den
