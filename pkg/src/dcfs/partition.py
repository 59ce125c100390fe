"""Triangular fuzzy partitions with saturating end sets.

Set indices are 1-based in the public scalar API (``membership``,
``active_pair``, ``max_membership_index``) to match the usual rule notation;
the vectorized helper ``locate`` works with 0-based indices because its
output feeds straight into array indexing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

DEGENERATE_WIDTH = 1e-12


class RangeFitError(ValueError):
    pass


def fit_range(samples: Iterable[float]) -> Tuple[float, float]:
    arr = np.asarray(list(samples) if not isinstance(samples, np.ndarray) else samples, dtype=float)
    if arr.size == 0:
        raise RangeFitError("cannot fit a range to an empty sample sequence")
    if not np.all(np.isfinite(arr)):
        raise RangeFitError("samples contain NaN or infinite values")
    return float(arr.min()), float(arr.max())


@dataclass(frozen=True)
class FuzzyPartition:
    """``q`` equally spaced triangles over ``[xmin, xmax]``.

    The first set saturates at 1 below ``xmin`` and the last saturates at 1
    above ``xmax``, so the grades sum to one everywhere on the real line.
    """

    q: int
    xmin: float
    xmax: float

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 2:
            raise ValueError(f"q must be an integer >= 2, got {self.q!r}")
        if not self.xmax >= self.xmin:
            raise ValueError(f"xmax ({self.xmax}) must be >= xmin ({self.xmin})")

    @classmethod
    def fit(cls, samples, q: int) -> "FuzzyPartition":
        lo, hi = fit_range(samples)
        return cls(q, lo, hi)

    @property
    def degenerate(self) -> bool:
        return (self.xmax - self.xmin) < DEGENERATE_WIDTH

    @property
    def h(self) -> float:
        return (self.xmax - self.xmin) / (self.q - 1)

    def center(self, j: int) -> float:
        return self.xmin + (j - 1) * self.h

    @property
    def centers(self) -> np.ndarray:
        return self.xmin + np.arange(self.q) * self.h

    def membership(self, j: int, x: float) -> float:
        """Grade of set ``j`` (1-based) at ``x``.

        Evaluated on the normalized coordinate ``t = (x - xmin) / h`` so that
        rounding near a center can never produce a small negative grade.
        """
        q = self.q
        if not 1 <= j <= q:
            raise IndexError(f"set index {j} outside 1..{q}")
        if self.degenerate:
            return 1.0 if j == 1 else 0.0
        t = (x - self.xmin) / self.h
        if j == 1 and t <= 0.0:
            return 1.0
        if j == q and t >= q - 1:
            return 1.0
        return max(0.0, 1.0 - abs(t - (j - 1)))

    def grades(self, x: float) -> np.ndarray:
        """All ``q`` grades at ``x`` (full loop)."""
        return np.array([self.membership(j, x) for j in range(1, self.q + 1)])

    def locate(self, x) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Vectorized active-set lookup.

        Returns ``(lo, g_lo, g_hi)`` where ``lo`` is the 0-based index of the
        lower active set, the upper one is ``min(lo + 1, q - 1)``, and
        ``g_lo + g_hi == 1``.
        """
        x = np.asarray(x, dtype=float)
        q = self.q
        if self.degenerate:
            lo = np.zeros(x.shape, dtype=np.intp)
            return lo, np.ones(x.shape), np.zeros(x.shape)
        t = (x - self.xmin) / self.h
        below = t <= 0.0
        above = t >= q - 1
        t = np.clip(t, 0.0, q - 1)
        lo = np.minimum(np.floor(t), q - 2).astype(np.intp)
        frac = t - lo
        frac = np.where(below, 0.0, frac)
        lo = np.where(above, q - 1, lo)
        frac = np.where(above, 0.0, frac)
        return lo, 1.0 - frac, frac

    def locate1(self, x: float) -> Tuple[int, float, float]:
        """Scalar ``locate`` with the same arithmetic, minus the array overhead."""
        q = self.q
        if self.degenerate:
            return 0, 1.0, 0.0
        t = (x - self.xmin) / self.h
        if t <= 0.0:
            return 0, 1.0, 0.0
        if t >= q - 1:
            return q - 1, 1.0, 0.0
        lo = min(math.floor(t), q - 2)
        frac = t - lo
        return lo, 1.0 - frac, frac

    def active_pair(self, x: float) -> Tuple[Tuple[int, float], Tuple[int, float]]:
        lo, g_lo, g_hi = self.locate1(float(x))
        j_lo = lo + 1
        return (j_lo, float(g_lo)), (min(j_lo + 1, self.q), float(g_hi))

    def argmax(self, x) -> np.ndarray:
        """0-based max-membership index; ties go to the lower set."""
        lo, g_lo, g_hi = self.locate(x)
        return np.where(g_lo >= g_hi, lo, np.minimum(lo + 1, self.q - 1))

    def max_membership_index(self, x: float) -> int:
        return int(self.argmax(x)) + 1

    def to_dict(self) -> dict:
        return {"q": self.q, "xmin": self.xmin, "xmax": self.xmax}

    @classmethod
    def from_dict(cls, d: dict) -> "FuzzyPartition":
        return cls(int(d["q"]), float(d["xmin"]), float(d["xmax"]))
