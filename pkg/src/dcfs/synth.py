"""Mackey-Glass chaotic series, noisy returns, index assembly and lag datasets."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

RETURN_KINDS = ("log", "relative")


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class SynthConfig:
    """Defaults reproduce the 3000-return chaotic benchmark series."""

    tau: int = 50
    n_points: int = 3050
    noise_sigma: float = 1e-4
    seed: Optional[int] = 0
    warmup: int = 49
    return_kind: str = "log"

    def __post_init__(self):
        if self.tau < 1:
            raise ValueError(f"tau must be >= 1, got {self.tau}")
        if self.warmup < 0 or self.n_points <= self.warmup:
            raise ValueError(f"need 0 <= warmup < n_points, got warmup={self.warmup}, n_points={self.n_points}")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if self.return_kind not in RETURN_KINDS:
            raise ValueError(f"return_kind must be one of {RETURN_KINDS}")


@dataclass
class SlidingDataset:
    """Rows of ``n`` lagged returns (most recent first) and the next return."""

    inputs: np.ndarray
    targets: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.inputs.shape[1]

    def __len__(self) -> int:
        return len(self.targets)

    def split(self, n_train: int):
        return (SlidingDataset(self.inputs[:n_train], self.targets[:n_train], dict(self.meta)),
                SlidingDataset(self.inputs[n_train:], self.targets[n_train:], dict(self.meta)))


def mackey_glass(cfg: SynthConfig = SynthConfig(), x_init: Optional[np.ndarray] = None) -> np.ndarray:
    """Unit-step discrete Mackey-Glass recursion.

    The first ``tau`` values are the ramp ``0.04 * k`` (or ``x_init``); the
    first ``cfg.warmup`` values are dropped from the result.
    """
    tau = cfg.tau
    total = max(cfg.n_points, tau)
    x = np.empty(total)
    x[:tau] = 0.04 * np.arange(tau) if x_init is None else x_init
    for k in range(tau, total):
        d = x[k - tau]
        x[k] = 0.9 * x[k - 1] + 0.2 * d / (1.0 + d**10)
    return x[cfg.warmup:cfg.n_points]


def to_returns(series, noise_sigma: float = 0.0, return_kind: str = "log",
               rng: Optional[np.random.Generator] = None) -> np.ndarray:
    s = np.asarray(series, dtype=float)
    if return_kind == "log":
        if np.any(s <= 0):
            raise DatasetError("log returns need a strictly positive series")
        r = np.log(s[1:] / s[:-1])
    elif return_kind == "relative":
        r = (s[1:] - s[:-1]) / s[:-1]
    else:
        raise ValueError(f"unknown return kind {return_kind!r}")
    if noise_sigma > 0:
        rng = rng if rng is not None else np.random.default_rng()
        r = r + noise_sigma * rng.standard_normal(len(r))
    return r


def to_index(returns, y0: float = 100.0) -> np.ndarray:
    if y0 <= 0:
        raise ValueError("y0 must be positive")
    return y0 * np.cumprod(1.0 + np.asarray(returns, dtype=float))


def synthetic_returns(cfg: SynthConfig = SynthConfig()) -> np.ndarray:
    rng = np.random.default_rng(cfg.seed)
    return to_returns(mackey_glass(cfg), cfg.noise_sigma, cfg.return_kind, rng)


def make_dataset(returns, n: int) -> SlidingDataset:
    r = np.asarray(returns, dtype=float)
    if n < 1 or len(r) <= n:
        raise DatasetError(f"need more than n={n} returns, got {len(r)}")
    rows = len(r) - n
    # column d holds lag d+1: r[k-1], r[k-2], ..., r[k-n] for target r[k]
    inputs = np.column_stack([r[n - 1 - d:n - 1 - d + rows] for d in range(n)])
    return SlidingDataset(inputs, r[n:].copy(), {"n": n})


def make_panel_dataset(series: list, n: int) -> SlidingDataset:
    """Concatenated lag blocks of several return series; the target is the first series.

    Block ``k`` holds columns ``k*n .. k*n + n - 1`` (most recent lag first).
    """
    lens = {len(s) for s in series}
    if len(lens) != 1:
        raise DatasetError("all series must have the same length")
    parts = [make_dataset(s, n) for s in series]
    return SlidingDataset(np.hstack([p.inputs for p in parts]), parts[0].targets, {"n": n, "blocks": len(series)})
