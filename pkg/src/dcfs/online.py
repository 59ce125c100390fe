"""Single-pair online updates of offline-trained DCFS models."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import DcfsModel, _check_inputs, _window, propagate
from .rulegrid import ArityError, FuzzySystem

DEFAULT_ALPHA = 0.1


class ModelStateError(RuntimeError):
    pass


@dataclass(frozen=True)
class OnlineConfig:
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")


def update_fs_online(fs: FuzzySystem, x, y: float, alpha: float) -> FuzzySystem:
    """Pull the max-membership cell's center toward ``y`` by ``alpha`` times its firing strength."""
    x = np.asarray(x, dtype=float)
    if x.shape != (fs.m,):
        raise ArityError(f"fuzzy system takes {fs.m} inputs, got shape {x.shape}")
    k, grade = fs.argmax1(x.tolist())
    g = alpha * grade
    fs.grid.c[k] = g * y + (1.0 - g) * fs.grid.c[k]
    return fs


def _check_model(model: DcfsModel):
    if not model.systems or len(model.systems) != model.L:
        raise ModelStateError("model has not been trained offline")


def update_model_online(model: DcfsModel, x0, y: float, cfg: OnlineConfig = OnlineConfig()) -> DcfsModel:
    """Update every system level by level, routing through the already-updated lower levels."""
    if model.topology.shared:
        raise ModelStateError("shared model; use update_shared_online")
    _check_model(model)
    X, _ = _check_inputs(model, x0)
    topo = model.topology
    for l in range(1, model.L + 1):
        for i in range(1, topo.width(l) + 1):
            update_fs_online(model.system(l, i), X[0, _window(topo, l, i)], y, cfg.alpha)
        if l < model.L:
            X = propagate(model, X, l)
    return model


def update_shared_online(model: DcfsModel, x0, y: float, cfg: OnlineConfig = OnlineConfig()) -> DcfsModel:
    """Update each level's single shared system with all of its windowed pairs, in window order."""
    if not model.topology.shared:
        raise ModelStateError("general model; use update_model_online")
    _check_model(model)
    X, _ = _check_inputs(model, x0)
    topo = model.topology
    for l in range(1, model.L + 1):
        fs = model.systems[l - 1][0]
        for i in range(1, topo.width(l) + 1):
            update_fs_online(fs, X[0, _window(topo, l, i)], y, cfg.alpha)
        if l < model.L:
            X = propagate(model, X, l)
    return model


def update_online(model: DcfsModel, x0, y: float, cfg: OnlineConfig = OnlineConfig()) -> DcfsModel:
    if model.topology.shared:
        return update_shared_online(model, x0, y, cfg)
    return update_model_online(model, x0, y, cfg)
