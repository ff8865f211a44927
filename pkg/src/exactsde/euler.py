"""Euler scheme X_{t+dt} = X_t + alpha(X_t) dt + N(0, dt), the approximate baseline.

Single-path functions mirror the exact API; the ``euler_*_batch`` functions
advance many independent paths at once and need a drift that accepts numpy
arrays (every catalog drift does).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .drift import DriftModel, ensure_valid
from .rng import RandomSource


@dataclass
class EulerPath:
    dt: float
    values: np.ndarray
    horizon: float

    @property
    def times(self) -> np.ndarray:
        t = np.arange(len(self.values)) * self.dt
        t[-1] = self.horizon
        return t


def _steps(dt: float, horizon: float) -> list:
    if not dt > 0:
        raise ValueError("dt must be positive")
    n = max(1, math.ceil(horizon / dt - 1e-9))
    steps = [dt] * n
    steps[-1] = horizon - (n - 1) * dt
    return steps


def euler_path(model: DriftModel, x0: float, dt: float, horizon: float,
               rng: RandomSource) -> EulerPath:
    ensure_valid(model)
    steps = _steps(dt, horizon)
    alpha = model.alpha
    xs = [x0]
    x = x0
    for h in steps:
        x = x + alpha(x) * h + math.sqrt(h) * rng.normal()
        xs.append(x)
    return EulerPath(dt, np.array(xs), horizon)


def euler_maximum(path: EulerPath) -> float:
    # a piecewise-linear path peaks at a grid node
    return float(np.max(path.values))


def _crossing_time(t0, h, x0, x1, gamma):
    return t0 + h * (gamma - x0) / (x1 - x0)


def euler_hitting_time(path: EulerPath, gamma: float, cap: float) -> float:
    """First crossing of ``gamma`` by the linear interpolation, capped at ``cap``."""
    v = path.values
    t = path.times
    above = v[0] < gamma
    crossed = v >= gamma if above else v <= gamma
    if crossed[0]:
        return min(float(t[0]), cap)
    idx = np.flatnonzero(crossed)
    if idx.size == 0:
        return cap
    i = idx[0]
    return min(float(_crossing_time(t[i - 1], t[i] - t[i - 1], v[i - 1], v[i], gamma)), cap)


def euler_terminal_batch(model: DriftModel, x0: float, dt: float, horizon: float, n: int,
                         rng: RandomSource) -> np.ndarray:
    """X_horizon for ``n`` independent Euler paths."""
    ensure_valid(model)
    gen = rng.generator
    x = np.full(n, float(x0))
    for h in _steps(dt, horizon):
        x = x + model.alpha(x) * h + math.sqrt(h) * gen.standard_normal(n)
    return x


def euler_maximum_batch(model: DriftModel, x0: float, dt: float, horizon: float, n: int,
                        rng: RandomSource) -> np.ndarray:
    ensure_valid(model)
    gen = rng.generator
    x = np.full(n, float(x0))
    m = x.copy()
    for h in _steps(dt, horizon):
        x = x + model.alpha(x) * h + math.sqrt(h) * gen.standard_normal(n)
        np.maximum(m, x, out=m)
    return m


def euler_hitting_batch(model: DriftModel, x0: float, gamma: float, cap: float, dt: float,
                        n: int, rng: RandomSource) -> np.ndarray:
    """min{first interpolated crossing of gamma, cap} for ``n`` Euler paths."""
    ensure_valid(model)
    gen = rng.generator
    sign = 1.0 if gamma > x0 else -1.0
    x = np.full(n, float(x0))
    out = np.full(n, float(cap))
    alive = np.ones(n, dtype=bool)
    t = 0.0
    for h in _steps(dt, cap):
        x_new = x + model.alpha(x) * h + math.sqrt(h) * gen.standard_normal(n)
        hit = alive & (sign * (x_new - gamma) >= 0)
        if hit.any():
            out[hit] = _crossing_time(t, h, x[hit], x_new[hit], gamma)
            alive &= ~hit
            if not alive.any():
                break
        x = x_new
        t += h
    return np.minimum(out, cap)
