"""Replicate-level drivers shared by the CLI and the acceptance suite.

Exact replicate ``r`` always draws from stream ``(EXACT, r)`` and Euler
block ``b`` (of ``EULER_BLOCK`` paths) from ``(EULER, b)``, so results are
identical whatever the worker count.  Drifts are passed by catalog name so
that work can be shipped to worker processes.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import SamplePlan, simulate_interval
from .drift import get_drift
from .euler import euler_hitting_batch, euler_maximum_batch, euler_terminal_batch
from .functionals import HittingQuery, simulate_hitting_time, simulate_maximum
from .rng import EULER, EXACT, RandomSource

EULER_BLOCK = 1000
WORKERS_ENV = "EXACTSDE_WORKERS"


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


@dataclass
class ExactRun:
    """Per-replicate outputs in replicate order."""
    values: list
    traces: list = field(default_factory=list)  # one list of DecisionTrace per replicate
    skeletons: list = field(default_factory=list)

    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def all_traces(self):
        return [t for tr in self.traces for t in tr]


def _one(kind, model, x0, params, rng):
    traces = []
    skel = None
    if kind == "terminal" or kind == "sample":
        plan = SamplePlan(params["length"], piece=params.get("piece"),
                          observation_times=params.get("grid", ()))
        skel, traces = simulate_interval(model, x0, plan, rng)
        value = skel.values[-1]
    elif kind == "max":
        value = simulate_maximum(model, x0, params["length"], rng,
                                 piece=params.get("piece"), traces=traces)
    elif kind == "hit":
        q = HittingQuery(params["barrier"], params["cap"],
                         "above" if params["barrier"] > x0 else "below")
        value = simulate_hitting_time(model, x0, q, rng, piece=params.get("piece"), traces=traces)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return value, traces, skel if kind == "sample" else None


def _exact_chunk(kind, drift, x0, params, seed, start, stop):
    model = get_drift(drift)
    return [_one(kind, model, x0, params, RandomSource(seed, (EXACT, r)))
            for r in range(start, stop)]


def _chunks(n, parts):
    step = max(1, -(-n // parts))
    return [(lo, min(n, lo + step)) for lo in range(0, n, step)]


def run_exact(kind: str, drift: str, x0: float, n: int, seed: int = 0,
              workers: int | None = None, **params) -> ExactRun:
    """Run ``n`` exact replicates of ``kind`` in {terminal, sample, max, hit}."""
    workers = default_workers() if workers is None else workers
    if workers <= 1 or n < 2:
        results = _exact_chunk(kind, drift, x0, params, seed, 0, n)
    else:
        chunks = _chunks(n, 4 * workers)
        with ProcessPoolExecutor(workers) as ex:
            futs = [ex.submit(_exact_chunk, kind, drift, x0, params, seed, lo, hi)
                    for lo, hi in chunks]
            results = [r for f in futs for r in f.result()]
    run = ExactRun([r[0] for r in results], [r[1] for r in results])
    if kind == "sample":
        run.skeletons = [r[2] for r in results]
    return run


def _euler_block(kind, drift, x0, params, seed, block, size):
    model = get_drift(drift)
    rng = RandomSource(seed, (EULER, block))
    dt = params["dt"]
    if kind == "terminal":
        return euler_terminal_batch(model, x0, dt, params["length"], size, rng)
    if kind == "max":
        return euler_maximum_batch(model, x0, dt, params["length"], size, rng)
    if kind == "hit":
        return euler_hitting_batch(model, x0, params["barrier"], params["cap"], dt, size, rng)
    raise ValueError(f"unknown kind {kind!r}")


def run_euler(kind: str, drift: str, x0: float, n: int, dt: float, seed: int = 0,
              workers: int | None = None, **params) -> np.ndarray:
    """``n`` Euler draws of ``kind`` in {terminal, max, hit}, block-seeded."""
    workers = default_workers() if workers is None else workers
    params = dict(params, dt=dt)
    blocks = [(b, min(EULER_BLOCK, n - b * EULER_BLOCK))
              for b in range(-(-n // EULER_BLOCK))]
    if workers <= 1 or len(blocks) < 2:
        parts = [_euler_block(kind, drift, x0, params, seed, b, k) for b, k in blocks]
    else:
        with ProcessPoolExecutor(workers) as ex:
            futs = [ex.submit(_euler_block, kind, drift, x0, params, seed, b, k) for b, k in blocks]
            parts = [f.result() for f in futs]
    return np.concatenate(parts) if parts else np.empty(0)
