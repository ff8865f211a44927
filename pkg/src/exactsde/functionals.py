"""Exact running maximum and capped first-passage time."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .core import PROPOSAL_BUDGET, SamplePlan, Skeleton, exact_skeleton, simulate_interval
from .drift import DriftModel, default_piece, ensure_valid, reflect
from .errors import InvalidBarrier
from .kernels import Anchor, bridge_hitting_time, bridge_maximum
from .rng import RandomSource


@dataclass(frozen=True)
class HittingQuery:
    barrier: float
    cap: float
    direction: str = "above"

    def __post_init__(self):
        if self.direction not in ("above", "below"):
            raise ValueError("direction must be 'above' or 'below'")
        if not (self.cap > 0 and math.isfinite(self.cap)):
            raise ValueError("cap must be positive and finite")


def skeleton_maximum(skeleton: Skeleton, rng: RandomSource) -> float:
    """Supremum of the path given the skeleton: max over the filling bridges."""
    ts, xs = skeleton.times, skeleton.values
    m = xs[0]
    for i in range(1, len(ts)):
        b = bridge_maximum(Anchor(ts[i - 1], xs[i - 1]), Anchor(ts[i], xs[i]), rng)
        if b > m:
            m = b
    return m


def simulate_maximum(model: DriftModel, x0: float, l: float, rng: RandomSource,
                     piece: Optional[float] = None, traces: Optional[list] = None) -> float:
    """Exact draw of sup{X_t : 0 <= t <= l}.

    Pass a list as ``traces`` to collect the decision traces.
    """
    if not l > 0:
        raise ValueError("l must be positive")
    skel, tr = simulate_interval(model, x0, SamplePlan(l, piece=piece), rng)
    if traces is not None:
        traces.extend(tr)
    return skeleton_maximum(skel, rng)


def first_passage(skeleton: Skeleton, level: float, rng: RandomSource) -> Optional[float]:
    """First time the filled-in path reaches ``level`` from below, or None.

    Segments are scanned left to right; an anchor already at or above the
    level counts as a hit at its own time.
    """
    ts, xs = skeleton.times, skeleton.values
    for i in range(1, len(ts)):
        if xs[i - 1] >= level:
            return ts[i - 1]
        hit = bridge_hitting_time(Anchor(ts[i - 1], xs[i - 1]), Anchor(ts[i], xs[i]), level, rng)
        if hit.time is not None:
            return hit.time
    return None


def simulate_hitting_time(model: DriftModel, x0: float, query: HittingQuery, rng: RandomSource,
                          piece: Optional[float] = None, traces: Optional[list] = None,
                          budget: int = PROPOSAL_BUDGET) -> float:
    """Exact draw of min{tau, cap} for tau the first passage to ``query.barrier``.

    The path is built piece by piece and stops at the first hit; the last
    piece is shortened so that nothing is simulated beyond the cap.  A
    barrier below the start is handled on the reflected process -X.
    """
    gamma = query.barrier
    if query.direction == "above":
        if not gamma > x0:
            raise InvalidBarrier(f"barrier {gamma!r} not above start {x0!r}")
    else:
        if not gamma < x0:
            raise InvalidBarrier(f"barrier {gamma!r} not below start {x0!r}")
        model, x0, gamma = reflect(model), -x0, -gamma
    ensure_valid(model)
    T = piece if piece is not None else default_piece(model)
    cap = query.cap
    left, y = 0.0, x0
    index = 0
    while left < cap:
        right = min(left + T, cap)
        skel, tr = exact_skeleton(model, y, right - left, rng, t0=left,
                                  budget=budget, first_index=index)
        index += len(tr)
        if traces is not None:
            traces.extend(tr)
        hit = first_passage(skel, gamma, rng)
        if hit is not None:
            return min(hit, cap)
        left, y = right, skel.values[-1]
    return cap
