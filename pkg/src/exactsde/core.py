"""Retrospective rejection sampling of diffusion skeletons.

A proposal is a Brownian path whose endpoint is drawn from the biased
density; it is accepted with probability exp{-int_0^T phi(path)} using
only finitely many uniform points under the graph of phi.
"""
from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.special import ndtr

from .drift import DriftModel, default_piece, ensure_valid, max_horizon
from .errors import OutOfSpan, PhiOutOfRange, ProposalBudgetExceeded
from .kernels import Anchor, bridge_point, sample_endpoint
from .rng import RandomSource

PROPOSAL_BUDGET = 10**6
PHI_TOL = 1e-9
# relative slack when comparing a piece length with 1/(k2 - k1)
_HORIZON_SLACK = 1e-12

START, TESTED, FILL, END, BOUNDARY = "start", "tested", "fill", "end", "boundary"


@dataclass(frozen=True)
class DecisionTrace:
    proposal: int
    points_used: int
    accepted: bool
    u_value: float


@dataclass
class Skeleton:
    """Time-ordered exact path points with the kind of each point.

    ``boundaries`` lists the piece end times when several pieces were merged.
    """
    times: list
    values: list
    kinds: list
    boundaries: tuple = ()

    @property
    def start(self) -> Anchor:
        return Anchor(self.times[0], self.values[0])

    @property
    def end(self) -> Anchor:
        return Anchor(self.times[-1], self.values[-1])

    @property
    def interior(self) -> list:
        return [Anchor(t, x) for t, x in zip(self.times[1:-1], self.values[1:-1])]

    @property
    def anchors(self) -> list:
        return [Anchor(t, x) for t, x in zip(self.times, self.values)]

    def __len__(self):
        return len(self.times)

    def copy(self) -> Skeleton:
        return Skeleton(list(self.times), list(self.values), list(self.kinds), self.boundaries)

    def value_at(self, t: float) -> Optional[float]:
        i = bisect_left(self.times, t)
        if i < len(self.times) and self.times[i] == t:
            return self.values[i]
        return None


@dataclass
class SamplePlan:
    length: float
    piece: Optional[float] = None
    observation_times: Sequence[float] = ()
    replicates: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("length must be nonnegative")
        if self.piece is not None and self.piece <= 0:
            raise ValueError("piece length must be positive")
        for t in self.observation_times:
            if not 0.0 <= t <= self.length:
                raise OutOfSpan(f"observation time {t!r} outside [0, {self.length!r}]")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")


def check_piece(model: DriftModel, T: float) -> None:
    if not T > 0:
        raise ValueError("piece length must be positive")
    Tmax = max_horizon(model)
    if T > Tmax * (1.0 + _HORIZON_SLACK):
        raise ValueError(f"piece length {T!r} exceeds max horizon {Tmax!r} for {model.name}")


def propose_decide(model: DriftModel, x0: float, T: float, rng: RandomSource,
                   t0: float = 0.0, index: int = 0):
    """Run one proposal of the accept/reject cascade on [t0, t0 + T].

    Returns ``(trace, skeleton)``; the skeleton is None on rejection.
    """
    alpha, alpha_prime, k1 = model.alpha, model.alpha_prime, model.k1
    inv_T = 1.0 / T
    t1 = t0 + T
    times = [t0, t1]
    values = [x0, sample_endpoint(model, x0, T, rng)]
    U = rng.uniform()
    log_u = math.log(U)
    log_fact = 0.0
    i = 0
    while True:
        i += 1
        log_fact += math.log(i)
        v = t0 + T * rng.uniform()
        j = bisect_left(times, v)
        while v <= t0 or v >= t1 or times[j] == v:
            v = t0 + T * rng.uniform()
            j = bisect_left(times, v)
        w = rng.uniform() * inv_T
        x = bridge_point(Anchor(times[j - 1], values[j - 1]), Anchor(times[j], values[j]), v, rng)
        times.insert(j, v)
        values.insert(j, x)
        a = alpha(x)
        p = 0.5 * a * a + 0.5 * alpha_prime(x) - k1
        if p > inv_T + PHI_TOL or p < -PHI_TOL:
            raise PhiOutOfRange(f"phi({x!r}) = {p!r} outside [0, {inv_T!r}] for {model.name}")
        # U > 1/i!  <=>  log U > -log i!
        if p < w or log_u > -log_fact:
            accepted = i % 2 == 1
            trace = DecisionTrace(index, i, accepted, U)
            if not accepted:
                return trace, None
            kinds = [TESTED] * len(times)
            kinds[0] = START
            kinds[-1] = END
            return trace, Skeleton(times, values, kinds)


def exact_skeleton(model: DriftModel, x0: float, T: float, rng: RandomSource,
                   t0: float = 0.0, budget: int = PROPOSAL_BUDGET, first_index: int = 0):
    """Propose until acceptance; returns ``(skeleton, traces)``."""
    ensure_valid(model)
    check_piece(model, T)
    traces = []
    for k in range(budget):
        trace, skel = propose_decide(model, x0, T, rng, t0=t0, index=first_index + k)
        traces.append(trace)
        if skel is not None:
            return skel, traces
    raise ProposalBudgetExceeded(f"{model.name}: no acceptance in {budget} proposals with T={T!r}")


def fill_in(skeleton: Skeleton, times: Sequence[float], rng: RandomSource) -> Skeleton:
    """Realize the path at extra times by Brownian-bridge interpolation.

    Returns a new skeleton; times already present are left untouched.
    """
    t_start, t_end = skeleton.times[0], skeleton.times[-1]
    for t in times:
        if not t_start <= t <= t_end:
            raise OutOfSpan(f"time {t!r} outside [{t_start!r}, {t_end!r}]")
    out = skeleton.copy()
    ts, xs, ks = out.times, out.values, out.kinds
    for t in sorted(set(times)):
        j = bisect_left(ts, t)
        if j < len(ts) and ts[j] == t:
            continue
        x = bridge_point(Anchor(ts[j - 1], xs[j - 1]), Anchor(ts[j], xs[j]), t, rng)
        ts.insert(j, t)
        xs.insert(j, x)
        ks.insert(j, FILL)
    return out


def piece_bounds(length: float, T: float) -> list:
    """Piece end times covering [0, length] with pieces of length at most T."""
    n = max(1, math.ceil(length / T - 1e-12))
    ends = [k * T for k in range(1, n)]
    ends.append(length)
    return ends


def simulate_interval(model: DriftModel, x0: float, plan: SamplePlan, rng: RandomSource,
                      budget: int = PROPOSAL_BUDGET):
    """Exact skeleton on [0, plan.length], merged from pieces, then filled in."""
    ensure_valid(model)
    if plan.length == 0:
        return Skeleton([0.0], [x0], [START]), []
    T = plan.piece if plan.piece is not None else default_piece(model)
    check_piece(model, T)
    times, values, kinds = [0.0], [x0], [START]
    traces = []
    left, y = 0.0, x0
    ends = piece_bounds(plan.length, T)
    for right in ends:
        skel, tr = exact_skeleton(model, y, right - left, rng, t0=left,
                                  budget=budget, first_index=len(traces))
        traces.extend(tr)
        times.extend(skel.times[1:])
        values.extend(skel.values[1:])
        kinds.extend(skel.kinds[1:])
        # piece arithmetic may drift from the requested end in the last ulp
        times[-1] = right
        kinds[-1] = BOUNDARY
        left, y = right, skel.values[-1]
    kinds[-1] = END
    merged = Skeleton(times, values, kinds, tuple(ends))
    if plan.observation_times:
        merged = fill_in(merged, plan.observation_times, rng)
    return merged, traces


def conditional_law(skeleton: Skeleton, t: float):
    """Mean and variance of X_t given the skeleton (Brownian-bridge law)."""
    ts, xs = skeleton.times, skeleton.values
    if not ts[0] <= t <= ts[-1]:
        raise OutOfSpan(f"time {t!r} outside [{ts[0]!r}, {ts[-1]!r}]")
    j = bisect_left(ts, t)
    if ts[j] == t:
        return xs[j], 0.0
    lt, lx, rt, rx = ts[j - 1], xs[j - 1], ts[j], xs[j]
    span = rt - lt
    return lx + (rx - lx) * (t - lt) / span, (rt - t) * (t - lt) / span


def _conditional_expectation(mean, var, functional, level):
    if functional == "identity":
        return mean
    if functional == "square":
        return mean * mean + var
    if functional == "indicator":
        sd = np.sqrt(var)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = (level - mean) / sd
        return np.where(var > 0, ndtr(z), (mean <= level).astype(float))
    raise ValueError(f"unknown functional {functional!r}")


def rao_blackwell_mean(skeletons, t: float, functional: str = "identity",
                       level: Optional[float] = None):
    """Average of E[f(X_t) | skeleton] over skeletons.

    ``functional`` is ``"identity"``, ``"square"`` or ``"indicator"``; the
    indicator is 1{X_t <= level}.  Returns ``(estimate, variance)`` where
    variance is the sample variance of the per-skeleton conditional means.
    """
    if functional == "indicator" and level is None:
        raise ValueError("indicator functional needs a level")
    laws = np.array([conditional_law(s, t) for s in skeletons], dtype=float)
    vals = _conditional_expectation(laws[:, 0], laws[:, 1], functional, level)
    var = float(np.var(vals, ddof=1)) if len(vals) > 1 else 0.0
    return float(np.mean(vals)), var


def raw_functional(values, functional: str = "identity", level: Optional[float] = None):
    """f(X_t) for the plain Monte Carlo counterpart of :func:`rao_blackwell_mean`."""
    x = np.asarray(values, dtype=float)
    if functional == "indicator":
        return (x <= level).astype(float)
    return _conditional_expectation(x, np.zeros_like(x), functional, level)
