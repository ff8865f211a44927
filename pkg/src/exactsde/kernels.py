"""Exact samplers for the Brownian building blocks.

All samplers take absolute times and levels; bridge formulas translate to
the left anchor internally.
"""
from __future__ import annotations

import math
from typing import NamedTuple, Optional

from .drift import DriftModel
from .errors import BadOrdering, EnvelopeUnavailable, LevelBelowStart, NonTermination
from .rng import RandomSource

ENDPOINT_BUDGET = 10**6


class Anchor(NamedTuple):
    t: float
    x: float


class HitResult(NamedTuple):
    """``time`` is None when the bridge does not reach the level."""
    time: Optional[float]

    @property
    def hit(self) -> bool:
        return self.time is not None


NO_HIT = HitResult(None)


def sample_endpoint(model: DriftModel, x0: float, T: float, rng: RandomSource,
                    budget: int = ENDPOINT_BUDGET) -> float:
    """Draw from the density proportional to exp{A(u) - A(x0) - (u - x0)^2 / 2T}.

    With ``endpoint_bound`` M the proposal is N(x0, T), accepted with
    probability exp(A(u)) / M.  Otherwise, with ``alpha_abs_bound`` K, the
    proposal has density proportional to exp{K|u - x0| - (u - x0)^2 / 2T}
    (a random sign times N(KT, T) truncated to the positive axis), accepted
    with probability exp{A(u) - A(x0) - K|u - x0|}.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    A = model.A
    sd = math.sqrt(T)
    if model.endpoint_bound is not None:
        log_m = math.log(model.endpoint_bound)
        for _ in range(budget):
            u = x0 + sd * rng.normal()
            if math.log(rng.uniform()) <= A(u) - log_m:
                return u
    elif model.alpha_abs_bound is not None:
        K = model.alpha_abs_bound
        shift = K * T
        A0 = A(x0)
        for _ in range(budget):
            d = shift + sd * rng.normal()
            while d <= 0.0:
                d = shift + sd * rng.normal()
            if rng.uniform() < 0.5:
                d = -d
            u = x0 + d
            if math.log(rng.uniform()) <= A(u) - A0 - K * abs(d):
                return u
    else:
        raise EnvelopeUnavailable(f"{model.name}: declare alpha_abs_bound or endpoint_bound")
    raise NonTermination(f"endpoint sampler for {model.name} exceeded {budget} proposals")


def bridge_point(left: Anchor, right: Anchor, v: float, rng: RandomSource) -> float:
    """Brownian-bridge value at time ``v`` strictly between two anchors."""
    lt, lx = left
    rt, rx = right
    if not lt < v < rt:
        raise BadOrdering(f"v={v!r} not inside ({lt!r}, {rt!r})")
    span = rt - lt
    mean = lx + (rx - lx) * (v - lt) / span
    var = (rt - v) * (v - lt) / span
    return mean + math.sqrt(var) * rng.normal()


def bridge_maximum(left: Anchor, right: Anchor, rng: RandomSource) -> float:
    """Maximum of the Brownian bridge joining two anchors (Rayleigh law)."""
    t = right.t - left.t
    if t <= 0:
        raise BadOrdering("right anchor must come after left anchor")
    y, a = left.x, right.x
    m = 0.5 * (math.sqrt(2.0 * t * rng.exponential() + (a - y) ** 2) + a + y)
    # guards the E = 0 rounding case
    return max(m, y, a)


def sample_inverse_gaussian(mu: float, lam: float, rng: RandomSource) -> float:
    """IG(mu, lam) by the squared-normal transformation with root selection."""
    if mu <= 0 or lam <= 0:
        raise ValueError("mu and lambda must be positive")
    if math.isinf(mu):
        # Levy limit: first passage of driftless BM
        z = rng.normal()
        return lam / (z * z) if z != 0.0 else math.inf
    z = rng.normal()
    w = mu * z * z / (2.0 * lam)
    # smaller root of the quadratic, in cancellation-free form
    x = mu / (1.0 + w + math.sqrt(w * (w + 2.0)))
    if rng.uniform() * (mu + x) <= mu:
        return x
    return mu * mu / x


def _to_bridge_time(tau: float, t: float) -> float:
    return t * tau / (tau + 1.0) if not math.isinf(tau) else t


def bridge_hitting_time(left: Anchor, right: Anchor, level: float,
                        rng: RandomSource) -> HitResult:
    """First time the bridge between two anchors reaches ``level`` from below."""
    gamma = level - left.x
    if not gamma > 0:
        raise LevelBelowStart(f"level {level!r} not above left anchor {left.x!r}")
    t = right.t - left.t
    if t <= 0:
        raise BadOrdering("right anchor must come after left anchor")
    delta = right.x - left.x
    rt = math.sqrt(t)
    eta = gamma / rt
    zeta = (gamma - delta) / rt
    if zeta > 0.0:
        if rng.uniform() >= math.exp(-2.0 * zeta * eta):
            return NO_HIT
        tau = sample_inverse_gaussian(eta / zeta, eta * eta, rng)
    elif zeta < 0.0:
        tau = sample_inverse_gaussian(-eta / zeta, eta * eta, rng)
    else:
        tau = sample_inverse_gaussian(math.inf, eta * eta, rng)
    s = left.t + _to_bridge_time(tau, t)
    # keep the hit strictly inside the segment after rounding
    if s >= right.t:
        s = math.nextafter(right.t, left.t)
    elif s <= left.t:
        s = math.nextafter(left.t, right.t)
    return HitResult(s)
