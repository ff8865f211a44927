"""Statistical checks: two-sample Kolmogorov-Smirnov, trace summaries, quadrature oracle."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .drift import DriftModel, phi
from .errors import EmptySample
from .rng import RandomSource


@dataclass(frozen=True)
class KsResult:
    statistic: float
    pvalue: float
    n: int
    m: int


def kolmogorov_sf(lam: float) -> float:
    """P[K > lam] for the limiting Kolmogorov distribution."""
    if lam <= 0.0:
        return 1.0
    if lam < 1.18:
        # Jacobi-theta form converges fast for small lam
        c = -math.pi ** 2 / (8.0 * lam * lam)
        s = sum(math.exp(c * (2 * k - 1) ** 2) for k in range(1, 8))
        return min(1.0, max(0.0, 1.0 - math.sqrt(2.0 * math.pi) / lam * s))
    s = 0.0
    for k in range(1, 101):
        term = math.exp(-2.0 * k * k * lam * lam)
        s += term if k % 2 else -term
        if term < 1e-300:
            break
    return min(1.0, max(0.0, 2.0 * s))


def ks_two_sample(a, b) -> KsResult:
    """Two-sample KS test with the asymptotic p-value at size n*m/(n+m)."""
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    n, m = a.size, b.size
    if n == 0 or m == 0:
        raise EmptySample("both samples must be nonempty")
    pooled = np.concatenate([a, b])
    fa = np.searchsorted(a, pooled, side="right") / n
    fb = np.searchsorted(b, pooled, side="right") / m
    d = float(np.max(np.abs(fa - fb)))
    ne = n * m / (n + m)
    return KsResult(d, kolmogorov_sf(math.sqrt(ne) * d), n, m)


@dataclass
class TraceSummary:
    n: int
    acceptance_rate: float
    mean_points: float
    histogram: Counter = field(default_factory=Counter)
    max_points_accept: int = 0
    max_points_reject: int = 0

    def fraction_at_most(self, k: int) -> float:
        return sum(c for (p, _), c in self.histogram.items() if p <= k) / self.n

    def fraction_at_least(self, k: int) -> float:
        return sum(c for (p, _), c in self.histogram.items() if p >= k) / self.n

    def as_dict(self) -> dict:
        return {
            "proposals": self.n,
            "acceptance_rate": self.acceptance_rate,
            "mean_points": self.mean_points,
            "fraction_points_le_2": self.fraction_at_most(2),
            "max_points_accept": self.max_points_accept,
            "max_points_reject": self.max_points_reject,
            "histogram": {f"{p}:{int(acc)}": c for (p, acc), c in sorted(self.histogram.items())},
        }


def summarize_traces(traces) -> TraceSummary:
    traces = list(traces)
    if not traces:
        raise EmptySample("no traces to summarize")
    hist = Counter((t.points_used, t.accepted) for t in traces)
    acc = [t.points_used for t in traces if t.accepted]
    rej = [t.points_used for t in traces if not t.accepted]
    return TraceSummary(
        n=len(traces),
        acceptance_rate=len(acc) / len(traces),
        mean_points=sum(t.points_used for t in traces) / len(traces),
        histogram=hist,
        max_points_accept=max(acc, default=0),
        max_points_reject=max(rej, default=0),
    )


def quadrature_phi_integral(model: DriftModel, path, dt: float) -> float:
    """Trapezoidal estimate of the integral of phi along a uniformly gridded path."""
    vals = phi(model, np.asarray(path, dtype=float))
    vals = np.broadcast_to(vals, np.shape(path))
    if vals.size < 2:
        return 0.0
    return float(dt * (vals.sum() - 0.5 * (vals[0] + vals[-1])))


def endpoint_grid_sampler(model: DriftModel, x0: float, T: float, points: int = 200001):
    """Inverse-CDF sampler for the biased endpoint density, built by quadrature.

    Independent of the rejection sampler in :mod:`exactsde.kernels`.
    """
    half = 12.0 * math.sqrt(T) + 2.0 * (model.alpha_abs_bound or 0.0) * T
    u = np.linspace(x0 - half, x0 + half, points)
    logd = np.asarray(model.A(u), dtype=float) - (u - x0) ** 2 / (2.0 * T)
    dens = np.exp(logd - logd.max())
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]))])
    cdf /= cdf[-1]

    def draw(gen, size):
        return np.interp(gen.random(size), cdf, u)

    return draw


def acceptance_oracle(model: DriftModel, x0: float, T: float, n_paths: int, dt: float,
                      rng: RandomSource, chunk: int = 500):
    """Mean and standard error of exp{-int phi} over fine-grid biased Brownian paths."""
    gen = rng.generator
    draw_end = endpoint_grid_sampler(model, x0, T)
    steps = max(1, round(T / dt))
    h = T / steps
    frac = np.arange(1, steps + 1) / steps
    out = np.empty(n_paths)
    for lo in range(0, n_paths, chunk):
        k = min(chunk, n_paths - lo)
        ends = draw_end(gen, k)
        w = np.cumsum(math.sqrt(h) * gen.standard_normal((k, steps)), axis=1)
        bridge = x0 + w - frac * w[:, -1:] + frac * (ends[:, None] - x0)
        path = np.concatenate([np.full((k, 1), float(x0)), bridge], axis=1)
        vals = phi(model, path)
        integral = h * (vals.sum(axis=1) - 0.5 * (vals[:, 0] + vals[:, -1]))
        out[lo:lo + k] = np.exp(-integral)
    return float(out.mean()), float(out.std(ddof=1) / math.sqrt(n_paths))
