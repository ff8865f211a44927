"""Drift specifications for unit-diffusion SDEs dX = alpha(X) dt + dB.

A :class:`DriftModel` carries the drift, its derivative and antiderivative
together with user-declared bounds ``k1 <= (alpha^2 + alpha')/2 <= k2``.
The bounds are trusted only after :func:`validate_drift` has checked them
on a grid; every sampler calls :func:`ensure_valid` first.
"""
from __future__ import annotations

import functools
import math
import weakref
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConditionViolation

UNBOUNDED = math.inf
DEFAULT_PIECE_CAP = 1.0
FD_STEP = 1e-4

Fn = Callable[[float], float]


@dataclass(frozen=True, eq=False)
class DriftModel:
    alpha: Fn
    alpha_prime: Fn
    A: Fn
    k1: float
    k2: float
    alpha_abs_bound: Optional[float] = None
    endpoint_bound: Optional[float] = None
    name: str = "custom"

    def __repr__(self):
        return f"DriftModel({self.name!r}, k1={self.k1}, k2={self.k2})"


@dataclass
class ConditionCheck:
    condition: str
    passed: bool
    worst_u: float
    worst_value: float
    detail: str = ""


@dataclass
class ValidationReport:
    model: str
    checks: list = field(default_factory=list)
    max_horizon: float = UNBOUNDED

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def lines(self):
        out = []
        for c in self.checks:
            verdict = "pass" if c.passed else "FAIL"
            out.append(f"{c.condition}: {verdict} (worst u={c.worst_u:.6g}, "
                       f"value={c.worst_value:.6g}) {c.detail}".rstrip())
        out.append(f"T_max = {format_horizon(self.max_horizon)}")
        return out


def format_horizon(T: float) -> str:
    if math.isinf(T):
        return "unbounded"
    for den in range(1, 65):
        num = round(T * den)
        if num and abs(num / den - T) < 1e-12:
            return f"{num}/{den}" if den > 1 else str(num)
    return repr(T)


def phi(model: DriftModel, u):
    """(alpha^2 + alpha')/2 - k1; nonnegative whenever the bounds hold."""
    a = model.alpha(u)
    return 0.5 * a * a + 0.5 * model.alpha_prime(u) - model.k1


def max_horizon(model: DriftModel) -> float:
    """Longest piece length 1/(k2 - k1); ``UNBOUNDED`` when k1 == k2."""
    r = model.k2 - model.k1
    if r <= 0.0:
        return UNBOUNDED
    return 1.0 / r


def default_piece(model: DriftModel, cap: float = DEFAULT_PIECE_CAP) -> float:
    T = max_horizon(model)
    return cap if math.isinf(T) else T


def default_grid():
    return np.linspace(-10.0, 10.0, 2001)


def _on_grid(f, grid):
    vals = None
    if grid.size > 1:
        try:
            vals = f(grid)
        except TypeError:  # scalar-only closure, e.g. math.sin
            pass
    if vals is None:
        vals = [f(float(u)) for u in grid]
    return np.broadcast_to(np.asarray(vals, dtype=float), grid.shape)


def _worst(grid, excess, values, condition, tol, detail=""):
    i = int(np.argmax(excess))
    return ConditionCheck(condition, bool(excess[i] <= tol), float(grid[i]),
                          float(values[i]), detail)


def validate_drift(model: DriftModel, grid=None, tol: float = 1e-9,
                   fd_tol: float = 1e-6, raise_on_failure: bool = True) -> ValidationReport:
    """Check Conditions 1-3 (and 3' when declared) of ``model`` on ``grid``.

    Raises :class:`ConditionViolation` for the first failing check unless
    ``raise_on_failure`` is false; the full report rides on the exception.
    """
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) < 0):
        raise ValueError("grid must be a nonempty sorted 1-d sequence")
    if tol <= 0:
        raise ValueError("tol must be positive")

    eps = FD_STEP
    a = _on_grid(model.alpha, grid)
    ap = _on_grid(model.alpha_prime, grid)
    A = _on_grid(model.A, grid)
    report = ValidationReport(model.name, max_horizon=max_horizon(model))
    checks = report.checks

    # Condition 1: alpha differentiable, alpha' consistent with alpha
    fd = (_on_grid(model.alpha, grid + eps) - _on_grid(model.alpha, grid - eps)) / (2 * eps)
    err = np.abs(fd - ap)
    checks.append(_worst(grid, err, err, "C1", fd_tol, "|FD(alpha) - alpha'|"))

    fdA = (_on_grid(model.A, grid + eps) - _on_grid(model.A, grid - eps)) / (2 * eps)
    err = np.abs(fdA - a)
    chk = _worst(grid, err, err, "A", fd_tol, "|FD(A) - alpha|")
    A0 = float(model.A(0.0))
    if abs(A0) > tol:
        chk = ConditionCheck("A", False, 0.0, A0, "A(0) != 0")
    checks.append(chk)

    g = 0.5 * a * a + 0.5 * ap
    if model.k2 < model.k1:
        checks.append(ConditionCheck("C3", False, math.nan, model.k2 - model.k1, "k2 < k1"))
    else:
        excess = np.maximum(model.k1 - g, g - model.k2)
        checks.append(_worst(grid, excess, g, "C3", tol, f"k1={model.k1}, k2={model.k2}"))

    if model.alpha_abs_bound is not None:
        excess = np.abs(a) - model.alpha_abs_bound
        checks.append(_worst(grid, excess, a, "C3'", tol, f"K'={model.alpha_abs_bound}"))

    # Condition 2 is only certified through a declared envelope
    if model.endpoint_bound is not None:
        excess = A - math.log(model.endpoint_bound)
        checks.append(_worst(grid, excess, np.exp(A), "C2", tol,
                             f"exp(A) <= M={model.endpoint_bound:.6g}"))
    elif model.alpha_abs_bound is not None:
        checks.append(ConditionCheck("C2", checks[-1].passed, checks[-1].worst_u,
                                     checks[-1].worst_value, "implied by C3'"))
    else:
        checks.append(ConditionCheck("C2", False, math.nan, math.nan,
                                     "no alpha_abs_bound or endpoint_bound declared"))

    if report.passed:
        _validated.add(model)
    elif raise_on_failure:
        bad = report.failures()[0]
        raise ConditionViolation(bad.condition, bad.worst_u, bad.worst_value, report)
    return report


_validated: "weakref.WeakSet[DriftModel]" = weakref.WeakSet()


def ensure_valid(model: DriftModel) -> None:
    if model not in _validated:
        validate_drift(model)


@functools.lru_cache(maxsize=None)
def reflect(model: DriftModel) -> DriftModel:
    """Drift of -X: u -> -alpha(-u).  Bounds carry over unchanged."""
    alpha, alpha_prime, A = model.alpha, model.alpha_prime, model.A
    return DriftModel(
        alpha=lambda u: -alpha(-u),
        alpha_prime=lambda u: alpha_prime(-u),
        A=lambda u: A(-u),
        k1=model.k1, k2=model.k2,
        alpha_abs_bound=model.alpha_abs_bound,
        endpoint_bound=model.endpoint_bound,
        name=f"reflect({model.name})",
    )


# -- catalog --------------------------------------------------------------

def _dual(scalar, vector):
    def f(u):
        if type(u) is float:
            return scalar(u)
        return vector(u)
    return f


def _logcosh(u):
    u = abs(u)
    return u + math.log1p(math.exp(-2.0 * u)) - math.log(2.0)


def _logcosh_vec(u):
    u = np.abs(u)
    return u + np.log1p(np.exp(-2.0 * u)) - np.log(2.0)


def _sech2(u):
    return 1.0 / math.cosh(u) ** 2 if abs(u) < 350 else 0.0


def _sech2_vec(u):
    return 1.0 / np.cosh(np.clip(u, -350, 350)) ** 2


def zero_drift() -> DriftModel:
    z = lambda u: 0.0 * u
    return DriftModel(z, z, z, 0.0, 0.0, alpha_abs_bound=0.0, endpoint_bound=1.0, name="zero")


def const_drift(c: float) -> DriftModel:
    c = float(c)
    return DriftModel(
        alpha=lambda u: c + 0.0 * u,
        alpha_prime=lambda u: 0.0 * u,
        A=lambda u: c * u,
        k1=0.5 * c * c, k2=0.5 * c * c,
        alpha_abs_bound=abs(c),
        endpoint_bound=1.0 if c == 0.0 else None,
        name=f"const:{c:g}",
    )


def sin_drift() -> DriftModel:
    return DriftModel(
        alpha=_dual(math.sin, np.sin),
        alpha_prime=_dual(math.cos, np.cos),
        A=_dual(lambda u: 1.0 - math.cos(u), lambda u: 1.0 - np.cos(u)),
        k1=-0.5, k2=0.625,
        alpha_abs_bound=1.0,
        endpoint_bound=math.e ** 2,
        name="sin",
    )


def tanh_drift() -> DriftModel:
    return DriftModel(
        alpha=_dual(math.tanh, np.tanh),
        alpha_prime=_dual(_sech2, _sech2_vec),
        A=_dual(_logcosh, _logcosh_vec),
        k1=0.5, k2=0.5,
        alpha_abs_bound=1.0,
        name="tanh",
    )


def linear_drift(c: float) -> DriftModel:
    """alpha(u) = c*u.  Fails Condition 3 for c != 0: its k2 cannot be finite."""
    c = float(c)
    return DriftModel(
        alpha=lambda u: c * u,
        alpha_prime=lambda u: c + 0.0 * u,
        A=lambda u: 0.5 * c * u * u,
        k1=0.5 * c, k2=0.5 * c + 1.0,
        endpoint_bound=1.0 if c <= 0 else None,
        name=f"linear:{c:g}",
    )


CATALOG = ("zero", "const:<c>", "sin", "tanh", "linear:<c>")


@functools.lru_cache(maxsize=None)
def get_drift(name: str) -> DriftModel:
    """Look up a catalog drift by CLI name, e.g. ``"sin"`` or ``"const:1.5"``."""
    key, _, arg = name.partition(":")
    try:
        if key == "zero" and not arg:
            return zero_drift()
        if key == "sin" and not arg:
            return sin_drift()
        if key == "tanh" and not arg:
            return tanh_drift()
        if key == "const" and arg:
            return const_drift(float(arg))
        if key == "linear" and arg:
            return linear_drift(float(arg))
    except ValueError:
        pass
    raise ValueError(f"unknown drift {name!r}; choose from {', '.join(CATALOG)}")
