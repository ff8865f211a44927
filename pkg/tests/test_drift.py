import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exactsde.drift import (
    UNBOUNDED,
    DriftModel,
    default_piece,
    ensure_valid,
    get_drift,
    max_horizon,
    phi,
    reflect,
    validate_drift,
)
from exactsde.errors import ConditionViolation

CATALOG = ["zero", "const:1", "const:-2.5", "sin", "tanh"]
GRID = np.arange(-1000, 1001) * 0.01


def test_sin_validates_on_dense_grid():
    report = validate_drift(get_drift("sin"), grid=GRID, tol=1e-9)
    assert report.passed
    assert {c.condition for c in report.checks} == {"C1", "A", "C3", "C3'", "C2"}
    c3 = next(c for c in report.checks if c.condition == "C3")
    # the supremum 5/8 is attained where cos u = 1/2
    assert c3.worst_value == pytest.approx(0.625, abs=1e-4)


def test_zero_drift_passes_with_phi_identically_zero():
    m = get_drift("zero")
    assert validate_drift(m, grid=GRID).passed
    assert np.all(phi(m, GRID) == 0)


def test_linear_restoring_drift_is_rejected():
    m = DriftModel(alpha=lambda u: -u, alpha_prime=lambda u: -1.0 + 0 * u,
                   A=lambda u: -0.5 * u * u, k1=-0.5, k2=10.0, endpoint_bound=1.0)
    with pytest.raises(ConditionViolation) as exc:
        validate_drift(m, grid=GRID)
    err = exc.value
    assert err.condition == "C3"
    # (u^2 - 1)/2 is largest at the grid edge
    assert abs(err.u) == pytest.approx(10.0)
    assert err.value == pytest.approx(49.5)
    assert not err.report.passed


def test_report_without_raising():
    m = get_drift("linear:-1")
    report = validate_drift(m, raise_on_failure=False)
    assert not report.passed
    assert [c.condition for c in report.failures()] == ["C3"]


def test_missing_envelope_fails_condition_2():
    s = get_drift("sin")
    m = DriftModel(s.alpha, s.alpha_prime, s.A, s.k1, s.k2)
    with pytest.raises(ConditionViolation) as exc:
        validate_drift(m)
    assert exc.value.condition == "C2"


def test_wrong_derivative_fails_condition_1():
    m = DriftModel(math.sin, math.sin, lambda u: 1 - math.cos(u), -1.0, 1.0, alpha_abs_bound=1.0)
    with pytest.raises(ConditionViolation) as exc:
        validate_drift(m, grid=np.linspace(-3, 3, 61))
    assert exc.value.condition == "C1"


def test_alpha_bound_checked():
    m = DriftModel(lambda u: 2.0 + 0 * u, lambda u: 0 * u, lambda u: 2.0 * u, 2.0, 2.0,
                   alpha_abs_bound=1.0)
    with pytest.raises(ConditionViolation) as exc:
        validate_drift(m)
    assert exc.value.condition == "C3'"


def test_scalar_only_closures_are_accepted():
    m = DriftModel(math.sin, math.cos, lambda u: 1 - math.cos(u), -0.5, 0.625,
                   alpha_abs_bound=1.0, name="scalar-sin")
    assert validate_drift(m).passed


@pytest.mark.parametrize("bad_grid", [[], [1.0, 0.0]])
def test_grid_preconditions(bad_grid):
    with pytest.raises(ValueError):
        validate_drift(get_drift("sin"), grid=bad_grid)


def test_phi_examples():
    s = get_drift("sin")
    assert phi(s, 0.0) == pytest.approx(1.0)
    assert phi(s, math.pi) == pytest.approx(0.0, abs=1e-15)
    assert phi(get_drift("zero"), 3.7) == 0.0


def test_max_horizon_examples():
    assert max_horizon(get_drift("sin")) == pytest.approx(8 / 9)
    assert max_horizon(get_drift("zero")) is UNBOUNDED
    assert max_horizon(get_drift("tanh")) is UNBOUNDED
    assert default_piece(get_drift("tanh")) == 1.0
    assert default_piece(get_drift("tanh"), cap=0.3) == 0.3


def test_tanh_functional_is_constant():
    u = np.linspace(-20, 20, 4001)
    g = 0.5 * np.tanh(u) ** 2 + 0.5 / np.cosh(u) ** 2
    np.testing.assert_allclose(g, 0.5, atol=1e-15)


@pytest.mark.parametrize("name", CATALOG)
def test_phi_bounded_by_inverse_horizon(name):
    m = get_drift(name)
    validate_drift(m)
    T = max_horizon(m)
    upper = 0.0 if math.isinf(T) else 1.0 / T
    p = phi(m, GRID)
    assert np.all(p >= -1e-12)
    assert np.all(p <= upper + 1e-12)


@pytest.mark.parametrize("name", CATALOG)
def test_finite_differences(name):
    m = get_drift(name)
    eps = 1e-4
    fdA = (m.A(GRID + eps) - m.A(GRID - eps)) / (2 * eps)
    fda = (m.alpha(GRID + eps) - m.alpha(GRID - eps)) / (2 * eps)
    assert np.max(np.abs(fdA - m.alpha(GRID))) < 1e-6
    assert np.max(np.abs(fda - m.alpha_prime(GRID))) < 1e-6
    assert m.A(0.0) == 0.0


@settings(max_examples=50, deadline=None)
@given(extra=st.floats(0.0, 50.0), u=st.floats(-50, 50))
def test_phi_ignores_k2(extra, u):
    s = get_drift("sin")
    wider = DriftModel(s.alpha, s.alpha_prime, s.A, s.k1, s.k2 + extra, alpha_abs_bound=1.0)
    assert phi(wider, u) == phi(s, u)
    assert max_horizon(wider) <= max_horizon(s)


@settings(max_examples=50, deadline=None)
@given(u=st.floats(-30, 30))
def test_reflected_drift(u):
    s = get_drift("tanh")
    r = reflect(s)
    assert r.alpha(u) == pytest.approx(-s.alpha(-u))
    assert r.A(u) == pytest.approx(s.A(-u))
    assert phi(r, u) == pytest.approx(phi(s, -u))
    assert reflect(s) is r


def test_catalog_lookup():
    assert get_drift("const:1.5").alpha(3.0) == 1.5
    assert get_drift("sin") is get_drift("sin")
    for bad in ["cos", "const", "const:x", "sin:2", ""]:
        with pytest.raises(ValueError):
            get_drift(bad)


def test_ensure_valid_caches():
    m = get_drift("tanh")
    ensure_valid(m)
    ensure_valid(m)
