"""Exact simulation of scalar unit-diffusion SDEs by retrospective rejection sampling."""
from .core import (
    DecisionTrace,
    SamplePlan,
    Skeleton,
    conditional_law,
    exact_skeleton,
    fill_in,
    propose_decide,
    rao_blackwell_mean,
    simulate_interval,
)
from .drift import (
    UNBOUNDED,
    DriftModel,
    ValidationReport,
    get_drift,
    max_horizon,
    phi,
    validate_drift,
)
from .errors import *  # noqa: F401,F403
from .euler import EulerPath, euler_hitting_time, euler_maximum, euler_path
from .functionals import HittingQuery, simulate_hitting_time, simulate_maximum
from .kernels import (
    Anchor,
    HitResult,
    bridge_hitting_time,
    bridge_maximum,
    bridge_point,
    sample_endpoint,
    sample_inverse_gaussian,
)
from .rng import RandomSource
from .stats import KsResult, ks_two_sample, quadrature_phi_integral, summarize_traces

__version__ = "0.1.0"
