"""Exact ASEP simulation with step start and Tracy-Widom verification tools."""

from .core import (
    ModelParameters,
    ParticleConfiguration,
    TrajectoryState,
    advance_event,
    current_at,
    init_step,
    make_trajectory,
    position_of,
    run_to,
    truncation_size,
)
from .harness import (
    EnsembleConfig,
    EnsembleSummary,
    empirical_cdf,
    ks_distance,
    normalize_current,
    position_form_check,
    run_ensemble,
    strong_law_check,
    verify_event_identity,
)
from .scaling import (
    ScalingParameters,
    invert_sigma,
    kpz_constants,
    m_of,
    scaling_constants,
    sigma_series,
    strong_law_density,
)
from .tw2 import airy, airy_kernel, f2_cdf, f2_cdf_painleve, limit_law_current

__version__ = "0.1.0"

__all__ = [
    "EnsembleConfig",
    "EnsembleSummary",
    "ModelParameters",
    "ParticleConfiguration",
    "ScalingParameters",
    "TrajectoryState",
    "__version__",
    "advance_event",
    "airy",
    "airy_kernel",
    "current_at",
    "empirical_cdf",
    "f2_cdf",
    "f2_cdf_painleve",
    "init_step",
    "invert_sigma",
    "kpz_constants",
    "ks_distance",
    "limit_law_current",
    "m_of",
    "make_trajectory",
    "normalize_current",
    "position_form_check",
    "position_of",
    "run_ensemble",
    "run_to",
    "scaling_constants",
    "sigma_series",
    "strong_law_check",
    "strong_law_density",
    "truncation_size",
    "verify_event_identity",
]
