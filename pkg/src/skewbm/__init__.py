"""Skew Brownian motion at an interface.

Closed-form joint law of (position, local time at 0), exact samplers for
it, a lattice skew-random-walk oracle with drift, and a statistical
verification engine.  A FastAPI service (``skewbm.service``) exposes all
of it; the ``skewbm`` CLI is a thin client of that service.
"""

__version__ = "0.1.0"

from .density import (
    DensityValue,
    QuadratureSpec,
    QueryPoint,
    SkewParams,
    atom_weight,
    evaluate_joint,
    gauss_kernel,
    joint_density_continuous,
    local_time_marginal_density,
    normalization_mass,
    skew_marginal_cdf,
    skew_marginal_density,
    survival_probability,
)
from .errors import ConfigError, DomainError, QuadratureError, SamplerError, SkewBMError
from .rng import RngStream
from .sampling import JointSample, sample_joint, sample_joint_batch, sample_u_given_hit
from .verify import CheckSpec, VerificationReport, default_suite, run_checks
from .walk import DriftSpec, PathRecord, simulate_batch, simulate_batch_arrays, simulate_path

__all__ = [
    "__version__",
    "SkewParams", "QueryPoint", "DensityValue", "QuadratureSpec",
    "gauss_kernel", "joint_density_continuous", "atom_weight",
    "survival_probability", "skew_marginal_density", "skew_marginal_cdf",
    "local_time_marginal_density", "normalization_mass", "evaluate_joint",
    "RngStream",
    "JointSample", "sample_joint", "sample_joint_batch", "sample_u_given_hit",
    "DriftSpec", "PathRecord", "simulate_path", "simulate_batch", "simulate_batch_arrays",
    "CheckSpec", "VerificationReport", "run_checks", "default_suite",
    "SkewBMError", "DomainError", "QuadratureError", "SamplerError", "ConfigError",
]
