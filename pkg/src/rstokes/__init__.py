"""Toolkit for the viscoelastic (Rayleigh-Stokes) relaxation kernel: kernel
evaluation by adaptive quadrature, order sensitivity, spectral forward
solving, and unique recovery of the fractional order from a single norm
observation."""

from .errors import (
    CertificateError,
    DegenerateDataError,
    DomainError,
    MonotonicityError,
    NonFiniteWeightError,
    NoSolutionError,
    NotSPDError,
    OutOfDomainError,
    QuadratureError,
    RStokesError,
    ThresholdNotFoundError,
    UncertifiedTimeError,
)
from .forward import ForwardSolution, observation_value, solve, synthesize
from .inverse import (
    AdmissibleRange,
    InverseSpec,
    RecoveryResult,
    admissible_range,
    recover_alpha,
    recover_and_solve,
)
from .kernel import (
    KernelPoint,
    decay_envelope,
    kernel_time_derivative,
    kernel_time_integral,
    kernel_value,
    spectral_density,
)
from .operators import (
    InitialData,
    ObservationWeights,
    SpectralOperator,
    dirichlet_interval,
    dirichlet_rectangle,
    expand,
    gram_matrix,
    matrix_operator,
    observation_weights,
)
from .oracle import OracleConfig, gl_weights, solve_scalar
from .quadrature import QuadratureConfig
from .sensitivity import (
    BoundCheckReport,
    ScaledIntegrandParts,
    SensitivityBreakdown,
    alpha_sensitivity,
    alpha_sensitivity_fd,
    check_envelope_bounds,
    estimate_threshold_time,
    scaled_parts,
    split_constant,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibleRange",
    "BoundCheckReport",
    "CertificateError",
    "DegenerateDataError",
    "DomainError",
    "ForwardSolution",
    "InitialData",
    "InverseSpec",
    "KernelPoint",
    "MonotonicityError",
    "NoSolutionError",
    "NonFiniteWeightError",
    "NotSPDError",
    "ObservationWeights",
    "OracleConfig",
    "OutOfDomainError",
    "QuadratureConfig",
    "QuadratureError",
    "RStokesError",
    "RecoveryResult",
    "ScaledIntegrandParts",
    "SensitivityBreakdown",
    "SpectralOperator",
    "ThresholdNotFoundError",
    "UncertifiedTimeError",
    "admissible_range",
    "alpha_sensitivity",
    "alpha_sensitivity_fd",
    "check_envelope_bounds",
    "decay_envelope",
    "dirichlet_interval",
    "dirichlet_rectangle",
    "estimate_threshold_time",
    "expand",
    "gl_weights",
    "gram_matrix",
    "kernel_time_derivative",
    "kernel_time_integral",
    "kernel_value",
    "matrix_operator",
    "observation_value",
    "observation_weights",
    "recover_alpha",
    "recover_and_solve",
    "scaled_parts",
    "solve",
    "solve_scalar",
    "spectral_density",
    "split_constant",
    "synthesize",
]
