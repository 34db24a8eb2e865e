"""Recovery of the fractional order from a single norm observation.

At a certified observation time t0 the weighted squared norm U(t0, .) is
strictly decreasing on the working order interval, so the level equation
U(t0, alpha) = d0 has exactly one solution when d0 lies between the interval
endpoint values, and none otherwise.  Recovery is by bisection: each step
keeps a bracket whose endpoint values straddle d0, so the monotonicity
certificate doubles as a convergence certificate.

Certification has two layers.  First, unless overridden, t0 must not fall
below the scanned threshold estimate for the working interval (gate).
Second, U is sampled at the interval endpoints plus 19 interior points and
must decrease strictly across all consecutive pairs (runtime certificate);
a failure means t0 is below the true threshold for this range and recovery
refuses to run.  The default working interval (1e-3, 1 - 1e-3) is wide for
exploration, but its certificate cannot pass at any practically reachable
t0: near order 0 the kernel is still far from its slow-decay regime at any
double-precision time, so the sampled values rise before they fall.  Narrow
the bracket (for instance to (0.095, 0.905)) for certified recovery.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateDataError,
    DomainError,
    MonotonicityError,
    NoSolutionError,
    UncertifiedTimeError,
)
from .forward import ForwardSolution, observation_value, solve
from .operators import InitialData, ObservationWeights, SpectralOperator
from .quadrature import DEFAULT_CONFIG, QuadratureConfig
from .sensitivity import estimate_threshold_time

__all__ = ["InverseSpec", "AdmissibleRange", "RecoveryResult",
           "admissible_range", "recover_alpha", "recover_and_solve"]

N_CERT_INTERIOR = 19


@dataclass(frozen=True)
class InverseSpec:
    """Observation and tolerance settings for one recovery run."""

    t0: float
    d0: float
    alpha_bracket: tuple[float, float] = (1e-3, 1.0 - 1e-3)
    alpha_tol: float = 1e-8
    value_tol: float = 1e-10   # relative to d0

    def __post_init__(self):
        lo, hi = self.alpha_bracket
        if not (0.0 < lo < hi < 1.0):
            raise DomainError("alpha_bracket must satisfy 0 < lo < hi < 1")
        if not self.t0 >= 1.0:
            raise DomainError("t0 must be >= 1")
        if self.d0 < 0.0:
            raise DomainError("d0 must be nonnegative")
        if not (self.alpha_tol > 0.0 and self.value_tol > 0.0):
            raise DomainError("tolerances must be positive")


@dataclass(frozen=True)
class AdmissibleRange:
    """Endpoint values of U plus the strict-decrease certificate samples."""

    u_min: float
    u_max: float
    alpha_samples: np.ndarray
    u_samples: np.ndarray
    t0: float
    threshold_estimate: float | None   # None when the gate was overridden

    @property
    def certified(self) -> bool:
        return self.threshold_estimate is not None


@dataclass(frozen=True)
class RecoveryResult:
    alpha_hat: float
    residual: float
    iterations: int
    certificate: AdmissibleRange
    t0_used: float
    bracket: tuple[float, float]

    @property
    def certified(self) -> bool:
        return self.certificate.certified


def _certificate_alphas(lo: float, hi: float) -> np.ndarray:
    interior = lo + (hi - lo) * np.arange(1, N_CERT_INTERIOR + 1) / (N_CERT_INTERIOR + 1)
    return np.concatenate(([lo], interior, [hi]))


def admissible_range(
    op: SpectralOperator,
    data: InitialData,
    gamma: float,
    t0: float,
    weights: ObservationWeights,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    *,
    alpha_bracket: tuple[float, float] = (1e-3, 1.0 - 1e-3),
    threshold_estimate: float | None = None,
    unsafe_t0: bool = False,
) -> AdmissibleRange:
    """Attainable range (u_min, u_max) of U(t0, .) over the bracket, by
    monotonicity: u_max at the low endpoint, u_min at the high endpoint.

    Raises DegenerateDataError for zero data, UncertifiedTimeError when t0
    falls below the threshold estimate for the bracket (unless unsafe_t0),
    and MonotonicityError when the sampled values fail strict decrease.
    threshold_estimate short-circuits the scan when the caller already has
    one for this (gamma, lambda1, bracket).
    """
    if data.norm_squared == 0.0:
        raise DegenerateDataError("initial data has zero norm")
    if not t0 >= 1.0:
        raise DomainError("t0 must be >= 1")
    lo, hi = alpha_bracket
    if not (0.0 < lo < hi < 1.0):
        raise DomainError("alpha_bracket must satisfy 0 < lo < hi < 1")

    alphas = _certificate_alphas(lo, hi)
    gate = threshold_estimate
    if not unsafe_t0:
        if gate is None:
            gate = estimate_threshold_time(gamma, op.lambda1, tuple(alphas), cfg)
        if t0 < gate:
            raise UncertifiedTimeError(
                f"t0 = {t0:g} is below the scanned threshold {gate:g} for this "
                "order range; increase t0 or pass unsafe_t0=True"
            )
    us = np.array([observation_value(op, data, a, gamma, t0, weights, cfg) for a in alphas])
    drops = np.diff(us)
    if np.any(drops >= 0.0):
        worst = int(np.argmax(drops))
        raise MonotonicityError(
            "observation values are not strictly decreasing across the order "
            f"samples (first failure between alpha={alphas[worst]:.4g} and "
            f"alpha={alphas[worst + 1]:.4g}); t0 is below the true threshold "
            "for this range"
        )
    return AdmissibleRange(
        u_min=float(us[-1]),
        u_max=float(us[0]),
        alpha_samples=alphas,
        u_samples=us,
        t0=t0,
        threshold_estimate=None if unsafe_t0 else gate,
    )


def recover_alpha(
    spec: InverseSpec,
    op: SpectralOperator,
    data: InitialData,
    gamma: float,
    weights: ObservationWeights,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    *,
    threshold_estimate: float | None = None,
    unsafe_t0: bool = False,
) -> RecoveryResult:
    """Unique order recovery by monotone bisection of U(t0, .) = d0.

    Requires d0 inside the closed attainable range (endpoints accepted);
    otherwise raises NoSolutionError.  Terminates when the bracket width
    reaches alpha_tol or the value residual reaches value_tol relative to d0.
    """
    lo, hi = spec.alpha_bracket
    cert = admissible_range(
        op, data, gamma, spec.t0, weights, cfg,
        alpha_bracket=spec.alpha_bracket,
        threshold_estimate=threshold_estimate,
        unsafe_t0=unsafe_t0,
    )
    d0 = spec.d0
    if not cert.u_min <= d0 <= cert.u_max:
        raise NoSolutionError(
            f"d0 = {d0:.6g} lies outside the attainable range "
            f"[{cert.u_min:.6g}, {cert.u_max:.6g}] at t0 = {spec.t0:g}"
        )

    def U(a: float) -> float:
        return observation_value(op, data, a, gamma, spec.t0, weights, cfg)

    # endpoint hits need no search
    if d0 == cert.u_max:
        return RecoveryResult(lo, 0.0, 0, cert, spec.t0, (lo, lo))
    if d0 == cert.u_min:
        return RecoveryResult(hi, 0.0, 0, cert, spec.t0, (hi, hi))

    a, b = lo, hi
    iterations = 0
    while b - a > spec.alpha_tol:
        mid = 0.5 * (a + b)
        um = U(mid)
        iterations += 1
        if abs(um - d0) <= spec.value_tol * d0:
            a = b = mid
            break
        if um > d0:   # U decreasing: the root lies to the right
            a = mid
        else:
            b = mid
    alpha_hat = 0.5 * (a + b)
    residual = U(alpha_hat) - d0
    return RecoveryResult(
        alpha_hat=float(alpha_hat),
        residual=float(residual),
        iterations=iterations,
        certificate=cert,
        t0_used=spec.t0,
        bracket=(float(a), float(b)),
    )


def recover_and_solve(
    spec: InverseSpec,
    op: SpectralOperator,
    data: InitialData,
    gamma: float,
    weights: ObservationWeights,
    t_grid,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    *,
    threshold_estimate: float | None = None,
    unsafe_t0: bool = False,
) -> tuple[RecoveryResult, ForwardSolution]:
    """Recover the order, then assemble the matching forward solution on the
    requested time grid: the recovered pair (u, alpha)."""
    result = recover_alpha(
        spec, op, data, gamma, weights, cfg,
        threshold_estimate=threshold_estimate, unsafe_t0=unsafe_t0,
    )
    solution = solve(op, data, result.alpha_hat, gamma, t_grid, cfg)
    return result, solution
