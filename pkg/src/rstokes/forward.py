"""Forward solution of the abstract viscoelastic flow problem by eigenfunction
expansion.  Each mode decays independently by the relaxation kernel:

    u(t) = sum_k  phi_k * K(lam_k, t) * v_k,

so the squared-norm observation with weights Phi is

    U(t, alpha) = sum_k Phi(lam_k)^2 * K(lam_k, t)^2 * phi_k^2.

Mode evaluations reuse the kernel quadrature per (k, t) pair; there is no
time stepping, so spectral accuracy is uniform in t.  Series truncation is
certified with the constant-free envelope lam * K <= min(1/t,
Gamma(1-alpha) t^(alpha-1) / (pi gamma sin(alpha pi))).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .kernel import KernelPoint, decay_envelope, kernel_value
from .operators import InitialData, ObservationWeights, SpectralOperator
from .quadrature import DEFAULT_CONFIG, QuadratureConfig

__all__ = ["ForwardSolution", "solve", "observation_value", "synthesize"]


@dataclass(frozen=True)
class ForwardSolution:
    """Per-mode amplitudes phi_k * K(lam_k, t) on a time grid.

    amplitudes has shape (truncation_K_effective, len(t_grid)); modes beyond
    the effective truncation are certified negligible for the squared norm at
    the relative tolerance of the quadrature config used.
    """

    alpha: float
    gamma: float
    operator: SpectralOperator
    t_grid: np.ndarray
    amplitudes: np.ndarray
    truncation_K_effective: int

    def norm_squared(self) -> np.ndarray:
        """||u(t)||^2 on the time grid."""
        return np.einsum("kt,kt->t", self.amplitudes, self.amplitudes)


def _validate_params(op: SpectralOperator, data: InitialData, alpha: float, gamma: float):
    if data.coefficients.size != op.truncation:
        raise DomainError(
            f"data length {data.coefficients.size} does not match operator truncation {op.truncation}"
        )
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    if not gamma > 0.0:
        raise DomainError("gamma must be positive")


def solve(
    op: SpectralOperator,
    data: InitialData,
    alpha: float,
    gamma: float,
    t_grid,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> ForwardSolution:
    """Evaluate the mode amplitudes on the given ascending time grid.

    Modes are processed in eigenvalue order; once the envelope bound shows the
    remaining coefficient mass cannot move the squared norm by more than
    rel_tol relatively (at the smallest positive grid time), later modes are
    dropped and the effective truncation recorded.
    """
    _validate_params(op, data, alpha, gamma)
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise DomainError("t_grid must be a nonempty 1-D sequence")
    if np.any(t < 0.0) or (t.size > 1 and np.any(np.diff(t) <= 0.0)):
        raise DomainError("t_grid must be nonnegative and strictly ascending")

    phi = data.coefficients
    K = op.truncation
    # earliest positive time governs the truncation bound (slowest decay)
    pos = np.nonzero(t > 0.0)[0]
    i_min = int(pos[0]) if pos.size else -1

    has_zero = bool(t[0] == 0.0)
    rows = []
    k_eff = 0
    partial_min = 0.0
    partial_zero = 0.0
    for k in range(K):
        if phi[k] == 0.0:
            rows.append(np.zeros_like(t))
            k_eff = k + 1
            continue
        row = np.array(
            [
                phi[k] * kernel_value(KernelPoint(float(op.eigenvalues[k]), gamma, alpha, tv), cfg)
                for tv in t
            ]
        )
        rows.append(row)
        k_eff = k + 1
        if i_min >= 0 and k + 1 < K:
            partial_min += float(row[i_min] ** 2)
            partial_zero += float(phi[k] ** 2)
            bound = min(1.0, decay_envelope(gamma, alpha, float(t[i_min])) / float(op.eigenvalues[k + 1]))
            remaining = float(np.dot(phi[k + 1 :], phi[k + 1 :]))
            decayed_ok = bound * bound * remaining <= cfg.rel_tol * partial_min
            zero_ok = (not has_zero) or remaining <= cfg.rel_tol * partial_zero
            if decayed_ok and zero_ok:
                break
    amps = np.vstack(rows) if rows else np.zeros((0, t.size))
    return ForwardSolution(
        alpha=float(alpha),
        gamma=float(gamma),
        operator=op,
        t_grid=t,
        amplitudes=amps,
        truncation_K_effective=k_eff,
    )


def observation_value(
    op: SpectralOperator,
    data: InitialData,
    alpha: float,
    gamma: float,
    t0: float,
    weights: ObservationWeights,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> float:
    """Weighted squared-norm observation U(t0, alpha) with a certified series
    tail: modes are accumulated until the envelope bound on the remainder
    falls below rel_tol of the partial sum."""
    _validate_params(op, data, alpha, gamma)
    if not t0 > 0.0:
        raise DomainError("t0 must be positive")
    if weights.values.size != op.truncation:
        raise DomainError("weights length does not match operator truncation")

    phi = data.coefficients
    w = weights.values
    env = decay_envelope(gamma, alpha, t0)
    total = 0.0
    for k in range(op.truncation):
        wphi = w[k] * phi[k]
        if wphi == 0.0:
            continue
        B = kernel_value(KernelPoint(float(op.eigenvalues[k]), gamma, alpha, t0), cfg)
        total += (wphi * B) ** 2
        if k + 1 < op.truncation:
            # remaining modes: |w B phi| <= |w_j| min(1, env/lam_j) |phi_j|
            lam_next = op.eigenvalues[k + 1 :]
            cap = np.minimum(1.0, env / lam_next) * np.abs(w[k + 1 :])
            rem = float(np.dot((cap * phi[k + 1 :]), (cap * phi[k + 1 :])))
            if rem <= cfg.rel_tol * total:
                break
    return total


def synthesize(solution: ForwardSolution, x_points) -> np.ndarray:
    """Field values u(x, t) = sum_k amplitude_k(t) v_k(x) on the grid;
    returns an array of shape (len(x_points), len(t_grid))."""
    op = solution.operator
    k_eff = solution.truncation_K_effective
    if op.kind == "interval":
        xs = np.asarray(x_points, dtype=float).ravel()
    elif op.kind == "rectangle":
        xs = np.asarray(x_points, dtype=float).reshape(-1, 2)
    else:
        xs = np.asarray(x_points)
    basis = np.array([op.eigenfunction(k, xs) for k in range(k_eff)])
    return basis.T @ solution.amplitudes
