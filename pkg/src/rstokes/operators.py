"""Concrete instances of the positive self-adjoint operator with discrete
spectrum: Dirichlet Laplacian on an interval and on a rectangle (closed-form
eigenpairs), and a symmetric positive-definite matrix.  Each instance carries
an ascending positive eigenvalue list, eigenfunction evaluation, Fourier
expansion of initial data, and tabulation of observation weights.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, NonFiniteWeightError, NotSPDError, OutOfDomainError

__all__ = [
    "SpectralOperator",
    "InitialData",
    "ObservationWeights",
    "dirichlet_interval",
    "dirichlet_rectangle",
    "matrix_operator",
    "expand",
    "observation_weights",
    "gram_matrix",
]

_QUAD_NODES_PER_MODE = 32  # 1D quadrature: 32-point panel per half-wave of the top mode


@dataclass(frozen=True)
class SpectralOperator:
    """Truncated eigensystem: ascending positive eigenvalues and eigenfunction
    evaluation on the underlying domain.

    kind: "interval" (domain (0, L)), "rectangle" (domain (0, Lx) x (0, Ly)),
    or "matrix" (R^n with integer coordinates 0..n-1).
    """

    kind: str
    eigenvalues: np.ndarray
    domain: tuple
    modes: tuple = ()
    eigenvectors: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        if ev.ndim != 1 or ev.size == 0:
            raise DomainError("eigenvalues must be a nonempty 1-D sequence")
        if not np.all(ev > 0.0):
            raise DomainError("all eigenvalues must be positive")
        if not np.all(np.diff(ev) >= 0.0):
            raise DomainError("eigenvalues must be ascending")
        object.__setattr__(self, "eigenvalues", ev)

    @property
    def truncation(self) -> int:
        return self.eigenvalues.size

    @property
    def lambda1(self) -> float:
        return float(self.eigenvalues[0])

    def eigenfunction(self, k: int, x):
        """Value of the k-th (0-based) orthonormal eigenfunction at x."""
        if not 0 <= k < self.truncation:
            raise DomainError(f"mode index {k} outside 0..{self.truncation - 1}")
        if self.kind == "interval":
            (L,) = self.domain
            xx = np.asarray(x, dtype=float)
            if np.any((xx < 0.0) | (xx > L)):
                raise OutOfDomainError(f"x outside [0, {L}]")
            m = self.modes[k]
            return math.sqrt(2.0 / L) * np.sin(m * math.pi * xx / L)
        if self.kind == "rectangle":
            Lx, Ly = self.domain
            pt = np.asarray(x, dtype=float)
            if pt.shape[-1] != 2:
                raise DomainError("rectangle points need two coordinates")
            xs, ys = pt[..., 0], pt[..., 1]
            if np.any((xs < 0.0) | (xs > Lx) | (ys < 0.0) | (ys > Ly)):
                raise OutOfDomainError("point outside the rectangle")
            m, n = self.modes[k]
            return (2.0 / math.sqrt(Lx * Ly)) * np.sin(m * math.pi * xs / Lx) * np.sin(
                n * math.pi * ys / Ly
            )
        # matrix: x is a component index (integral floats accepted)
        idx = np.asarray(x)
        if idx.dtype.kind == "f":
            if np.any(idx != np.round(idx)):
                raise OutOfDomainError("component index must be an integer")
            idx = idx.astype(int)
        if np.any((idx < 0) | (idx >= self.eigenvectors.shape[0])):
            raise OutOfDomainError("component index out of range")
        return self.eigenvectors[idx, k]


@dataclass(frozen=True)
class InitialData:
    """Fourier coefficients of the initial state in the operator eigenbasis."""

    coefficients: np.ndarray

    def __post_init__(self):
        co = np.asarray(self.coefficients, dtype=float)
        if co.ndim != 1:
            raise DomainError("coefficients must be 1-D")
        if not np.all(np.isfinite(co)):
            raise DomainError("coefficients must be finite")
        object.__setattr__(self, "coefficients", co)

    @property
    def norm_squared(self) -> float:
        return float(np.dot(self.coefficients, self.coefficients))


@dataclass(frozen=True)
class ObservationWeights:
    """Tabulated values of the observation weight function at the eigenvalues."""

    values: np.ndarray
    label: str = "custom"

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(vals)):
            raise NonFiniteWeightError("observation weights must be finite")
        object.__setattr__(self, "values", vals)


def dirichlet_interval(L: float, K: int) -> SpectralOperator:
    """Dirichlet Laplacian on (0, L): eigenvalues (k pi / L)^2 and
    eigenfunctions sqrt(2/L) sin(k pi x / L), k = 1..K."""
    if not L > 0.0:
        raise DomainError("L must be positive")
    if K < 1:
        raise DomainError("K must be >= 1")
    ks = np.arange(1, K + 1)
    return SpectralOperator(
        kind="interval",
        eigenvalues=(ks * math.pi / L) ** 2,
        domain=(float(L),),
        modes=tuple(int(k) for k in ks),
    )


def dirichlet_rectangle(Lx: float, Ly: float, K: int) -> SpectralOperator:
    """Dirichlet Laplacian on (0, Lx) x (0, Ly), product sine eigenfunctions.

    The K smallest of (m pi/Lx)^2 + (n pi/Ly)^2 are kept; ties are ordered
    lexicographically in (m, n) so degenerate modes are retained
    deterministically.
    """
    if not (Lx > 0.0 and Ly > 0.0):
        raise DomainError("Lx and Ly must be positive")
    if K < 1:
        raise DomainError("K must be >= 1")
    side = K + 1  # m = n = 1..K covers the K smallest pairs with room to spare
    cand = [
        ((m * math.pi / Lx) ** 2 + (n * math.pi / Ly) ** 2, m, n)
        for m in range(1, side)
        for n in range(1, side)
    ]
    cand.sort()
    kept = cand[:K]
    return SpectralOperator(
        kind="rectangle",
        eigenvalues=np.array([ev for ev, _, _ in kept]),
        domain=(float(Lx), float(Ly)),
        modes=tuple((m, n) for _, m, n in kept),
    )


def matrix_operator(M: np.ndarray) -> SpectralOperator:
    """Spectral decomposition of a symmetric positive-definite matrix; the
    eigenfunctions are the orthonormal eigenvector components."""
    A = np.asarray(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError("matrix must be square")
    scale = max(1.0, float(np.max(np.abs(A))))
    if float(np.max(np.abs(A - A.T))) > 1e-12 * scale:
        raise NotSPDError("matrix is not symmetric within 1e-12")
    evals, evecs = np.linalg.eigh(A)
    if np.any(evals <= 0.0):
        raise NotSPDError(f"matrix is not positive definite (min eigenvalue {evals.min():.3g})")
    return SpectralOperator(
        kind="matrix",
        eigenvalues=evals,
        domain=(A.shape[0],),
        eigenvectors=evecs,
    )


def _interval_quadrature(L: float, K: int) -> tuple[np.ndarray, np.ndarray]:
    # composite Gauss-Legendre with one panel per half-wave of the top mode
    panels = max(K, 1)
    x16, w16 = np.polynomial.legendre.leggauss(_QUAD_NODES_PER_MODE)
    edges = np.linspace(0.0, L, panels + 1)
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b)[:, None] + half[:, None] * x16[None, :]).ravel()
    weights = (half[:, None] * w16[None, :]).ravel()
    return nodes, weights


def expand(op: SpectralOperator, phi) -> InitialData:
    """Fourier coefficients of phi in the operator eigenbasis.

    phi may be a callable on the domain (PDE instances: quadrature; matrix
    instance: not supported), a vector in R^n for the matrix instance
    (projected onto the eigenvectors), or a plain coefficient sequence for
    PDE instances (zero-padded pass-through).
    """
    K = op.truncation
    if callable(phi):
        if op.kind == "interval":
            (L,) = op.domain
            nodes, weights = _interval_quadrature(L, max(m for m in op.modes))
            vals = np.asarray(phi(nodes), dtype=float)
            sines = np.array([op.eigenfunction(k, nodes) for k in range(K)])
            return InitialData(sines @ (weights * vals))
        if op.kind == "rectangle":
            Lx, Ly = op.domain
            mmax = max(m for m, _ in op.modes)
            nmax = max(n for _, n in op.modes)
            nx, wx = _interval_quadrature(Lx, mmax)
            ny, wy = _interval_quadrature(Ly, nmax)
            X, Y = np.meshgrid(nx, ny, indexing="ij")
            vals = np.asarray(phi(X, Y), dtype=float)
            coeffs = np.empty(K)
            for k, (m, n) in enumerate(op.modes):
                vx = math.sqrt(2.0 / Lx) * np.sin(m * math.pi * nx / Lx)
                vy = math.sqrt(2.0 / Ly) * np.sin(n * math.pi * ny / Ly)
                coeffs[k] = (wx * vx) @ vals @ (wy * vy)
            return InitialData(coeffs)
        raise DomainError("callable initial data is not defined for the matrix instance")
    vec = np.asarray(phi, dtype=float)
    if op.kind == "matrix":
        n = op.domain[0]
        if vec.shape != (n,):
            raise DomainError(f"matrix instance expects a vector of length {n}")
        return InitialData(op.eigenvectors.T @ vec)
    if vec.size > K:
        raise DomainError(f"coefficient list longer than the truncation {K}")
    out = np.zeros(K)
    out[: vec.size] = vec
    return InitialData(out)


def observation_weights(phi_fn, op: SpectralOperator) -> ObservationWeights:
    """Tabulate the observation weight function at the eigenvalues.

    phi_fn: "one" (plain squared norm), "lambda" (squared norm of the operator
    image), or any callable on the positive reals.  A warning is emitted when
    the top weight grows much faster than the eigenvalue itself, where the
    recovery theory's domain condition becomes the caller's responsibility.
    """
    ev = op.eigenvalues
    if phi_fn == "one":
        return ObservationWeights(np.ones_like(ev), label="one")
    if phi_fn == "lambda":
        return ObservationWeights(ev.copy(), label="lambda")
    if callable(phi_fn):
        vals = np.array([float(phi_fn(l)) for l in ev])
        w = ObservationWeights(vals, label=getattr(phi_fn, "__name__", "custom"))
        top = abs(vals[-1])
        if top > 100.0 * max(1.0, ev[-1]):
            warnings.warn(
                "observation weight at the top eigenvalue is large relative to the "
                "eigenvalue; the recovery theory may not apply",
                stacklevel=2,
            )
        return w
    raise DomainError(f"unsupported weight specification: {phi_fn!r}")


def gram_matrix(op: SpectralOperator) -> np.ndarray:
    """Discrete Gram matrix of the eigenfunctions on the default quadrature
    grid (PDE instances) or exactly (matrix instance).  Orthonormality means
    this is the identity up to quadrature error."""
    K = op.truncation
    if op.kind == "matrix":
        V = op.eigenvectors
        return V.T @ V
    if op.kind == "interval":
        (L,) = op.domain
        nodes, weights = _interval_quadrature(L, max(op.modes))
        funcs = np.array([op.eigenfunction(k, nodes) for k in range(K)])
        return (funcs * weights) @ funcs.T
    Lx, Ly = op.domain
    mmax = max(m for m, _ in op.modes)
    nmax = max(n for _, n in op.modes)
    nx, wx = _interval_quadrature(Lx, mmax)
    ny, wy = _interval_quadrature(Ly, nmax)
    sx = np.array([math.sqrt(2.0 / Lx) * np.sin(m * math.pi * nx / Lx) for m in range(1, mmax + 1)])
    sy = np.array([math.sqrt(2.0 / Ly) * np.sin(n * math.pi * ny / Ly) for n in range(1, nmax + 1)])
    gx = (sx * wx) @ sx.T
    gy = (sy * wy) @ sy.T
    G = np.empty((K, K))
    for i, (mi, ni) in enumerate(op.modes):
        for j, (mj, nj) in enumerate(op.modes):
            G[i, j] = gx[mi - 1, mj - 1] * gy[ni - 1, nj - 1]
    return G
