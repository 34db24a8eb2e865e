"""Adaptive Gauss-Legendre quadrature over (lower, upper) with upper = inf allowed.

The improper integrals in this package share one structure: a smooth positive
or sign-mixed integrand with an algebraic r^p behaviour at the origin, a
possible resonance peak at moderate r, and either exponential or algebraic
decay in the tail.  The driver lays out geometrically doubling macro panels,
absorbs the origin behaviour with a power substitution r = edge * u^(1/p) on
the first panel, and then globally bisects the worst panels until the summed
error estimate meets tolerance.  Tail truncation is certified by a
caller-supplied rigorous bound on the remaining mass, never by panel decay
alone.

Integrands are vector-valued: f(x) -> array of shape (m, len(x)) (or (len(x),)
for scalar integrands).  All components are integrated on shared panels; the
error target is taken relative to the largest component scale.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, QuadratureError

_EPS = float(np.finfo(float).eps)

# largest x with exp(-x) > 0 in doubles; panels beyond contribute exact zeros
EXP_ARG_LIMIT = 745.0


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and budget for the adaptive integrator.

    rel_tol is the target relative accuracy against the integral scale,
    abs_tol an absolute floor, max_panels the total panel budget per
    integral, panel_order the Gauss-Legendre node count per panel.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_panels: int = 200
    panel_order: int = 15

    def __post_init__(self):
        if not self.rel_tol >= 100.0 * _EPS:
            raise DomainError(f"rel_tol must be >= {100.0 * _EPS:.3g}, got {self.rel_tol}")
        if not self.abs_tol > 0.0:
            raise DomainError("abs_tol must be positive")
        if self.max_panels < 4:
            raise DomainError("max_panels must be >= 4")
        if self.panel_order < 2:
            raise DomainError("panel_order must be >= 2")

    def tightened(self, rel_tol: float) -> "QuadratureConfig":
        rel = max(rel_tol, 100.0 * _EPS)
        return QuadratureConfig(rel, min(self.abs_tol, rel), self.max_panels, self.panel_order)


DEFAULT_CONFIG = QuadratureConfig()

_node_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    if order not in _node_cache:
        x, w = np.polynomial.legendre.leggauss(order)
        _node_cache[order] = (x, w)
    return _node_cache[order]


def _gl(f, a: float, b: float, order: int) -> np.ndarray:
    x, w = _nodes(order)
    half = 0.5 * (b - a)
    vals = np.atleast_2d(f(0.5 * (a + b) + half * x))
    return half * (vals @ w)


class _Panel:
    __slots__ = ("err", "a", "b", "value", "f", "seq")

    def __init__(self, err, a, b, value, f, seq):
        self.err = err
        self.a = a
        self.b = b
        self.value = value
        self.f = f
        self.seq = seq  # heap tiebreaker

    def __lt__(self, other):
        return (-self.err, self.seq) < (-other.err, other.seq)


@dataclass
class QuadratureResult:
    value: np.ndarray        # shape (m,)
    error_estimate: float
    tail_bound: float
    panels: int


def _eval_panel(f, a, b, order, seq) -> _Panel:
    coarse = _gl(f, a, b, order)
    mid = 0.5 * (a + b)
    fine = _gl(f, a, mid, order) + _gl(f, mid, b, order)
    err = float(np.max(np.abs(fine - coarse)))
    return _Panel(err, a, b, fine, f, seq)


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    upper: float,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    *,
    lower: float = 0.0,
    power_at_zero: float | None = None,
    first_width: float = 1.0,
    tail_bound: Callable[[float], float] | None = None,
) -> QuadratureResult:
    """Integrate the vector-valued f over (lower, upper); upper may be inf.

    power_at_zero: exponent p of the integrand's leading r^p behaviour at 0,
    absorbed by the substitution r = edge * u^(1/p) on the first panel
    (only meaningful with lower == 0).
    tail_bound(R): rigorous bound on max-component |integral over (R, upper)|;
    may return inf while not yet valid.  Required when upper is inf.
    """
    if not upper > lower:
        raise DomainError("integration limits must satisfy lower < upper")
    if math.isinf(upper) and tail_bound is None:
        raise DomainError("tail_bound is required for an infinite upper limit")

    order = cfg.panel_order
    seq = 0
    panels: list[_Panel] = []

    width = min(first_width, upper - lower)
    edge = lower + width
    if power_at_zero is not None and lower == 0.0:
        p = power_at_zero
        if not p > 0.0:
            raise DomainError("power_at_zero must be positive")
        e = edge
        inv = 1.0 / p

        def f_sub(u: np.ndarray, _e=e, _inv=inv) -> np.ndarray:
            r = _e * u**_inv
            return np.atleast_2d(f(r)) * ((_e * _inv) * u ** (_inv - 1.0))

        panels.append(_eval_panel(f_sub, 0.0, 1.0, order, seq))
    else:
        panels.append(_eval_panel(f, lower, edge, order, seq))
    seq += 1
    frontier = edge
    n_evaluated = 1

    def state() -> tuple[np.ndarray, float, float]:
        value = panels[0].value
        err_sum = panels[0].err
        for pn in panels[1:]:
            value = value + pn.value
            err_sum += pn.err
        scale = float(np.max(np.abs(value)))
        return value, err_sum, max(cfg.abs_tol, cfg.rel_tol * scale)

    tail = math.inf if math.isinf(upper) else 0.0

    for _round in range(1000):
        progressed = False
        _, _, target = state()

        # march the frontier until the certified tail is small enough
        while frontier < upper:
            if tail_bound is not None:
                tail = tail_bound(frontier)
                if tail <= 0.5 * target:
                    break
            nxt = min(frontier + width, upper)
            panels.append(_eval_panel(f, frontier, nxt, order, seq))
            seq += 1
            n_evaluated += 1
            frontier = nxt
            width *= 2.0  # geometric panel growth
            progressed = True
            if n_evaluated > cfg.max_panels:
                raise QuadratureError(
                    f"panel budget {cfg.max_panels} exhausted while extending to r={frontier:.3g}"
                )
            _, _, target = state()
        tail = 0.0 if frontier >= upper else tail_bound(frontier)

        # refine worst panels until the summed error estimate meets target
        heapq.heapify(panels)
        while True:
            _, err_sum, target = state()
            if err_sum <= 0.5 * target:
                break
            worst = heapq.heappop(panels)
            mid = 0.5 * (worst.a + worst.b)
            if worst.err <= 0.0 or mid <= worst.a or mid >= worst.b:
                heapq.heappush(panels, worst)
                break  # at floating-point resolution; no further progress
            heapq.heappush(panels, _eval_panel(worst.f, worst.a, mid, order, seq))
            seq += 1
            heapq.heappush(panels, _eval_panel(worst.f, mid, worst.b, order, seq))
            seq += 1
            n_evaluated += 1
            progressed = True
            if n_evaluated > cfg.max_panels:
                raise QuadratureError(
                    f"panel budget {cfg.max_panels} exhausted during refinement "
                    f"(error estimate {err_sum:.3g}, target {target:.3g})"
                )

        value, err_sum, target = state()
        tail_ok = (frontier >= upper) or tail <= 0.5 * target
        if tail_ok and err_sum <= 0.5 * target:
            return QuadratureResult(np.asarray(value, dtype=float).ravel(), err_sum, tail, n_evaluated)
        if not progressed:
            raise QuadratureError(
                "adaptive quadrature stalled before reaching tolerance "
                f"(error estimate {err_sum:.3g}, tail bound {tail:.3g}, target {target:.3g})"
            )

    raise QuadratureError("adaptive quadrature failed to stabilise")


def algebraic_tail_integral(
    f,
    start: float,
    decay: float,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> QuadratureResult:
    """Integral of f over (start, inf) for integrands decaying like
    r^(-decay), decay > 1, with f evaluated stably at very large arguments.

    The substitution r = start * v^(-1/(decay-1)) maps the tail onto (0, 1]
    and turns the leading behaviour into a constant, so the adaptive panels
    see a flat integrand plus algebraically small corrections.
    """
    if not decay > 1.0:
        raise DomainError("algebraic tail requires decay > 1")
    if not start > 0.0:
        raise DomainError("start must be positive")
    eta = 1.0 / (decay - 1.0)

    def g(v: np.ndarray) -> np.ndarray:
        r = start * v**-eta
        return np.atleast_2d(f(r)) * ((start * eta) * v ** (-eta - 1.0))

    return integrate(g, 1.0, cfg, first_width=1.0)


def exp_tail_bound(coef: float, k: float, logfactor: bool, r: float) -> float:
    """Bound on the integral over (r, inf) of coef * exp(-x) * x^k * (|ln x| + 4)
    (without the log factor when logfactor is False).

    Valid for r >= max(2(k+2), 3); returns inf below that.  Uses that the
    integrand there is bounded by its value at r times exp(-(x-r)/2).
    """
    if r < max(2.0 * (k + 2.0), 3.0):
        return math.inf
    if r > EXP_ARG_LIMIT:
        return 0.0
    val = coef * r**k
    if logfactor:
        val *= math.log(r) + 4.0
    return 2.0 * val * math.exp(-r)
