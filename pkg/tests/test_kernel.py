import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import rstokes as rs
from rstokes.kernel import KernelPoint

# Reference values computed with a 40-digit adaptive quadrature of the
# density representation (mpmath, split at the resonance peak), frozen here.
B_REF = {
    (2.0, 1.0, 0.5, 1.0): 0.096525267054080965,
    (1.0, 1.0, 0.5, 1.0): 0.21624290440113945,
    (2.0, 1.0, 0.5, 2.0): 0.042801987204994329,
    (2.0, 1.0, 0.5, 50.0): 0.00039879291183452335,
    (5.0, 1.0, 0.3, 10.0): 0.0013236904490253410,
    (0.5, 2.0, 0.9, 0.01): 0.59785715780963799,
    (10.0, 0.5, 0.1, 100.0): 1.7721976034483183e-05,
}
DBDT_REF = -0.10245288017602413          # same oracle, d/dt at (2,1,0.5,1)
INT_REF = {1.0: 0.94329905633173639, 10.0: 0.094380410275578097}  # T=100, gamma=1, alpha=0.5


def test_point_validation():
    with pytest.raises(rs.DomainError):
        KernelPoint(0.0, 1.0, 0.5)
    with pytest.raises(rs.DomainError):
        KernelPoint(1.0, -1.0, 0.5)
    with pytest.raises(rs.DomainError):
        KernelPoint(1.0, 1.0, 0.0)
    with pytest.raises(rs.DomainError):
        KernelPoint(1.0, 1.0, 1.0)
    with pytest.raises(rs.DomainError):
        KernelPoint(1.0, 1.0, 0.5, -0.1)


def test_density_closed_form_point():
    # alpha = 1/2 makes cos vanish and sin one: b(1) = (1/pi) * 1 / (0 + 1)
    point = KernelPoint(1.0, 1.0, 0.5)
    assert rs.spectral_density(point, 1.0) == pytest.approx(1.0 / math.pi, rel=1e-15)


def test_density_vanishes_at_origin_like_sqrt_r():
    point = KernelPoint(1.0, 1.0, 0.5)
    rs_small = np.array([1e-8, 1e-6, 1e-4])
    vals = rs.spectral_density(point, rs_small)
    # b ~ (gamma sin / pi / lam) * r^alpha near 0
    expected = np.sqrt(rs_small) / math.pi
    assert np.allclose(vals, expected, rtol=1e-2)
    assert vals[0] < vals[1] < vals[2]


def test_density_algebraic_tail_decay():
    point = KernelPoint(1.0, 1.0, 0.5)
    grid = 10.0 ** np.arange(3, 9)
    vals = rs.spectral_density(point, grid)
    assert vals[3] < 1e-6  # r = 1e6
    assert np.all(np.diff(vals) < 0.0)
    # tail exponent alpha - 2
    slopes = np.diff(np.log(vals)) / np.diff(np.log(grid))
    assert np.allclose(slopes, 0.5 - 2.0, atol=0.05)


def test_density_rejects_nonpositive_r():
    with pytest.raises(rs.DomainError):
        rs.spectral_density(KernelPoint(1.0, 1.0, 0.5), 0.0)
    with pytest.raises(rs.DomainError):
        rs.spectral_density(KernelPoint(1.0, 1.0, 0.5), np.array([1.0, -2.0]))


@pytest.mark.parametrize("params,ref", sorted(B_REF.items()))
def test_kernel_value_pinned(params, ref):
    lam, gamma, alpha, t = params
    val = rs.kernel_value(KernelPoint(lam, gamma, alpha, t))
    assert val == pytest.approx(ref, rel=5e-10)


def test_kernel_value_one_at_time_zero():
    assert rs.kernel_value(KernelPoint(3.0, 2.0, 0.7, 0.0)) == pytest.approx(1.0, abs=1e-8)


def test_kernel_decreasing_in_time():
    b1 = rs.kernel_value(KernelPoint(2.0, 1.0, 0.5, 1.0))
    b2 = rs.kernel_value(KernelPoint(2.0, 1.0, 0.5, 2.0))
    assert 0.0 < b2 < b1 < 1.0


def test_time_derivative_pinned_and_negative():
    val = rs.kernel_time_derivative(KernelPoint(2.0, 1.0, 0.5, 1.0))
    assert val == pytest.approx(DBDT_REF, rel=1e-8)
    assert val < 0.0
    assert rs.kernel_time_derivative(KernelPoint(5.0, 1.0, 0.3, 10.0)) < 0.0


def test_time_derivative_matches_finite_difference():
    point = KernelPoint(2.0, 1.0, 0.5, 1.0)
    h = 1e-5
    fd = (
        rs.kernel_value(point.at_time(1.0 + h)) - rs.kernel_value(point.at_time(1.0 - h))
    ) / (2.0 * h)
    val = rs.kernel_time_derivative(point)
    assert abs(val - fd) < max(1e-6, 1e-4 * abs(val))


def test_time_derivative_decays_for_large_t():
    early = abs(rs.kernel_time_derivative(KernelPoint(2.0, 1.0, 0.5, 1.0)))
    late = abs(rs.kernel_time_derivative(KernelPoint(2.0, 1.0, 0.5, 1e3)))
    assert late < early


def test_time_derivative_rejects_t_zero():
    with pytest.raises(rs.DomainError):
        rs.kernel_time_derivative(KernelPoint(2.0, 1.0, 0.5, 0.0))


def test_time_integral_pinned_and_bounded():
    for lam, ref in INT_REF.items():
        val = rs.kernel_time_integral(lam, 1.0, 0.5, 100.0)
        assert val == pytest.approx(ref, rel=1e-8)
        assert val <= 1.0 / lam + 1e-8


def test_time_integral_short_horizon():
    horizon = 1e-6
    val = rs.kernel_time_integral(1.0, 1.0, 0.5, horizon)
    assert 0.5 * horizon <= val <= 2.0 * horizon


def test_normalization_of_density():
    # kernel at t = 0 integrates the bare density: equals 1
    for lam in (0.5, 10.0):
        for alpha in (0.1, 0.9):
            val = rs.kernel_value(KernelPoint(lam, 2.0, alpha, 0.0))
            assert val == pytest.approx(1.0, abs=1e-8)


@settings(max_examples=40, deadline=None)
@given(
    lam=st.floats(0.1, 50.0),
    gamma=st.floats(0.1, 5.0),
    alpha=st.floats(0.02, 0.98),
    t=st.floats(0.001, 200.0),
)
def test_kernel_in_unit_interval(lam, gamma, alpha, t):
    val = rs.kernel_value(KernelPoint(lam, gamma, alpha, t))
    assert 0.0 < val < 1.0


@settings(max_examples=40, deadline=None)
@given(
    lam=st.floats(0.1, 50.0),
    gamma=st.floats(0.1, 5.0),
    alpha=st.floats(0.02, 0.98),
    r=st.floats(1e-6, 1e6),
)
def test_density_strictly_positive(lam, gamma, alpha, r):
    assert rs.spectral_density(KernelPoint(lam, gamma, alpha), r) > 0.0


def test_decay_envelope_dominates():
    # lam * K <= envelope on a small spot grid
    for lam in (0.5, 2.0, 10.0):
        for t in (0.1, 1.0, 10.0):
            env = rs.decay_envelope(1.0, 0.5, t)
            assert lam * rs.kernel_value(KernelPoint(lam, 1.0, 0.5, t)) <= env * (1.0 + 1e-9)


def test_tight_tolerance_converges():
    cfg = rs.QuadratureConfig(rel_tol=1e-12, abs_tol=1e-16)
    val = rs.kernel_value(KernelPoint(2.0, 1.0, 0.5, 1.0), cfg)
    assert val == pytest.approx(B_REF[(2.0, 1.0, 0.5, 1.0)], rel=1e-11)


def test_panel_budget_exhaustion_raises():
    cfg = rs.QuadratureConfig(rel_tol=1e-10, abs_tol=1e-14, max_panels=4)
    with pytest.raises(rs.QuadratureError):
        rs.kernel_value(KernelPoint(2.0, 1.0, 0.5, 1.0), cfg)
