import math

import numpy as np
import pytest

import rstokes as rs
from rstokes.kernel import KernelPoint
from rstokes.sensitivity import (
    alpha_sensitivity,
    alpha_sensitivity_fd,
    check_envelope_bounds,
    estimate_threshold_time,
    scaled_parts,
    split_constant,
)

# d(kernel)/d(alpha) at (2, 1, 0.5, t0=50): 40-digit quadrature of the
# representation, differenced centrally with step 1e-12 at 40-digit precision.
DKDA_REF = -0.0010774499803177947


class TestSplitConstant:
    def test_first_branch_midpoint(self):
        # gamma + 1/lambda1 = 0.2 < 1/2: interval (1, 2.5), midpoint 1.75
        assert split_constant(0.1, 10.0) == pytest.approx(1.75, rel=1e-14)

    def test_second_branch_per_alpha(self):
        # gamma + 1/lambda1 = 2 >= 1/2: c0^alpha < 1/4, solved at the given alpha
        c0 = split_constant(1.0, 1.0, 0.5)
        assert c0 < 1.0
        assert c0**0.5 < 0.25
        assert c0 == pytest.approx((0.99 * 0.25) ** 2, rel=1e-14)

    def test_second_branch_without_alpha_is_tiny(self):
        c0 = split_constant(1.0, 1.0)
        assert 0.0 < c0 < 1e-10  # binding constraint at the floor order 0.05

    def test_boundary_is_second_branch(self):
        # gamma + 1/lambda1 exactly 1/2 classifies as the second branch
        c0 = split_constant(0.25, 4.0, 0.5)
        assert c0 < 1.0

    def test_invalid_inputs(self):
        with pytest.raises(rs.DomainError):
            split_constant(-1.0, 1.0)
        with pytest.raises(rs.DomainError):
            split_constant(1.0, 1.0, 1.5)


class TestScaledParts:
    def test_near_range_f_bracket(self):
        # on xi <= c0 t0 the middle part f is comparable to lam * t0^alpha
        gamma, lam, alpha, t0 = 1.0, 2.0, 0.5, 50.0
        c0 = split_constant(gamma, lam, alpha)
        point = KernelPoint(lam, gamma, alpha, t0)
        for xi in np.linspace(1e-6, c0 * t0, 50):
            parts = scaled_parts(float(xi), t0, point)
            assert 0.5 * lam * t0**alpha <= parts.f <= 1.5 * lam * t0**alpha

    def test_near_range_b1_bracket(self):
        gamma, lam, alpha, t0 = 1.0, 2.0, 0.5, 50.0
        c0 = split_constant(gamma, lam, alpha)
        point = KernelPoint(lam, gamma, alpha, t0)
        s = math.sin(alpha * math.pi)
        for xi in np.linspace(1e-6, c0 * t0, 50):
            parts = scaled_parts(float(xi), t0, point)
            lo = (4.0 * gamma * s / (10.0 * math.pi)) * xi**alpha / (lam * t0 ** (2 * alpha))
            hi = (4.0 * gamma / math.pi) * xi**alpha / (lam * t0 ** (2 * alpha))
            assert lo <= parts.b1 <= hi

    def test_far_range_b1_bound(self):
        gamma, lam, alpha, t0 = 1.0, 2.0, 0.5, 50.0
        c0 = split_constant(gamma, lam, alpha)
        point = KernelPoint(lam, gamma, alpha, t0)
        s = math.sin(alpha * math.pi)
        for xi in c0 * t0 * np.geomspace(1.0001, 10.0, 50):
            parts = scaled_parts(float(xi), t0, point)
            assert parts.b1 <= xi ** (-alpha) / (math.pi * gamma * lam * s)

    def test_g_positive(self):
        parts = scaled_parts(3.0, 10.0, KernelPoint(1.0, 1.0, 0.3, 10.0))
        assert parts.g > 0.0 and parts.b1 > 0.0

    def test_preconditions(self):
        point = KernelPoint(1.0, 1.0, 0.5, 10.0)
        with pytest.raises(rs.DomainError):
            scaled_parts(-1.0, 10.0, point)
        with pytest.raises(rs.DomainError):
            scaled_parts(1.0, 0.5, point)


class TestAlphaSensitivity:
    def test_pinned_value_and_fd(self):
        sb = alpha_sensitivity(KernelPoint(2.0, 1.0, 0.5, 50.0))
        assert sb.total == pytest.approx(DKDA_REF, rel=1e-8)
        assert abs(sb.total - sb.fd_reference) <= max(1e-6, 1e-3 * abs(sb.fd_reference))

    def test_total_is_exact_sum_of_parts(self):
        sb = alpha_sensitivity(KernelPoint(2.0, 1.0, 0.5, 50.0), with_fd=False)
        assert sb.total == pytest.approx(math.fsum(sb.near) + math.fsum(sb.far), abs=0.0)

    def test_negative_at_certified_time(self):
        # t0 = 50 is validated by the scan for this single order first
        t_est = estimate_threshold_time(1.0, 2.0, (0.5,))
        assert t_est <= 50.0
        sb = alpha_sensitivity(KernelPoint(2.0, 1.0, 0.5, 50.0), with_fd=False)
        assert sb.total < 0.0

    def test_fd_cross_check_on_sample_grid(self):
        for lam, gamma, alpha, t0 in [
            (1.0, 0.5, 0.3, 10.0),
            (5.0, 2.0, 0.7, 4.0),
            (0.5, 1.0, 0.9, 100.0),
        ]:
            sb = alpha_sensitivity(KernelPoint(lam, gamma, alpha, t0))
            assert abs(sb.total - sb.fd_reference) <= max(1e-6, 1e-3 * abs(sb.fd_reference))

    def test_dominant_near_pair_at_large_t0(self):
        # near part of I1 + I3 dominates every other sub-integral in magnitude
        t_est = estimate_threshold_time(1.0, 2.0, (0.5,))
        for t0 in (t_est, 4.0 * t_est):
            sb = alpha_sensitivity(KernelPoint(2.0, 1.0, 0.5, t0), with_fd=False)
            lead = abs(sb.dominant_near_pair)
            assert sb.dominant_near_pair < 0.0
            for other in (sb.near[1], sb.near[3], sb.near[4], *sb.far):
                assert lead > abs(other)

    def test_requires_t0_at_least_one(self):
        with pytest.raises(rs.DomainError):
            alpha_sensitivity(KernelPoint(1.0, 1.0, 0.5, 0.5))

    def test_fd_guards_interval(self):
        with pytest.raises(rs.DomainError):
            alpha_sensitivity_fd(KernelPoint(1.0, 1.0, 0.999999, 10.0), h=1e-5)

    def test_fd_richardson_consistency(self):
        point = KernelPoint(2.0, 1.0, 0.5, 50.0)
        coarse = alpha_sensitivity_fd(point, 1e-4)
        fine = alpha_sensitivity_fd(point, 5e-5)
        finest = alpha_sensitivity_fd(point, 2.5e-5)
        assert abs(fine - finest) < abs(coarse - finest)


class TestThresholdScan:
    def test_result_at_least_one(self):
        assert estimate_threshold_time(1.0, 2.0, (0.5,)) >= 1.0

    def test_negative_on_scan_grid_after_threshold(self):
        t_est = estimate_threshold_time(0.5, 1.0, (0.3, 0.5))
        for lam_fac in (1.0, 10.0, 100.0):
            for alpha in (0.3, 0.5):
                sb = alpha_sensitivity(
                    KernelPoint(lam_fac, 0.5, alpha, t_est), with_fd=False, lambda1=1.0
                )
                assert sb.total < 0.0

    def test_shifted_grid_agrees_within_factor_two(self):
        base = estimate_threshold_time(1.0, 1.0, (0.3, 0.5))
        shifted = estimate_threshold_time(1.0, 1.0, (0.3, 0.5), t_start=1.5)
        ratio = base / shifted
        assert 0.5 <= ratio <= 2.0

    def test_not_found_raises(self):
        with pytest.raises(rs.ThresholdNotFoundError):
            estimate_threshold_time(2.0, 1.0, (0.1,), max_exponent=6)

    def test_empty_grid_rejected(self):
        with pytest.raises(rs.DomainError):
            estimate_threshold_time(1.0, 1.0, ())


class TestEnvelopeBounds:
    def test_no_violations_on_modest_grid(self):
        report = check_envelope_bounds(
            1.0, [1.0, 2.0], [0.3, 0.7], [2.0, 50.0], n_samples=80
        )
        assert report.ok, report.violations[:5]
        assert report.n_checks > 0

    def test_first_branch_grid(self):
        report = check_envelope_bounds(
            0.1, [10.0, 20.0], [0.3, 0.5, 0.7], [2.0, 10.0], n_samples=80
        )
        assert report.ok, report.violations[:5]

    def test_factorization_identity_spot(self):
        # F = (A - w)(A + w) with A = lam gamma xi^alpha, w = lam t0^alpha - xi t0^(alpha-1)
        lam, gamma, alpha, t0, xi = 2.0, 1.0, 0.5, 50.0, 1.7
        parts = scaled_parts(xi, t0, KernelPoint(lam, gamma, alpha, t0))
        w = lam * t0**alpha - xi * t0 ** (alpha - 1.0)
        A = lam * gamma * xi**alpha
        F_def = parts.f**2 + parts.g**2 - 2.0 * parts.f * w
        assert F_def == pytest.approx((A - w) * (A + w), rel=1e-12)
