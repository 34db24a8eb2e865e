import math

import numpy as np
import pytest

import rstokes as rs
from rstokes.forward import observation_value, solve, synthesize

# kernel references, 40-digit quadrature of the density representation
B_1_1 = 0.21624290440113945    # K(lam=1, gamma=1, alpha=0.5, t=1)
B_2_1 = 0.096525267054080965   # K(lam=2, gamma=1, alpha=0.5, t=1)


@pytest.fixture
def diag_op():
    return rs.matrix_operator(np.diag([1.0, 2.0]))


def test_single_mode_norm_matches_kernel(diag_op):
    data = rs.InitialData(np.array([1.0, 0.0]))
    sol = solve(diag_op, data, 0.5, 1.0, [1.0])
    assert math.sqrt(sol.norm_squared()[0]) == pytest.approx(B_1_1, rel=1e-9)


def test_zero_data_gives_zero_solution(diag_op):
    data = rs.InitialData(np.zeros(2))
    sol = solve(diag_op, data, 0.5, 1.0, [0.0, 1.0, 2.0])
    assert np.allclose(sol.norm_squared(), 0.0)


def test_two_mode_norm_is_sum_of_squares(diag_op):
    data = rs.InitialData(np.array([1.0, 1.0]))
    sol = solve(diag_op, data, 0.5, 1.0, [1.0])
    expected = B_1_1**2 + B_2_1**2
    assert sol.norm_squared()[0] == pytest.approx(expected, rel=1e-9)


def test_two_mode_norm_against_time_stepper(diag_op):
    # independent route: one brute-force trajectory per mode, squared and
    # summed; agreement at the stepper's own accuracy
    from rstokes.oracle import OracleConfig, solve_scalar

    data = rs.InitialData(np.array([1.0, 1.0]))
    sol = solve(diag_op, data, 0.5, 1.0, [1.0])
    cfg = OracleConfig(h=1e-4, T=1.0)
    _, y1 = solve_scalar(1.0, 1.0, 0.5, 1.0, cfg)
    _, y2 = solve_scalar(2.0, 1.0, 0.5, 1.0, cfg)
    assert abs(sol.norm_squared()[0] - (y1[-1] ** 2 + y2[-1] ** 2)) < 1e-4


def test_initial_amplitudes_equal_coefficients(diag_op):
    data = rs.InitialData(np.array([0.7, -0.3]))
    sol = solve(diag_op, data, 0.5, 1.0, [0.0, 1.0])
    assert np.allclose(sol.amplitudes[:, 0], data.coefficients, atol=1e-8)


def test_amplitudes_bounded_by_coefficients(diag_op):
    data = rs.InitialData(np.array([0.7, -0.3]))
    sol = solve(diag_op, data, 0.3, 2.0, [0.0, 0.5, 5.0])
    assert np.all(np.abs(sol.amplitudes) <= np.abs(data.coefficients)[:, None] + 1e-12)


def test_norm_contraction_and_time_decay():
    op = rs.dirichlet_interval(math.pi, 10)
    data = rs.expand(op, lambda x: x * (math.pi - x))
    sol = solve(op, data, 0.4, 1.0, [0.0, 0.1, 1.0, 10.0])
    norms = sol.norm_squared()
    assert norms[0] == pytest.approx(data.norm_squared, rel=1e-8)
    assert np.all(np.diff(norms) < 0.0)
    assert np.all(norms[1:] < data.norm_squared)


def test_truncation_certificate_stable_under_doubling():
    data_full = lambda K: rs.expand(rs.dirichlet_interval(math.pi, K), lambda x: x * (math.pi - x))
    u_small = observation_value(
        rs.dirichlet_interval(math.pi, 25), data_full(25), 0.5, 1.0, 2.0,
        rs.observation_weights("one", rs.dirichlet_interval(math.pi, 25)),
    )
    u_big = observation_value(
        rs.dirichlet_interval(math.pi, 50), data_full(50), 0.5, 1.0, 2.0,
        rs.observation_weights("one", rs.dirichlet_interval(math.pi, 50)),
    )
    assert u_big == pytest.approx(u_small, rel=2e-10)


def test_observation_zero_data(diag_op):
    w = rs.observation_weights("one", diag_op)
    val = observation_value(diag_op, rs.InitialData(np.zeros(2)), 0.5, 1.0, 1.0, w)
    assert val == 0.0


def test_observation_single_mode(diag_op):
    w = rs.observation_weights("one", diag_op)
    val = observation_value(diag_op, rs.InitialData(np.array([2.0, 0.0])), 0.5, 1.0, 1.0, w)
    assert val == pytest.approx(4.0 * B_1_1**2, rel=1e-9)


def test_observation_lambda_weights(diag_op):
    w = rs.observation_weights("lambda", diag_op)
    val = observation_value(diag_op, rs.InitialData(np.array([0.0, 1.0])), 0.5, 1.0, 1.0, w)
    assert val == pytest.approx(4.0 * B_2_1**2, rel=1e-9)


def test_observation_decreasing_in_alpha_at_certified_time(t0_certified):
    op = rs.matrix_operator(np.diag([1.0, 2.0, 3.0]))
    data = rs.InitialData(np.array([1.0, 0.5, 0.25]))
    w = rs.observation_weights("one", op)
    u_small = observation_value(op, data, 0.3, 1.0, t0_certified, w)
    u_large = observation_value(op, data, 0.6, 1.0, t0_certified, w)
    assert u_small > u_large


def test_synthesize_boundary_and_separability():
    op = rs.dirichlet_interval(math.pi, 6)
    data = rs.InitialData(np.array([1.0, 0, 0, 0, 0, 0], dtype=float))
    sol = solve(op, data, 0.5, 1.0, [0.0, 1.0])
    xs = np.array([0.0, 0.5, math.pi / 2.0, math.pi])
    field = synthesize(sol, xs)
    assert field.shape == (4, 2)
    assert np.allclose(field[0], 0.0, atol=1e-12)      # boundary
    assert np.allclose(field[-1], 0.0, atol=1e-12)
    v1 = op.eigenfunction(0, xs)
    assert np.allclose(field[:, 1], B_1_1 * v1, rtol=1e-8, atol=1e-12)


def test_synthesize_reproduces_initial_profile():
    K = 40
    op = rs.dirichlet_interval(math.pi, K)
    data = rs.expand(op, lambda x: x * (math.pi - x))
    sol = solve(op, data, 0.5, 1.0, [0.0])
    xs = np.linspace(0.1, math.pi - 0.1, 7)
    field = synthesize(sol, xs)
    # pointwise truncation tail: sum over odd k > K of 4 (2/pi) / k^3
    tail = (8.0 / math.pi) * sum(1.0 / k**3 for k in range(K + 1, 4001, 2))
    assert np.allclose(field[:, 0], xs * (math.pi - xs), atol=1.5 * tail)


def test_synthesize_out_of_domain():
    op = rs.dirichlet_interval(math.pi, 3)
    sol = solve(op, rs.InitialData(np.array([1.0, 0, 0], dtype=float)), 0.5, 1.0, [1.0])
    with pytest.raises(rs.OutOfDomainError):
        synthesize(sol, [4.0])


def test_grid_validation(diag_op):
    data = rs.InitialData(np.array([1.0, 0.0]))
    with pytest.raises(rs.DomainError):
        solve(diag_op, data, 0.5, 1.0, [1.0, 0.5])
    with pytest.raises(rs.DomainError):
        solve(diag_op, data, 0.5, 1.0, [-1.0, 0.5])
    with pytest.raises(rs.DomainError):
        solve(diag_op, data, 1.5, 1.0, [1.0])
