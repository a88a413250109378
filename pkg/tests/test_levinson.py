import numpy as np
import pytest
from scipy.linalg import solve, toeplitz

from modules import levinson
from modules.errors import (
    Breakdown,
    DegreeTooLarge,
    DimensionMismatch,
    GridTooSmall,
    ValidationError,
    ZeroData,
)
from modules.levinson import (
    LevinsonState,
    advance_degree,
    cosine_sine_form,
    evaluate,
    evaluate_on_grid,
    fit,
    fit_real,
    initial_state,
    residual_sq,
    solve_fixed_degree,
    solve_toeplitz,
    step_even,
    stop_level,
    step_odd,
)
from modules.oracle import build_dense_system, dense_lsq, weighted_residual_sq
from modules.sampling import validate
from modules.toeplitz import OpCounter, ToeplitzSystem
from tests.helpers import (
    jittered_points,
    pad_coefficients,
    polynomial_samples,
    random_coefficients,
    uniform_points,
)


def _noise_samples(r, rng, jitter=0.5):
    x = jittered_points(r, rng, jitter)
    return validate(x, rng.normal(size=r) + 1j * rng.normal(size=r))


def _two_by_two_state():
    # T = [[1, .5], [.5, 1]] after the first odd step
    return LevinsonState(
        level=1,
        moments=np.array([1.0, 0.5], dtype=complex),
        yw=np.array([-0.5 + 0j]),
        sol=np.array([1.0 + 0j]),
        rhs=np.array([1.0 + 0j]),
        beta=0.75,
        alpha=-0.5 + 0j,
        sigma=1.0,
        eps_l=0.0,
    )


# ==================================================
# STEPS
# ==================================================

def test_initial_state_is_weighted_mean(rng):
    samples = _noise_samples(9, rng)
    system = ToeplitzSystem(samples)
    state = initial_state(system)
    expected = np.sum(samples.weights * samples.values) / np.sum(samples.weights)
    assert state.level == 1
    assert state.degree == 0
    assert state.complete
    assert state.sol[0] == pytest.approx(expected)
    assert state.yw[0] == pytest.approx(-system.moment(1) / system.t0)


def test_initial_state_on_uniform_points_is_identity_step():
    samples = validate(uniform_points(6), [1, 2, 3, 4, 5, 6])
    state = initial_state(ToeplitzSystem(samples))
    assert state.sol[0] == pytest.approx(3.5)
    assert abs(state.yw[0]) <= 1e-15
    assert state.beta == pytest.approx(1.0)


def test_step_odd_two_by_two():
    state = step_odd(_two_by_two_state(), t_next=0.2, b_next=1.0)
    np.testing.assert_allclose(state.sol, [2 / 3, 2 / 3])
    assert state.level == 2
    assert not state.complete


def test_step_parity_is_enforced():
    state = _two_by_two_state()
    with pytest.raises(ValidationError):
        step_even(state, b_next=1.0)
    odd = step_odd(state, t_next=0.2, b_next=1.0)
    with pytest.raises(ValidationError):
        step_odd(odd, t_next=0.1, b_next=1.0)


def test_terminal_state_cannot_be_extended(rng):
    samples = _noise_samples(7, rng)
    system = ToeplitzSystem(samples)
    state = advance_degree(system, initial_state(system), final=True)
    assert state.terminal
    assert state.degree == 1
    with pytest.raises(ValidationError):
        step_odd(state, t_next=0.0, b_next=0.0)


def test_zero_pivot_state_breaks_down():
    state = LevinsonState(
        level=1,
        moments=np.array([1.0, 1.0], dtype=complex),
        yw=np.array([-1.0 + 0j]),
        sol=np.array([1.0 + 0j]),
        rhs=np.array([1.0 + 0j]),
        beta=0.0,
        alpha=-1.0 + 0j,
        sigma=1.0,
        eps_l=0.0,
    )
    with pytest.raises(Breakdown) as info:
        step_odd(state, t_next=1.0, b_next=1.0)
    assert info.value.level == 1


def test_each_degree_matches_dense_least_squares(rng):
    samples = _noise_samples(25, rng, jitter=0.3)
    system = ToeplitzSystem(samples)
    state = initial_state(system)
    sigma = system.sigma
    for degree in range(0, 11):
        if degree > 0:
            state = advance_degree(system, state, final=degree == 10)
        dense = dense_lsq(build_dense_system(samples, degree), samples.values)
        np.testing.assert_allclose(state.coefficients, dense, atol=1e-9)
        direct = weighted_residual_sq(samples, state.coefficients) / sigma
        assert state.eps_l == pytest.approx(direct, abs=1e-11)
        assert residual_sq(state) == pytest.approx(state.eps_l)


def test_yule_walker_invariants(rng):
    samples = _noise_samples(31, rng)
    system = ToeplitzSystem(samples)
    state = initial_state(system)
    for _ in range(6):
        state = advance_degree(system, state)
        n = state.level
        t = state.moments
        tn = toeplitz(t[:n], t[:n].conj())
        np.testing.assert_allclose(tn @ state.yw, -t[1:n + 1], atol=1e-10)
        assert state.beta == pytest.approx((t[0] + np.vdot(t[1:n + 1], state.yw)).real, rel=1e-9)
        assert 0.0 < state.beta <= t[0].real


def test_points_zero_three_seven_match_dense():
    samples = validate([0.0, 0.3, 0.7], [1.0, -2.0, 0.5j])
    coefficients = solve_fixed_degree(samples, 1)
    dense = dense_lsq(build_dense_system(samples, 1), samples.values)
    np.testing.assert_allclose(coefficients, dense, atol=1e-12)
    # three points and three unknowns interpolate
    np.testing.assert_allclose(evaluate(coefficients, samples.points), samples.values, atol=1e-12)


def test_zero_values_give_zero_state():
    samples = validate([0.0, 0.3, 0.7], [0, 0, 0])
    state = initial_state(ToeplitzSystem(samples))
    assert state.sol[0] == 0
    assert state.eps_l == 0.0
    with pytest.raises(ZeroData):
        residual_sq(state)


# ==================================================
# FIT DRIVER
# ==================================================

def test_fit_recovers_single_exponential():
    x = uniform_points(7)
    samples = validate(x, np.exp(2j * np.pi * x))
    result = fit(samples, 0.01)
    assert result.degree == 1
    assert result.converged
    np.testing.assert_allclose(result.coefficients, [0, 0, 1], atol=1e-13)
    assert result.residual_history[0] == (0, pytest.approx(1.0))


def test_fit_recovers_random_polynomial(rng):
    for degree in range(6):
        a = random_coefficients(degree, rng)
        samples = polynomial_samples(jittered_points(31, rng), a)
        result = fit(samples, 1e-8)
        assert result.degree == degree
        assert result.converged
        np.testing.assert_allclose(result.coefficients, a, atol=1e-8)


def test_roundoff_residual_stops_the_fit(rng):
    # exact data leave eps_l at roundoff, above epsilon**2 = 1e-16
    for _ in range(20):
        a = random_coefficients(1, rng)
        samples = polynomial_samples(jittered_points(9, rng), a)
        result = fit(samples, 1e-8)
        assert result.degree == 1
        assert result.residual_history[-1][1] <= stop_level(1e-8, 9)


def test_stop_level():
    assert stop_level(0.1, 50) == pytest.approx(0.01)
    floor = 100 * 9 * np.finfo(float).eps
    assert stop_level(1e-8, 9) == pytest.approx(floor)
    assert stop_level(0.0, 9) == pytest.approx(floor)
    assert stop_level(1e-8, 18) == pytest.approx(2 * floor)


def test_fit_zero_epsilon_interpolates_odd_count(rng):
    samples = _noise_samples(7, rng)
    result = fit(samples, 0.0)
    assert result.degree == 3
    assert result.converged
    assert result.achieved_eps <= 1e-6
    np.testing.assert_allclose(result.evaluate(samples.points), samples.values, atol=1e-9)


def test_fit_zero_epsilon_even_count_does_not_converge(rng):
    samples = _noise_samples(8, rng)
    result = fit(samples, 0.0)
    assert result.degree == 3
    assert not result.converged
    assert result.achieved_eps > 0.0


def test_fit_respects_max_degree(rng):
    samples = _noise_samples(21, rng)
    result = fit(samples, 0.0, max_degree=4)
    assert result.degree == 4
    assert [d for d, _ in result.residual_history] == [0, 1, 2, 3, 4]


def test_fit_rejects_too_large_degree(rng):
    with pytest.raises(DegreeTooLarge):
        fit(_noise_samples(5, rng), 0.1, max_degree=3)
    with pytest.raises(DegreeTooLarge):
        solve_fixed_degree(_noise_samples(5, rng), 3)


def test_fit_zero_data_returns_zero_polynomial():
    samples = validate([0.1, 0.4, 0.8], [0, 0, 0])
    result = fit(samples, 0.1)
    assert result.degree == 0
    assert result.converged
    np.testing.assert_array_equal(result.coefficients, [0])


def test_residual_history_is_nonincreasing(rng):
    for _ in range(5):
        result = fit(_noise_samples(41, rng, jitter=0.9), 0.0)
        eps = [e for _, e in result.residual_history]
        assert all(later <= earlier + 1e-12 for earlier, later in zip(eps, eps[1:]))


def test_fit_stops_at_first_degree_below_epsilon(rng):
    samples = _noise_samples(41, rng)
    result = fit(samples, 0.6)
    history = [e for _, e in result.residual_history]
    assert history[-1] <= 0.36 or result.degree == samples.max_degree
    assert all(e > 0.36 for e in history[:-1])
    assert result.achieved_eps == pytest.approx(np.sqrt(history[-1]))


def test_breakdown_carries_history(rng, monkeypatch):
    samples = _noise_samples(21, rng)
    calls = []
    real_advance = levinson.advance_degree

    def failing_advance(system, state, final=False):
        calls.append(state.degree)
        if len(calls) == 3:
            raise Breakdown(state.level, 0.0, 1.0)
        return real_advance(system, state, final)

    monkeypatch.setattr(levinson, "advance_degree", failing_advance)
    with pytest.raises(Breakdown) as info:
        fit(samples, 0.0)
    assert [d for d, _ in info.value.history] == [0, 1, 2]
    assert info.value.exit_code == 2


def test_fit_counts_operations(rng):
    counter = OpCounter()
    fit(_noise_samples(31, rng), 0.0, max_degree=5, counter=counter)
    assert counter.summation > 0
    assert counter.recursion > 0
    assert counter.total == counter.summation + counter.recursion


def test_degree_zero_is_weighted_mean():
    samples = validate([0.0, 0.1, 0.5], [1, 2, 3])
    expected = np.sum(samples.weights * samples.values)
    np.testing.assert_allclose(solve_fixed_degree(samples, 0), [expected])


# ==================================================
# EXPLICIT RIGHT-HAND SIDES
# ==================================================

def test_solve_toeplitz_matches_dense(rng):
    samples = _noise_samples(33, rng)
    system = ToeplitzSystem(samples)
    for degree in (0, 1, 5, 12):
        rhs = rng.normal(size=2 * degree + 1) + 1j * rng.normal(size=2 * degree + 1)
        expected = solve(system.matrix(degree), rhs)
        np.testing.assert_allclose(solve_toeplitz(system, degree, rhs), expected, atol=1e-9)


def test_solve_toeplitz_dimension_mismatch(rng):
    system = ToeplitzSystem(_noise_samples(9, rng))
    with pytest.raises(DimensionMismatch):
        solve_toeplitz(system, 2, np.ones(4))


def test_solve_toeplitz_with_sample_rhs_reverses_to_fit(rng):
    samples = _noise_samples(17, rng)
    system = ToeplitzSystem(samples)
    sol = solve_toeplitz(system, 4, system.rhs_vector(4))
    np.testing.assert_allclose(sol[::-1], solve_fixed_degree(samples, 4), atol=1e-12)


# ==================================================
# EVALUATION
# ==================================================

def test_evaluate_on_grid_single_exponential():
    np.testing.assert_allclose(evaluate_on_grid([0, 0, 1], 4), [1, 1j, -1, -1j], atol=1e-15)


def test_evaluate_on_grid_too_small():
    with pytest.raises(GridTooSmall):
        evaluate_on_grid([1, 2, 3], 2)


def test_evaluate_on_grid_matches_direct_sum(rng):
    a = random_coefficients(5, rng)
    n = 16
    np.testing.assert_allclose(evaluate_on_grid(a, n), evaluate(a, np.arange(n) / n), atol=1e-12)


def test_higher_degree_fit_nests_lower_one(rng):
    a = random_coefficients(2, rng)
    samples = polynomial_samples(jittered_points(15, rng), a)
    high = solve_fixed_degree(samples, 5)
    np.testing.assert_allclose(high, pad_coefficients(a, 5), atol=1e-9)


# ==================================================
# REAL DATA
# ==================================================

def test_fit_real_cosine_sine_form():
    x = uniform_points(15)
    values = 1 + 2 * np.cos(2 * np.pi * x) + 3 * np.sin(4 * np.pi * x)
    result, cosines, sines = fit_real(validate(x, values), 1e-8)
    assert result.degree == 2
    np.testing.assert_allclose(cosines, [1, 2, 0], atol=1e-12)
    np.testing.assert_allclose(sines, [0, 0, 3], atol=1e-12)


def test_fit_real_rejects_complex_values():
    with pytest.raises(ValidationError):
        fit_real(validate([0, 0.5], [1, 1j]), 0.1)


def test_cosine_sine_form_degree_zero():
    cosines, sines = cosine_sine_form([2.5])
    np.testing.assert_allclose(cosines, [2.5])
    np.testing.assert_allclose(sines, [0])


def test_fit_result_to_dict():
    x = uniform_points(7)
    result = fit(validate(x, np.exp(2j * np.pi * x)), 0.01)
    report = result.to_dict()
    assert set(report) == {"degree", "converged", "achieved_eps", "coefficients", "residual_history"}
    assert [entry["k"] for entry in report["coefficients"]] == [-1, 0, 1]
    assert report["coefficients"][2]["re"] == pytest.approx(1.0)
    assert result.coefficient(5) == 0
    assert result.coefficient(1) == pytest.approx(1.0)
