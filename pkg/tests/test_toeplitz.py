import numpy as np
import pytest
from scipy.linalg import solve

from modules.errors import DimensionMismatch, SingularSystem, ZeroPivot
from modules.levinson import evaluate
from modules.oracle import build_dense_system, gram
from modules.sampling import validate
from modules.toeplitz import (
    GsFactor,
    OpCounter,
    ToeplitzSystem,
    circulant_size,
    gs_apply,
    gs_factorize,
    moment,
    rhs_entry,
)
from tests.helpers import jittered_points, uniform_points


def _random_samples(r, rng, jitter=0.5):
    x = jittered_points(r, rng, jitter)
    s = rng.normal(size=r) + 1j * rng.normal(size=r)
    return validate(x, s)


def test_moment_uniform_points():
    samples = validate(uniform_points(5), np.ones(5))
    assert moment(samples, 0) == pytest.approx(1.0)
    for k in range(1, 5):
        assert abs(moment(samples, k)) <= 1e-14


def test_moment_negative_index_is_conjugate(rng):
    samples = _random_samples(9, rng)
    system = ToeplitzSystem(samples)
    for k in range(1, 6):
        assert system.moment(-k) == system.moment(k).conjugate()
        assert moment(samples, -k) == pytest.approx(moment(samples, k).conjugate(), abs=1e-15)


def test_moment_matches_dense_gram_entry():
    samples = validate([0, 0.1, 0.5], [1, 2, 3])
    g = gram(build_dense_system(samples, 1))
    # G[k, l] = sum_j w_j exp(2 pi i (l - k) x_j), indices shifted by M
    assert moment(samples, 1) == pytest.approx(g[1, 2], abs=1e-14)
    assert moment(samples, 2) == pytest.approx(g[0, 2], abs=1e-14)


def test_rhs_entry_zero_values():
    samples = validate([0, 0.3, 0.6], [0, 0, 0])
    for k in range(-3, 4):
        assert rhs_entry(samples, k) == 0


def test_rhs_entry_ones_gives_weight_sum():
    samples = validate([0, 0.3, 0.6], [1, 1, 1])
    assert rhs_entry(samples, 0) == pytest.approx(moment(samples, 0))


def test_rhs_vector_matches_dense_product(rng):
    samples = _random_samples(11, rng)
    dense = build_dense_system(samples, 3)
    adjoint_rhs = dense.vandermonde.conj().T @ (dense.weight_diag * samples.values)
    # b_k pairs with frequency -k of the polynomial
    np.testing.assert_allclose(ToeplitzSystem(samples).rhs_vector(3), adjoint_rhs[::-1], atol=1e-13)


def test_matrix_is_transposed_gram(rng):
    samples = _random_samples(21, rng, jitter=0.9)
    system = ToeplitzSystem(samples)
    for degree in range(0, 11):
        t = system.matrix(degree)
        g = gram(build_dense_system(samples, degree))
        np.testing.assert_allclose(t, g.T, rtol=0, atol=1e-12)
        np.testing.assert_allclose(t, t.conj().T, atol=0)


def test_quadratic_form_is_sampled_energy(rng):
    samples = _random_samples(15, rng)
    system = ToeplitzSystem(samples)
    c = rng.normal(size=9) + 1j * rng.normal(size=9)
    form = np.vdot(c, system.matrix(4) @ c)
    energy = np.sum(samples.weights * np.abs(evaluate(c[::-1], samples.points)) ** 2)
    assert abs(form.imag) <= 1e-12
    assert form.real == pytest.approx(energy, rel=1e-12)
    assert form.real >= 0


def test_moments_are_cached_and_counted(rng):
    samples = _random_samples(13, rng)
    counter = OpCounter()
    system = ToeplitzSystem(samples, counter)
    assert system.cached_moments == 1
    assert counter.summation == 13
    system.moment(4)
    assert system.cached_moments == 5
    assert counter.summation == 13 * 5
    system.moment(2)
    system.rhs_entry(1)
    system.rhs_entry(1)
    assert counter.summation == 13 * 6
    assert system.max_level == 6
    assert system.sigma == pytest.approx(np.sum(np.abs(samples.values) ** 2 * samples.weights))


def test_circulant_size():
    assert circulant_size(1) == 2
    assert circulant_size(5) == 16
    assert circulant_size(8) == 16
    assert circulant_size(9) == 32


def test_gs_factorize_degree_zero():
    samples = validate([0, 0.2, 0.7], [1, 2, 3], weights=[0.5, 0.5, 1.0])
    factor = gs_factorize(ToeplitzSystem(samples), 0)
    np.testing.assert_allclose(factor.z, [0.5])


def test_gs_factorize_identity_system():
    samples = validate(uniform_points(5), np.ones(5))
    factor = gs_factorize(ToeplitzSystem(samples), 1)
    np.testing.assert_allclose(factor.z, [1, 0, 0], atol=1e-14)


def test_gs_factorize_solves_first_column(rng):
    samples = _random_samples(11, rng)
    system = ToeplitzSystem(samples)
    factor = gs_factorize(system, 2)
    e = np.zeros(5)
    e[0] = 1.0
    np.testing.assert_allclose(system.matrix(2) @ factor.z, e, atol=1e-10)
    assert factor.z[0].imag == 0.0
    assert factor.z[0].real > 0.0


def test_gs_factorize_singular_system():
    # two points cannot support degree 1
    samples = validate([0.1, 0.6], [1, 1])
    with pytest.raises(SingularSystem):
        gs_factorize(ToeplitzSystem(samples), 1)


def test_gs_apply_identity():
    samples = validate(uniform_points(7), np.ones(7))
    factor = gs_factorize(ToeplitzSystem(samples), 3)
    b = np.arange(7) + 1j
    np.testing.assert_allclose(gs_apply(factor, b), b, atol=1e-13)


def test_gs_apply_degree_zero_is_division():
    samples = validate([0, 0.4], [1, 1], weights=[0.25, 0.25])
    factor = gs_factorize(ToeplitzSystem(samples), 0)
    np.testing.assert_allclose(gs_apply(factor, [3.0]), [6.0])


def test_gs_apply_matches_dense_solve(rng):
    for _ in range(20):
        r = int(rng.integers(5, 60))
        degree = int(rng.integers(0, (r - 1) // 2 + 1))
        samples = _random_samples(r, rng)
        system = ToeplitzSystem(samples)
        factor = gs_factorize(system, degree)
        b = rng.normal(size=2 * degree + 1) + 1j * rng.normal(size=2 * degree + 1)
        expected = solve(system.matrix(degree), b)
        got = gs_apply(factor, b)
        assert np.linalg.norm(got - expected) <= 1e-8 * np.linalg.norm(expected)


def test_gs_apply_block_matches_columns(rng):
    samples = _random_samples(31, rng)
    factor = gs_factorize(ToeplitzSystem(samples), 6)
    block = rng.normal(size=(13, 4)) + 1j * rng.normal(size=(13, 4))
    together = gs_apply(factor, block)
    for j in range(4):
        np.testing.assert_allclose(together[:, j], gs_apply(factor, block[:, j]), atol=1e-12)


def test_gs_apply_dimension_mismatch(rng):
    factor = gs_factorize(ToeplitzSystem(_random_samples(9, rng)), 2)
    with pytest.raises(DimensionMismatch):
        gs_apply(factor, np.ones(4))
    with pytest.raises(DimensionMismatch):
        gs_apply(factor, 1.0)
    with pytest.raises(DimensionMismatch):
        gs_apply(factor, np.ones((5, 2, 2)))


def test_gs_apply_zero_pivot():
    factor = GsFactor(z=np.array([0.0, 1.0, 0.0], dtype=complex), degree=1)
    with pytest.raises(ZeroPivot):
        gs_apply(factor, np.ones(3))
