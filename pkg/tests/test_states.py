import numpy as np
import pytest
from hypothesis import given, strategies as st

from thermoqsl import linalg
from thermoqsl.propagator import evolve_constant
from thermoqsl.states import (SIGMA_X, SIGMA_Y, SIGMA_Z, DensityMatrix, StateError,
                              bloch_function, bloch_state, hellinger_distance,
                              polarization, random_density_matrix, random_hermitian,
                              skew_information, skew_information_state, thermal_state)

seeds = st.integers(0, 2**32 - 1)


def test_density_matrix_validation():
    DensityMatrix(np.eye(2) / 2)
    with pytest.raises(StateError):
        DensityMatrix(np.eye(2))
    with pytest.raises(linalg.NotPSDError):
        DensityMatrix(np.diag([1.5, -0.5]))
    with pytest.raises(linalg.NotHermitianError):
        DensityMatrix(np.array([[0.5, 0.1], [0.0, 0.5]]))


def test_bloch_state_examples():
    np.testing.assert_allclose(bloch_state(0.0).matrix, np.eye(2) / 2)
    np.testing.assert_allclose(bloch_state(1.0, (0, 0, 1)).matrix, np.diag([1.0, 0.0]))
    rho = bloch_state(0.6, (1, 0, 0)).matrix
    np.testing.assert_allclose(rho, 0.5 * (np.eye(2) + 0.6 * SIGMA_X))
    with pytest.raises(StateError):
        bloch_state(1.2)
    with pytest.raises(StateError):
        bloch_state(0.5, (1, 1, 0))
    p, n = polarization((0.0, 0.3, 0.4))
    assert p == pytest.approx(0.5)
    np.testing.assert_allclose(n, [0, 0.6, 0.8])


def test_thermal_state_examples():
    np.testing.assert_allclose(thermal_state(0.0, np.diag([0.0, 1.0, 2.0])).matrix, np.eye(3) / 3)
    np.testing.assert_allclose(thermal_state(40.0, np.diag([0.0, 5.0])).matrix, np.diag([1.0, 0.0]),
                               atol=1e-10)
    rho = thermal_state(1.0, SIGMA_Z / 2).matrix
    z = 2 * np.cosh(0.5)
    np.testing.assert_allclose(np.diag(rho).real, [np.exp(-0.5) / z, np.exp(0.5) / z])


@given(seeds, st.floats(0, 5), st.floats(-20, 20))
def test_thermal_state_commutes_and_shift_invariant(seed, beta, c):
    h = random_hermitian(5, np.random.default_rng(seed))
    rho = thermal_state(beta, h).matrix
    assert np.max(np.abs(rho @ h - h @ rho)) <= 1e-10
    shifted = thermal_state(beta, h + c * np.eye(5)).matrix
    assert np.max(np.abs(rho - shifted)) <= 1e-10


def test_thermal_state_keeps_tiny_populations():
    rho = thermal_state(30.0, np.diag([0.0, 1.0]))
    np.testing.assert_allclose(rho.sqrt[1, 1] ** 2 / rho.sqrt[0, 0] ** 2, np.exp(-30.0), rtol=1e-12)


@given(seeds, st.floats(0, 0.999), st.sampled_from(["sqrt", "log", "square"]))
def test_bloch_function_matches_eigendecomposition(seed, p, name):
    n = np.random.default_rng(seed).normal(size=3)
    n /= np.linalg.norm(n)
    f = {"sqrt": np.sqrt, "log": np.log, "square": np.square}[name]
    a, b = bloch_function(f, p, n)
    matrix = a * np.eye(2) + b * (n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z)
    rho = bloch_state(p, n).matrix
    ref = linalg.matrix_function(rho, f)
    assert np.linalg.norm(matrix - ref) <= 1e-10
    assert a == pytest.approx(0.5 * (f((1 + p) / 2) + f((1 - p) / 2)))
    assert b == pytest.approx(0.5 * (f((1 + p) / 2) - f((1 - p) / 2)))


def test_hellinger_examples(rng):
    rho = random_density_matrix(3, rng)
    assert abs(hellinger_distance(rho, rho)) < 1e-12
    assert hellinger_distance(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) == pytest.approx(1.0)


@given(seeds, st.integers(1, 6))
def test_hellinger_range_and_symmetry(seed, dim):
    rng = np.random.default_rng(seed)
    a, b = random_density_matrix(dim, rng), random_density_matrix(dim, rng, rank=1)
    d = hellinger_distance(a, b)
    assert -1e-10 <= d <= 1 + 1e-12
    assert abs(d - hellinger_distance(b, a)) <= 1e-10


def test_skew_information_examples():
    eye = np.eye(2) / 2
    assert skew_information(eye, eye, np.kron(SIGMA_Z, np.eye(2))) == pytest.approx(0.0, abs=1e-15)
    # pure |0> with drive σx ⊗ 1: ½‖[σx, |0><0|]‖² = 1
    pure = np.diag([1.0, 0.0])
    assert skew_information(pure, eye, np.kron(SIGMA_X, np.eye(2))) == pytest.approx(1.0)
    with pytest.raises(linalg.DimensionError):
        skew_information(eye, eye, np.eye(3))


@given(seeds, st.floats(-10, 10))
def test_skew_information_shift_invariant_and_nonnegative(seed, c):
    rng = np.random.default_rng(seed)
    rs, rb = random_density_matrix(2, rng), random_density_matrix(3, rng)
    h = random_hermitian(6, rng)
    i0 = skew_information(rs, rb, h)
    assert i0 >= -1e-10
    assert abs(skew_information(rs, rb, h + c * np.eye(6)) - i0) <= 1e-10
    assert abs(skew_information_state(np.kron(rs.matrix, rb.matrix), h) - i0) <= 1e-10


def test_skew_information_is_at_most_variance(rng):
    for _ in range(20):
        rho = random_density_matrix(4, rng)
        h = random_hermitian(4, rng)
        var = np.trace(h @ h @ rho.matrix).real - np.trace(h @ rho.matrix).real ** 2
        assert skew_information_state(rho, h) <= var + 1e-12


@given(seeds, st.floats(0.01, 3.0))
def test_reduced_distance_is_contractive(seed, t):
    rng = np.random.default_rng(seed)
    rs, rb = random_density_matrix(2, rng), random_density_matrix(4, rng)
    rho0 = np.kron(rs.matrix, rb.matrix)
    rho_t = evolve_constant(random_hermitian(8, rng), rho0, [t])[0]
    full = hellinger_distance(rho0, rho_t)
    reduced = hellinger_distance(rs.matrix, linalg.partial_trace(rho_t, [2, 4]))
    assert reduced <= full + 1e-10
