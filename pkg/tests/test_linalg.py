import numpy as np
import pytest
from hypothesis import given, strategies as st

from thermoqsl import linalg
from thermoqsl.states import SIGMA_X, SIGMA_Y, SIGMA_Z, random_hermitian


def test_herm_eig_identity_and_diagonal():
    np.testing.assert_allclose(linalg.herm_eig(np.eye(3)).eigenvalues, [1, 1, 1])
    np.testing.assert_allclose(linalg.herm_eig(np.diag([2.0, -1.0])).eigenvalues, [-1, 2])


def test_herm_eig_pauli_x():
    eig = linalg.herm_eig(SIGMA_X)
    np.testing.assert_allclose(eig.eigenvalues, [-1, 1], atol=1e-15)
    v = eig.eigenvectors
    # columns proportional to (1, -1)/√2 and (1, 1)/√2 up to phase
    assert abs(abs(np.vdot(v[:, 0], [1, -1])) / np.sqrt(2) - 1) < 1e-12
    assert abs(abs(np.vdot(v[:, 1], [1, 1])) / np.sqrt(2) - 1) < 1e-12


def test_herm_eig_rejects_non_hermitian():
    a = np.array([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(linalg.NotHermitianError) as info:
        linalg.herm_eig(a)
    assert info.value.asymmetry == pytest.approx(2.0)


@given(st.integers(1, 16), st.integers(0, 2**32 - 1))
def test_eig_reconstruction_and_unitarity(dim, seed):
    a = random_hermitian(dim, np.random.default_rng(seed))
    eig = linalg.herm_eig(a)
    assert np.all(np.diff(eig.eigenvalues) >= 0)
    assert np.linalg.norm(eig.reconstruct() - a) <= 1e-10 * np.linalg.norm(a)
    v = eig.eigenvectors
    assert np.linalg.norm(v.conj().T @ v - np.eye(dim)) <= 1e-10


@given(st.integers(1, 12), st.floats(-50, 50), st.integers(0, 2**32 - 1))
def test_eigenvalue_shift(dim, c, seed):
    a = random_hermitian(dim, np.random.default_rng(seed))
    w0 = linalg.herm_eig(a).eigenvalues
    w1 = linalg.herm_eig(a + c * np.eye(dim)).eigenvalues
    np.testing.assert_allclose(w1, w0 + c, atol=1e-10)


def test_matrix_sqrt_examples():
    np.testing.assert_allclose(linalg.matrix_sqrt_psd(np.eye(4)), np.eye(4))
    np.testing.assert_allclose(linalg.matrix_sqrt_psd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))
    rho = 0.5 * (np.eye(2) + 0.6 * SIGMA_Z)
    np.testing.assert_allclose(linalg.matrix_sqrt_psd(rho), np.diag([np.sqrt(0.8), np.sqrt(0.2)]),
                               atol=1e-15)


def test_matrix_sqrt_clamps_tiny_negative_and_rejects_negative():
    s = linalg.matrix_sqrt_psd(np.diag([1.0, -5e-13]))
    np.testing.assert_array_equal(s, np.diag([1.0, 0.0]))
    with pytest.raises(linalg.NotPSDError):
        linalg.matrix_sqrt_psd(np.diag([1.0, -1e-9]))


@given(st.integers(1, 16), st.integers(0, 2**32 - 1))
def test_sqrt_of_square_reconstructs(dim, seed):
    a = random_hermitian(dim, np.random.default_rng(seed))
    a2 = a @ a
    s = linalg.matrix_sqrt_psd(a2)
    assert np.linalg.norm(s @ s - a2) <= 1e-9 * np.linalg.norm(a2)
    assert linalg.is_hermitian(s)
    assert np.min(np.linalg.eigvalsh(s)) >= -1e-10


def test_commutator_examples(rng):
    np.testing.assert_allclose(linalg.commutator(SIGMA_X, SIGMA_Y), 2j * SIGMA_Z)
    a = random_hermitian(3, rng)
    np.testing.assert_allclose(linalg.commutator(a, a), 0, atol=1e-14)
    np.testing.assert_allclose(linalg.anticommutator(SIGMA_X, SIGMA_X), 2 * np.eye(2))
    b = random_hermitian(3, rng)
    c = linalg.commutator(a, b)
    np.testing.assert_allclose(c, -c.conj().T, atol=1e-13)
    ac = linalg.anticommutator(a, b)
    assert linalg.is_hermitian(ac)
    with pytest.raises(linalg.DimensionError):
        linalg.commutator(np.eye(2), np.eye(3))


def test_kron_and_embed():
    np.testing.assert_array_equal(linalg.kron(np.eye(2), np.eye(3)), np.eye(6))
    xx = linalg.kron(SIGMA_X, SIGMA_X)
    np.testing.assert_allclose(xx @ xx, np.eye(4))
    np.testing.assert_allclose(linalg.embed(SIGMA_Z, [2, 2], 1), np.kron(np.eye(2), SIGMA_Z))
    with pytest.raises(linalg.DimensionError):
        linalg.embed(SIGMA_Z, [2, 2], 2)
    with pytest.raises(linalg.DimensionError):
        linalg.kron(np.eye(64), np.eye(256))


@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_kron_trace_multiplicative(da, db, seed):
    rng = np.random.default_rng(seed)
    a, b = random_hermitian(da, rng), random_hermitian(db, rng)
    lhs = np.trace(linalg.kron(a, b))
    rhs = np.trace(a) * np.trace(b)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


def test_partial_trace_examples(rng):
    from thermoqsl.states import random_density_matrix
    rs, rb = random_density_matrix(2, rng).matrix, random_density_matrix(3, rng).matrix
    np.testing.assert_allclose(linalg.partial_trace(np.kron(rs, rb), [2, 3]), rs, atol=1e-15)
    np.testing.assert_allclose(linalg.partial_trace(np.kron(rs, rb), [2, 3], keep="B"), rb,
                               atol=1e-15)
    np.testing.assert_allclose(linalg.partial_trace(np.eye(6) / 6, [2, 3]), np.eye(2) / 2)
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    np.testing.assert_allclose(linalg.partial_trace(np.outer(bell, bell), [2, 2]), np.eye(2) / 2)
    with pytest.raises(linalg.DimensionError):
        linalg.partial_trace(np.eye(6), [4, 2])


@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_partial_trace_linear_trace_preserving(ds, db, seed):
    rng = np.random.default_rng(seed)
    a, b = random_hermitian(ds * db, rng), random_hermitian(ds * db, rng)
    x, y = rng.normal(size=2)
    for keep in ("S", "B"):
        pa, pb = linalg.partial_trace(a, [ds, db], keep), linalg.partial_trace(b, [ds, db], keep)
        np.testing.assert_allclose(linalg.partial_trace(x * a + y * b, [ds, db], keep),
                                   x * pa + y * pb, atol=1e-12)
        assert abs(np.trace(pa) - np.trace(a)) < 1e-12
        assert linalg.is_hermitian(pa)


def test_blocked_eig_matches_dense(rng):
    a = np.zeros((6, 6), dtype=complex)
    a[:3, :3] = random_hermitian(3, rng)
    a[3:, 3:] = random_hermitian(3, rng)
    p = rng.permutation(6)
    a = a[np.ix_(p, p)]
    blocked = linalg.herm_eig_blocked(a)
    np.testing.assert_allclose(blocked.eigenvalues, np.linalg.eigvalsh(a), atol=1e-12)
    assert np.linalg.norm(blocked.reconstruct() - a) < 1e-12
    assert len(linalg.block_structure(a)) == 2


def test_tolerance_constants():
    assert linalg.HERMITIAN_ATOL == 1e-12
    assert linalg.MAX_COMPOSITE_DIM == 8192
