"""Quantum states and the state functionals the speed limits are built from."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .linalg import DimensionError, LinalgError, PSD_ATOL

TRACE_ATOL = 1e-10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)


class StateError(ValueError):
    pass


class DensityMatrix:
    """Immutable Hermitian, positive-semidefinite, unit-trace matrix.

    The eigendecomposition is computed once at construction; square root
    and logarithm are derived from it lazily.
    """

    def __init__(self, matrix):
        m = np.array(linalg.as_square(matrix, "density matrix"), dtype=complex)
        eig = linalg.herm_eig(m)
        if eig.eigenvalues[0] < -PSD_ATOL:
            raise linalg.NotPSDError(float(eig.eigenvalues[0]))
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > TRACE_ATOL:
            raise StateError(f"trace {tr!r} differs from 1 by more than {TRACE_ATOL:.0e}")
        m.setflags(write=False)
        self._m = m
        self._eig = eig

    @classmethod
    def from_spectrum(cls, weights, vectors) -> "DensityMatrix":
        """State with known eigenvalues and orthonormal eigenvectors.

        Functions of the state (square root, logarithm) then use ``weights``
        directly instead of re-diagonalizing, which keeps tiny populations
        at full relative precision.
        """
        w = np.asarray(weights, dtype=float)
        v = np.asarray(vectors)
        order = np.argsort(w, kind="stable")
        w, v = w[order], v[:, order]
        m = (v * w) @ v.conj().T
        obj = cls(0.5 * (m + m.conj().T))
        obj._eig = linalg.EigenDecomposition(w, v)
        return obj

    @property
    def matrix(self) -> np.ndarray:
        return self._m

    @property
    def dim(self) -> int:
        return self._m.shape[0]

    @property
    def eig(self) -> linalg.EigenDecomposition:
        return self._eig

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.where(self._eig.eigenvalues < 0, 0.0, self._eig.eigenvalues)

    @property
    def trace(self) -> float:
        return float(np.trace(self._m).real)

    @cached_property
    def sqrt(self) -> np.ndarray:
        s = self._eig.apply(lambda _: np.sqrt(self.eigenvalues))
        s.setflags(write=False)
        return s

    @cached_property
    def log(self) -> np.ndarray:
        """Matrix logarithm; rejects singular states."""
        w = self._eig.eigenvalues
        if w[0] <= 0.0:
            raise StateError(
                f"logarithm undefined: state has eigenvalue {w[0]:.3e} <= 0")
        out = self._eig.apply(np.log)
        out.setflags(write=False)
        return out

    def is_pure(self, atol: float = 1e-10) -> bool:
        return abs(float(np.sum(self.eigenvalues ** 2)) - 1.0) <= atol

    def __array__(self, dtype=None, copy=None):
        return np.array(self._m, dtype=dtype)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim}, eigenvalues={np.round(self.eigenvalues, 6)})"


def as_density(rho) -> DensityMatrix:
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)


def product_state(*factors) -> DensityMatrix:
    return DensityMatrix(linalg.kron(*(as_density(f).matrix for f in factors)))


@dataclass(frozen=True)
class ThermalSpec:
    beta: float
    hamiltonian: np.ndarray

    @property
    def energies(self) -> np.ndarray:
        return linalg.herm_eig(self.hamiltonian).eigenvalues

    @property
    def partition_function(self) -> float:
        e = self.energies
        return float(np.sum(np.exp(-self.beta * (e - e[0])))) * np.exp(-self.beta * e[0])


def thermal_state(beta: float, hamiltonian) -> DensityMatrix:
    """Gibbs state ``exp(-βH) / Z``.

    The ground energy is subtracted before exponentiation so large ``β·E``
    cannot overflow.
    """
    if not beta >= 0:
        raise StateError(f"inverse temperature must be >= 0, got {beta}")
    eig = linalg.herm_eig_blocked(hamiltonian)
    e = eig.eigenvalues
    weights = np.exp(-beta * (e - e[0]))
    weights /= weights.sum()
    return DensityMatrix.from_spectrum(weights, eig.eigenvectors)


def _unit_vector(n) -> np.ndarray:
    n = np.asarray(n, dtype=float).reshape(3)
    if abs(np.linalg.norm(n) - 1.0) > 1e-12:
        raise StateError(f"direction must be a unit vector, |n| = {np.linalg.norm(n)!r}")
    return n


def bloch_state(p: float, n=(0.0, 0.0, 1.0)) -> DensityMatrix:
    """Qubit state ``(1 + p n·σ) / 2``."""
    if not 0.0 <= p <= 1.0:
        raise StateError(f"polarization magnitude must lie in [0, 1], got {p}")
    n = _unit_vector(n)
    return DensityMatrix(0.5 * (np.eye(2) + p * sum(c * s for c, s in zip(n, PAULI))))


def polarization(vector) -> tuple[float, np.ndarray]:
    """Split a Bloch vector into magnitude and unit direction.

    The zero vector gets the direction ``(0, 0, 1)``.
    """
    v = np.asarray(vector, dtype=float).reshape(3)
    p = float(np.linalg.norm(v))
    if p > 1.0 + 1e-12:
        raise StateError(f"Bloch vector length {p} exceeds 1")
    if p == 0.0:
        return 0.0, np.array([0.0, 0.0, 1.0])
    return min(p, 1.0), v / p


def bloch_function(f: Callable[[float], float], p: float, n=(0.0, 0.0, 1.0)):
    """Coefficients ``(A, B)`` with ``f((1 + p n·σ)/2) = A + B n·σ``.

    Raises
    ------
    StateError
        If ``f`` is undefined (non-finite) at one of the eigenvalues
        ``(1 ± p)/2``.
    """
    _unit_vector(n)
    if not 0.0 <= p <= 1.0:
        raise StateError(f"polarization magnitude must lie in [0, 1], got {p}")
    lam_plus, lam_minus = 0.5 * (1 + p), 0.5 * (1 - p)
    values = []
    for lam in (lam_plus, lam_minus):
        with np.errstate(divide="ignore", invalid="ignore"):
            v = f(lam)
        if not np.isfinite(v):
            raise StateError(f"function undefined at eigenvalue {lam!r}")
        values.append(float(v))
    fp, fm = values
    return 0.5 * (fp + fm), 0.5 * (fp - fm)


def hellinger_distance(rho1, rho2) -> float:
    """``1 - tr(√ρ1 √ρ2)``."""
    rho1, rho2 = as_density(rho1), as_density(rho2)
    if rho1.dim != rho2.dim:
        raise DimensionError(f"dimension mismatch: {rho1.dim} vs {rho2.dim}")
    # tr(XY) for Hermitian X, Y is sum(X * conj(Y)).
    overlap = float(np.vdot(rho2.sqrt, rho1.sqrt).real)
    return 1.0 - overlap


def _composite_sqrt(rho_s: DensityMatrix, rho_b: DensityMatrix) -> np.ndarray:
    return linalg.kron(rho_s.sqrt, rho_b.sqrt)


def skew_information(rho_s, rho_b, h_drive) -> float:
    """Wigner-Yanase skew information of a product state.

    Evaluates ``½ tr(-[H, √ρS ⊗ √ρB]²)`` as half the squared Frobenius norm
    of the commutator, so the result is nonnegative by construction.
    ``h_drive`` acts on the composite space (system factor first).
    """
    rho_s, rho_b = as_density(rho_s), as_density(rho_b)
    h = linalg.as_square(h_drive, "drive")
    if h.shape[0] != rho_s.dim * rho_b.dim:
        raise DimensionError(
            f"drive dim {h.shape[0]} != {rho_s.dim} x {rho_b.dim}")
    x = _composite_sqrt(rho_s, rho_b)
    return 0.5 * linalg.frobenius_sq(h @ x - x @ h)


def skew_information_state(rho, h) -> float:
    """``½ tr(-[H, √ρ]²)`` for an arbitrary (not necessarily product) state."""
    rho = as_density(rho)
    h = linalg.as_square(h, "drive")
    if h.shape[0] != rho.dim:
        raise DimensionError(f"drive dim {h.shape[0]} != state dim {rho.dim}")
    x = rho.sqrt
    return 0.5 * linalg.frobenius_sq(h @ x - x @ h)


# Kronecker-factored brute force -------------------------------------------------

KronTerm = tuple[complex, Sequence[np.ndarray]]


def kron_terms_frobenius_sq(terms: Sequence[KronTerm]) -> float:
    """``‖Σ_i c_i ⊗_s A_{i,s}‖_F²`` without forming the Kronecker products.

    Each term is ``(coefficient, [factor on site 0, factor on site 1, ...])``;
    the Frobenius inner product of two Kronecker products is the product of
    the per-site inner products.
    """
    n = len(terms)
    total = 0.0 + 0.0j
    for i in range(n):
        ci, fi = terms[i]
        for j in range(i, n):
            cj, fj = terms[j]
            prod = np.conj(ci) * cj
            for a, b in zip(fi, fj):
                prod *= np.vdot(a, b)
                if prod == 0:
                    break
            total += prod if i == j else 2.0 * prod.real
    return float(total.real)


def skew_information_kron(site_sqrts: Sequence[np.ndarray],
                          drive_terms: Sequence[KronTerm]) -> float:
    """Skew information of ``⊗_s ρ_s`` for a drive given as a sum of
    Kronecker products.

    ``site_sqrts`` are the square roots of the per-site states (system
    first). The commutator ``[Σ_i c_i ⊗ A_i, ⊗ X_s]`` expands into twice as
    many Kronecker terms, whose Frobenius norm is summed exactly. This makes
    baths with Hilbert spaces far beyond the dense cap tractable.
    """
    sqrts = [np.asarray(x) for x in site_sqrts]
    comm_terms: list[KronTerm] = []
    for c, factors in drive_terms:
        if len(factors) != len(sqrts):
            raise DimensionError("every drive term needs one factor per site")
        comm_terms.append((c, [a @ x for a, x in zip(factors, sqrts)]))
        comm_terms.append((-c, [x @ a for a, x in zip(factors, sqrts)]))
    return 0.5 * kron_terms_frobenius_sq(comm_terms)


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """``G G† / tr(G G†)`` for a complex Gaussian ``dim x rank`` matrix ``G``."""
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return DensityMatrix(0.5 * (rho + rho.conj().T))


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return scale * 0.5 * (g + g.conj().T)


__all__ = [
    "DensityMatrix", "ThermalSpec", "StateError", "LinalgError",
    "SIGMA_X", "SIGMA_Y", "SIGMA_Z", "PAULI",
    "as_density", "product_state", "thermal_state", "bloch_state", "polarization",
    "bloch_function", "hellinger_distance", "skew_information",
    "skew_information_state", "skew_information_kron", "kron_terms_frobenius_sq",
    "random_density_matrix", "random_hermitian",
]
