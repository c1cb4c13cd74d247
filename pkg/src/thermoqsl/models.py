"""Composite Hamiltonians for noninteracting baths.

Site ordering is always system first, then bath sites in index order. The
dense builders are meant for brute-force checks at desk scale; the
Kronecker-factored oracles reach bath Hilbert spaces beyond the dense cap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .closedforms import BosonicBathSpec, SpinBathSpec
from .states import (SIGMA_X, SIGMA_Z, DensityMatrix, as_density,
                     skew_information_kron, thermal_state)


@dataclass(frozen=True)
class CompositeModel:
    """``H = H^S ⊗ 1 + H^int + 1 ⊗ H^B`` with ``H^int`` on the composite space."""

    h_s: np.ndarray
    h_int: np.ndarray
    h_b: np.ndarray

    @property
    def dim_s(self) -> int:
        return self.h_s.shape[0]

    @property
    def dim_b(self) -> int:
        return self.h_b.shape[0]

    @property
    def dims(self) -> tuple[int, int]:
        return self.dim_s, self.dim_b

    @property
    def drive(self) -> np.ndarray:
        """``H^S ⊗ 1 + H^int``, the part that does not commute with ``ρ0``."""
        return np.kron(self.h_s, np.eye(self.dim_b)) + self.h_int

    @property
    def hamiltonian(self) -> np.ndarray:
        return self.drive + np.kron(np.eye(self.dim_s), self.h_b)

    def bath_state(self, beta: float) -> DensityMatrix:
        return thermal_state(beta, self.h_b)


def annihilation(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), k=1)


def spin_bath_model(spec: SpinBathSpec, h_s) -> CompositeModel:
    h_s = linalg.check_hermitian(h_s, "h_s")
    n = spec.n_spins
    ds = h_s.shape[0]
    db = 2 ** n
    linalg.kron(np.eye(ds), np.eye(db))  # dimension-cap check
    site_dims = [2] * n
    h_b = np.zeros((db, db))
    h_int = np.zeros((ds * db, ds * db), dtype=complex)
    c = spec.gamma / np.sqrt(n)
    for j in range(n):
        sz = linalg.embed(SIGMA_Z.real, site_dims, j)
        sx = linalg.embed(SIGMA_X.real, site_dims, j)
        h_b = h_b + 0.5 * spec.omega[j] * sz
        h_int += c * spec.g[j] * np.kron(spec.s_ops[j], sx)
    if not np.any(h_int.imag):
        h_int = h_int.real
    return CompositeModel(h_s, h_int, h_b)


def central_spin_model(delta: float, gamma: float, g, omega) -> tuple[CompositeModel, SpinBathSpec]:
    """Qubit ``Δσ^z/2`` coupled through ``σ^x σ^x_j`` to ``N`` free spins."""
    spec = SpinBathSpec(omega, g, gamma, SIGMA_X.real)
    return spin_bath_model(spec, 0.5 * delta * SIGMA_Z.real), spec


def bosonic_bath_model(spec: BosonicBathSpec, h_s, cutoff: int) -> CompositeModel:
    """Fock-truncated dense model with ``cutoff`` levels per mode."""
    h_s = linalg.check_hermitian(h_s, "h_s")
    n = spec.n_modes
    ds = h_s.shape[0]
    db = cutoff ** n
    linalg.kron(np.eye(ds), np.eye(db))  # dimension-cap check
    site_dims = [cutoff] * n
    b = annihilation(cutoff)
    h_b = np.zeros((db, db))
    h_int = np.zeros((ds * db, ds * db), dtype=complex)
    c = spec.gamma / np.sqrt(n)
    for k in range(n):
        bk = linalg.embed(b, site_dims, k)
        s = spec.s_ops[k]
        h_b = h_b + spec.omega[k] * bk.T @ bk
        h_int += c * (spec.g[k] * np.kron(s.conj().T, bk) + np.conj(spec.g[k]) * np.kron(s, bk.T))
    if not np.any(h_int.imag):
        h_int = h_int.real
    return CompositeModel(h_s, h_int, h_b)


def spin_boson_model(delta: float, gamma: float, g, omega, cutoff: int) -> tuple[CompositeModel, BosonicBathSpec]:
    spec = BosonicBathSpec(omega, g, gamma, SIGMA_X.real)
    return bosonic_bath_model(spec, 0.5 * delta * SIGMA_Z.real, cutoff), spec


def _thermal_sqrt(h: np.ndarray, beta: float) -> np.ndarray:
    return thermal_state(beta, h).sqrt


def bosonic_skew_information_kron(spec: BosonicBathSpec, h_s, rho_s, beta: float,
                                  cutoff: int) -> float:
    """Brute-force skew information on the Fock-truncated composite space.

    The drive and the product state are kept in Kronecker-factored form, so
    only per-mode ``cutoff x cutoff`` matrices are ever formed. The
    truncated thermal state of each mode is built independently of any
    closed-form thermal factor.
    """
    rho_s = as_density(rho_s)
    h_s = linalg.check_hermitian(h_s, "h_s")
    n = spec.n_modes
    b = annihilation(cutoff)
    one = np.eye(cutoff)
    sqrts = [rho_s.sqrt] + [_thermal_sqrt(w * b.T @ b, beta) for w in spec.omega]
    c = spec.gamma / np.sqrt(n)
    terms = [(1.0, [h_s] + [one] * n)]
    for k in range(n):
        s = spec.s_ops[k]
        left = [one] * k
        right = [one] * (n - k - 1)
        terms.append((c * spec.g[k], [s.conj().T] + left + [b] + right))
        terms.append((c * np.conj(spec.g[k]), [s] + left + [b.T] + right))
    return skew_information_kron(sqrts, terms)


def spin_skew_information_kron(spec: SpinBathSpec, h_s, rho_s, beta: float) -> float:
    """Kronecker-factored brute force for spin baths of any size."""
    rho_s = as_density(rho_s)
    h_s = linalg.check_hermitian(h_s, "h_s")
    n = spec.n_spins
    one = np.eye(2)
    sqrts = [rho_s.sqrt] + [_thermal_sqrt(0.5 * w * SIGMA_Z.real, beta) for w in spec.omega]
    c = spec.gamma / np.sqrt(n)
    terms = [(1.0, [h_s] + [one] * n)]
    for j in range(n):
        terms.append((c * spec.g[j], [spec.s_ops[j]] + [one] * j + [SIGMA_X.real] + [one] * (n - j - 1)))
    return skew_information_kron(sqrts, terms)


__all__ = [
    "CompositeModel", "annihilation", "spin_bath_model", "central_spin_model",
    "bosonic_bath_model", "spin_boson_model", "bosonic_skew_information_kron",
    "spin_skew_information_kron",
]
