"""Dense complex linear algebra used throughout the package.

All routines operate on square ``numpy`` arrays and never mutate their
inputs. Hermitian routines take the fast real-symmetric LAPACK path when the
input has an exactly vanishing imaginary part.
"""

from __future__ import annotations

from typing import Callable, NamedTuple, Sequence

import numpy as np

HERMITIAN_ATOL = 1e-12
PSD_ATOL = 1e-12
RECONSTRUCTION_RTOL = 1e-10
SQRT_RTOL = 1e-9
MAX_COMPOSITE_DIM = 8192


class LinalgError(ValueError):
    """Base class for rejected linear-algebra inputs."""


class DimensionError(LinalgError):
    pass


class NotHermitianError(LinalgError):
    def __init__(self, asymmetry: float):
        super().__init__(
            f"matrix is not Hermitian: max|A - A^H| = {asymmetry:.3e} "
            f"exceeds {HERMITIAN_ATOL:.0e}")
        self.asymmetry = asymmetry


class NotPSDError(LinalgError):
    def __init__(self, min_eigenvalue: float):
        super().__init__(
            f"matrix is not positive semidefinite: min eigenvalue "
            f"{min_eigenvalue:.3e} < {-PSD_ATOL:.0e}")
        self.min_eigenvalue = min_eigenvalue


class EigenDecomposition(NamedTuple):
    """Ascending real eigenvalues and unitary eigenvectors (as columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def apply(self, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Return ``V f(Λ) V†``."""
        v = self.eigenvectors
        return (v * f(self.eigenvalues)) @ v.conj().T


def as_square(a, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    return a


def hermitian_asymmetry(a) -> float:
    a = as_square(a)
    return float(np.max(np.abs(a - a.conj().T)))


def is_hermitian(a, atol: float = HERMITIAN_ATOL) -> bool:
    return hermitian_asymmetry(a) <= atol


def check_hermitian(a, name: str = "matrix") -> np.ndarray:
    a = as_square(a, name)
    asym = hermitian_asymmetry(a)
    if asym > HERMITIAN_ATOL:
        raise NotHermitianError(asym)
    return a


def _symmetrized(a: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(a) and not np.any(a.imag):
        a = a.real
    return 0.5 * (a + a.conj().T)


def herm_eig(a) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix.

    Raises
    ------
    NotHermitianError
        If ``max|A - A†|`` exceeds ``HERMITIAN_ATOL``; the exception carries
        the measured asymmetry.
    """
    a = check_hermitian(a)
    w, v = np.linalg.eigh(_symmetrized(a))
    return EigenDecomposition(w, v)


def _clamped_psd_eigenvalues(w: np.ndarray) -> np.ndarray:
    lo = float(w.min())
    if lo < -PSD_ATOL:
        raise NotPSDError(lo)
    return np.where(w < 0.0, 0.0, w)


def matrix_sqrt_psd(a) -> np.ndarray:
    """Principal square root of a Hermitian positive-semidefinite matrix.

    Eigenvalues in ``[-PSD_ATOL, 0)`` are treated as zero.
    """
    eig = herm_eig(a)
    w = _clamped_psd_eigenvalues(eig.eigenvalues)
    return eig.apply(lambda _: np.sqrt(w))


def matrix_function(a, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum."""
    return herm_eig(a).apply(f)


def _check_pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = as_square(a)
    b = as_square(b)
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a, b


def commutator(a, b) -> np.ndarray:
    a, b = _check_pair(a, b)
    return a @ b - b @ a


def anticommutator(a, b) -> np.ndarray:
    a, b = _check_pair(a, b)
    return a @ b + b @ a


def kron(*ops, max_dim: int = MAX_COMPOSITE_DIM) -> np.ndarray:
    """Kronecker product of one or more square matrices."""
    dim = 1
    for op in ops:
        dim *= as_square(op).shape[0]
    if dim > max_dim:
        raise DimensionError(f"composite dimension {dim} exceeds cap {max_dim}")
    out = np.ones((1, 1))
    for op in ops:
        out = np.kron(out, op)
    return out


def embed(op, site_dims: Sequence[int], site_index: int,
          max_dim: int = MAX_COMPOSITE_DIM) -> np.ndarray:
    """Place ``op`` on one tensor factor with identities on all others."""
    op = as_square(op, "op")
    if not 0 <= site_index < len(site_dims):
        raise DimensionError(f"site_index {site_index} out of range for {len(site_dims)} sites")
    if op.shape[0] != site_dims[site_index]:
        raise DimensionError(
            f"operator dim {op.shape[0]} does not match site dim {site_dims[site_index]}")
    left = int(np.prod(site_dims[:site_index], dtype=np.int64))
    right = int(np.prod(site_dims[site_index + 1:], dtype=np.int64))
    if left * op.shape[0] * right > max_dim:
        raise DimensionError(
            f"composite dimension {left * op.shape[0] * right} exceeds cap {max_dim}")
    return np.kron(np.kron(np.eye(left), op), np.eye(right))


def partial_trace(rho, dims: Sequence[int], keep: str = "S") -> np.ndarray:
    """Reduce a bipartite operator on ``S ⊗ B``.

    Parameters
    ----------
    rho : array
        Operator of dimension ``dims[0] * dims[1]``.
    dims : (dim_S, dim_B)
    keep : {"S", "B"}
        Which factor survives.
    """
    rho = as_square(rho, "rho")
    ds, db = (int(d) for d in dims)
    if ds * db != rho.shape[0]:
        raise DimensionError(f"dims {ds}x{db} do not factor matrix of dim {rho.shape[0]}")
    t = rho.reshape(ds, db, ds, db)
    if keep == "S":
        return np.einsum("ajbj->ab", t)
    if keep == "B":
        return np.einsum("jajb->ab", t)
    raise ValueError(f"keep must be 'S' or 'B', got {keep!r}")


def frobenius_sq(a) -> float:
    a = np.asarray(a)
    return float(np.vdot(a, a).real)


def block_structure(a, atol: float = 0.0) -> list[np.ndarray]:
    """Index sets of the connected components of the sparsity graph of ``a``.

    A Hermitian matrix is block diagonal after permuting to these index sets,
    so each block can be diagonalized independently.
    """
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components

    a = as_square(a)
    pattern = csr_matrix(np.abs(a) > atol)
    n, labels = connected_components(pattern, directed=False)
    return [np.flatnonzero(labels == k) for k in range(n)]


def herm_eig_blocked(a) -> EigenDecomposition:
    """Like :func:`herm_eig` but diagonalizes each decoupled block separately.

    Eigenvalues are returned in ascending order as for :func:`herm_eig`.
    """
    a = check_hermitian(a)
    a = _symmetrized(a)
    blocks = block_structure(a)
    if len(blocks) == 1:
        w, v = np.linalg.eigh(a)
        return EigenDecomposition(w, v)
    d = a.shape[0]
    ws = np.empty(d)
    vs = np.zeros((d, d), dtype=a.dtype)
    col = 0
    for idx in blocks:
        w, v = np.linalg.eigh(a[np.ix_(idx, idx)])
        k = len(idx)
        ws[col:col + k] = w
        vs[idx, col:col + k] = v
        col += k
    order = np.argsort(ws, kind="stable")
    return EigenDecomposition(ws[order], vs[:, order])
