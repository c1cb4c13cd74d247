"""Exact unitary evolution of the composite state and the tightness experiment.

For time-independent Hamiltonians the evolution uses one eigendecomposition
(block-wise when the Hamiltonian decouples into sectors), after which every
time point is exact. Trajectory observables of product initial states are
evaluated in the energy eigenbasis in O(d²) per time point, so the evolved
composite state is never formed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import linalg
from .bounds import bound_curve
from .closedforms import SpinBathSpec, wy_spin_bath
from .linalg import DimensionError, MAX_COMPOSITE_DIM
from .models import CompositeModel, central_spin_model
from .states import DensityMatrix, as_density, bloch_state, polarization, thermal_state

THEOREM_SLACK = 1e-9
CONTRACTIVITY_SLACK = 1e-10


class BoundViolation(AssertionError):
    """The exact distance exceeded the speed-limit bound."""


def _check_dim(d: int):
    if d > MAX_COMPOSITE_DIM:
        raise DimensionError(f"composite dimension {d} exceeds cap {MAX_COMPOSITE_DIM}")


def evolve_constant(h, rho0, times) -> list[DensityMatrix]:
    """``ρ_t = e^{-iHt} ρ0 e^{iHt}`` at each requested time."""
    h = linalg.check_hermitian(h, "H")
    rho0 = as_density(rho0)
    if h.shape[0] != rho0.dim:
        raise DimensionError(f"H dim {h.shape[0]} != state dim {rho0.dim}")
    _check_dim(h.shape[0])
    eig = linalg.herm_eig_blocked(h)
    v, e = eig.eigenvectors, eig.eigenvalues
    r = v.conj().T @ rho0.matrix @ v
    out = []
    for t in np.atleast_1d(np.asarray(times, dtype=float)):
        ph = np.exp(-1j * e * t)
        rt = (ph[:, None] * r) * ph.conj()[None, :]
        m = v @ rt @ v.conj().T
        out.append(DensityMatrix(0.5 * (m + m.conj().T)))
    return out


def midpoint_propagator(h_of_t: Callable[[float], np.ndarray], t0: float, t1: float) -> np.ndarray:
    """One exponential-midpoint step ``exp(-i H((t0+t1)/2) (t1 - t0))``."""
    eig = linalg.herm_eig(h_of_t(0.5 * (t0 + t1)))
    return eig.apply(lambda w: np.exp(-1j * w * (t1 - t0)))


def evolve_stepped(h_of_t: Callable[[float], np.ndarray], rho0, times,
                   substeps: int = 1) -> list[DensityMatrix]:
    """Evolution under a time-dependent Hamiltonian.

    Each interval of ``times`` is split into ``substeps`` exponential-midpoint
    steps (local error O(Δt³), global O(Δt²)).
    """
    rho0 = as_density(rho0)
    _check_dim(rho0.dim)
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or np.any(np.diff(times) < 0):
        raise ValueError("times must be a non-decreasing 1-d grid")
    rho = rho0.matrix
    out = [rho0]
    for a, b in zip(times[:-1], times[1:]):
        edges = np.linspace(a, b, substeps + 1)
        for s0, s1 in zip(edges[:-1], edges[1:]):
            u = midpoint_propagator(h_of_t, s0, s1)
            rho = u @ rho @ u.conj().T
        out.append(DensityMatrix(0.5 * (rho + rho.conj().T)))
    return out


class ProductTrajectory:
    """Fast observables along ``ρ_t`` for ``ρ0 = ρS ⊗ ρB`` under constant ``H``.

    With ``H = V E V†`` and ``u = e^{-iEt}``, the Hellinger overlap is
    ``Σ_ab |(V†√ρ0V)_ab|² u_a ū_b`` and each system matrix element
    ``(ρS_t)_ij`` is ``Σ_ab (V†ρ0V)_ab (V†(|j⟩⟨i|⊗1)V)_ba u_a ū_b``. A batch
    of time points costs one ``d x d x T`` product per observable.
    """

    def __init__(self, h, rho_s, rho_b, eig: linalg.EigenDecomposition | None = None):
        rho_s, rho_b = as_density(rho_s), as_density(rho_b)
        ds, db = rho_s.dim, rho_b.dim
        if eig is None:
            h = linalg.check_hermitian(h, "H")
            if h.shape[0] != ds * db:
                raise DimensionError(f"H dim {h.shape[0]} != {ds} x {db}")
            _check_dim(h.shape[0])
            eig = linalg.herm_eig_blocked(h)
        elif eig.eigenvalues.size != ds * db:
            raise DimensionError(f"decomposition dim {eig.eigenvalues.size} != {ds} x {db}")
        self.energies = eig.eigenvalues
        v = eig.eigenvectors
        rows = [v[i * db:(i + 1) * db] for i in range(ds)]

        def sandwich(m_s: np.ndarray, d_b: np.ndarray | None) -> np.ndarray:
            # V† (m_s ⊗ d_b) V, assembled one block row at a time.
            m_s, d_b = _real_if_possible(m_s), _real_if_possible(d_b)
            acc = np.zeros((v.shape[1],) * 2, dtype=np.result_type(v, m_s))
            for i in range(ds):
                cols = [j for j in range(ds) if m_s[i, j] != 0]
                if not cols:
                    continue
                blk = sum(m_s[i, j] * rows[j] for j in cols)
                if d_b is not None:
                    blk = d_b @ blk
                acc += rows[i].conj().T @ blk
            return acc

        self._w_hell = np.abs(sandwich(rho_s.sqrt, rho_b.sqrt)) ** 2
        r0 = sandwich(rho_s.matrix, rho_b.matrix)
        self._w_sys = {}
        for i in range(ds):
            for j in range(i, ds):
                e_ji = np.zeros((ds, ds))
                e_ji[j, i] = 1.0
                self._w_sys[i, j] = r0 * sandwich(e_ji, None).T
        self.ds = ds
        self.rho_s0 = rho_s

    def _phases(self, times) -> np.ndarray:
        return np.exp(-1j * np.outer(self.energies, np.atleast_1d(np.asarray(times, dtype=float))))

    @staticmethod
    def _bilinear(w: np.ndarray, u: np.ndarray) -> np.ndarray:
        # Σ_ab w_ab u_a ū_b for every column of u.
        wt = _real_if_possible(w).T
        if np.isrealobj(wt):
            # Two real products; .real/.imag views are strided, so copy first.
            wu = wt @ np.ascontiguousarray(u.real) + 1j * (wt @ np.ascontiguousarray(u.imag))
        else:
            wu = wt @ u
        return np.einsum("at,at->t", u.conj(), wu)

    def hellinger(self, times) -> np.ndarray:
        u = self._phases(times)
        # tr ρ0 = 1 is replaced by the same bilinear form at t = 0 (first
        # column), so D(0) vanishes exactly and normalization round-off cancels.
        u = np.hstack([np.ones((u.shape[0], 1), dtype=u.dtype), u])
        overlap = self._bilinear(self._w_hell, u).real
        return overlap[0] - overlap[1:]

    def reduced_states(self, times) -> np.ndarray:
        """System states along the trajectory, shape ``(T, dS, dS)``."""
        u = self._phases(times)
        out = np.zeros((u.shape[1], self.ds, self.ds), dtype=complex)
        for (i, j), w in self._w_sys.items():
            val = self._bilinear(w, u)
            out[:, i, j] = val
            if i != j:
                out[:, j, i] = val.conj()
        return out

    def reduced_hellinger(self, times) -> np.ndarray:
        return np.array([_hellinger_small(self.rho_s0, m) for m in self.reduced_states(times)])


def _real_if_possible(a):
    if a is None or not np.iscomplexobj(a) or np.any(a.imag):
        return a
    return np.ascontiguousarray(a.real)


def _hellinger_small(rho_s0: DensityMatrix, m: np.ndarray) -> float:
    m = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(m)
    w = np.clip(w, 0.0, None)
    root = (v * np.sqrt(w)) @ v.conj().T
    return float(1.0 - np.vdot(root, rho_s0.sqrt).real)


@dataclass(frozen=True)
class CentralSpinInstance:
    """Randomly parametrized central spin model.

    Couplings are drawn from ``U[0.5, 1.5]`` and then level splittings from
    ``U[0, 2]`` with ``numpy``'s PCG64 generator seeded by ``seed``.
    """

    n_spins: int
    delta: float
    gamma: float
    g: np.ndarray
    omega: np.ndarray
    beta: float
    seed: int | None = None

    G_RANGE = (0.5, 1.5)
    OMEGA_RANGE = (0.0, 2.0)

    def __post_init__(self):
        if self.n_spins < 1 or 2 ** (self.n_spins + 1) > MAX_COMPOSITE_DIM:
            raise DimensionError(f"n_spins={self.n_spins} exceeds the composite cap")
        g, w = np.asarray(self.g, dtype=float), np.asarray(self.omega, dtype=float)
        if g.shape != (self.n_spins,) or w.shape != (self.n_spins,):
            raise DimensionError("g and omega need one entry per bath spin")
        lo, hi = self.G_RANGE
        if np.any(g < lo) or np.any(g > hi):
            raise ValueError(f"couplings must lie in [{lo}, {hi}]")
        lo, hi = self.OMEGA_RANGE
        if np.any(w < lo) or np.any(w > hi):
            raise ValueError(f"level splittings must lie in [{lo}, {hi}]")
        if not self.beta >= 0:
            raise ValueError("beta must be >= 0")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "omega", w)

    @classmethod
    def sample(cls, n_spins: int, seed: int, *, delta: float = 1.0, gamma: float = 1.0,
               beta: float = 1.0) -> "CentralSpinInstance":
        rng = np.random.Generator(np.random.PCG64(seed))
        g = rng.uniform(*cls.G_RANGE, size=n_spins)
        omega = rng.uniform(*cls.OMEGA_RANGE, size=n_spins)
        return cls(n_spins, delta, gamma, g, omega, beta, seed)

    def model(self) -> tuple[CompositeModel, SpinBathSpec]:
        return central_spin_model(self.delta, self.gamma, self.g, self.omega)


@dataclass(frozen=True)
class TrajectoryRecord:
    times: np.ndarray
    hellinger: np.ndarray
    reduced_hellinger: np.ndarray
    bound: np.ndarray
    phase: np.ndarray
    t_max: float
    rate: float
    seed: int | None = None

    @property
    def valid(self) -> np.ndarray:
        return self.times <= self.t_max

    def theorem_slack(self) -> float:
        """Smallest ``bound - D`` inside the validity window."""
        m = self.valid
        return float(np.min(self.bound[m] - self.hellinger[m])) if np.any(m) else np.inf

    def contractivity_slack(self) -> float:
        return float(np.min(self.hellinger - self.reduced_hellinger))

    def check(self, theorem_slack: float = THEOREM_SLACK,
              contractivity_slack: float = CONTRACTIVITY_SLACK) -> None:
        """Raise :class:`BoundViolation` if either inequality fails."""
        s = self.theorem_slack()
        if s < -theorem_slack:
            k = int(np.argmin(np.where(self.valid, self.bound - self.hellinger, np.inf)))
            raise BoundViolation(
                f"D(ρ0, ρt) = {self.hellinger[k]!r} exceeds the bound {self.bound[k]!r} "
                f"at t = {self.times[k]!r} (seed {self.seed})")
        c = self.contractivity_slack()
        if c < -contractivity_slack:
            raise BoundViolation(f"reduced-state distance exceeds full distance by {-c:.3e}")


def default_times(rate: float, points: int = 400, span: float = 1.25) -> np.ndarray:
    """Uniform grid over ``[0, span · t_max]``."""
    t_max = np.pi / np.sqrt(8.0 * rate) if rate > 0 else 1.0
    return np.linspace(0.0, span * t_max, points)


class Fig3Experiment:
    """One central-spin instance, diagonalized once, run for many initial states."""

    def __init__(self, instance: CentralSpinInstance):
        self.instance = instance
        self.model, self.spec = instance.model()
        self.rho_b = thermal_state(instance.beta, self.model.h_b)
        self.eig = linalg.herm_eig_blocked(self.model.hamiltonian)

    def rate(self, p_vec) -> float:
        """Finite-N closed-form skew information for the Bloch vector ``p_vec``."""
        rho_s = bloch_state(*polarization(p_vec))
        return float(wy_spin_bath(self.spec, self.model.h_s, rho_s, self.instance.beta))

    def run(self, p_vec=(0.0, 0.0, 1.0), times=None, *, points: int = 400) -> TrajectoryRecord:
        rho_s = bloch_state(*polarization(p_vec))
        rate = self.rate(p_vec)
        if times is None:
            times = default_times(rate, points)
        times = np.asarray(times, dtype=float)
        curve = bound_curve(times, rate, constant=True)
        traj = ProductTrajectory(None, rho_s, self.rho_b, eig=self.eig)
        return TrajectoryRecord(times, traj.hellinger(times), traj.reduced_hellinger(times),
                                curve.d_bound, curve.phase, curve.t_max, rate,
                                self.instance.seed)


def run_fig3(instance: CentralSpinInstance, p_vec=(0.0, 0.0, 1.0), times=None,
             *, points: int = 400) -> TrajectoryRecord:
    """Exact distance travelled versus the skew-information speed limit.

    The rate is the finite-N closed-form skew information of the spin bath;
    the distance is from exact evolution of the full composite state.
    """
    return Fig3Experiment(instance).run(p_vec, times, points=points)


__all__ = [
    "evolve_constant", "evolve_stepped", "midpoint_propagator", "ProductTrajectory",
    "CentralSpinInstance", "TrajectoryRecord", "BoundViolation", "Fig3Experiment", "run_fig3",
    "default_times",
]
