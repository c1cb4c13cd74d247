"""Closed-form skew information and bounds for noninteracting baths.

Two bath families are covered: independent bosonic modes coupled linearly,
``H^int = γ/√N Σ_k (g_k S_k† b_k + g_k* S_k b_k†)``, and independent spins
1/2 with ``H^B = Σ_j ω_j σ^z_j / 2`` and ``H^int = γ/√N Σ_j g_j S_j σ^x_j``.
For both, the skew information collapses to a trace over the system alone.

For a qubit coupled through ``σ^x`` (spin-boson and central-spin models) all
four rate estimates reduce to a handful of bath integrals, collected in
:class:`SpectralIntegrals`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import linalg
from .linalg import DimensionError
from .specfun import QuadratureError, polygamma, quad_semiinf
from .states import StateError, as_density, polarization

BATH_KINDS = ("boson", "spin")


def _system_ops(s_ops, n: int) -> tuple[np.ndarray, ...]:
    arr = np.asarray(s_ops)
    if arr.ndim == 2:
        return tuple(arr for _ in range(n))
    ops = tuple(np.asarray(s) for s in s_ops)
    if len(ops) != n:
        raise DimensionError(f"expected {n} system coupling operators, got {len(ops)}")
    return ops


@dataclass(frozen=True)
class BosonicBathSpec:
    """Independent bosonic modes with linear coupling to the system.

    ``s_ops`` may be a single system operator shared by all modes.
    """

    omega: np.ndarray
    g: np.ndarray
    gamma: float
    s_ops: tuple

    def __init__(self, omega, g, gamma, s_ops):
        omega = np.atleast_1d(np.asarray(omega, dtype=float))
        g = np.atleast_1d(np.asarray(g, dtype=complex))
        if omega.shape != g.shape:
            raise DimensionError(f"omega and g lengths differ: {omega.size} vs {g.size}")
        if np.any(omega <= 0):
            raise ValueError("bosonic mode energies must be positive")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "gamma", float(gamma))
        object.__setattr__(self, "s_ops", _system_ops(s_ops, omega.size))

    @property
    def n_modes(self) -> int:
        return self.omega.size


@dataclass(frozen=True)
class SpinBathSpec:
    """Independent spins 1/2 coupled through ``S_j ⊗ σ^x_j``."""

    omega: np.ndarray
    g: np.ndarray
    gamma: float
    s_ops: tuple

    def __init__(self, omega, g, gamma, s_ops):
        omega = np.atleast_1d(np.asarray(omega, dtype=float))
        g = np.atleast_1d(np.asarray(g, dtype=float))
        if omega.shape != g.shape:
            raise DimensionError(f"omega and g lengths differ: {omega.size} vs {g.size}")
        ops = _system_ops(s_ops, omega.size)
        for s in ops:
            linalg.check_hermitian(s, "spin-bath coupling operator")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "gamma", float(gamma))
        object.__setattr__(self, "s_ops", ops)

    @property
    def n_spins(self) -> int:
        return self.omega.size


def _sys_commutator_sq(a: np.ndarray, x: np.ndarray) -> float:
    return linalg.frobenius_sq(a @ x - x @ a)


def _tr(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.trace(a @ b).real)


def wy_bosonic(spec: BosonicBathSpec, h_s, rho_s, beta: float) -> float:
    """Skew information for a thermal bosonic bath, as a system-space trace.

    The Bose-factor terms are regrouped as ``½ tanh(βω/4) tr((S†S + SS†)ρ)
    + ½ csch(βω/2) ‖[S, √ρ]‖² + ½ tr([S†, S]ρ)``, which is algebraically the
    same expression and free of the cancellation between large Bose weights
    at high temperature.
    """
    if not beta > 0:
        raise ValueError(f"bosonic closed form needs beta > 0, got {beta}")
    rho_s = as_density(rho_s)
    h_s = linalg.check_hermitian(h_s, "h_s")
    rho, x = rho_s.matrix, rho_s.sqrt
    total = 0.5 * _sys_commutator_sq(h_s, x)
    bw = beta * spec.omega
    tanh_q = np.tanh(0.25 * bw)
    csch_h = 2.0 * np.exp(-0.5 * bw) / -np.expm1(-bw)
    weights = spec.gamma ** 2 * np.abs(spec.g) ** 2 / spec.n_modes
    for w, th, cs, s in zip(weights, tanh_q, csch_h, spec.s_ops):
        sd = s.conj().T
        sym = _tr(sd @ s + s @ sd, rho)
        anti = _tr(sd @ s - s @ sd, rho)
        total += w * (0.5 * th * sym + 0.5 * cs * _sys_commutator_sq(s, x) + 0.5 * anti)
    return total


def _one_minus_sech(y: np.ndarray) -> np.ndarray:
    y = np.abs(y)
    small = y < 1.0
    ys = np.where(small, y, 0.0)
    yl = np.where(small, 1.0, y)
    return np.where(small, 2.0 * np.sinh(0.5 * ys) ** 2 / np.cosh(ys),
                    1.0 - 2.0 * np.exp(-yl) / (1.0 + np.exp(-2.0 * yl)))


def wy_spin_bath(spec: SpinBathSpec, h_s, rho_s, beta: float) -> float:
    """Skew information for a thermal bath of noninteracting spins 1/2.

    Evaluated as ``½‖[H^S, √ρ]‖² + Σ_j c_j² ((1 - sech(βω_j/2)) tr(S_j² ρ)
    + ½ sech(βω_j/2) ‖[S_j, √ρ]‖²)`` with ``c_j = γ g_j / √N``.
    """
    if not beta >= 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    rho_s = as_density(rho_s)
    h_s = linalg.check_hermitian(h_s, "h_s")
    rho, x = rho_s.matrix, rho_s.sqrt
    total = 0.5 * _sys_commutator_sq(h_s, x)
    y = 0.5 * beta * spec.omega
    oms = _one_minus_sech(y)
    sech = 1.0 - oms
    weights = spec.gamma ** 2 * spec.g ** 2 / spec.n_spins
    for w, om, se, s in zip(weights, oms, sech, spec.s_ops):
        total += w * (om * _tr(s @ s, rho) + 0.5 * se * _sys_commutator_sq(s, x))
    return total


def bch_conjugation_check(omega: float, beta: float, cutoff: int) -> float:
    """Max deviation of ``e^{-βH/2} b e^{βH/2} = e^{βω/2} b`` (and the
    ``b†`` partner) on a Fock space truncated at ``cutoff`` levels.

    The exponentials are formed with a general matrix exponential, not from
    the known diagonal structure.
    """
    from scipy.linalg import expm

    if cutoff < 2:
        raise ValueError("cutoff must be at least 2")
    b = np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), k=1)
    h = omega * b.T @ b
    left, right = expm(-0.5 * beta * h), expm(0.5 * beta * h)
    dev_b = np.max(np.abs(left @ b @ right - math.exp(0.5 * beta * omega) * b))
    dev_bd = np.max(np.abs(left @ b.T @ right - math.exp(-0.5 * beta * omega) * b.T))
    return float(max(dev_b, dev_bd))


# Spectral densities and bath integrals --------------------------------------


@dataclass(frozen=True)
class OhmicSpectralDensity:
    """``J(ω) = ω exp(-α ω)``."""

    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"cutoff constant alpha must be positive, got {self.alpha}")

    def __call__(self, omega):
        omega = np.asarray(omega, dtype=float)
        return omega * np.exp(-self.alpha * omega)

    @property
    def total_weight(self) -> float:
        """``∫ J(ω) dω``."""
        return 1.0 / self.alpha ** 2

    def discretize(self, n: int, omega_max: float | None = None):
        """Midpoint Riemann discretization into ``n`` modes.

        Returns ``(omega, g)`` such that ``N⁻¹ Σ g_k² f(ω_k)`` is the midpoint
        rule for ``∫ J f`` on ``[0, omega_max]``.
        """
        omega_max = 40.0 / self.alpha if omega_max is None else omega_max
        dw = omega_max / n
        omega = (np.arange(n) + 0.5) * dw
        g = np.sqrt(n * self(omega) * dw)
        return omega, g

    def sample(self, n: int, rng: np.random.Generator):
        """Monte Carlo bath: ``ω_k`` drawn from ``J(ω)/∫J`` (a Gamma(2, 1/α)
        law) with equal couplings ``g_k² = ∫J``."""
        omega = rng.gamma(2.0, 1.0 / self.alpha, size=n)
        g = np.full(n, math.sqrt(self.total_weight))
        return omega, g


class SpectralIntegrals(NamedTuple):
    """Dimensionless bath integrals entering the qubit bounds.

    ``K``, ``M``, ``L`` are the usual thermal integrals; ``P`` multiplies the
    cross term of the logarithmic bound, ``β³ N⁻¹ Σ g² ω ⟨[b, b†]⟩``
    for bosons and ``β³ N⁻¹ Σ g² ω tanh(βω/2)`` for spins.
    """

    K: float
    M: float
    L: float
    P: float


class BoundCoefficients(NamedTuple):
    K: float
    M: float
    L: float
    P: float
    B_p2: float
    tilde_B_p: float


def hellinger_weight(p: float) -> float:
    """``B_p² = (1 - √(1 - p²)) / 4``, the squared σ-part of ``√ρ``."""
    if not 0.0 <= p <= 1.0:
        raise StateError(f"polarization magnitude must lie in [0, 1], got {p}")
    return 0.25 * p * p / (1.0 + math.sqrt(1.0 - p * p))


def log_weight(p: float) -> float:
    """``ln √((1+p)/(1-p))``, the σ-part of ``log ρ``; infinite for ``p = 1``."""
    if not 0.0 <= p <= 1.0:
        raise StateError(f"polarization magnitude must lie in [0, 1], got {p}")
    return math.inf if p == 1.0 else math.atanh(p)


def bound_coefficients(integrals: SpectralIntegrals, p: float) -> BoundCoefficients:
    return BoundCoefficients(*integrals, hellinger_weight(p), log_weight(p))


def _discrete_integrals(omega, g2, beta: float, kind: str) -> SpectralIntegrals:
    n = omega.size
    bw = beta * omega
    if kind == "boson":
        coth = (1.0 + np.exp(-bw)) / -np.expm1(-bw)
        half_csch = np.exp(-0.5 * bw) / -np.expm1(-bw)
        thermal2, thermal_l, thermal_p = coth, half_csch, np.ones_like(bw)
    else:
        thermal2 = np.ones_like(bw)
        thermal_l = np.exp(-0.5 * np.abs(bw)) / (1.0 + np.exp(-np.abs(bw)))
        thermal_p = np.tanh(0.5 * bw)
    K = beta ** 2 * float(np.sum(g2 * thermal2)) / n
    M = beta ** 4 * float(np.sum(g2 * omega ** 2 * thermal2)) / n
    L = beta ** 2 * float(np.sum(g2 * thermal_l)) / n
    P = beta ** 3 * float(np.sum(g2 * omega * thermal_p)) / n
    return SpectralIntegrals(K, M, L, P)


def _ohmic_closed(alpha: float, beta: float, kind: str) -> SpectralIntegrals:
    z = alpha / beta
    if kind == "boson":
        return SpectralIntegrals(
            2.0 * polygamma(1, z) - 1.0 / z ** 2,
            2.0 * polygamma(3, z) - 6.0 / z ** 4,
            polygamma(1, z + 0.5),
            2.0 / z ** 3,
        )
    return SpectralIntegrals(
        1.0 / z ** 2,
        6.0 / z ** 4,
        0.25 * (polygamma(1, 0.25 + 0.5 * z) - polygamma(1, 0.75 + 0.5 * z)),
        0.25 * (polygamma(2, 0.5 * (z + 1.0)) - polygamma(2, 0.5 * z)) - 2.0 / z ** 3,
    )


def integrands(density: OhmicSpectralDensity, beta: float, kind: str = "boson"):
    """Integrands over ω whose integrals are ``(K, M, L, P)``."""
    J = density

    def with_weight(power, beta_power, thermal):
        def f(w):
            w = np.asarray(w, dtype=float)
            return beta ** beta_power * w ** power * J(w) * thermal(beta * w)
        return f

    if kind == "boson":
        coth = lambda x: (1.0 + np.exp(-x)) / -np.expm1(-x)
        half_csch = lambda x: np.exp(-0.5 * x) / -np.expm1(-x)
        unit = lambda x: np.ones_like(x)
        return (with_weight(0, 2, coth), with_weight(2, 4, coth),
                with_weight(0, 2, half_csch), with_weight(1, 3, unit))
    unit = lambda x: np.ones_like(x)
    half_sech = lambda x: np.exp(-0.5 * x) / (1.0 + np.exp(-x))
    tanh_half = lambda x: np.tanh(0.5 * x)
    return (with_weight(0, 2, unit), with_weight(2, 4, unit),
            with_weight(0, 2, half_sech), with_weight(1, 3, tanh_half))


def spectral_integrals(source, beta: float, *, kind: str | None = None,
                       method: str = "closed", tol: float = 1e-12) -> SpectralIntegrals:
    """Bath integrals ``K, M, L, P`` at inverse temperature ``beta``.

    Parameters
    ----------
    source : OhmicSpectralDensity, BosonicBathSpec or SpinBathSpec
        Discrete specs give the finite-N sums; the continuum density gives
        the thermodynamic-limit values.
    kind : ``"boson"`` or ``"spin"``; inferred from discrete specs, defaults
        to ``"boson"`` for a continuum density.
    method : ``"closed"`` (polygamma forms) or ``"quadrature"`` (direct
        integration; continuum only).

    Raises
    ------
    QuadratureError
        If direct integration misses ``tol``; carries the achieved estimate.
    """
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if isinstance(source, BosonicBathSpec):
        return _discrete_integrals(source.omega, np.abs(source.g) ** 2, beta, "boson")
    if isinstance(source, SpinBathSpec):
        return _discrete_integrals(source.omega, source.g ** 2, beta, "spin")
    if not isinstance(source, OhmicSpectralDensity):
        raise TypeError(f"unsupported spectral source {type(source).__name__}")
    kind = kind or "boson"
    if kind not in BATH_KINDS:
        raise ValueError(f"kind must be one of {BATH_KINDS}, got {kind!r}")
    if method == "closed":
        return _ohmic_closed(source.alpha, beta, kind)
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    scale = max(1.0 / beta, 1.0 / source.alpha)
    values = []
    for name, f in zip(SpectralIntegrals._fields, integrands(source, beta, kind)):
        r = quad_semiinf(f, tol, scale=scale)
        if not r.converged:
            raise QuadratureError(r, f"integral {name}")
        values.append(r.value)
    return SpectralIntegrals(*values)


class QubitBounds(NamedTuple):
    relaxed: float
    t_trick: float
    log_t_trick: float | None
    exact_wy: float


def spin_boson_bounds(delta: float, gamma: float, beta: float, p: float, n,
                      integrals: SpectralIntegrals, *, log_term: bool = True,
                      log_cross_term: bool = True) -> QubitBounds:
    """Rate estimates for a qubit ``H^S = Δσ^z/2`` coupled through ``σ^x``.

    Applies to the spin-boson model (bosonic integrals) and the central spin
    model (spin integrals) alike. Returns the relaxed (variance) bound, the
    commutator-with-``H^B`` bound, the logarithmic bound and the exact skew
    information.

    The logarithmic bound contains a cross term between ``[H^int, H^B]`` and
    ``[H^int, log ρS]``, proportional to ``P``; ``log_cross_term=False``
    drops it, which is only exact when ``p = 0`` or ``n`` lies along x.

    Raises
    ------
    StateError
        ``log_term=True`` with a pure state (``p = 1``), where ``log ρS`` is
        undefined. Pass ``log_term=False`` to get ``log_t_trick=None``.
    """
    n = np.asarray(n, dtype=float).reshape(3)
    if abs(np.linalg.norm(n) - 1.0) > 1e-12:
        raise StateError(f"direction must be a unit vector, |n| = {np.linalg.norm(n)!r}")
    nx, _, nz = n
    K, M, L, P = integrals
    b2 = hellinger_weight(p)
    g2b2 = gamma ** 2 / beta ** 2
    relaxed = 0.25 * (1.0 - (p * nz) ** 2) * delta ** 2 + g2b2 * K
    t_trick = (0.25 * g2b2 * M + 2.0 * delta ** 2 * b2 * (1.0 - nz ** 2)
               + 8.0 * b2 * (1.0 - nx ** 2) * g2b2 * K)
    exact = (delta ** 2 * b2 * (1.0 - nz ** 2) + g2b2 * K
             - 2.0 * g2b2 * L * (1.0 - 4.0 * b2 * (1.0 - nx ** 2)))
    log_val = None
    if log_term:
        if p >= 1.0:
            raise StateError("logarithmic bound undefined for a pure system state (p = 1)")
        bt = log_weight(p)
        log_val = (0.125 * g2b2 * M + 0.125 * delta ** 2 * bt ** 2 * (1.0 - nz ** 2)
                   + 0.5 * bt ** 2 * (1.0 - nx ** 2) * g2b2 * K)
        if log_cross_term:
            log_val += 0.5 * g2b2 * P * p * bt * (1.0 - nx ** 2)
    return QubitBounds(float(relaxed), float(t_trick),
                       None if log_val is None else float(log_val), float(exact))


def qubit_bounds_from_vector(delta, gamma, beta, p_vec, integrals, **kwargs) -> QubitBounds:
    p, n = polarization(p_vec)
    return spin_boson_bounds(delta, gamma, beta, p, n, integrals, **kwargs)


__all__ = [
    "BosonicBathSpec", "SpinBathSpec", "OhmicSpectralDensity", "SpectralIntegrals",
    "BoundCoefficients", "QubitBounds", "wy_bosonic", "wy_spin_bath",
    "bch_conjugation_check", "spectral_integrals", "integrands", "bound_coefficients",
    "hellinger_weight", "log_weight", "spin_boson_bounds", "qubit_bounds_from_vector",
]
