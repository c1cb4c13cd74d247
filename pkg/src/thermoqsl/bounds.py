"""Matrix-level speed-limit bounds for a system coupled to a thermal bath.

The composite space is ordered system ⊗ bath. Every bound here returns an
upper estimate of the Wigner-Yanase skew information (units of energy²);
:func:`mds_curve` turns such a rate into a bound on the Hellinger distance
travelled, up to the validity horizon ``t_max``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .linalg import DimensionError
from .states import DensityMatrix, as_density

NEGATIVE_RATE_ATOL = 1e-10
HALF_PI = 0.5 * math.pi


class NumericalInconsistencyError(ArithmeticError):
    """A quantity that is nonnegative in exact arithmetic came out negative."""


@dataclass(frozen=True)
class BoundCurve:
    """Accumulated speed-limit bound over a time grid.

    ``d_bound`` equals ``1 - cos(phase)`` up to ``t_max``; past the horizon
    it is pinned to 1, the trivial bound on the Hellinger distance.
    ``t_max`` is ``inf`` when the phase never reaches π/2 on the grid.
    """

    times: np.ndarray
    rates: np.ndarray
    phase: np.ndarray
    d_bound: np.ndarray
    t_max: float

    @property
    def valid(self) -> np.ndarray:
        return self.times <= self.t_max

    @property
    def beyond_grid(self) -> bool:
        return not self.t_max <= self.times[-1]


def _check_rates(rates) -> np.ndarray:
    rates = np.asarray(rates, dtype=float)
    lo = float(rates.min()) if rates.size else 0.0
    if lo < -NEGATIVE_RATE_ATOL:
        raise NumericalInconsistencyError(
            f"skew-information estimate {lo:.3e} is negative beyond {NEGATIVE_RATE_ATOL:.0e}")
    return np.maximum(rates, 0.0)


def bound_curve(times, rates, *, constant: bool = False) -> BoundCurve:
    """Integrate ``√(2 I(t))`` with the composite trapezoid rule.

    Parameters
    ----------
    times : ascending 1-d array
    rates : skew information (or an upper bound on it) at each time
    constant : if True, ``rates`` is a single time-independent value and the
        horizon is the closed form ``π / √(8 I)`` even when it lies off-grid.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("time grid must be a non-empty 1-d array")
    if np.any(np.diff(times) <= 0):
        raise ValueError("time grid must be strictly ascending")
    rates = _check_rates(np.broadcast_to(rates, times.shape))
    speed = np.sqrt(2.0 * rates)
    if constant:
        phase = speed[0] * (times - times[0])
        t_max = math.inf if speed[0] == 0 else times[0] + math.pi / math.sqrt(8.0 * rates[0])
    else:
        steps = 0.5 * (speed[1:] + speed[:-1]) * np.diff(times)
        phase = np.concatenate([[0.0], np.cumsum(steps)])
        t_max = _horizon(times, phase)
    d = np.where(times <= t_max, 1.0 - np.cos(np.minimum(phase, HALF_PI)), 1.0)
    d[0] = 0.0
    return BoundCurve(times, np.array(rates), phase, d, t_max)


def _horizon(times: np.ndarray, phase: np.ndarray) -> float:
    hit = np.flatnonzero(phase >= HALF_PI)
    if hit.size == 0:
        return math.inf
    k = int(hit[0])
    if k == 0:
        return float(times[0])
    p0, p1 = phase[k - 1], phase[k]
    return float(times[k - 1] + (HALF_PI - p0) / (p1 - p0) * (times[k] - times[k - 1]))


@dataclass(frozen=True)
class DriveSpec:
    """System Hamiltonian and system-bath coupling, possibly time dependent.

    ``h_s`` acts on the system, ``h_int`` on the composite space. Either may
    be a single matrix (time independent) or a sequence with one matrix per
    entry of ``times``.
    """

    h_s: object
    h_int: object
    times: np.ndarray | None = None
    _hs: tuple = field(init=False, repr=False)
    _hint: tuple = field(init=False, repr=False)

    def __post_init__(self):
        def normalize(ops, name):
            arr = np.asarray(ops)
            seq = (arr,) if arr.ndim == 2 else tuple(np.asarray(o) for o in ops)
            for o in seq:
                linalg.check_hermitian(o, name)
            return seq

        hs, hint = normalize(self.h_s, "h_s"), normalize(self.h_int, "h_int")
        n = max(len(hs), len(hint))
        for seq, name in ((hs, "h_s"), (hint, "h_int")):
            if len(seq) not in (1, n):
                raise DimensionError(f"{name} has {len(seq)} entries, expected 1 or {n}")
        if n > 1 and (self.times is None or len(self.times) != n):
            raise DimensionError("time-dependent drives need a time grid of matching length")
        if hs[0].shape[0] == 0 or hint[0].shape[0] % hs[0].shape[0]:
            raise DimensionError(
                f"coupling dim {hint[0].shape[0]} is not a multiple of system dim {hs[0].shape[0]}")
        object.__setattr__(self, "_hs", hs)
        object.__setattr__(self, "_hint", hint)

    @classmethod
    def from_callables(cls, h_s: Callable[[float], np.ndarray],
                       h_int: Callable[[float], np.ndarray], times) -> "DriveSpec":
        times = np.asarray(times, dtype=float)
        return cls([h_s(t) for t in times], [h_int(t) for t in times], times)

    @property
    def constant(self) -> bool:
        return len(self._hs) == 1 and len(self._hint) == 1

    @property
    def n_points(self) -> int:
        return max(len(self._hs), len(self._hint))

    @property
    def dim_s(self) -> int:
        return self._hs[0].shape[0]

    @property
    def dim(self) -> int:
        return self._hint[0].shape[0]

    def at(self, index: int = 0) -> tuple[np.ndarray, np.ndarray]:
        hs = self._hs[index if len(self._hs) > 1 else 0]
        hint = self._hint[index if len(self._hint) > 1 else 0]
        return hs, hint

    def composite(self, index: int = 0) -> np.ndarray:
        hs, hint = self.at(index)
        return np.kron(hs, np.eye(self.dim // self.dim_s)) + hint


def _as_drive(drive) -> DriveSpec:
    if isinstance(drive, DriveSpec):
        return drive
    h_s, h_int = drive
    return DriveSpec(h_s, h_int)


def _setup(drive, rho_s, rho_b, index):
    drive = _as_drive(drive)
    rho_s, rho_b = as_density(rho_s), as_density(rho_b)
    if drive.dim_s != rho_s.dim or drive.dim != rho_s.dim * rho_b.dim:
        raise DimensionError(
            f"drive dims (system {drive.dim_s}, composite {drive.dim}) do not match "
            f"states ({rho_s.dim}, {rho_b.dim})")
    return drive, drive.composite(index), rho_s, rho_b


def _check_nonneg(value: float, name: str) -> float:
    if value < -NEGATIVE_RATE_ATOL:
        raise NumericalInconsistencyError(f"{name} = {value:.3e} < 0")
    return value


def skew_rate(drive, rho_s, rho_b, index: int = 0) -> float:
    """Exact skew information ``½ tr(-[H^S + H^int, √ρS √ρB]²)``."""
    _, h, rho_s, rho_b = _setup(drive, rho_s, rho_b, index)
    x = np.kron(rho_s.sqrt, rho_b.sqrt)
    return 0.5 * linalg.frobenius_sq(h @ x - x @ h)


def relaxed_bound(drive, rho_s, rho_b, c="auto", index: int = 0) -> float:
    """``tr((H^S + H^int - c)² ρS ρB)``.

    With ``c="auto"`` the shift is the mean energy ``tr((H^S + H^int) ρ0)``
    and the bound is the energy variance.
    """
    _, h, rho_s, rho_b = _setup(drive, rho_s, rho_b, index)
    x = np.kron(rho_s.sqrt, rho_b.sqrt)
    if isinstance(c, str):
        if c != "auto":
            raise ValueError(f"c must be a real number or 'auto', got {c!r}")
        c = float(np.vdot(x, h @ x).real)
    shifted = h - c * np.eye(h.shape[0])
    return linalg.frobenius_sq(shifted @ x)


def t_trick_bound(drive, rho_s, rho_b, h_b, beta: float, index: int = 0) -> float:
    """Temperature-explicit bound built from the commutator ``[H^int, H^B]``.

    ``(β²/8) tr(-{[H^int, H^B], ρS}[H^int, H^B] ρB) + tr(-[H^S + H^int, √ρS]² ρB)``

    Each trace is evaluated as a sum of squared Frobenius norms, so both
    terms are nonnegative by construction.
    """
    if not beta >= 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    drive, h, rho_s, rho_b = _setup(drive, rho_s, rho_b, index)
    h_b = linalg.check_hermitian(h_b, "h_b")
    if h_b.shape[0] != rho_b.dim:
        raise DimensionError(f"bath Hamiltonian dim {h_b.shape[0]} != bath state dim {rho_b.dim}")
    _, h_int = drive.at(index)
    eye_s, eye_b = np.eye(rho_s.dim), np.eye(rho_b.dim)
    hb = np.kron(eye_s, h_b)
    comm = h_int @ hb - hb @ h_int
    sqrt_s = np.kron(rho_s.sqrt, eye_b)
    sqrt_b = np.kron(eye_s, rho_b.sqrt)
    x = sqrt_s @ sqrt_b
    first = linalg.frobenius_sq(sqrt_s @ comm @ sqrt_b) + linalg.frobenius_sq(comm @ x)
    second = linalg.frobenius_sq((h @ sqrt_s - sqrt_s @ h) @ sqrt_b)
    return _check_nonneg(beta ** 2 / 8.0 * first + second, "t_trick_bound")


def log_t_trick_bound(drive, rho_s, rho_b, h_b, beta: float, index: int = 0) -> float:
    """``(1/8) tr(-[H^S + H^int, βH^B - log ρS]² ρS ρB)``.

    Raises :class:`~thermoqsl.states.StateError` for singular ``ρS``.
    """
    if not beta >= 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    _, h, rho_s, rho_b = _setup(drive, rho_s, rho_b, index)
    h_b = linalg.check_hermitian(h_b, "h_b")
    if h_b.shape[0] != rho_b.dim:
        raise DimensionError(f"bath Hamiltonian dim {h_b.shape[0]} != bath state dim {rho_b.dim}")
    g = beta * np.kron(np.eye(rho_s.dim), h_b) - np.kron(rho_s.log, np.eye(rho_b.dim))
    x = np.kron(rho_s.sqrt, rho_b.sqrt)
    return linalg.frobenius_sq((h @ g - g @ h) @ x) / 8.0


ESTIMATORS = {
    "skew": skew_rate,
    "relaxed": relaxed_bound,
    "t_trick": t_trick_bound,
    "log_t_trick": log_t_trick_bound,
}


def mds_curve(drive, rho_s, rho_b, times=None, estimator: str = "skew", **kwargs) -> BoundCurve:
    """Distance bound ``1 - cos(∫ √(2 I))`` for the chosen rate estimator.

    Parameters
    ----------
    drive : DriveSpec or (h_s, h_int)
    times : time grid; defaults to ``drive.times``. Grid refinement for
        time-dependent drives is the caller's responsibility.
    estimator : one of ``"skew"``, ``"relaxed"``, ``"t_trick"``,
        ``"log_t_trick"``. The last two need ``h_b`` and ``beta`` keywords.
    """
    try:
        rate = ESTIMATORS[estimator]
    except KeyError:
        raise ValueError(f"unknown estimator {estimator!r}; choose from {sorted(ESTIMATORS)}") from None
    drive = _as_drive(drive)
    if times is None:
        times = drive.times
    if times is None:
        raise ValueError("a time grid is required")
    times = np.asarray(times, dtype=float)
    if drive.constant:
        value = rate(drive, rho_s, rho_b, index=0, **kwargs)
        return bound_curve(times, value, constant=True)
    if drive.n_points != len(times):
        raise DimensionError("time grid does not match the drive's grid")
    rates = [rate(drive, rho_s, rho_b, index=i, **kwargs) for i in range(len(times))]
    return bound_curve(times, rates)


__all__ = [
    "BoundCurve", "DriveSpec", "NumericalInconsistencyError",
    "bound_curve", "mds_curve", "skew_rate", "relaxed_bound",
    "t_trick_bound", "log_t_trick_bound", "ESTIMATORS",
]
