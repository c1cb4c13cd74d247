"""Polygamma functions and adaptive quadrature on semi-infinite intervals."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

# Shift the argument above this point before using the asymptotic series.
ASYMPTOTIC_THRESHOLD = 20.0

# B_2, B_4, ..., B_16
_BERNOULLI_EVEN = (
    1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0,
    -691.0 / 2730.0, 7.0 / 6.0, -3617.0 / 510.0,
)

SUPPORTED_ORDERS = (1, 2, 3)


def _polygamma_asymptotic(m: int, x: float) -> float:
    s = math.factorial(m - 1) / x ** m + math.factorial(m) / (2.0 * x ** (m + 1))
    for k, b in enumerate(_BERNOULLI_EVEN, start=1):
        s += b * math.factorial(2 * k + m - 1) / (math.factorial(2 * k) * x ** (2 * k + m))
    return s if m % 2 else -s


def _polygamma_scalar(m: int, z: float) -> float:
    if not z > 0:
        raise ValueError(f"polygamma requires z > 0 (poles at non-positive integers), got {z}")
    shift = max(0, math.ceil(ASYMPTOTIC_THRESHOLD - z))
    value = _polygamma_asymptotic(m, z + shift)
    sign = 1.0 if m % 2 else -1.0
    mfact = math.factorial(m)
    # Smallest terms first.
    for k in range(shift - 1, -1, -1):
        value += sign * mfact / (z + k) ** (m + 1)
    return value


def polygamma(m: int, z):
    """Polygamma function ``ψ^(m)(z)`` for real ``z > 0`` and ``m`` in {1, 2, 3}.

    Uses the recurrence ``ψ^(m)(z) = ψ^(m)(z+1) + (-1)^(m+1) m!/z^(m+1)`` to
    move the argument above ``ASYMPTOTIC_THRESHOLD`` and then the Bernoulli
    asymptotic expansion. Relative accuracy is about 1e-15.

    Accepts scalars or arrays; returns the same shape.
    """
    if m not in SUPPORTED_ORDERS:
        raise ValueError(f"polygamma order must be one of {SUPPORTED_ORDERS}, got {m}")
    if np.ndim(z) == 0:
        return _polygamma_scalar(m, float(z))
    z = np.asarray(z, dtype=float)
    return np.vectorize(lambda x: _polygamma_scalar(m, x), otypes=[float])(z)


def trigamma(z):
    return polygamma(1, z)


# Quadrature ---------------------------------------------------------------------

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KWEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss nodes are the odd-indexed Kronrod nodes of _XGK: 1, 3, 5, 7(=0).
_GWEIGHTS = np.zeros(15)
_GWEIGHTS[[1, 3, 5]] = _WG[:3]
_GWEIGHTS[[13, 11, 9]] = _WG[:3]
_GWEIGHTS[7] = _WG[3]


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int
    converged: bool

    def __float__(self):
        return self.value


class QuadratureError(RuntimeError):
    def __init__(self, result: QuadratureResult, what: str = "integral"):
        super().__init__(
            f"{what} did not converge after {result.evaluations} evaluations: "
            f"value {result.value!r}, error estimate {result.error_estimate:.3e}")
        self.result = result


def _gk15(f, a: float, b: float) -> tuple[float, float]:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fx = np.asarray(f(mid + half * _NODES), dtype=float)
    k = half * float(fx @ _KWEIGHTS)
    g = half * float(fx @ _GWEIGHTS)
    return k, abs(k - g)


def _adaptive(f, a: float, b: float, rtol: float, atol: float, max_evals: int) -> QuadratureResult:
    k, e = _gk15(f, a, b)
    heap = [(-e, a, b, k, e)]
    total, err, evals = k, e, 15
    while err > max(atol, rtol * abs(total)):
        if evals + 30 > max_evals:
            return QuadratureResult(total, err, evals, False)
        _, lo, hi, k0, e0 = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            # Interval collapsed to machine resolution.
            return QuadratureResult(total, err, evals, False)
        k1, e1 = _gk15(f, lo, mid)
        k2, e2 = _gk15(f, mid, hi)
        evals += 30
        total += k1 + k2 - k0
        err += e1 + e2 - e0
        heapq.heappush(heap, (-e1, lo, mid, k1, e1))
        heapq.heappush(heap, (-e2, mid, hi, k2, e2))
    # Re-sum to shed the accumulated update round-off.
    total = math.fsum(item[3] for item in heap)
    err = math.fsum(item[4] for item in heap)
    return QuadratureResult(total, err, evals, True)


def quad_interval(f: Callable, a: float, b: float, tol: float = 1e-12, *,
                  atol: float = 0.0, max_evals: int = 200_000) -> QuadratureResult:
    """Adaptive Gauss-Kronrod (7/15) integral of ``f`` over ``[a, b]``.

    ``f`` must accept a 1-d array of abscissae. The endpoints themselves are
    never evaluated.
    """
    if a == b:
        return QuadratureResult(0.0, 0.0, 0, True)
    if b < a:
        r = quad_interval(f, b, a, tol, atol=atol, max_evals=max_evals)
        return QuadratureResult(-r.value, r.error_estimate, r.evaluations, r.converged)
    return _adaptive(f, float(a), float(b), tol, atol, max_evals)


def quad_semiinf(f: Callable, tol: float = 1e-12, *, scale: float = 1.0,
                 atol: float = 0.0, max_evals: int = 400_000) -> QuadratureResult:
    """Integral of ``f`` over ``(0, ∞)``.

    The domain is split at ``scale``; the tail ``[scale, ∞)`` is mapped to
    ``(0, 1]`` by ``x = scale / u``. Both pieces are integrated adaptively
    with a relative tolerance ``tol`` (or absolute ``atol``, whichever is
    looser). ``scale`` should be of the order of the integrand's decay
    length. Neither ``x = 0`` nor ``u = 0`` is ever evaluated, so integrable
    or removable singularities at the origin are harmless.

    A result that misses the tolerance within ``max_evals`` evaluations is
    returned with ``converged=False``.
    """
    if not scale > 0:
        raise ValueError(f"scale must be positive, got {scale}")

    def tail(u):
        u = np.asarray(u, dtype=float)
        return np.asarray(f(scale / u), dtype=float) * scale / (u * u)

    # Split the budget/tolerance across the two pieces.
    head = _adaptive(f, 0.0, scale, 0.5 * tol, 0.5 * atol, max_evals // 2)
    rest = _adaptive(tail, 0.0, 1.0, 0.5 * tol, 0.5 * atol, max_evals // 2)
    value = head.value + rest.value
    err = head.error_estimate + rest.error_estimate
    converged = err <= max(atol, tol * abs(value)) or (head.converged and rest.converged)
    return QuadratureResult(value, err, head.evaluations + rest.evaluations, converged)


def polygamma_integrand(m: int, z: float) -> Callable[[np.ndarray], np.ndarray]:
    """``t^m e^{-zt} / (1 - e^{-t})``, the integral representation of ``ψ^(m)``.

    Only the odd orders are positive; for even ``m`` the integral gives
    ``(-1)^(m+1) ψ^(m)(z)``.
    """
    def f(t):
        t = np.asarray(t, dtype=float)
        return t ** m * np.exp(-z * t) / -np.expm1(-t)
    return f


def polygamma_quadrature(m: int, z: float, tol: float = 1e-13) -> QuadratureResult:
    """``ψ^(m)(z)`` from its integral representation (independent reference)."""
    f = polygamma_integrand(m, z)
    r = quad_semiinf(f, tol, scale=max(1.0, 1.0 / z))
    sign = 1.0 if m % 2 else -1.0
    return QuadratureResult(sign * r.value, r.error_estimate, r.evaluations, r.converged)
