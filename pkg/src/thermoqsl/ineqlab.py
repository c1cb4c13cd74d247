"""Randomized numerical checks of the inequalities behind the thermal bounds.

Every check maps one set of inputs to a *slack*: ``rhs - lhs`` for an
inequality (nonnegative when it holds) or ``-|lhs - rhs|`` for an identity.
The suite runners sample many inputs, reduce them to the worst slack, and
keep that instance in a JSON-safe form so a failure can be replayed
bit-for-bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import bounds, linalg
from .specfun import quad_interval
from .states import (DensityMatrix, StateError, as_density, random_density_matrix,
                     random_hermitian, skew_information, thermal_state)

DEFAULT_THRESHOLD = 1e-9
LEMMA_THRESHOLD = 1e-12
RELAXATION_THRESHOLD = 1e-10
# Identities are compared relative to the size of the terms involved.
IDENTITY_RTOL = 1e-10


@dataclass
class InequalityReport:
    """Worst case of one inequality or identity over many random trials.

    ``max_violation`` is ``max(0, -min slack)``; ``worst_case`` holds the
    inputs of the trial with the smallest slack.
    """

    name: str
    trials: int
    max_violation: float
    worst_case: dict | None
    threshold: float = DEFAULT_THRESHOLD
    min_slack: float = math.inf
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.threshold

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "InequalityReport":
        d = {k: v for k, v in d.items() if k != "passed"}
        return cls(**d)

    def merge(self, other: "InequalityReport") -> "InequalityReport":
        """Max-reduction of two reports of the same inequality."""
        if other.name != self.name:
            raise ValueError(f"cannot merge {self.name!r} with {other.name!r}")
        worst = self if self.min_slack <= other.min_slack else other
        return InequalityReport(self.name, self.trials + other.trials,
                                max(self.max_violation, other.max_violation),
                                worst.worst_case, min(self.threshold, other.threshold),
                                worst.min_slack, sorted(set(self.notes) | set(other.notes)))


# Serialization of inputs ----------------------------------------------------------

def encode(value):
    """JSON-safe encoding that round-trips floats and complex arrays exactly."""
    if isinstance(value, DensityMatrix):
        value = value.matrix
    if isinstance(value, np.ndarray):
        return {"__ndarray__": True, "shape": list(value.shape),
                "real": value.real.ravel().tolist(),
                "imag": value.imag.ravel().tolist() if np.iscomplexobj(value) else None}
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {k: encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    return value


def decode(value):
    if isinstance(value, dict) and value.get("__ndarray__"):
        re = np.array(value["real"], dtype=float).reshape(value["shape"])
        if value["imag"] is None:
            return re
        return re + 1j * np.array(value["imag"], dtype=float).reshape(value["shape"])
    if isinstance(value, dict):
        return {k: decode(v) for k, v in value.items()}
    if isinstance(value, list):
        return [decode(v) for v in value]
    return value


# Scalar checks ----------------------------------------------------------------------

def lemma_slack(x, y):
    """``((e^{-2x} + e^{-2y})/2)(x - y)² - (e^{-x} - e^{-y})²``; vectorized."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    # e^{-x} - e^{-y} = e^{-x}(1 - e^{x-y}), accurate when x ≈ y.
    diff = -np.exp(-x) * np.expm1(x - y)
    return 0.5 * (np.exp(-2 * x) + np.exp(-2 * y)) * (x - y) ** 2 - diff ** 2


def check_lemma(x: float, y: float) -> float:
    return float(lemma_slack(x, y))


def flipped_lemma_slack(x, y):
    """The lemma with its inequality reversed; fails for almost every input."""
    return -lemma_slack(x, y)


def check_hermite_hadamard(f: Callable, x: float, y: float, tol: float = 1e-13) -> float:
    """``(f(x) + f(y))/2 · (y - x) - ∫_x^y f``; nonnegative for convex ``f``."""
    if y < x:
        raise ValueError("need x <= y")
    integral = quad_interval(lambda t: np.asarray(f(t), dtype=float), x, y, tol,
                             atol=1e-15).value
    return 0.5 * (float(f(x)) + float(f(y))) * (y - x) - integral


def check_commutator_relaxation(a, rho, c: float) -> float:
    """``2 tr((A - c)² ρ) - tr(-[A, √ρ]²)``."""
    a = linalg.check_hermitian(a, "A")
    rho = as_density(rho)
    if a.shape[0] != rho.dim:
        raise linalg.DimensionError(f"A dim {a.shape[0]} != state dim {rho.dim}")
    x = rho.sqrt
    lhs = linalg.frobenius_sq(a @ x - x @ a)
    shifted = a - c * np.eye(rho.dim)
    rhs = 2.0 * linalg.frobenius_sq(shifted @ x)
    return rhs - lhs


def check_sum_inequality(a, b) -> float:
    """``tr A†A + tr B†B - tr(A†B + AB†)`` (equals ``‖A - B‖_F²``, computed termwise)."""
    a, b = np.asarray(a), np.asarray(b)
    lhs = 2.0 * np.vdot(a, b).real
    return linalg.frobenius_sq(a) + linalg.frobenius_sq(b) - lhs


# Proof chain ------------------------------------------------------------------------

@dataclass
class ChainResult:
    """Slack of every link; ``deltas`` are ``-ln w_ν`` of the system state."""

    slacks: dict
    deltas: np.ndarray | None
    notes: list[str]


def _identity_slack(a: float, b: float, scale: float) -> float:
    return -abs(a - b) / max(scale, 1.0)


def check_proof_chain(h_s, h_int, rho_s, h_b, beta: float) -> ChainResult:
    """Evaluate every link of the two temperature-explicit derivations.

    Links (``ρ0 = ρS ⊗ ρB``, ``H = H^S + H^int``, ``Y = [H^int, √ρB]``,
    ``C = [H^int, H^B]``, ``G = βH^B − ln ρS``):

    ``split``
        ``‖[H, √ρ0]‖² ≤ 2(‖Y√ρS‖² + ‖[H, √ρS]√ρB‖²)``.
    ``eigenbasis``, ``anticommutator``
        ``‖Y√ρS‖²`` equals its product-eigenbasis sum and ``-½tr(Y{Y, ρS})``.
    ``lemma_termwise``
        the eigenbasis sum is bounded term by term through the lemma.
    ``polished``
        the bounded sum equals ``(β²/8) tr(-C{C, ρS}ρB)``.
    ``t_trick``
        end to end: the temperature-explicit bound ≥ skew information.
    ``log_eigenbasis``, ``log_lemma``, ``log_polished``, ``log_t_trick``
        the same four steps for the ``G`` variant (skipped for singular ρS).
    """
    rho_s = as_density(rho_s)
    h_s = linalg.check_hermitian(h_s, "h_s")
    h_int = linalg.check_hermitian(h_int, "h_int")
    h_b = linalg.check_hermitian(h_b, "h_b")
    if not beta >= 0:
        raise ValueError("beta must be >= 0")
    ds, db = rho_s.dim, h_b.shape[0]
    if h_s.shape[0] != ds or h_int.shape[0] != ds * db:
        raise linalg.DimensionError("dimension mismatch in proof-chain inputs")
    rho_b = thermal_state(beta, h_b)
    eye_s, eye_b = np.eye(ds), np.eye(db)
    h = np.kron(h_s, eye_b) + h_int
    sq_s = np.kron(rho_s.sqrt, eye_b)
    sq_b = np.kron(eye_s, rho_b.sqrt)
    x = sq_s @ sq_b

    lhs = linalg.frobenius_sq(h @ x - x @ h)
    y = h_int @ sq_b - sq_b @ h_int
    t1 = linalg.frobenius_sq(y @ sq_s)
    t2 = linalg.frobenius_sq((h @ sq_s - sq_s @ h) @ sq_b)
    rs_full = np.kron(rho_s.matrix, eye_b)
    t1_anti = float(-0.5 * np.trace(y @ (y @ rs_full + rs_full @ y)).real)

    # Product eigenbasis: eigenvectors of ρS and of H^B.
    w, u_s = np.linalg.eigh(rho_s.matrix)
    w = np.clip(w, 0.0, None)
    energies, u_b = np.linalg.eigh(h_b)
    energies = energies - energies[0]
    pops = np.exp(-beta * energies)
    pops /= pops.sum()
    amp = np.sqrt(pops)
    u = np.kron(u_s, u_b)

    def elements(op):
        m = u.conj().T @ op @ u
        return np.abs(m.reshape(ds, db, ds, db)) ** 2  # [μ, m, ν, n]

    hint2 = elements(h_int)
    wsum = w[:, None, None, None] + w[None, None, :, None]
    da = (amp[None, :, None, None] - amp[None, None, None, :]) ** 2
    de2 = (energies[None, :, None, None] - energies[None, None, None, :]) ** 2
    ps = pops[None, :, None, None] + pops[None, None, None, :]
    s1 = 0.5 * float(np.sum(da * wsum * hint2))
    s2 = 0.5 * beta ** 2 / 8.0 * float(np.sum(ps * de2 * wsum * hint2))
    hb = np.kron(eye_s, h_b)
    comm = h_int @ hb - hb @ h_int
    polished = beta ** 2 / 8.0 * (linalg.frobenius_sq(sq_s @ comm @ sq_b)
                                  + linalg.frobenius_sq(comm @ x))
    scale = max(lhs, t1, t2, s2, 1.0)

    drive = (h_s, h_int)
    skew = skew_information(rho_s, rho_b, h)
    slacks = {
        "split": 2.0 * (t1 + t2) - lhs,
        "eigenbasis": _identity_slack(t1, s1, scale),
        "anticommutator": _identity_slack(t1, t1_anti, scale),
        "lemma_termwise": s2 - s1,
        "polished": _identity_slack(s2, polished, scale),
        "t_trick": bounds.t_trick_bound(drive, rho_s, rho_b, h_b, beta) - skew,
    }
    notes: list[str] = []
    deltas = None
    if np.min(w) > 0:
        deltas = -np.log(w)
        h2 = elements(h)
        q = (w[:, None] * pops[None, :])  # weights of |μ, m⟩
        g = (beta * energies[None, :] + deltas[:, None])
        qa, qb = q[:, :, None, None], q[None, None, :, :]
        ga, gb = g[:, :, None, None], g[None, None, :, :]
        l1 = float(np.sum((np.sqrt(qb) - np.sqrt(qa)) ** 2 * h2))
        l2 = float(np.sum((qa + qb) * (gb - ga) ** 2 * h2)) / 8.0
        gen = beta * hb - np.kron(rho_s.log, eye_b)
        l2_trace = 0.25 * linalg.frobenius_sq((h @ gen - gen @ h) @ x)
        lscale = max(lhs, l2, 1.0)
        slacks.update({
            "log_eigenbasis": _identity_slack(lhs, l1, lscale),
            "log_lemma": l2 - l1,
            "log_polished": _identity_slack(l2, l2_trace, lscale),
            "log_t_trick": bounds.log_t_trick_bound(drive, rho_s, rho_b, h_b, beta) - skew,
        })
    else:
        notes.append("log links skipped: system state is singular")
    return ChainResult({k: float(v) for k, v in slacks.items()}, deltas, notes)


def check_dominance(h_s, h_int, rho_s, h_b, beta: float) -> dict:
    """Each matrix-level bound minus the exact skew information."""
    rho_s = as_density(rho_s)
    rho_b = thermal_state(beta, h_b)
    drive = (h_s, h_int)
    exact = bounds.skew_rate(drive, rho_s, rho_b)
    out = {
        "relaxed": bounds.relaxed_bound(drive, rho_s, rho_b) - exact,
        "t_trick": bounds.t_trick_bound(drive, rho_s, rho_b, h_b, beta) - exact,
    }
    try:
        out["log_t_trick"] = bounds.log_t_trick_bound(drive, rho_s, rho_b, h_b, beta) - exact
    except StateError:
        pass
    return out


# Suite --------------------------------------------------------------------------------

def _sample_lemma(rng, n):
    return {"x": rng.uniform(-5, 5, n), "y": rng.uniform(-5, 5, n)}


CONVEX_FUNCTIONS = {
    "exp_neg": lambda t: np.exp(-np.asarray(t)),
    "square": lambda t: np.asarray(t) ** 2,
    "cosh": lambda t: np.cosh(np.asarray(t)),
    "abs_cubed": lambda t: np.abs(np.asarray(t)) ** 3,
    "linear": lambda t: 2.0 * np.asarray(t) - 1.0,
}


def _hh_eval(inp):
    return check_hermite_hadamard(CONVEX_FUNCTIONS[inp["f"]], inp["x"], inp["y"])


def _hh_sample(rng):
    x, y = np.sort(rng.uniform(-3, 3, 2))
    return {"f": str(rng.choice(sorted(CONVEX_FUNCTIONS))), "x": float(x), "y": float(y)}


def _relax_sample(rng):
    d = int(rng.choice([2, 4, 8]))
    a = random_hermitian(d, rng)
    rank = int(rng.integers(1, d + 1))
    rho = random_density_matrix(d, rng, rank).matrix
    mode = int(rng.integers(3))
    c = float(np.trace(a @ rho).real) if mode == 0 else (0.0 if mode == 1 else float(rng.normal(0, 2)))
    return {"a": a, "rho": rho, "c": c}


def _relax_eval(inp):
    return check_commutator_relaxation(inp["a"], inp["rho"], inp["c"])


def _sum_sample(rng):
    d = int(rng.integers(1, 9))
    shape = (d, d)
    return {"a": rng.normal(size=shape) + 1j * rng.normal(size=shape),
            "b": rng.normal(size=shape) + 1j * rng.normal(size=shape)}


def _sum_eval(inp):
    return check_sum_inequality(inp["a"], inp["b"])


def _composite_sample(rng, dims_s=(2, 3), dims_b=(2, 3, 4, 8), beta_range=(0.1, 10.0)):
    ds = int(rng.choice(dims_s))
    db = int(rng.choice(dims_b))
    return {
        "h_s": random_hermitian(ds, rng),
        "h_int": random_hermitian(ds * db, rng),
        "rho_s": random_density_matrix(ds, rng).matrix,
        "h_b": random_hermitian(db, rng),
        "beta": float(rng.uniform(*beta_range)),
    }


def _dominance_sample(rng):
    return _composite_sample(rng, dims_s=(2,), dims_b=(2, 4, 8, 16, 32))


@dataclass(frozen=True)
class Check:
    """A named randomized check.

    ``evaluate`` maps decoded inputs to a dict of ``{link: slack}``; scalar
    checks have a single link named after the check.
    """

    name: str
    sample: Callable
    evaluate: Callable
    trials: int
    threshold: float = DEFAULT_THRESHOLD
    vectorized: bool = False


def _single(fn):
    return lambda inp: {"": fn(inp)}


def _chain_eval(inp):
    r = check_proof_chain(inp["h_s"], inp["h_int"], inp["rho_s"], inp["h_b"], inp["beta"])
    return r.slacks


DEFAULT_CHECKS = (
    Check("lemma", _sample_lemma, lambda inp: {"": lemma_slack(inp["x"], inp["y"])},
          100_000, LEMMA_THRESHOLD, vectorized=True),
    Check("hermite_hadamard", _hh_sample, _single(_hh_eval), 200, 1e-10),
    Check("commutator_relaxation", _relax_sample, _single(_relax_eval), 10_000,
          RELAXATION_THRESHOLD),
    Check("sum_inequality", _sum_sample, _single(_sum_eval), 10_000),
    Check("proof_chain", _composite_sample, _chain_eval, 1_000),
    Check("dominance", _dominance_sample,
          lambda inp: check_dominance(inp["h_s"], inp["h_int"], inp["rho_s"], inp["h_b"],
                                      inp["beta"]), 200),
)

def _spin_oracle_sample(rng):
    n = int(rng.integers(1, 5))
    return {"omega": rng.uniform(0.0, 2.0, n), "g": rng.uniform(0.5, 1.5, n),
            "gamma": float(rng.uniform(0.2, 2.0)), "h_s": random_hermitian(2, rng),
            "s_op": random_hermitian(2, rng), "rho_s": random_density_matrix(2, rng).matrix,
            "beta": float(rng.uniform(0.0, 5.0))}


def _spin_oracle_eval(inp):
    from .closedforms import SpinBathSpec, wy_spin_bath
    from .models import spin_bath_model

    spec = SpinBathSpec(inp["omega"], inp["g"], inp["gamma"], inp["s_op"])
    closed = wy_spin_bath(spec, inp["h_s"], inp["rho_s"], inp["beta"])
    model = spin_bath_model(spec, inp["h_s"])
    brute = skew_information(inp["rho_s"], thermal_state(inp["beta"], model.h_b), model.drive)
    return {"": _identity_slack(closed, brute, max(abs(brute), 1.0))}


def _polygamma_sample(rng):
    return {"m": int(rng.integers(1, 4)), "z": float(10 ** rng.uniform(-0.7, 1.3))}


def _polygamma_eval(inp):
    from .specfun import polygamma, polygamma_quadrature

    ref = polygamma_quadrature(inp["m"], inp["z"]).value
    return {"": -abs(polygamma(inp["m"], inp["z"]) - ref) / abs(ref)}


ORACLE_CHECKS = (
    Check("spin_bath_closed_form", _spin_oracle_sample, _spin_oracle_eval, 200, 1e-8),
    Check("polygamma_quadrature", _polygamma_sample, _polygamma_eval, 60, 1e-9),
)

NEGATIVE_CONTROL = Check("flipped_lemma", _sample_lemma,
                         lambda inp: {"": flipped_lemma_slack(inp["x"], inp["y"])},
                         1_000, LEMMA_THRESHOLD, vectorized=True)

CHECKS_BY_NAME = {c.name: c for c in DEFAULT_CHECKS + ORACLE_CHECKS + (NEGATIVE_CONTROL,)}


def _report_name(check: Check, link: str) -> str:
    return check.name if not link else f"{check.name}.{link}"


def run_check(check: Check, seed: int, trials: int | None = None) -> list[InequalityReport]:
    """Run one check; returns one report per link."""
    trials = check.trials if trials is None else trials
    rng = np.random.default_rng(seed)
    worst: dict[str, tuple[float, dict]] = {}
    counts: dict[str, int] = {}
    if check.vectorized:
        inputs = check.sample(rng, trials)
        for link, slack in check.evaluate(inputs).items():
            slack = np.asarray(slack)
            k = int(np.argmin(slack))
            worst[link] = (float(slack[k]), {key: float(v[k]) for key, v in inputs.items()})
            counts[link] = trials
    else:
        for _ in range(trials):
            inputs = check.sample(rng)
            for link, slack in check.evaluate(inputs).items():
                counts[link] = counts.get(link, 0) + 1
                if link not in worst or slack < worst[link][0]:
                    worst[link] = (float(slack), inputs)
    reports = []
    for link, (slack, inputs) in worst.items():
        case = {"check": check.name, "link": link, "seed": seed,
                "inputs": encode(inputs), "slack": slack}
        reports.append(InequalityReport(_report_name(check, link), counts[link],
                                        max(0.0, -slack), case, check.threshold, slack))
    return reports


def run_suite(seed: int = 0, checks=DEFAULT_CHECKS, trials: dict | None = None) -> list[InequalityReport]:
    """Run every check with an independent stream per check."""
    trials = trials or {}
    reports = []
    for i, check in enumerate(checks):
        reports.extend(run_check(check, seed * 1_000_003 + i, trials.get(check.name)))
    return reports


def replay(case: dict) -> float:
    """Recompute the slack of a serialized worst case."""
    check = CHECKS_BY_NAME[case["check"]]
    inputs = decode(case["inputs"])
    if check.vectorized:
        inputs = {k: np.array([v]) for k, v in inputs.items()}
        value = check.evaluate(inputs)[case["link"]]
        return float(np.asarray(value)[0])
    return float(check.evaluate(inputs)[case["link"]])


def reports_to_json(reports: list[InequalityReport]) -> str:
    return json.dumps({"passed": all(r.passed for r in reports),
                       "reports": [r.to_dict() for r in reports]}, indent=1)


__all__ = [
    "InequalityReport", "ChainResult", "Check", "DEFAULT_CHECKS", "ORACLE_CHECKS",
    "NEGATIVE_CONTROL", "CHECKS_BY_NAME",
    "check_lemma", "lemma_slack", "check_hermite_hadamard", "check_commutator_relaxation",
    "check_sum_inequality", "check_proof_chain", "check_dominance",
    "run_check", "run_suite", "replay", "encode", "decode", "reports_to_json",
]
