"""Command line driver: ``thermoqsl bounds | fig3 | verify``.

Every run is described by a JSON config (see ``RunConfig``); scalar flags
override fields of the file. Each CSV carries the fully resolved config and
seed in ``#`` header lines, so any output can be regenerated with
``--config <that csv>``.

Exit status: 0 success, 1 configuration error, 2 verification failure,
3 internal numeric inconsistency.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import shutil
import sys
import tempfile
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, bounds, ineqlab, linalg
from .bounds import NumericalInconsistencyError
from .closedforms import (OhmicSpectralDensity, SpinBathSpec, qubit_bounds_from_vector,
                          spectral_integrals)
from .propagator import (BoundViolation, CentralSpinInstance, Fig3Experiment,
                         ProductTrajectory, TrajectoryRecord, default_times)
from .specfun import QuadratureError
from .states import DensityMatrix, StateError, bloch_state, polarization, thermal_state
from .svgplot import line_plot

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_NUMERIC = 0, 1, 2, 3

MODELS = ("spin-boson", "central-spin", "custom-matrices")
BATHS = ("continuum", "discrete")
FORMATS = ("csv", "svg")
MAX_BATH_SPINS = 11
U64 = 2 ** 64

DEFAULT_PANELS = {
    "bounds": [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.7071067811865476, 0.0, 0.7071067811865476],
               [0.0, 0.0, 0.6], [0.6, 0.0, 0.0], [0.4242640687119285, 0.0, 0.4242640687119285]],
    "fig3": [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.5]],
}


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


# Configuration ------------------------------------------------------------------------

def _parse_matrix(value, name: str) -> np.ndarray:
    """Nested lists of reals, of ``[re, im]`` pairs, or ``{"real": ..., "imag": ...}``."""
    try:
        if isinstance(value, dict):
            re = np.array(value["real"], dtype=float)
            im = np.array(value.get("imag", np.zeros_like(re)), dtype=float)
            m = re + 1j * im
        else:
            arr = np.array(value, dtype=float)
            m = arr[..., 0] + 1j * arr[..., 1] if arr.ndim == 3 else arr
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: cannot parse matrix ({exc})") from None
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ConfigError(f"{name}: expected a non-empty square matrix, got shape {m.shape}")
    return m


@dataclass
class RunConfig:
    """Resolved run configuration.

    ``beta_grid``: ``{"min", "max", "points"}`` (log spaced).
    ``time_grid``: ``{"points", "span"}`` with span in units of ``t_max``,
    or ``{"points", "t_end"}`` for an absolute end time.
    ``matrices`` (custom model): ``h_s``, ``h_int`` (composite, system
    factor first), ``h_b`` and optionally a list ``rho_s`` of system states.
    """

    model: str = "spin-boson"
    delta: float = 1.0
    gamma: float = 1.0
    alpha: float = 1.0
    beta: float = 1.0
    bath: str = "continuum"
    n_bath: int = 10
    seed: int | None = None
    polarizations: list | None = None
    beta_grid: dict = field(default_factory=lambda: {"min": 0.05, "max": 20.0, "points": 60})
    time_grid: dict = field(default_factory=lambda: {"points": 400, "span": 1.25})
    formats: list = field(default_factory=lambda: ["csv"])
    log_cross_term: bool = True
    matrices: dict | None = None
    trials: dict | None = None
    negative_control: bool = False

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config: top level must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"{unknown[0]}: unknown config field")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    # -- validation ------------------------------------------------------------
    def validate(self, command: str) -> "RunConfig":
        if self.model not in MODELS:
            raise ConfigError(f"model: must be one of {MODELS}, got {self.model!r}")
        if self.bath not in BATHS:
            raise ConfigError(f"bath: must be one of {BATHS}, got {self.bath!r}")
        for name in ("delta", "gamma", "alpha", "beta"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ConfigError(f"{name}: must be a finite number, got {v!r}")
            setattr(self, name, float(v))
        if self.alpha <= 0:
            raise ConfigError("alpha: must be positive")
        if self.beta < 0:
            raise ConfigError("beta: must be nonnegative")
        if not isinstance(self.n_bath, int) or isinstance(self.n_bath, bool) or self.n_bath < 1:
            raise ConfigError(f"n_bath: must be a positive integer, got {self.n_bath!r}")
        if self.seed is not None:
            if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < U64:
                raise ConfigError(f"seed: must be an integer in [0, 2^64), got {self.seed!r}")
        if not isinstance(self.formats, list) or not self.formats or \
                any(f not in FORMATS for f in self.formats):
            raise ConfigError(f"formats: must be a non-empty subset of {FORMATS}")
        self.formats = [f for f in FORMATS if f in self.formats]
        if not isinstance(self.log_cross_term, bool):
            raise ConfigError("log_cross_term: must be true or false")
        self._validate_beta_grid()
        self._validate_time_grid()
        if self.polarizations is None and command in DEFAULT_PANELS:
            self.polarizations = [list(p) for p in DEFAULT_PANELS[command]]
        if self.polarizations is not None:
            self._validate_polarizations()
        if self.model == "custom-matrices" and command != "verify":
            self._validate_matrices()
        if command == "fig3":
            if self.model == "spin-boson":
                raise ConfigError("model: fig3 needs a finite bath (central-spin or custom-matrices)")
            if self.model == "central-spin" and self.n_bath > MAX_BATH_SPINS:
                raise ConfigError(f"n_bath: at most {MAX_BATH_SPINS} bath spins for exact evolution")
        sampling = command in ("fig3", "verify") or (
            command == "bounds" and self.model == "central-spin" and self.bath == "discrete")
        if sampling and self.model != "custom-matrices" and self.seed is None:
            self.seed = 0
        if command == "verify" and self.seed is None:
            self.seed = 0
        if self.trials is not None:
            if not isinstance(self.trials, dict) or any(
                    k not in ineqlab.CHECKS_BY_NAME or not isinstance(v, int) or v < 1
                    for k, v in self.trials.items()):
                raise ConfigError("trials: must map check names to positive integers")
        if not isinstance(self.negative_control, bool):
            raise ConfigError("negative_control: must be true or false")
        return self

    def _validate_beta_grid(self):
        g = self.beta_grid
        if not isinstance(g, dict) or set(g) - {"min", "max", "points"}:
            raise ConfigError("beta_grid: expected an object with min, max, points")
        g = {"min": 0.05, "max": 20.0, "points": 60, **g}
        lo, hi, n = g["min"], g["max"], g["points"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ConfigError("beta_grid.points: must be a positive integer")
        try:
            lo, hi = float(lo), float(hi)
        except (TypeError, ValueError):
            raise ConfigError("beta_grid: min and max must be numbers") from None
        if not (lo > 0 and hi >= lo and math.isfinite(hi)) or (n > 1 and hi == lo):
            raise ConfigError("beta_grid: need 0 < min < max (ascending, nonempty)")
        self.beta_grid = {"min": lo, "max": hi, "points": n}

    def _validate_time_grid(self):
        g = self.time_grid
        if not isinstance(g, dict) or set(g) - {"points", "span", "t_end"}:
            raise ConfigError("time_grid: expected an object with points and span or t_end")
        if "span" in g and "t_end" in g:
            raise ConfigError("time_grid: give either span or t_end, not both")
        g = dict(g)
        g.setdefault("points", 400)
        if "t_end" not in g:
            g.setdefault("span", 1.25)
        n = g["points"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 2:
            raise ConfigError("time_grid.points: must be an integer >= 2")
        key = "span" if "span" in g else "t_end"
        try:
            v = float(g[key])
        except (TypeError, ValueError):
            raise ConfigError(f"time_grid.{key}: must be a number") from None
        if not (v > 0 and math.isfinite(v)):
            raise ConfigError(f"time_grid.{key}: must be positive")
        self.time_grid = {"points": n, key: v}

    def _validate_polarizations(self):
        if not isinstance(self.polarizations, list) or not self.polarizations:
            raise ConfigError("polarizations: must be a non-empty list of 3-vectors")
        out = []
        for k, p in enumerate(self.polarizations):
            try:
                v = np.array(p, dtype=float)
            except (TypeError, ValueError):
                raise ConfigError(f"polarizations[{k}]: not a numeric 3-vector") from None
            if v.shape != (3,) or not np.all(np.isfinite(v)):
                raise ConfigError(f"polarizations[{k}]: not a numeric 3-vector")
            if np.linalg.norm(v) > 1.0 + 1e-12:
                raise ConfigError(f"polarizations[{k}]: |p| = {np.linalg.norm(v)!r} exceeds 1")
            out.append([float(x) for x in v])
        self.polarizations = out

    def _validate_matrices(self):
        m = self.matrices
        if not isinstance(m, dict):
            raise ConfigError("matrices: custom-matrices model needs h_s, h_int, h_b")
        for key in ("h_s", "h_int", "h_b"):
            if key not in m:
                raise ConfigError(f"matrices.{key}: missing")
        h_s = _parse_matrix(m["h_s"], "matrices.h_s")
        h_b = _parse_matrix(m["h_b"], "matrices.h_b")
        h_int = _parse_matrix(m["h_int"], "matrices.h_int")
        for key, a in (("h_s", h_s), ("h_b", h_b), ("h_int", h_int)):
            if not linalg.is_hermitian(a):
                raise ConfigError(f"matrices.{key}: not Hermitian "
                                  f"(max asymmetry {linalg.hermitian_asymmetry(a):.3e})")
        ds, db = h_s.shape[0], h_b.shape[0]
        if h_int.shape[0] != ds * db:
            raise ConfigError(f"matrices.h_int: dimension {h_int.shape[0]} != {ds} x {db}")
        if ds * db > linalg.MAX_COMPOSITE_DIM:
            raise ConfigError(f"matrices: composite dimension {ds * db} exceeds the cap")
        if "rho_s" in m:
            states = m["rho_s"]
            if not isinstance(states, list) or not states:
                raise ConfigError("matrices.rho_s: must be a non-empty list of matrices")
            for k, r in enumerate(states):
                a = _parse_matrix(r, f"matrices.rho_s[{k}]")
                if a.shape[0] != ds:
                    raise ConfigError(f"matrices.rho_s[{k}]: dimension {a.shape[0]} != {ds}")
                try:
                    DensityMatrix(a)
                except (linalg.LinalgError, StateError) as exc:
                    raise ConfigError(f"matrices.rho_s[{k}]: {exc}") from None
        elif ds != 2:
            raise ConfigError("matrices.rho_s: required unless the system is a qubit")
        if set(m) - {"h_s", "h_int", "h_b", "rho_s"}:
            raise ConfigError(f"matrices.{sorted(set(m) - {'h_s', 'h_int', 'h_b', 'rho_s'})[0]}: unknown")

    # -- derived objects ---------------------------------------------------------
    def betas(self) -> np.ndarray:
        g = self.beta_grid
        return np.geomspace(g["min"], g["max"], g["points"])

    def custom(self):
        m = self.matrices
        h_s = _parse_matrix(m["h_s"], "h_s")
        h_int = _parse_matrix(m["h_int"], "h_int")
        h_b = _parse_matrix(m["h_b"], "h_b")
        if "rho_s" in m:
            states = [DensityMatrix(_parse_matrix(r, "rho_s")) for r in m["rho_s"]]
            labels = [f"state{k}" for k in range(len(states))]
        else:
            states = [bloch_state(*polarization(p)) for p in self.polarizations]
            labels = [_p_label(p) for p in self.polarizations]
        return h_s, h_int, h_b, states, labels


def load_config(path: str | None) -> dict:
    """Read a JSON config, or the config embedded in a CSV written by this tool."""
    if path is None:
        return {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"--config: cannot read {path!r} ({exc.strerror})") from None
    if text.lstrip().startswith("#"):
        for line in text.splitlines():
            if line.startswith("# config: "):
                text = line[len("# config: "):]
                break
        else:
            raise ConfigError(f"--config: {path!r} has no embedded config line")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--config: invalid JSON in {path!r} ({exc.msg} at line {exc.lineno})") from None


def resolve_config(args: argparse.Namespace) -> RunConfig:
    raw = load_config(args.config)
    overrides = {}
    if args.model is not None:
        overrides["model"] = args.model
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.format is not None:
        overrides["formats"] = ["csv", "svg"] if args.format == "both" else [args.format]
    grid = dict(raw.get("beta_grid") or {}) if isinstance(raw.get("beta_grid", {}), dict) else None
    for flag, key in (("beta_min", "min"), ("beta_max", "max"), ("beta_points", "points")):
        v = getattr(args, flag, None)
        if v is not None:
            if grid is None:
                raise ConfigError("beta_grid: expected an object with min, max, points")
            grid[key] = v
    if grid is not None and grid != (raw.get("beta_grid") or {}):
        overrides["beta_grid"] = grid
    merged = {**raw, **overrides}
    if args.command == "fig3":
        merged.setdefault("model", "central-spin")
    return RunConfig.from_dict(merged).validate(args.command)


# Output -----------------------------------------------------------------------------------

def fmt_number(v) -> str:
    """17 significant digits: round-trip safe for doubles."""
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.17g}"


def _timestamp() -> str | None:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is None:
        return None
    try:
        return datetime.fromtimestamp(int(epoch), tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    except ValueError:
        raise ConfigError(f"SOURCE_DATE_EPOCH: not an integer ({epoch!r})") from None


@dataclass
class ResultTable:
    columns: list
    rows: list
    metadata: dict

    def __post_init__(self):
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ValueError("result table is not rectangular")

    def to_csv(self) -> str:
        lines = []
        for key, value in self.metadata.items():
            text = value if isinstance(value, str) else json.dumps(value, sort_keys=True,
                                                                 separators=(",", ":"))
            lines.append(f"# {key}: {text}")
        lines.append(",".join(self.columns))
        for r in self.rows:
            lines.append(",".join(fmt_number(v) for v in r))
        return "\n".join(lines) + "\n"

    def column(self, name: str) -> np.ndarray:
        k = self.columns.index(name)
        return np.array([r[k] for r in self.rows], dtype=float)


def read_csv(path) -> ResultTable:
    """Parse a CSV written by this tool back into a table."""
    meta, columns, rows = {}, None, []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            try:
                meta[key] = json.loads(value)
            except json.JSONDecodeError:
                meta[key] = value
        elif columns is None:
            columns = line.split(",")
        elif line:
            rows.append([float(x) for x in line.split(",")])
    return ResultTable(columns or [], rows, meta)


def _metadata(command: str, cfg: RunConfig, **extra) -> dict:
    meta = {"thermoqsl": __version__, "command": command, "config": cfg.to_dict(),
            "seed": "none" if cfg.seed is None else str(cfg.seed)}
    meta.update(extra)
    ts = _timestamp()
    if ts is not None:
        meta["timestamp"] = ts
    return meta


def _p_label(p) -> str:
    return "p=(" + ",".join(f"{x:.3g}" for x in p) + ")"


class Staging:
    """Collect output files in a private directory; publish all or nothing."""

    def __init__(self, out: Path):
        self.out = out
        self.files: dict[str, str] = {}

    def add(self, name: str, text: str):
        if name in self.files:
            raise RuntimeError(f"duplicate output {name}")
        self.files[name] = text

    def publish(self) -> list[Path]:
        self.out.mkdir(parents=True, exist_ok=True)
        tmp = Path(tempfile.mkdtemp(prefix=".thermoqsl-", dir=self.out))
        try:
            for name, text in self.files.items():
                (tmp / name).write_text(text, encoding="utf-8", newline="\n")
            written = []
            for name in self.files:
                os.replace(tmp / name, self.out / name)
                written.append(self.out / name)
            return written
        finally:
            shutil.rmtree(tmp, ignore_errors=True)


# Commands --------------------------------------------------------------------------------

BOUND_COLUMNS = ("relaxed", "t_trick", "log_t_trick", "exact_wy")


def _qubit_columns(cfg: RunConfig, p_vec, betas):
    kind = "boson" if cfg.model == "spin-boson" else "spin"
    if cfg.bath == "continuum":
        source = OhmicSpectralDensity(cfg.alpha)
        instance = None
    elif kind == "spin":
        instance = CentralSpinInstance.sample(cfg.n_bath, cfg.seed, delta=cfg.delta,
                                              gamma=cfg.gamma)
        source = SpinBathSpec(instance.omega, instance.g, cfg.gamma, np.eye(2))
    else:
        from .closedforms import BosonicBathSpec
        omega, g = OhmicSpectralDensity(cfg.alpha).discretize(cfg.n_bath)
        source = BosonicBathSpec(omega, g, cfg.gamma, np.eye(2))
    p, _ = polarization(p_vec)
    pure = p >= 1.0
    rows = []
    for beta in betas:
        ints = spectral_integrals(source, beta, kind=kind)
        qb = qubit_bounds_from_vector(cfg.delta, cfg.gamma, beta, p_vec, ints,
                                      log_term=not pure, log_cross_term=cfg.log_cross_term)
        rows.append([beta, qb.relaxed, qb.t_trick] + ([] if pure else [qb.log_t_trick])
                    + [qb.exact_wy])
    return rows, pure, instance


def cmd_bounds(cfg: RunConfig, stage: Staging) -> int:
    betas = cfg.betas()
    if cfg.model == "custom-matrices":
        h_s, h_int, h_b, states, labels = cfg.custom()
        panels = []
        for label, rho_s in zip(labels, states):
            pure = bool(np.min(rho_s.eigenvalues) < 1e-12)
            rows = []
            for beta in betas:
                rho_b = thermal_state(beta, h_b)
                drive = (h_s, h_int)
                row = [beta, bounds.relaxed_bound(drive, rho_s, rho_b),
                       bounds.t_trick_bound(drive, rho_s, rho_b, h_b, beta)]
                if not pure:
                    row.append(bounds.log_t_trick_bound(drive, rho_s, rho_b, h_b, beta))
                row.append(bounds.skew_rate(drive, rho_s, rho_b))
                rows.append(row)
            panels.append((label, {"state": label}, rows, pure))
    else:
        panels = []
        for p_vec in cfg.polarizations:
            rows, pure, inst = _qubit_columns(cfg, p_vec, betas)
            extra = {"p": p_vec}
            if inst is not None:
                extra["bath_g"] = inst.g.tolist()
                extra["bath_omega"] = inst.omega.tolist()
            panels.append((_p_label(p_vec), extra, rows, pure))
    for k, (label, extra, rows, pure) in enumerate(panels):
        cols = ["beta"] + [c for c in BOUND_COLUMNS if not (pure and c == "log_t_trick")]
        meta = _metadata("bounds", cfg, panel=extra)
        if pure:
            meta["absent"] = "log_t_trick (undefined for a singular system state)"
        table = ResultTable(cols, rows, meta)
        name = f"bounds_panel{k}"
        if "csv" in cfg.formats:
            stage.add(f"{name}.csv", table.to_csv())
        if "svg" in cfg.formats:
            series = {c: (table.column("beta"), table.column(c)) for c in cols[1:]}
            stage.add(f"{name}.svg", line_plot(series, title=f"{cfg.model} {label}",
                                               xlabel="beta", ylabel="I", logx=True))
    return EXIT_OK


def _custom_trajectory(cfg: RunConfig, rho_s: DensityMatrix, h_s, h_int, h_b) -> TrajectoryRecord:
    rho_b = thermal_state(cfg.beta, h_b)
    drive = (h_s, h_int)
    rate = bounds.skew_rate(drive, rho_s, rho_b)
    times = _time_grid(cfg, rate)
    curve = bounds.bound_curve(times, rate, constant=True)
    ds, db = h_s.shape[0], h_b.shape[0]
    h = np.kron(h_s, np.eye(db)) + h_int + np.kron(np.eye(ds), h_b)
    traj = ProductTrajectory(h, rho_s, rho_b)
    return TrajectoryRecord(times, traj.hellinger(times), traj.reduced_hellinger(times),
                            curve.d_bound, curve.phase, curve.t_max, float(rate), cfg.seed)


def _time_grid(cfg: RunConfig, rate: float) -> np.ndarray:
    g = cfg.time_grid
    if "t_end" in g:
        return np.linspace(0.0, g["t_end"], g["points"])
    return default_times(rate, g["points"], g["span"])


def cmd_fig3(cfg: RunConfig, stage: Staging) -> int:
    records = []
    if cfg.model == "custom-matrices":
        h_s, h_int, h_b, states, labels = cfg.custom()
        for label, rho_s in zip(labels, states):
            records.append((label, {"state": label},
                            _custom_trajectory(cfg, rho_s, h_s, h_int, h_b)))
    else:
        inst = CentralSpinInstance.sample(cfg.n_bath, cfg.seed, delta=cfg.delta,
                                          gamma=cfg.gamma, beta=cfg.beta)
        exp = Fig3Experiment(inst)
        for p_vec in cfg.polarizations:
            rec = exp.run(p_vec, _time_grid(cfg, exp.rate(p_vec)))
            records.append((_p_label(p_vec), {"p": p_vec, "bath_g": inst.g.tolist(),
                                              "bath_omega": inst.omega.tolist()}, rec))
    for label, extra, rec in records:
        rec.check()  # raises BoundViolation before anything is written
    cols = ["t", "hellinger", "reduced_hellinger", "bound", "phase", "valid"]
    for k, (label, extra, rec) in enumerate(records):
        rows = [[t, d, r, b, ph, 1.0 if v else 0.0] for t, d, r, b, ph, v in
                zip(rec.times, rec.hellinger, rec.reduced_hellinger, rec.bound, rec.phase,
                    rec.valid)]
        extra = {**extra, "rate": fmt_number(rec.rate), "t_max": fmt_number(rec.t_max)}
        table = ResultTable(cols, rows, _metadata("fig3", cfg, panel=extra))
        name = f"fig3_panel{k}"
        if "csv" in cfg.formats:
            stage.add(f"{name}.csv", table.to_csv())
        if "svg" in cfg.formats:
            series = {"D(rho0, rho_t)": (rec.times, rec.hellinger),
                      "reduced D": (rec.times, rec.reduced_hellinger),
                      "speed limit": (rec.times, rec.bound)}
            stage.add(f"{name}.svg", line_plot(series, title=label, xlabel="t", ylabel="D"))
    return EXIT_OK


def cmd_verify(cfg: RunConfig, stage: Staging) -> int:
    checks = ineqlab.DEFAULT_CHECKS + ineqlab.ORACLE_CHECKS
    if cfg.negative_control:
        checks = checks + (ineqlab.NEGATIVE_CONTROL,)
    reports = ineqlab.run_suite(cfg.seed, checks, cfg.trials)
    summary = {"thermoqsl": __version__, "config": cfg.to_dict(),
               "passed": all(r.passed for r in reports),
               "reports": [r.to_dict() for r in reports]}
    stage.add("verify_report.json", json.dumps(summary, indent=1, sort_keys=True) + "\n")
    for r in reports:
        if not r.passed:
            stage.add(f"replay_{r.name}.json", json.dumps(r.worst_case, indent=1) + "\n")
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name}: trials={r.trials} max_violation={r.max_violation:.3e} "
              f"(threshold {r.threshold:.0e})")
    return EXIT_OK if summary["passed"] else EXIT_VERIFY


def cmd_replay(path: str) -> int:
    try:
        case = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"--replay: cannot load {path!r} ({exc})") from None
    if not isinstance(case, dict) or case.get("check") not in ineqlab.CHECKS_BY_NAME:
        raise ConfigError(f"--replay: {path!r} is not a replay file")
    slack = ineqlab.replay(case)
    check = ineqlab.CHECKS_BY_NAME[case["check"]]
    same = slack == case.get("slack")
    name = case["check"] + (f".{case['link']}" if case.get("link") else "")
    print(json.dumps({"name": name, "slack": slack, "recorded_slack": case.get("slack"),
                      "identical": same}))
    return EXIT_OK if slack >= -check.threshold else EXIT_VERIFY


# Entry point ---------------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """Usage errors are configuration errors (exit 1), not argparse's 2,
    which is reserved for verification failures."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="thermoqsl",
        description="Quantum speed limits for a system coupled to a thermal bath.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file (or a CSV written by thermoqsl)")
        p.add_argument("--out", default=".", help="output directory (default: current)")
        p.add_argument("--seed", type=int, help="RNG seed, 0 <= seed < 2^64")
        p.add_argument("--format", choices=("csv", "svg", "both"), help="output format(s)")
        p.add_argument("--model", choices=MODELS)

    p = sub.add_parser("bounds", help="rate bounds over an inverse-temperature grid")
    common(p)
    p.add_argument("--beta-min", type=float)
    p.add_argument("--beta-max", type=float)
    p.add_argument("--beta-points", type=int)

    p = sub.add_parser("fig3", help="exact distance travelled versus the speed limit")
    common(p)

    p = sub.add_parser("verify", help="randomized inequality and oracle suite")
    common(p)
    p.add_argument("--replay", help="recompute the slack stored in a replay file")
    return parser


COMMANDS = {"bounds": cmd_bounds, "fig3": cmd_fig3, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "replay", None):
            return cmd_replay(args.replay)
        cfg = resolve_config(args)
        stage = Staging(Path(args.out))
        status = COMMANDS[args.command](cfg, stage)
        stage.publish()
        return status
    except ConfigError as exc:
        print(f"thermoqsl: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BoundViolation as exc:
        print(f"thermoqsl: verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (NumericalInconsistencyError, QuadratureError, ArithmeticError) as exc:
        print(f"thermoqsl: numeric inconsistency: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (linalg.LinalgError, StateError) as exc:
        print(f"thermoqsl: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
