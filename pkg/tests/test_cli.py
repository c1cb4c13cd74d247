import json
import os

import numpy as np
import pytest

from thermoqsl import __version__
from thermoqsl.cli import ConfigError, RunConfig, fmt_number, main, read_csv


def write_config(tmp_path, **fields):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(fields))
    return str(path)


def run(tmp_path, *argv, out="out"):
    return main([*argv, "--out", str(tmp_path / out)])


def test_bounds_default_panels(tmp_path):
    assert run(tmp_path, "bounds") == 0
    files = sorted(p.name for p in (tmp_path / "out").iterdir())
    assert files == [f"bounds_panel{k}.csv" for k in range(6)]
    t = read_csv(tmp_path / "out" / "bounds_panel0.csv")
    assert t.columns == ["beta", "relaxed", "t_trick", "exact_wy"]
    assert "log_t_trick" in t.metadata["absent"]
    assert t.metadata["thermoqsl"] == __version__
    assert len(t.rows) == 60
    np.testing.assert_allclose(t.column("beta")[[0, -1]], [0.05, 20.0])
    mixed = read_csv(tmp_path / "out" / "bounds_panel3.csv")
    assert mixed.columns == ["beta", "relaxed", "t_trick", "log_t_trick", "exact_wy"]
    assert "absent" not in mixed.metadata


def test_bounds_pure_z_panel_relaxed_equals_exact(tmp_path):
    cfg = write_config(tmp_path, polarizations=[[0, 0, 1]], beta_grid={"min": 0.1, "max": 5, "points": 25})
    assert run(tmp_path, "bounds", "--config", cfg) == 0
    t = read_csv(tmp_path / "out" / "bounds_panel0.csv")
    np.testing.assert_allclose(t.column("relaxed"), t.column("exact_wy"), rtol=1e-12)


def test_central_spin_continuum_k_spot_value(tmp_path):
    cfg = write_config(tmp_path, model="central-spin", polarizations=[[0, 0, 0]],
                       beta_grid={"min": 1, "max": 1, "points": 1})
    assert run(tmp_path, "bounds", "--config", cfg) == 0
    t = read_csv(tmp_path / "out" / "bounds_panel0.csv")
    # relaxed = Δ²/4 + γ² K / β² at p = 0, so K = relaxed - 1/4
    assert t.column("relaxed")[0] - 0.25 == pytest.approx(1.0, rel=1e-14)


def test_bounds_flags_override_config_and_svg(tmp_path):
    cfg = write_config(tmp_path, polarizations=[[0.6, 0, 0]])
    assert run(tmp_path, "bounds", "--config", cfg, "--beta-min", "0.5", "--beta-max", "2",
               "--beta-points", "5", "--format", "both") == 0
    t = read_csv(tmp_path / "out" / "bounds_panel0.csv")
    np.testing.assert_allclose(t.column("beta"), np.geomspace(0.5, 2, 5))
    svg = (tmp_path / "out" / "bounds_panel0.svg").read_text()
    assert svg.startswith("<svg") and svg.count("<polyline") == 4


def test_bounds_output_reproducible_from_embedded_config(tmp_path):
    assert run(tmp_path, "bounds", "--model", "central-spin", out="a") == 0
    first = tmp_path / "a" / "bounds_panel2.csv"
    assert main(["bounds", "--config", str(first), "--out", str(tmp_path / "b")]) == 0
    for k in range(6):
        name = f"bounds_panel{k}.csv"
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_discrete_central_spin_bath_records_seed(tmp_path):
    cfg = write_config(tmp_path, model="central-spin", bath="discrete", n_bath=6,
                       polarizations=[[0, 0, 0.5]], beta_grid={"points": 4})
    assert run(tmp_path, "bounds", "--config", cfg) == 0
    t = read_csv(tmp_path / "out" / "bounds_panel0.csv")
    assert t.metadata["seed"] == 0 and t.metadata["config"]["seed"] == 0
    assert len(t.metadata["panel"]["bath_g"]) == 6


def test_csv_numbers_round_trip():
    for v in (0.1, 1 / 3, np.pi * 1e-300, 2.0 ** 60 + 1, -1e-17):
        assert float(fmt_number(v)) == v


def test_custom_matrices_bounds_and_fig3(tmp_path):
    sx = [[0, 1], [1, 0]]
    sz = [[0.5, 0], [0, -0.5]]
    h_int = (0.7 * np.kron(np.array(sx), np.array(sx))).tolist()
    cfg = write_config(tmp_path, model="custom-matrices", polarizations=[[0.3, 0, 0.4]],
                       matrices={"h_s": sz, "h_int": h_int, "h_b": sz},
                       beta_grid={"points": 5}, time_grid={"points": 50})
    assert run(tmp_path, "bounds", "--config", cfg) == 0
    t = read_csv(tmp_path / "out" / "bounds_panel0.csv")
    for c in ("relaxed", "t_trick", "log_t_trick"):
        assert np.all(t.column(c) >= t.column("exact_wy") - 1e-9)
    assert run(tmp_path, "fig3", "--config", cfg) == 0
    f = read_csv(tmp_path / "out" / "fig3_panel0.csv")
    valid = f.column("valid") == 1
    assert np.all(f.column("hellinger")[valid] <= f.column("bound")[valid] + 1e-9)


def test_fig3_small_bath(tmp_path):
    cfg = write_config(tmp_path, n_bath=4, time_grid={"points": 80})
    assert run(tmp_path, "fig3", "--config", cfg, "--format", "both") == 0
    names = sorted(p.name for p in (tmp_path / "out").iterdir())
    assert names == [f"fig3_panel{k}.{e}" for k in range(3) for e in ("csv", "svg")]
    t = read_csv(tmp_path / "out" / "fig3_panel0.csv")
    assert t.columns == ["t", "hellinger", "reduced_hellinger", "bound", "phase", "valid"]
    assert t.column("t")[0] == 0 and t.column("hellinger")[0] == 0
    assert np.all(np.diff(t.column("phase")) >= 0)
    assert t.metadata["config"]["model"] == "central-spin"
    assert t.metadata["seed"] == 0


def test_fig3_deterministic(tmp_path):
    cfg = write_config(tmp_path, n_bath=5, seed=42, time_grid={"points": 60})
    assert run(tmp_path, "fig3", "--config", cfg, out="a") == 0
    assert run(tmp_path, "fig3", "--config", cfg, out="b") == 0
    for k in range(3):
        name = f"fig3_panel{k}.csv"
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_timestamp_only_with_source_date_epoch(tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "86400")
    cfg = write_config(tmp_path, polarizations=[[0, 0, 0]], beta_grid={"points": 2})
    assert run(tmp_path, "bounds", "--config", cfg) == 0
    t = read_csv(tmp_path / "out" / "bounds_panel0.csv")
    assert t.metadata["timestamp"] == "1970-01-02T00:00:00Z"
    monkeypatch.delenv("SOURCE_DATE_EPOCH")
    assert run(tmp_path, "bounds", "--config", cfg, out="o2") == 0
    assert "timestamp" not in read_csv(tmp_path / "o2" / "bounds_panel0.csv").metadata


@pytest.mark.parametrize("fields, needle", [
    ({"model": "ising"}, "model"),
    ({"beta_grid": {"min": 5, "max": 1, "points": 3}}, "beta_grid"),
    ({"polarizations": [[1, 1, 0]]}, "polarizations[0]"),
    ({"typo_field": 1}, "typo_field"),
    ({"alpha": -1}, "alpha"),
    ({"seed": -3}, "seed"),
    ({"model": "custom-matrices", "matrices": {"h_s": [[1, 2], [0, 1]], "h_int": np.eye(4).tolist(),
                                               "h_b": np.eye(2).tolist()}}, "matrices.h_s"),
])
def test_config_errors_name_field_and_leave_no_files(tmp_path, capsys, fields, needle):
    cfg = write_config(tmp_path, **fields)
    assert run(tmp_path, "bounds", "--config", cfg) == 1
    assert needle in capsys.readouterr().err
    assert not (tmp_path / "out").exists()


def test_fig3_config_errors(tmp_path, capsys):
    assert run(tmp_path, "fig3", "--model", "spin-boson") == 1
    cfg = write_config(tmp_path, n_bath=12)
    assert run(tmp_path, "fig3", "--config", cfg) == 1
    assert "n_bath" in capsys.readouterr().err


def test_usage_errors_are_config_errors(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["bounds", "--format", "xml"])
    assert info.value.code == 1


def test_missing_or_broken_config(tmp_path, capsys):
    assert run(tmp_path, "bounds", "--config", str(tmp_path / "nope.json")) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(tmp_path, "bounds", "--config", str(bad)) == 1
    assert "invalid JSON" in capsys.readouterr().err


def test_violation_aborts_without_files(tmp_path, monkeypatch):
    import thermoqsl.cli as cli
    from thermoqsl.propagator import BoundViolation

    def broken_check(self, *a, **k):
        raise BoundViolation("forced")

    monkeypatch.setattr(cli.TrajectoryRecord, "check", broken_check)
    cfg = write_config(tmp_path, n_bath=2, time_grid={"points": 10})
    assert run(tmp_path, "fig3", "--config", cfg) == 2
    assert not (tmp_path / "out").exists() or not any((tmp_path / "out").iterdir())


def test_numeric_inconsistency_exit_code(tmp_path, monkeypatch):
    import thermoqsl.cli as cli
    from thermoqsl.bounds import NumericalInconsistencyError

    def bad(*a, **k):
        raise NumericalInconsistencyError("negative rate")

    monkeypatch.setattr(cli, "qubit_bounds_from_vector", bad)
    assert run(tmp_path, "bounds") == 3
    assert not (tmp_path / "out").exists()


SMALL = {"lemma": 500, "hermite_hadamard": 5, "commutator_relaxation": 20, "sum_inequality": 20,
         "proof_chain": 5, "dominance": 5, "spin_bath_closed_form": 5, "polygamma_quadrature": 3}


def test_verify_small_suite(tmp_path, capsys):
    cfg = write_config(tmp_path, trials=SMALL)
    assert run(tmp_path, "verify", "--config", cfg) == 0
    report = json.loads((tmp_path / "out" / "verify_report.json").read_text())
    assert report["passed"] and report["config"]["seed"] == 0
    out = capsys.readouterr().out
    assert "PASS lemma" in out and "FAIL" not in out


def test_verify_negative_control_and_replay(tmp_path, capsys):
    cfg = write_config(tmp_path, trials=SMALL, negative_control=True)
    assert run(tmp_path, "verify", "--config", cfg) == 2
    assert "FAIL flipped_lemma" in capsys.readouterr().out
    replay_file = tmp_path / "out" / "replay_flipped_lemma.json"
    assert replay_file.exists()
    assert main(["verify", "--replay", str(replay_file)]) == 2
    result = json.loads(capsys.readouterr().out)
    assert result["identical"] and result["name"] == "flipped_lemma"


def test_run_config_roundtrip():
    cfg = RunConfig().validate("bounds")
    again = RunConfig.from_dict(json.loads(cfg.canonical_json())).validate("bounds")
    assert again == cfg
    with pytest.raises(ConfigError):
        RunConfig.from_dict([1, 2])


def test_module_entry_point(tmp_path):
    import subprocess
    import sys
    r = subprocess.run([sys.executable, "-m", "thermoqsl", "--version"], capture_output=True,
                       text=True, env={**os.environ})
    assert r.returncode == 0 and __version__ in r.stdout
