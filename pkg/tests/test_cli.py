import json
import math

import pytest

from thermalspin.cli import main

FLAGSHIP = math.log2((3 + math.sqrt(2)) / 4)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_coeff(capsys):
    code, out, _ = run(capsys, "coeff", "--m", "1", "--n", "1", "--r2", "0.5")
    assert code == 0
    assert out.strip() == "[0.707106781187, 0.0, -0.707106781187]"


def test_coeff_literal(capsys):
    _, out, _ = run(capsys, "coeff", "--m", "2", "--n", "0", "--r2", "0.5", "--literal")
    assert sum(v * v for v in json.loads(out)) == pytest.approx(2.0, abs=1e-10)


def test_negativity_flagship(capsys):
    code, out, _ = run(capsys, "negativity", "--two-s", "1", "--xa", "1", "--xb", "1", "--r2", "0.5")
    assert code == 0
    rep = json.loads(out)
    assert list(rep) == ["log_negativity", "trace_norm", "min_pt_eigenvalue", "is_npt"]
    assert rep["log_negativity"] == pytest.approx(FLAGSHIP, abs=1e-11)


def test_negativity_double_vacuum(capsys):
    _, out, _ = run(capsys, "negativity", "--two-s", "1", "--xa", "0", "--xb", "0", "--r2", "0.5")
    assert json.loads(out)["log_negativity"] == 0


def test_beta_and_vacuum_flags(capsys):
    _, out, _ = run(capsys, "negativity", "--two-s", "2", "--beta-a", "0", "--vac-b", "--r2", "0.5")
    _, ref, _ = run(capsys, "negativity", "--two-s", "2", "--xa", "1", "--xb", "0", "--r2", "0.5")
    assert out == ref


def test_distill(capsys):
    code, out, _ = run(capsys, "distill", "--two-s", "1", "--xa", "1", "--xb", "1", "--r2", "0.5")
    assert code == 0
    data = json.loads(out)
    assert data["distill"]["is_npt"] is True
    assert data["distill"]["success_probability"] == 0.5
    assert data["negativity"]["log_negativity"] == pytest.approx(FLAGSHIP, abs=1e-11)


@pytest.mark.parametrize(
    "argv, fragment",
    [
        (["negativity", "--two-s", "1", "--xa", "2", "--xb", "1", "--r2", "0.5"], "outside [0, 1]"),
        (["negativity", "--two-s", "1", "--xa", "1", "--xb", "1", "--r2", "0.5", "--bogus"], "unrecognized"),
        (["coeff", "--m", "-1", "--n", "0", "--r2", "0.5"], "non-negative"),
        (["frobnicate"], "invalid choice"),
        (["sweep-r", "--spins", "1", "--r2-step", "0.03"], "does not divide"),
    ],
)
def test_usage_errors_are_single_line(capsys, argv, fragment):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == ""
    assert len(err.strip().splitlines()) == 1
    assert fragment in err


def test_unwritable_destination(capsys, tmp_path):
    code, _, err = run(capsys, "sweep-s", "--spins", "1", "--out", str(tmp_path / "no" / "x.csv"))
    assert code == 2
    assert "cannot write" in err and len(err.strip().splitlines()) == 1


def test_consistency_failure_exit_code(capsys, monkeypatch):
    from thermalspin import cli
    from thermalspin.errors import ConsistencyError

    def boom(*args, **kwargs):
        raise ConsistencyError("broken")

    monkeypatch.setattr(cli, "sweep_over_spin", boom)
    code, _, err = run(capsys, "sweep-s", "--spins", "1")
    assert code == 1 and "broken" in err


def test_sweep_s_stdout(capsys):
    code, out, _ = run(capsys, "sweep-s", "--spins", "1", "2", "--xa", "1", "--vac-b", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert [d["two_s"] for d in data] == [1, 2]
    assert all(d["x_b"] == 0 for d in data)


def test_sweep_r_writes_maxima(capsys, tmp_path):
    out = tmp_path / "grid.csv"
    peaks = tmp_path / "peaks.csv"
    code, _, _ = run(capsys, "sweep-r", "--spins", "1", "--r2-step", "0.01", "--out", str(out), "--maxima-out", str(peaks), "--workers", "1")
    assert code == 0
    assert len(out.read_text().splitlines()) == 102
    lines = peaks.read_text().splitlines()
    assert lines[0].startswith("two_s,x_a,x_b,n_maxima,maxima_r2")
    assert lines[1].split(",")[3] == "2"


def test_compare_ports(capsys):
    code, out, _ = run(capsys, "compare-ports", "--spins", "1", "--x", "1", "--workers", "1")
    assert code == 0
    header, row = out.splitlines()
    assert header == "two_s,x,r2,log_negativity_vacuum,log_negativity_both,difference"
    assert float(row.split(",")[-1]) > 0


@pytest.mark.parametrize("suffix", [".yaml", ".json"])
def test_config_equals_flags(capsys, tmp_path, suffix):
    cfg = tmp_path / f"run{suffix}"
    if suffix == ".json":
        cfg.write_text(json.dumps({"two-s": 2, "xa": 0.5, "xb": 1.0, "r2": 0.3}))
    else:
        cfg.write_text("two_s: 2\nxa: 0.5\nxb: 1.0\nr2: 0.3\n")
    _, via_config, _ = run(capsys, "negativity", "--config", str(cfg))
    _, via_flags, _ = run(capsys, "negativity", "--two-s", "2", "--xa", "0.5", "--xb", "1.0", "--r2", "0.3")
    assert via_config == via_flags


def test_flags_override_config(capsys, tmp_path):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("two-s: 2\nxa: 0.5\nxb: 1.0\nr2: 0.3\n")
    _, overridden, _ = run(capsys, "negativity", "--config", str(cfg), "--r2", "0.6", "--vac-b")
    _, ref, _ = run(capsys, "negativity", "--two-s", "2", "--xa", "0.5", "--vac-b", "--r2", "0.6")
    assert overridden == ref


def test_config_lists_and_bad_keys(capsys, tmp_path):
    cfg = tmp_path / "s.yaml"
    cfg.write_text("spins: [1, 2]\nvac_b: true\nformat: json\nworkers: 1\n")
    code, out, _ = run(capsys, "sweep-s", "--config", str(cfg))
    assert code == 0 and len(json.loads(out)) == 2
    bad = tmp_path / "bad.yaml"
    bad.write_text("colour: blue\n")
    code, _, err = run(capsys, "sweep-s", "--config", str(bad))
    assert code == 2 and "unknown config key" in err
    code, _, err = run(capsys, "sweep-s", "--config", str(tmp_path / "nope.yaml"))
    assert code == 2 and "cannot read config" in err


def test_fig_recipes_honour_env_outdir(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("THERMALSPIN_OUTDIR", str(tmp_path))
    code, out, _ = run(capsys, "fig1", "--max-two-s", "3", "--workers", "1")
    assert code == 0
    assert (tmp_path / "fig1_mixed.csv").exists()
    assert out.strip().endswith("fig1_mixed.csv")
