import csv
import io
import math

import numpy as np
import pytest

from pseudotherm import cli
from pseudotherm.sampling import random_invertible

SMALL = {
    "metric": [],
    "spectrum": [],
    "partition": ["--beta-count", "5"],
    "thermo": ["--beta-count", "5"],
    "fig1": ["--beta-count", "10"],
    "fig2": ["--t-count", "50"],
    "eos": ["--beta-count", "3", "--v-count", "4"],
    "cubic": ["--grid-points", "60", "--levels", "3"],
    "audit": ["--repeats", "2"],
}


def run(tmp_path, argv, name="out.csv"):
    out = tmp_path / name
    code = cli.main([*argv, "--out", str(out)])
    return code, out.read_text() if out.exists() else ""


def table(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def notes(text):
    return [ln[2:] for ln in text.splitlines() if ln.startswith("# ")]


@pytest.mark.parametrize("command", cli.COMMANDS)
def test_every_command_runs(tmp_path, command):
    code, text = run(tmp_path, [command, *SMALL[command]])
    assert code == 0
    assert text.startswith("# config: ")
    assert "seed=42" in text.splitlines()[0]
    assert table(text)


@pytest.mark.parametrize("command", ["audit", "fig1", "cubic"])
def test_deterministic(tmp_path, command):
    _, first = run(tmp_path, [command, *SMALL[command]], "a.csv")
    _, second = run(tmp_path, [command, *SMALL[command]], "b.csv")
    assert first == second


def test_stdout(capsys):
    assert cli.main(["spectrum"]) == 0
    out = capsys.readouterr().out
    assert "kind=AllReal" in out


def test_config_precedence(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# toy model\na = 3.0\nbeta-count = 4\neps = 0.2\n")
    _, text = run(tmp_path, ["thermo", "--config", str(conf), "--eps", "0.05"])
    head = text.splitlines()[0]
    assert "a=3.0" in head and "eps=0.05" in head and "beta_count=4" in head
    assert len(table(text)) == 4


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.conf"
    bad.write_text("nonsense = 1\n")
    assert cli.main(["thermo", "--config", str(bad)]) == 2
    bad.write_text("no equals sign\n")
    assert cli.main(["thermo", "--config", str(bad)]) == 2
    assert cli.main(["thermo", "--config", str(tmp_path / "missing.conf")]) == 2


def test_command_defaults():
    args = cli.build_parser().parse_args(["fig2"])
    cfg = cli.resolve_config(args)
    assert (cfg["a"], cfg["b"], cfg["eps"]) == (1.0, 4.0, 0.01)
    assert cli.resolve_config(cli.build_parser().parse_args(["fig1"]))["beta_count"] == 200


def test_matrix_round_trip(tmp_path, rng):
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    path = tmp_path / "m.txt"
    cli.write_matrix(str(path), A)
    np.testing.assert_array_equal(cli.read_matrix(str(path)), A)


def test_matrix_file_errors(tmp_path):
    path = tmp_path / "m.txt"
    path.write_text("2\n1 0\n0 0\n")
    with pytest.raises(ValueError):
        cli.read_matrix(str(path))
    path.write_text("")
    with pytest.raises(ValueError):
        cli.read_matrix(str(path))


def test_metric_from_matrix(tmp_path):
    path = tmp_path / "h.txt"
    cli.write_matrix(str(path), np.array([[1.0, 0.2], [-0.2, 3.0]]))
    code, text = run(tmp_path, ["metric", "--matrix", str(path)])
    assert code == 0
    resid = dict(n.split("=", 1) for n in notes(text) if "=" in n and ":" not in n)
    assert float(resid["intertwining_residual"]) < 1e-10
    assert float(resid["theta_min_eigenvalue"]) > 0


def test_metric_reports_closed_form(tmp_path):
    _, text = run(tmp_path, ["metric", "--a", "2", "--b", "1"])
    assert any(n.startswith("closed_form_B:") and "passed=True" in n for n in notes(text))


def test_metric_rejects_complex_spectrum(tmp_path):
    code, _ = run(tmp_path, ["metric", "--eps", "0.8"])
    assert code == 2


def test_spectrum_broken_phase(tmp_path):
    _, text = run(tmp_path, ["spectrum", "--eps", "0.8"])
    assert "kind=ConjugatePairs" in notes(text)


def test_audit_with_fixed_B(tmp_path, rng):
    path = tmp_path / "B.txt"
    cli.write_matrix(str(path), random_invertible(rng, 3))
    code, text = run(tmp_path, ["audit", "--matrix", str(path), "--repeats", "3"])
    assert code == 0
    rows = table(text)
    assert [r["dim"] for r in rows] == ["3"]


def test_audit_singular_B(tmp_path):
    path = tmp_path / "B.txt"
    cli.write_matrix(str(path), np.array([[1.0, 2.0], [2.0, 4.0]]))
    code, _ = run(tmp_path, ["audit", "--matrix", str(path)])
    assert code == 2


def test_audit_failure_exit_code(tmp_path):
    code, text = run(tmp_path, ["audit", "--repeats", "1", "--tol", "1e-30"])
    assert code == 1
    assert "status=FAIL" in notes(text)


def test_fig1_delta_curves(tmp_path):
    _, text = run(tmp_path, ["fig1"])
    rows = table(text)
    by_eps = {}
    for r in rows:
        by_eps.setdefault(float(r["epsilon"]), []).append(float(r["delta"]))
    assert sorted(by_eps) == [0.01, 0.02, 0.03]
    for curve in by_eps.values():
        assert len(curve) == 200
        assert np.all(np.diff(curve) > 0)
    # the error scales as eps^4
    assert "delta_increasing_in_epsilon_at_every_beta=True" in notes(text)
    gap = np.array(by_eps[0.03]) - np.array(by_eps[0.01])
    np.testing.assert_allclose(gap, 4 * math.log10(3), atol=0.02)


def test_fig1_delta_base(tmp_path):
    _, ten = run(tmp_path, ["fig1", "--beta-count", "3"], "ten.csv")
    _, nat = run(tmp_path, ["fig1", "--beta-count", "3", "--delta-base", str(math.e)], "e.csv")
    d10 = np.array([float(r["delta"]) for r in table(ten)])
    de = np.array([float(r["delta"]) for r in table(nat)])
    np.testing.assert_allclose(de, d10 * math.log(10), rtol=1e-12)


def test_fig1_zero_coupling_blank_delta(tmp_path):
    _, text = run(tmp_path, ["fig1", "--eps-list", "0", "--beta-count", "3"])
    assert [r["delta"] for r in table(text)] == ["", "", ""]
    # an exact row (delta = -inf) sits below every finite error
    _, text = run(tmp_path, ["fig1", "--eps-list", "0,0.01", "--beta-count", "3"])
    assert "delta_increasing_in_epsilon_at_every_beta=True" in notes(text)


def test_eos_columns(tmp_path):
    _, text = run(tmp_path, ["eos", *SMALL["eos"]])
    rows = table(text)
    assert list(rows[0]) == ["v", "T", "P"]
    assert len(rows) == 12
    assert all(float(r["P"]) > 0 for r in rows)
    gaps = {n.split("=")[0]: float(n.split("=")[1]) for n in notes(text) if n.startswith("max_rel")}
    assert gaps["max_rel_gap_vs_finite_difference"] < 1e-6
    assert gaps["max_rel_gap_vs_reference_expression"] < 1e-12


def test_fig2_peak_notes(tmp_path):
    _, text = run(tmp_path, ["fig2"])
    found = dict(n.split("=", 1) for n in notes(text) if n.startswith(("peak", "interior")))
    assert float(found["peak_T"]) == pytest.approx(1.2503071, abs=1e-6)
    assert found["interior_maxima"] == "1"


def test_unreal_toy_is_error(tmp_path):
    code, _ = run(tmp_path, ["thermo", "--eps", "0.6"])
    assert code == 2
