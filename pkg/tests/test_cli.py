import subprocess
import sys

import numpy as np
import pytest

from caputo_sobolev import io
from caputo_sobolev.cli import main
from caputo_sobolev.grids import GridFunction

SMALL = """\
alpha = 0.4
M = 32
N = 32
K = 8
F_expr = x*(1-x)*t^-0.2
solver = self_adjoint
solution_csv = out/u.csv
report_csv = out/report.csv
snapshots_csv = out/snap.csv
"""

DRIFT = """\
alpha = 0.5
M = 32
N = 32
K = 8
b_expr = 1
c_expr = 0.5
F_expr = x*(1-x)
solver = general
solution_csv = out/u.csv
report_csv = out/report.csv
increments_csv = out/inc.csv
"""


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_ml_eval_prints_e(capsys):
    code, out, err = run(["ml-eval", "--alpha", "1", "--beta", "1", "--z", "1"], capsys)
    assert code == 0 and err == ""
    value, est, regime = out.strip().split(",")
    assert value == "2.718281828459045"
    assert 0 <= float(est) < 1e-14
    assert regime


def test_module_entry_point():
    r = subprocess.run(
        [sys.executable, "-m", "caputo_sobolev", "ml-eval", "--alpha", "1", "--beta", "1", "--z", "1"],
        capture_output=True, text=True, check=True,
    )
    assert r.stdout.startswith("2.718281828459045,")


@pytest.mark.parametrize(
    "argv, status, code",
    [
        (["ml-eval", "--alpha", "1", "--beta", "1"], 1, "usage"),
        (["no-such-command"], 1, "usage"),
        (["--threads", "0", "ml-eval", "--alpha", "1", "--beta", "1", "--z", "1"], 1, "usage"),
        (["ml-eval", "--alpha", "-1", "--beta", "1", "--z", "1"], 1, None),
        (["verify-norms", "--alpha", "1.5", "--family", "eigen"], 1, "invalid-argument"),
        (["caputo", "--alpha", "0.5", "--input", "/nonexistent/u.csv"], 1, "io"),
    ],
)
def test_validation_errors_exit_1(argv, status, code, capsys):
    got, out, err = run(argv, capsys)
    assert got == status
    lines = err.strip().splitlines()
    assert len(lines) == 1 and lines[0].startswith("error: ")
    if code:
        assert lines[0].startswith(f"error: {code}: ")


def test_malformed_grid_csv_is_format_error(tmp_path, capsys):
    p = tmp_path / "u.csv"
    p.write_text("0,1\n")
    code, _, err = run(["frac-integrate", "--alpha", "0.5", "--input", str(p)], capsys)
    assert code == 1 and err.startswith("error: format: ")


def test_grid_commands_roundtrip(tmp_path, capsys):
    u = GridFunction.from_function(lambda t: t, 1.0, 64)
    src, dst = tmp_path / "u.csv", tmp_path / "j.csv"
    io.write_grid_function(src, u)
    for cmd in ("frac-integrate", "rl-derivative", "balakrishnan"):
        assert main([cmd, "--alpha", "0.5", "--input", str(src), "--output", str(dst)]) == 0
        assert io.read_grid_function(dst).n_intervals == 64
    # J^(1/2) t = t^(3/2) / Gamma(5/2)
    main(["frac-integrate", "--alpha", "0.5", "--input", str(src), "--output", str(dst)])
    got = io.read_grid_function(dst).values
    np.testing.assert_allclose(got, u.nodes**1.5 / 1.329340388179137, atol=1e-4)
    code, out, _ = run(["caputo", "--alpha", "0.5", "--method", "l1", "--input", str(src)], capsys)
    assert code == 0 and out.startswith("# domain_length=1 n_intervals=64\n")


def test_caputo_range_warning_goes_to_stderr(tmp_path, capsys):
    src = tmp_path / "u.csv"
    io.write_grid_function(src, GridFunction.from_function(lambda t: 1.0 + t, 1.0, 512))
    code, _, err = run(["caputo", "--alpha", "0.7", "--input", str(src)], capsys)
    assert code == 0
    assert err.startswith("warning: range: ")


def test_verify_norms_eigen_frozen_spread(tmp_path, capsys):
    rep = tmp_path / "r.csv"
    assert main(["verify-norms", "--alpha", "0.5", "--family", "eigen", "--report", str(rep)]) == 0
    lines = rep.read_text().splitlines()
    assert lines[1] == "index,ratio"
    assert [ln.split(",")[0] for ln in lines[-3:]] == ["min", "max", "spread"]
    assert io.read_ratio_report(rep)["spread"] == pytest.approx(1.1348437515519578, rel=1e-9)


def test_verify_norms_inadmissible_family(capsys):
    code, _, err = run(["verify-norms", "--alpha", "0.5", "--family", "trig", "--direction", "inverse"], capsys)
    assert code == 1 and "no admissible members" in err


def write_cfg(dirpath, text):
    cfg = dirpath / "run.cfg"
    cfg.write_text(text)
    return cfg


def test_solve_diffusion_writes_declared_outputs(tmp_path):
    cfg = write_cfg(tmp_path, SMALL)
    assert main(["solve-diffusion", "--config", str(cfg)]) == 0
    u = io.read_field(tmp_path / "out" / "u.csv")
    assert (u.M, u.N) == (32, 32) and u.is_dirichlet
    rep = io.read_key_values(tmp_path / "out" / "report.csv")
    for key in ("norm_Halpha_time", "norm_L2H2", "log_slope", "residual_total", "initial_source_replaced"):
        assert np.isfinite(rep[key])
    assert rep["initial_source_replaced"] == 1.0
    head = (tmp_path / "out" / "snap.csv").read_text().splitlines()[0].split(",")
    assert head[0] == "x" and len(head) == 6


def test_regularity_report_from_stored_solution(tmp_path, capsys):
    cfg = write_cfg(tmp_path, SMALL.replace("t^-0.2", "(1+t)"))
    main(["solve-diffusion", "--config", str(cfg)])
    from caputo_sobolev.config import load

    F = load(cfg).source.field
    io.write_field(tmp_path / "F.csv", F)
    code, out, _ = run(
        ["regularity-report", "--alpha", "0.4", "--solution", str(tmp_path / "out" / "u.csv"),
         "--source", str(tmp_path / "F.csv"), "--modes", "8"],
        capsys,
    )
    assert code == 0
    ours = dict(line.split(",") for line in out.splitlines()[1:])
    theirs = io.read_key_values(tmp_path / "out" / "report.csv")
    assert float(ours["norm_L2H2"]) == pytest.approx(theirs["norm_L2H2"], rel=1e-6)


@pytest.mark.parametrize("text", [SMALL, DRIFT])
def test_outputs_are_byte_identical_across_thread_counts(tmp_path, text):
    outs = []
    for threads in ("1", "4"):
        d = tmp_path / threads
        d.mkdir()
        cfg = write_cfg(d, text)
        assert main(["--threads", threads, "solve-diffusion", "--config", str(cfg)]) == 0
        outs.append({p.name: p.read_bytes() for p in sorted((d / "out").iterdir())})
    assert outs[0] == outs[1]
    assert len(outs[0]) == 3


def test_increments_table(tmp_path):
    cfg = write_cfg(tmp_path, DRIFT)
    assert main(["solve-diffusion", "--config", str(cfg)]) == 0
    lines = (tmp_path / "out" / "inc.csv").read_text().splitlines()
    assert lines[0] == "iteration,increment,ratio,composite_ratio"
    assert lines[1].split(",")[2] == "nan"
    rep = io.read_key_values(tmp_path / "out" / "report.csv")
    assert rep["picard_iterations"] == len(lines) - 1


def test_non_convergence_exits_2(tmp_path, capsys):
    cfg = write_cfg(tmp_path, DRIFT + "max_iter = 2\n")
    code, _, err = run(["solve-diffusion", "--config", str(cfg)], capsys)
    assert code == 2
    assert err.startswith("error: non-convergence: ")
    assert not (tmp_path / "out" / "u.csv").exists()


def test_config_errors_exit_1(tmp_path, capsys):
    cfg = write_cfg(tmp_path, SMALL + "colour = blue\n")
    code, _, err = run(["solve-diffusion", "--config", str(cfg)], capsys)
    assert code == 1 and err.startswith("error: config: ") and "colour" in err


def test_ellipticity_violation_exits_1(tmp_path, capsys):
    cfg = write_cfg(tmp_path, SMALL + "a_expr = x - 0.5\n")
    code, _, err = run(["solve-diffusion", "--config", str(cfg)], capsys)
    assert code == 1 and err.startswith("error: ellipticity: ")


def test_report_to_stdout_without_report_path(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "alpha = 0.4\nM = 32\nN = 16\nK = 8\nF_expr = x*(1-x)\n")
    code, out, _ = run(["solve-diffusion", "--config", str(cfg)], capsys)
    assert code == 0 and out.startswith("quantity,value\n")


def test_worked_example_config_log_slope(tmp_path):
    from pathlib import Path

    shipped = Path(__file__).resolve().parents[1] / "configs" / "worked_example.cfg"
    cfg = write_cfg(tmp_path, shipped.read_text())
    assert main(["solve-diffusion", "--config", str(cfg)]) == 0
    rep = io.read_key_values(tmp_path / "out" / "worked_report.csv")
    # exponent alpha + delta - 1/2 of the closed-form solution
    assert rep["log_slope"] == pytest.approx(-0.05, abs=1e-3)
    assert rep["initial_source_replaced"] == 1.0
