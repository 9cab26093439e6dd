import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from caputo_sobolev import io
from caputo_sobolev.config import ConfigError, build, load, parse_text
from caputo_sobolev.diffusion import SpaceTimeField, space_mesh, time_grid
from caputo_sobolev.expr import ExprError, compile_expr
from caputo_sobolev.grids import GridFunction


def ev(src, **kw):
    return float(compile_expr(src, tuple(kw) or ("x",))(**kw))


# {{{ expressions


@pytest.mark.parametrize(
    "src, value",
    [
        ("-x^2", -9.0),
        ("2^-1", 0.5),
        ("2^3^2", 512.0),
        ("-2^2", -4.0),
        ("(-2)^2", 4.0),
        ("1 - 2 - 3", -4.0),
        ("12 / 3 / 2", 2.0),
        ("2 * 3 + 4 * 5", 26.0),
        ("1.5e1 + .5", 15.5),
        ("x * -1", -3.0),
    ],
)
def test_precedence(src, value):
    assert ev(src, x=3.0) == value


def test_functions_and_constants():
    assert ev("gamma(0.5)^2", x=0) == pytest.approx(math.pi, rel=1e-15)
    assert ev("sin(pi/2) + cos(0) + exp(0)", x=0) == 3.0
    assert ev("powf(x, 0.5)", x=16.0) == 4.0


def test_vectorised_over_broadcast_arguments():
    e = compile_expr("x*(1-x)*t", ("x", "t"))
    x = np.linspace(0, 1, 5)[:, None]
    t = np.array([[0.0, 1.0, 2.0]])
    np.testing.assert_array_equal(e(x=x, t=t), x * (1 - x) * t)
    # a constant broadcasts to the argument shape
    assert compile_expr("2", ("x",))(x=np.zeros(4)).shape == (4,)


def test_singular_power_yields_inf_not_exception():
    assert np.isinf(ev("t^-0.3", t=0.0))


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.1, 3))
def test_agrees_with_python_arithmetic(a, b, c):
    got = float(compile_expr("a*b - a/c + c^b", ("a", "b", "c"))(a=a, b=b, c=c))
    assert got == pytest.approx(a * b - a / c + c**b, rel=1e-14, abs=1e-14)


@pytest.mark.parametrize(
    "src, match",
    [
        ("", "empty"),
        ("x +", "unexpected"),
        ("(x", r"expected '\)'"),
        ("x $ 2", "unexpected character"),
        ("y", "unknown name"),
        ("foo(x)", "unknown function"),
        ("sin(x, x)", "argument"),
        ("powf(x)", "argument"),
        ("x x", "unexpected"),
    ],
)
def test_parse_errors(src, match):
    with pytest.raises(ExprError, match=match):
        compile_expr(src, ("x",))


def test_missing_variable_value():
    with pytest.raises(ExprError, match="missing"):
        compile_expr("x + t", ("x", "t"))(x=1.0)


# }}}


# {{{ configuration

BASE = "alpha = 0.5\nM = 16\nN = 8\nK = 4\nF_expr = x*(1-x)\n"


def test_minimal_config_uses_defaults():
    cfg = build(parse_text(BASE))
    assert (cfg.L, cfg.T, cfg.grading, cfg.solver) == (1.0, 1.0, 1.0, "self_adjoint")
    assert cfg.solution_csv is None
    assert cfg.source.field.values.shape == (17, 9)
    assert not cfg.source.replaced_initial


def test_comments_and_blank_lines_are_ignored():
    assert parse_text("# c\n\nalpha = 0.3  # trailing\n") == {"alpha": "0.3"}


@pytest.mark.parametrize(
    "text, match",
    [
        ("bogus = 1\n", "unknown key"),
        ("alpha = 0.5\nalpha = 0.4\n", "duplicate"),
        ("alpha\n", "key=value"),
        ("alpha =\n", "empty value"),
    ],
)
def test_parse_errors_config(text, match):
    with pytest.raises(ConfigError, match=match):
        parse_text(text)


@pytest.mark.parametrize(
    "extra, match",
    [
        ("K = 5\n", r"M/4"),
        ("grading = 0.5\n", "grading"),
        ("solver = spectral\n", "solver"),
        ("L = -1\n", "positive"),
        ("M = abc\n", "valid int"),
        ("tol = nan\n", "finite"),
        ("F_csv = f.csv\n", "only one"),
    ],
)
def test_build_rejects_invalid(extra, match):
    params = parse_text(BASE.replace("K = 4\n", "") if extra.startswith("K") else BASE)
    params.update(parse_text(extra))
    with pytest.raises(ConfigError, match=match):
        build(params)


def test_alpha_is_required_and_bounded():
    with pytest.raises(ConfigError, match="alpha"):
        build(parse_text("F_expr = 1\n"))
    with pytest.raises(ConfigError, match=r"\(0, 1\)"):
        build(parse_text(BASE.replace("0.5", "1.0")))


def test_source_is_required():
    with pytest.raises(ConfigError, match="F_expr or F_csv"):
        build(parse_text("alpha = 0.5\nM = 16\nK = 4\n"))


def test_singular_source_start_is_replaced():
    cfg = build(parse_text(BASE.replace("x*(1-x)", "x*t^-0.5")))
    v = cfg.source.field.values
    assert cfg.source.replaced_initial
    np.testing.assert_array_equal(v[:, 0], v[:, 1])


def test_relative_paths_resolve_against_config_dir(tmp_path):
    sub = tmp_path / "run"
    sub.mkdir()
    x, t = space_mesh(1.0, 16), time_grid(1.0, 8)
    F = SpaceTimeField(x, t, np.outer(x * (1 - x), 1 + t))
    io.write_field(sub / "F.csv", F)
    io.write_grid_function(sub / "a.csv", GridFunction(1.0, 1 + x))
    (sub / "c.cfg").write_text(
        "alpha = 0.5\nM = 16\nN = 8\nK = 4\nF_csv = F.csv\na_csv = a.csv\nreport_csv = out/r.csv\n"
    )
    cfg = load(sub / "c.cfg")
    np.testing.assert_array_equal(cfg.source.field.values, F.values)
    assert cfg.report_csv == sub / "out" / "r.csv"
    assert cfg.spec.a(np.array([0.25]))[0] == pytest.approx(1.25)


def test_F_csv_mesh_must_match(tmp_path):
    x, t = space_mesh(1.0, 16), time_grid(1.0, 8, 2.0)
    io.write_field(tmp_path / "F.csv", SpaceTimeField(x, t, np.zeros((17, 9))))
    (tmp_path / "c.cfg").write_text("alpha = 0.5\nM = 16\nN = 8\nK = 4\nF_csv = F.csv\n")
    with pytest.raises(ConfigError, match="mesh"):
        load(tmp_path / "c.cfg")


def test_a_csv_must_match_space_mesh(tmp_path):
    io.write_grid_function(tmp_path / "a.csv", GridFunction(1.0, np.ones(9)))
    (tmp_path / "c.cfg").write_text(BASE + "a_csv = a.csv\n")
    with pytest.raises(ConfigError, match="a_csv"):
        load(tmp_path / "c.cfg")


# }}}
