"""Flat ``key=value`` run configuration for the diffusion solver.

Blank lines and ``#`` comments are ignored. Unknown or repeated keys are
errors. Relative paths are resolved against the directory of the config file.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io
from .diffusion import (
    DEFAULT_K,
    DEFAULT_M,
    DEFAULT_N,
    PICARD_MAX_ITER,
    PICARD_TOL,
    EllipticSpec,
    SampledSource,
    SpaceTimeField,
    sample_source,
    space_mesh,
    time_grid,
)
from .expr import compile_expr
from .grids import as_order
from .time_basis import DEFAULT_K as DEFAULT_K_TIME


class ConfigError(ValueError):
    pass


SOLVERS = ("self_adjoint", "general")

KEYS = {
    "alpha": "fractional order in (0, 1)",
    "L": "length of the space interval",
    "T": "final time",
    "M": "space intervals",
    "N": "time intervals",
    "K": "retained space modes (K <= M/4)",
    "K_time": "time modes for the fractional norm",
    "grading": "time grid t_j = T (j/N)^grading (1 = uniform)",
    "a_expr": "diffusion coefficient a(x)",
    "a_csv": "diffusion coefficient samples (grid-function CSV over x)",
    "b_expr": "drift coefficient b(x)",
    "c_expr": "potential c(x)",
    "F_expr": "source F(x, t)",
    "F_csv": "source samples (space-time CSV)",
    "solver": "self_adjoint | general",
    "tol": "Picard tolerance",
    "max_iter": "Picard iteration cap",
    "solution_csv": "output: solution field",
    "report_csv": "output: regularity report",
    "increments_csv": "output: Picard increments (optional)",
    "snapshots_csv": "output: solution profiles at a few times (optional)",
}


def parse_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        out[key] = value
    return out


def _num(params, key, default, kind=float):
    if key not in params:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        v = kind(params[key])
    except ValueError as exc:
        raise ConfigError(f"{key}={params[key]!r} is not a valid {kind.__name__}") from exc
    if kind is float and not np.isfinite(v):
        raise ConfigError(f"{key} must be finite")
    return v


@dataclass(frozen=True)
class DiffusionConfig:
    alpha: float
    L: float
    T: float
    M: int
    N: int
    K: int
    K_time: int
    grading: float
    spec: EllipticSpec
    source: SampledSource
    solver: str
    tol: float
    max_iter: int
    solution_csv: Path | None
    report_csv: Path | None
    increments_csv: Path | None
    snapshots_csv: Path | None

    @property
    def x(self) -> np.ndarray:
        return self.source.field.x

    @property
    def t(self) -> np.ndarray:
        return self.source.field.t


def _exclusive(params, a: str, b: str, required: bool) -> str | None:
    if a in params and b in params:
        raise ConfigError(f"give only one of {a} and {b}")
    if required and a not in params and b not in params:
        raise ConfigError(f"one of {a} or {b} is required")
    return a if a in params else b if b in params else None


def _coefficient(params, key, base: Path, L: float, M: int):
    if key == "a_csv":
        g = io.read_grid_function(base / params[key])
        if g.n_intervals != M or not np.isclose(g.domain_length, L):
            raise ConfigError(f"a_csv must be sampled on [0, {L}] with M={M} intervals")
        xs, vals = g.nodes, g.values
        return lambda x: np.interp(x, xs, vals)
    e = compile_expr(params[key], ("x",))
    return lambda x: e(x=x)


def build(params: dict[str, str], base: Path = Path(".")) -> DiffusionConfig:
    """Validate parameters and sample the problem data."""
    try:
        alpha = as_order(_num(params, "alpha", None)).alpha
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    L = _num(params, "L", 1.0)
    T = _num(params, "T", 1.0)
    M = _num(params, "M", DEFAULT_M, int)
    N = _num(params, "N", DEFAULT_N, int)
    K = _num(params, "K", DEFAULT_K, int)
    K_time = _num(params, "K_time", DEFAULT_K_TIME, int)
    grading = _num(params, "grading", 1.0)
    tol = _num(params, "tol", PICARD_TOL)
    max_iter = _num(params, "max_iter", PICARD_MAX_ITER, int)
    solver = params.get("solver", "self_adjoint")
    if not (L > 0 and T > 0):
        raise ConfigError("L and T must be positive")
    if M < 4 or N < 2:
        raise ConfigError("need M >= 4 and N >= 2")
    if not 1 <= K <= M // 4:
        raise ConfigError(f"K={K} must lie in [1, M/4={M // 4}]")
    if K_time < 1:
        raise ConfigError("K_time must be positive")
    if not grading >= 1.0:
        raise ConfigError("grading must be >= 1")
    if not tol > 0 or max_iter < 1:
        raise ConfigError("tol must be positive and max_iter >= 1")
    if solver not in SOLVERS:
        raise ConfigError(f"solver must be one of {SOLVERS}, got {solver!r}")

    x = space_mesh(L, M)
    t = time_grid(T, N, grading)
    a_key = _exclusive(params, "a_expr", "a_csv", required=False)
    a = _coefficient(params, a_key, base, L, M) if a_key else 1.0
    b = _coefficient(params, "b_expr", base, L, M) if "b_expr" in params else 0.0
    c = _coefficient(params, "c_expr", base, L, M) if "c_expr" in params else 0.0
    spec = EllipticSpec(L, a, b, c)

    f_key = _exclusive(params, "F_expr", "F_csv", required=True)
    if f_key == "F_expr":
        e = compile_expr(params["F_expr"], ("x", "t"))
        source = sample_source(lambda X, Tm: e(x=X, t=Tm), x, t)
    else:
        field = io.read_field(base / params["F_csv"])
        if field.M != M or field.N != N or not (np.allclose(field.x, x) and np.allclose(field.t, t)):
            raise ConfigError("F_csv mesh does not match L, M, T, N and grading")
        source = SampledSource(SpaceTimeField(x, t, field.values), False)

    def path(key):
        return base / params[key] if key in params else None

    return DiffusionConfig(
        alpha, L, T, M, N, K, K_time, grading, spec, source, solver, tol, max_iter,
        path("solution_csv"), path("report_csv"), path("increments_csv"), path("snapshots_csv"),
    )


def load(path: str | Path) -> DiffusionConfig:
    path = Path(path)
    return build(parse_text(path.read_text()), path.parent)
