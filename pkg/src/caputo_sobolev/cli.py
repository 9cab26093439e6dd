"""Command-line front end.

Exit status is 0 on success, 1 for invalid input and 2 for numerical
failure. Failures print one line ``error: <code>: <message>`` to stderr.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from . import config, diffusion, frac_ops, io, norm_lab, time_basis
from .mittag_leffler import MittagLefflerError, MLQuery, ml

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2
SNAPSHOT_FRACTIONS = (0.01, 0.1, 0.25, 0.5, 1.0)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with status 2
        raise UsageError(message)


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{s} is not a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="caputo-sobolev", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=_positive_int, default=1, help="worker threads for modal work")
    p.add_argument("--seed", type=int, default=norm_lab.DEFAULT_SEED, help="seed for random families")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("ml-eval", help="evaluate E_{alpha,beta}(z)")
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--beta", type=float, required=True)
    s.add_argument("--z", type=float, required=True)

    def grid_io(s):
        s.add_argument("--alpha", type=float, required=True)
        s.add_argument("--input", type=Path, required=True, help="grid-function CSV")
        s.add_argument("--output", type=Path, help="grid-function CSV (default: stdout)")

    grid_io(sub.add_parser("frac-integrate", help="fractional integral of a grid function"))
    s = sub.add_parser("caputo", help="Caputo derivative of a grid function")
    grid_io(s)
    s.add_argument("--method", choices=[m.value for m in frac_ops.CaputoMethod], default="spectral")
    s.add_argument("--modes", type=_positive_int, default=time_basis.DEFAULT_K)
    grid_io(sub.add_parser("rl-derivative", help="Riemann-Liouville derivative of a grid function"))
    s = sub.add_parser("balakrishnan", help="fractional integral via the resolvent integral")
    grid_io(s)
    s.add_argument("--nodes", type=_positive_int, default=frac_ops.LogQuadrature.n_nodes)
    s.add_argument("--s-min", type=float, default=frac_ops.LogQuadrature.s_min)
    s.add_argument("--s-max", type=float, default=frac_ops.LogQuadrature.s_max)

    s = sub.add_parser("verify-norms", help="norm-equivalence ratios over a standard family")
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--family", choices=norm_lab.FAMILIES, required=True)
    s.add_argument("--direction", choices=("forward", "inverse"), default="forward")
    s.add_argument("--modes", type=_positive_int, default=time_basis.DEFAULT_K)
    s.add_argument("--intervals", type=_positive_int, default=norm_lab.DEFAULT_N)
    s.add_argument("--report", type=Path, help="ratio CSV (default: stdout)")

    s = sub.add_parser("solve-diffusion", help="solve a time-fractional diffusion problem")
    s.add_argument("--config", type=Path, required=True)

    s = sub.add_parser("regularity-report", help="regularity norms of a stored solution")
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--solution", type=Path, required=True, help="space-time CSV")
    s.add_argument("--source", type=Path, required=True, help="space-time CSV")
    s.add_argument("--modes", type=_positive_int, default=diffusion.DEFAULT_K, help="space modes")
    s.add_argument("--time-modes", type=_positive_int, default=time_basis.DEFAULT_K)
    s.add_argument("--report", type=Path, help="report CSV (default: stdout)")
    return p


def _emit(writer, obj, path: Path | None) -> None:
    writer(path if path is not None else sys.stdout, obj)


# {{{ commands


def cmd_ml_eval(args) -> None:
    # shortest round-trip repr; still reproduces the double exactly
    r = ml(MLQuery(args.alpha, args.beta, args.z))
    print(f"{float(r.value)!r},{float(r.est_abs_error)!r},{r.regime}")


def _grid_command(fn):
    def run(args):
        u = io.read_grid_function(args.input)
        _emit(io.write_grid_function, fn(u, args), args.output)

    return run


def _caputo(u, args):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", frac_ops.RangeWarning)
        out = frac_ops.caputo(u, args.alpha, args.method, args.modes)
    for w in caught:
        print(f"warning: range: {w.message}", file=sys.stderr)
    return out


COMMANDS_GRID = {
    "frac-integrate": lambda u, a: frac_ops.rl_integral(u, a.alpha),
    "caputo": _caputo,
    "rl-derivative": lambda u, a: frac_ops.rl_derivative(u, a.alpha),
    "balakrishnan": lambda u, a: frac_ops.balakrishnan_J(
        u, a.alpha, frac_ops.LogQuadrature(a.nodes, a.s_min, a.s_max)
    ),
}


def cmd_verify_norms(args) -> None:
    family = norm_lab.standard_family(args.family, args.alpha, N=args.intervals, seed=args.seed)
    verify = norm_lab.verify_forward if args.direction == "forward" else norm_lab.verify_inverse
    report = verify(family, args.alpha, args.modes, name=args.family)
    _emit(io.write_ratio_report, report, args.report)


def _report_rows(rep, res, extra):
    rows = rep.as_rows()
    rows += [
        ("residual_total", res.total),
        ("residual_in_span", res.in_span),
        ("source_truncation", res.source_truncation),
    ]
    return rows + list(extra)


def cmd_solve_diffusion(args) -> None:
    cfg = config.load(args.config)
    F = cfg.source.field
    log = None
    if cfg.solver == "self_adjoint":
        u = diffusion.solve_self_adjoint(F, cfg.spec, cfg.alpha, cfg.K, threads=args.threads)
    else:
        u, log = diffusion.solve_general(
            F, cfg.spec, cfg.alpha, cfg.K, cfg.tol, cfg.max_iter, threads=args.threads
        )
    rep = diffusion.regularity_report(u, F, cfg.alpha, cfg.K_time)
    principal = cfg.spec if cfg.solver == "self_adjoint" else cfg.spec.principal()
    eigs = diffusion.default_eigs(principal, cfg.M, cfg.K)
    res = diffusion.residual(u, F, cfg.spec, cfg.alpha, eigs)
    extra = [("initial_source_replaced", float(cfg.source.replaced_initial))]
    for out in (cfg.solution_csv, cfg.report_csv, cfg.increments_csv, cfg.snapshots_csv):
        if out is not None:
            out.parent.mkdir(parents=True, exist_ok=True)
    if log is not None:
        extra.append(("picard_iterations", float(log.iterations)))
    if cfg.solution_csv:
        io.write_field(cfg.solution_csv, u)
    if cfg.report_csv:
        io.write_key_values(cfg.report_csv, _report_rows(rep, res, extra))
    if cfg.increments_csv and log is not None:
        n = log.iterations
        io.write_table(
            cfg.increments_csv,
            {
                "iteration": np.arange(1, n + 1),
                "increment": np.array(log.increments),
                "ratio": np.r_[np.nan, log.ratios],
                "composite_ratio": np.r_[1.0, log.composite_ratios] if n else np.array([]),
            },
        )
    if cfg.snapshots_csv:
        cols = {"x": u.x}
        for f in SNAPSHOT_FRACTIONS:
            j = int(np.argmin(np.abs(u.t - f * u.T)))
            cols[f"t={io.fmt(u.t[j])}"] = u.values[:, j]
        io.write_table(cfg.snapshots_csv, cols)
    if not cfg.report_csv:
        io.write_key_values(sys.stdout, _report_rows(rep, res, extra))


def cmd_regularity_report(args) -> None:
    u = io.read_field(args.solution)
    F = io.read_field(args.source)
    if u.values.shape != F.values.shape or not (np.allclose(u.x, F.x) and np.allclose(u.t, F.t)):
        raise ValueError("solution and source meshes differ")
    K = min(args.modes, u.M // 4)
    eigs = diffusion.laplacian_eigs(u.L, u.M, K)
    rep = diffusion.regularity_report(u, F, args.alpha, args.time_modes, eigs=eigs)
    _emit(io.write_key_values, rep.as_rows(), args.report)


# }}}


def _dispatch(args) -> None:
    if args.command == "ml-eval":
        cmd_ml_eval(args)
    elif args.command in COMMANDS_GRID:
        _grid_command(COMMANDS_GRID[args.command])(args)
    elif args.command == "verify-norms":
        cmd_verify_norms(args)
    elif args.command == "solve-diffusion":
        cmd_solve_diffusion(args)
    elif args.command == "regularity-report":
        cmd_regularity_report(args)


def _fail(code: str, message, status: int) -> int:
    text = " ".join(str(message).split())
    print(f"error: {code}: {text}", file=sys.stderr)
    return status


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _fail("usage", exc, EXIT_INVALID)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        _dispatch(args)
    except diffusion.ConvergenceError as exc:
        return _fail("non-convergence", exc, EXIT_NUMERICAL)
    except diffusion.EigenSolverError as exc:
        return _fail("eigensolver", exc, EXIT_NUMERICAL)
    except MittagLefflerError as exc:
        code, _, msg = str(exc).partition(": ")
        return _fail(code if msg else "ml", msg or exc, EXIT_INVALID)
    except config.ConfigError as exc:
        return _fail("config", exc, EXIT_INVALID)
    except io.FormatError as exc:
        return _fail("format", exc, EXIT_INVALID)
    except OSError as exc:
        return _fail("io", f"{exc.strerror or exc}: {exc.filename}", EXIT_INVALID)
    except diffusion.EllipticityError as exc:
        return _fail("ellipticity", exc, EXIT_INVALID)
    except ValueError as exc:
        return _fail("invalid-argument", exc, EXIT_INVALID)
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        return _fail("numerical", exc, EXIT_NUMERICAL)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
