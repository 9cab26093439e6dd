"""CSV formats for grid functions, spectra, space-time fields and reports.

Every float is written with 17 significant digits, so reading a file back
reproduces the in-memory doubles exactly.
"""

from __future__ import annotations

import csv
import io as _io
from contextlib import contextmanager
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from .grids import GridFunction, SpectralCoefficients


class FormatError(ValueError):
    pass


def fmt(v: float) -> str:
    return format(float(v), ".17g")


@contextmanager
def _open(target, mode: str):
    if isinstance(target, (str, Path)):
        with open(target, mode, newline="") as fh:
            yield fh
    else:
        yield target


def _parse_header(line: str, keys: tuple[str, ...]) -> dict[str, str]:
    if not line.startswith("#"):
        raise FormatError(f"missing '#' header line, got {line[:40]!r}")
    fields = dict(tok.split("=", 1) for tok in line[1:].split() if "=" in tok)
    missing = [k for k in keys if k not in fields]
    if missing:
        raise FormatError(f"header lacks {', '.join(missing)}")
    return fields


def _rows(fh: IO[str], width: int) -> np.ndarray:
    data = []
    for lineno, row in enumerate(csv.reader(fh), start=2):
        if not row or row[0].startswith("#"):
            continue
        if len(row) != width:
            raise FormatError(f"line {lineno}: expected {width} columns, got {len(row)}")
        try:
            data.append([float(v) for v in row])
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from exc
    return np.array(data, dtype=float).reshape(-1, width)


# {{{ grid functions


def write_grid_function(target, u: GridFunction) -> None:
    with _open(target, "w") as fh:
        fh.write(f"# domain_length={fmt(u.domain_length)} n_intervals={u.n_intervals}\n")
        for t, v in zip(u.nodes, u.values):
            fh.write(f"{fmt(t)},{fmt(v)}\n")


def read_grid_function(source) -> GridFunction:
    with _open(source, "r") as fh:
        head = _parse_header(fh.readline(), ("domain_length", "n_intervals"))
        data = _rows(fh, 2)
    T, N = float(head["domain_length"]), int(head["n_intervals"])
    if data.shape[0] != N + 1:
        raise FormatError(f"expected {N + 1} rows, found {data.shape[0]}")
    return GridFunction(T, data[:, 1])


# }}}


# {{{ spectral coefficients


def write_spectral(target, c: SpectralCoefficients) -> None:
    with _open(target, "w") as fh:
        fh.write(f"# basis={c.basis.value} domain_length={fmt(c.domain_length)} K={c.K}\n")
        for k, v in enumerate(c.coeffs, start=1):
            fh.write(f"{k},{fmt(v)}\n")


def read_spectral(source) -> SpectralCoefficients:
    with _open(source, "r") as fh:
        head = _parse_header(fh.readline(), ("basis", "domain_length", "K"))
        data = _rows(fh, 2)
    K = int(head["K"])
    if data.shape[0] != K or not np.array_equal(data[:, 0], np.arange(1, K + 1)):
        raise FormatError(f"expected rows k = 1..{K}")
    return SpectralCoefficients(head["basis"], float(head["domain_length"]), data[:, 1])


# }}}


# {{{ space-time fields


def write_field(target, field) -> None:
    """Rows ``x,t,value`` with ``x`` in the outer loop."""
    with _open(target, "w") as fh:
        fh.write(f"# L={fmt(field.L)} M={field.M} T={fmt(field.T)} N={field.N}\n")
        ts = [fmt(t) for t in field.t]
        for xi, row in zip(field.x, field.values):
            xs = fmt(xi)
            fh.writelines(f"{xs},{t},{fmt(v)}\n" for t, v in zip(ts, row))


def read_field(source):
    from .diffusion import SpaceTimeField

    with _open(source, "r") as fh:
        head = _parse_header(fh.readline(), ("L", "M", "T", "N"))
        data = _rows(fh, 3)
    M, N = int(head["M"]), int(head["N"])
    if data.shape[0] != (M + 1) * (N + 1):
        raise FormatError(f"expected {(M + 1) * (N + 1)} rows, found {data.shape[0]}")
    cube = data.reshape(M + 1, N + 1, 3)
    x, t = cube[:, 0, 0], cube[0, :, 1]
    if not (np.all(cube[:, :, 0] == x[:, None]) and np.all(cube[:, :, 1] == t[None, :])):
        raise FormatError("rows are not a tensor grid in x-outer order")
    return SpaceTimeField(x, t, cube[:, :, 2])


# }}}


# {{{ reports


def write_ratio_report(target, report) -> None:
    """``index,ratio`` rows followed by ``min``, ``max`` and ``spread`` footer rows."""
    with _open(target, "w") as fh:
        fh.write(f"# family={report.family_name} alpha={fmt(report.alpha.alpha)}\n")
        fh.write("index,ratio\n")
        for i, r in zip(report.indices, report.ratios):
            fh.write(f"{i},{fmt(r)}\n")
        for i, why in report.excluded:
            fh.write(f"# excluded {i}: {why}\n")
        fh.write(f"min,{fmt(report.ratio_min)}\n")
        fh.write(f"max,{fmt(report.ratio_max)}\n")
        fh.write(f"spread,{fmt(report.spread)}\n")


def read_ratio_report(source) -> dict[str, object]:
    with _open(source, "r") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows or rows[0] != ["index", "ratio"]:
        raise FormatError("missing 'index,ratio' column header")
    out: dict[str, object] = {"index": [], "ratio": []}
    for key, val in rows[1:]:
        if key in ("min", "max", "spread"):
            out[key] = float(val)
        else:
            out["index"].append(int(key))
            out["ratio"].append(float(val))
    return out


def write_key_values(target, rows: Iterable[tuple[str, float]], header: str = "quantity,value") -> None:
    with _open(target, "w") as fh:
        fh.write(header + "\n")
        for k, v in rows:
            fh.write(f"{k},{fmt(v)}\n")


def read_key_values(source) -> dict[str, float]:
    with _open(source, "r") as fh:
        rows = list(csv.reader(fh))
    return {k: float(v) for k, v in rows[1:] if k}


def write_table(target, columns: dict[str, np.ndarray]) -> None:
    """Plain numeric table with a column-name header."""
    names = list(columns)
    cols = [np.asarray(columns[n]) for n in names]
    with _open(target, "w") as fh:
        fh.write(",".join(names) + "\n")
        for row in zip(*cols):
            fh.write(",".join(fmt(v) for v in row) + "\n")


def to_text(writer, obj) -> str:
    buf = _io.StringIO()
    writer(buf, obj)
    return buf.getvalue()


# }}}
