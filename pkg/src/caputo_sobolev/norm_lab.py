"""Empirical two-sided norm equivalences over families of test functions.

Two ratios are tracked:

* forward: ``sobolev_norm(J^a u) / ||u||``, bounded above and below for all
  ``u`` in L2;
* inverse: ``||caputo(u)|| / sobolev_norm(u)``, bounded above and below on
  the range of the fractional integral.

No constants are known in closed form, so reports record only the observed
minimum, maximum and spread of the ratios.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import frac_ops, time_basis
from .grids import FractionalOrder, GridFunction, Regime, as_order, l2_norm

DEFAULT_SEED = 20240617
DEFAULT_N = 1024
FAMILIES = ("eigen", "trig", "image")


class FamilyError(ValueError):
    pass


@dataclass(frozen=True)
class EquivalenceReport:
    family_name: str
    alpha: FractionalOrder
    ratios: np.ndarray = field(repr=False)
    indices: tuple[int, ...] = ()
    excluded: tuple[tuple[int, str], ...] = ()
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        r = np.asarray(self.ratios, dtype=float)
        if r.size == 0:
            raise FamilyError(f"family {self.family_name!r} has no admissible members")
        if not np.all(r > 0) or not np.all(np.isfinite(r)):
            raise FamilyError("ratios must be finite and positive")
        object.__setattr__(self, "ratios", r)
        if not self.indices:
            object.__setattr__(self, "indices", tuple(range(r.size)))

    @property
    def ratio_min(self) -> float:
        return float(self.ratios.min())

    @property
    def ratio_max(self) -> float:
        return float(self.ratios.max())

    @property
    def spread(self) -> float:
        return self.ratio_max / self.ratio_min


def eigen_family(T: float = 1.0, N: int = DEFAULT_N, count: int = 16) -> list[GridFunction]:
    return [time_basis.eigenpair(k, T, N)[1] for k in range(1, count + 1)]


def trig_family(
    T: float = 1.0, N: int = DEFAULT_N, count: int = 20, seed: int = DEFAULT_SEED, degree: int = 4
) -> list[GridFunction]:
    """Random real trigonometric polynomials of the given degree on ``[0, T]``.

    Coefficients of frequency ``j`` are standard normal scaled by ``1/(1+j)``.
    """
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, T, N + 1)
    j = np.arange(degree + 1)
    phase = 2.0 * np.pi * j[:, None] * t[None, :] / T
    out = []
    for _ in range(count):
        a, b = rng.standard_normal((2, degree + 1)) / (1.0 + j)
        out.append(GridFunction(T, a @ np.cos(phase) + b @ np.sin(phase)))
    return out


def image_family(alpha, T: float = 1.0, N: int = DEFAULT_N, count: int = 20, seed: int = DEFAULT_SEED):
    """Fractional integrals of :func:`trig_family`; all lie in the range by construction."""
    return [frac_ops.rl_integral(f, alpha) for f in trig_family(T, N, count, seed)]


def standard_family(name: str, alpha, *, T: float = 1.0, N: int = DEFAULT_N, seed: int = DEFAULT_SEED):
    if name == "eigen":
        return eigen_family(T, N)
    if name == "trig":
        return trig_family(T, N, seed=seed)
    if name == "image":
        return image_family(alpha, T, N, seed=seed)
    raise FamilyError(f"unknown family {name!r}; expected one of {FAMILIES}")


def _check_members(family) -> None:
    if not family:
        raise FamilyError("family is empty")
    for i, u in enumerate(family):
        if l2_norm(u) == 0.0:
            raise FamilyError(f"member {i} has zero norm")


def verify_forward(family, alpha, K: int = time_basis.DEFAULT_K, name: str = "custom") -> EquivalenceReport:
    order = as_order(alpha)
    _check_members(family)
    ratios = [time_basis.sobolev_norm(frac_ops.rl_integral(u, order), order, K) / l2_norm(u) for u in family]
    return EquivalenceReport(name, order, np.array(ratios))


def verify_inverse(family, alpha, K: int = time_basis.DEFAULT_K, name: str = "custom") -> EquivalenceReport:
    """Members failing the range diagnostic are excluded and listed."""
    order = as_order(alpha)
    _check_members(family)
    ratios, kept, excluded, notes = [], [], [], []
    for i, u in enumerate(family):
        diag = time_basis.range_membership(u, order, K)
        if order.regime is Regime.HALF:
            notes.append(f"member {i}: {diag.evidence}")
        if not diag.in_range:
            excluded.append((i, diag.evidence))
            continue
        d = frac_ops.caputo(u, order, frac_ops.CaputoMethod.SPECTRAL, K, check_range=False)
        ratios.append(l2_norm(d) / diag.norm)
        kept.append(i)
    return EquivalenceReport(name, order, np.array(ratios), tuple(kept), tuple(excluded), tuple(notes))
