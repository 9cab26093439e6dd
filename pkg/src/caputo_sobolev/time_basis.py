r"""Sine eigenbasis of :math:`A = -d^2/dt^2` with :math:`u(0) = u'(T) = 0`.

The eigenpairs are

.. math::

    \lambda_k = \frac{(2k-1)^2 \pi^2}{4T^2}, \qquad
    \psi_k(t) = \sqrt{2/T} \sin(\sqrt{\lambda_k} t),

and the fractional power :math:`A^{\gamma}` acts diagonally on the
coefficients :math:`(u, \psi_k)`. The truncated weighted sum
:math:`(\sum_{k \le K} \lambda_k^{\alpha} c_k^2)^{1/2}` is the fractional
Sobolev norm used throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import simpson

from .grids import Basis, FractionalOrder, GridFunction, Regime, SpectralCoefficients, as_order

DEFAULT_K = 64
TRACE_TOL = 1e-6
HARDY_HALVINGS = 20
# Minimum grid intervals per retained mode.
OVERSAMPLING = 4


class UnderResolvedGrid(ValueError):
    pass


def eigenvalues(K: int, T: float) -> np.ndarray:
    k = np.arange(1, K + 1, dtype=float)
    return (2.0 * k - 1.0) ** 2 * np.pi**2 / (4.0 * T**2)


def eigenpair(k: int, T: float, grid: GridFunction | int) -> tuple[float, GridFunction]:
    """Return ``(lambda_k, psi_k)`` with ``psi_k`` sampled on ``grid``.

    ``grid`` is either a template grid function on ``[0, T]`` or a number of
    intervals.
    """
    if int(k) != k or k < 1:
        raise ValueError(f"mode index k={k} must be a positive integer")
    N = _n_intervals(grid, T)
    lam = (2 * k - 1) ** 2 * np.pi**2 / (4.0 * T**2)
    t = np.linspace(0.0, T, N + 1)
    psi = np.sqrt(2.0 / T) * np.sin(np.sqrt(lam) * t)
    psi[0] = 0.0
    return lam, GridFunction(T, psi)


def _n_intervals(grid, T: float) -> int:
    if isinstance(grid, GridFunction):
        if not np.isclose(grid.domain_length, T, rtol=1e-14, atol=0.0):
            raise ValueError(f"grid length {grid.domain_length} does not match T={T}")
        return grid.n_intervals
    N = int(grid)
    if N < 2:
        raise ValueError("a grid needs N >= 2 intervals")
    return N


@lru_cache(maxsize=32)
def _basis_matrix(K: int, T: float, N: int) -> np.ndarray:
    t = np.linspace(0.0, T, N + 1)
    P = np.sqrt(2.0 / T) * np.sin(np.sqrt(eigenvalues(K, T))[:, None] * t[None, :])
    P[:, 0] = 0.0
    P.setflags(write=False)
    return P


@lru_cache(maxsize=32)
def _weights(T: float, N: int) -> np.ndarray:
    # Both rules integrate products of the sampled modes exactly, which keeps
    # the discrete Gram matrix at the identity. Simpson's odd-N end correction
    # would not, so odd grids fall back to the trapezoid rule.
    if N % 2 == 0:
        w = simpson(np.eye(N + 1), dx=T / N, axis=1)
    else:
        w = np.full(N + 1, T / N)
        w[[0, -1]] *= 0.5
    w.setflags(write=False)
    return w


def quadrature_weights(u: GridFunction) -> np.ndarray:
    """Weights of the composite rule used by :func:`project`."""
    return _weights(u.domain_length, u.n_intervals)


def basis_matrix(K: int, grid: GridFunction) -> np.ndarray:
    """``(K, N+1)`` array of the first ``K`` modes sampled on ``grid``."""
    return _basis_matrix(int(K), grid.domain_length, grid.n_intervals)


def project(u: GridFunction, K: int = DEFAULT_K) -> SpectralCoefficients:
    """Inner products ``(u, psi_k)`` for ``k = 1..K``."""
    K = int(K)
    if K < 1:
        raise ValueError(f"K={K} must be positive")
    if u.n_intervals < OVERSAMPLING * K:
        raise UnderResolvedGrid(
            f"N={u.n_intervals} intervals cannot resolve K={K} modes; need N >= {OVERSAMPLING * K}"
        )
    coeffs = basis_matrix(K, u) @ (quadrature_weights(u) * u.values)
    return SpectralCoefficients(Basis.A_SINE, u.domain_length, coeffs)


def reconstruct(c: SpectralCoefficients, grid: GridFunction) -> GridFunction:
    if c.basis is not Basis.A_SINE:
        raise ValueError(f"cannot reconstruct {c.basis.value} coefficients in the sine basis")
    if not np.isclose(c.domain_length, grid.domain_length, rtol=1e-14, atol=0.0):
        raise ValueError(
            f"coefficients live on [0, {c.domain_length}], grid on [0, {grid.domain_length}]"
        )
    return grid.with_values(c.coeffs @ basis_matrix(c.K, grid))


def frac_power_A(c: SpectralCoefficients, gamma: float) -> SpectralCoefficients:
    """Apply ``A**gamma`` for ``0 <= gamma <= 1``."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma={gamma} must lie in [0, 1]")
    if gamma == 0.0:
        return c
    return c.with_coeffs(eigenvalues(c.K, c.domain_length) ** gamma * c.coeffs)


def weighted_energy(c: SpectralCoefficients, alpha: float) -> np.ndarray:
    """Per-mode contributions ``lambda_k**alpha * c_k**2``."""
    return eigenvalues(c.K, c.domain_length) ** alpha * c.coeffs**2


def sobolev_norm(u: GridFunction, alpha, K: int = DEFAULT_K) -> float:
    a = as_order(alpha).alpha
    return float(np.sqrt(weighted_energy(project(u, K), a).sum()))


def tail_ratio(u: GridFunction, alpha, K: int = DEFAULT_K) -> float:
    """Share of the truncated norm carried by the last mode."""
    e = weighted_energy(project(u, K), as_order(alpha).alpha)
    total = e.sum()
    return float(e[-1] / total) if total > 0 else 0.0


@dataclass(frozen=True)
class RangeDiagnostic:
    in_range: bool
    evidence: str
    norm: float
    trace: float
    hardy_integrals: tuple[float, ...] = ()


def hardy_integrals(u: GridFunction, halvings: int = HARDY_HALVINGS) -> np.ndarray:
    r""":math:`\int_\varepsilon^T t^{-1} u^2 dt` for :math:`\varepsilon = 2^{-j} h`.

    The first interval uses the linear interpolant of ``u`` integrated
    exactly, the rest the trapezoid rule.
    """
    h, v = u.h, u.values
    t = u.nodes
    bulk = np.trapezoid(v[1:] ** 2 / t[1:], t[1:])
    a, b = v[0], (v[1] - v[0]) / h
    eps = h * 0.5 ** np.arange(halvings + 1)
    head = a**2 * np.log(h / eps) + 2 * a * b * (h - eps) + 0.5 * b**2 * (h**2 - eps**2)
    return bulk + head


def range_membership(
    u: GridFunction, alpha, K: int = DEFAULT_K, trace_tol: float = TRACE_TOL
) -> RangeDiagnostic:
    """Numerical check that ``u`` lies in the range of the order-alpha integral.

    Below one half only a finite norm is needed. Above one half the trace
    ``u(0)`` must also vanish. At one half the weighted integral
    ``int t^{-1} u^2`` must settle as its lower limit shrinks.
    """
    order: FractionalOrder = as_order(alpha)
    norm = sobolev_norm(u, order, K)
    trace = float(abs(u.values[0]))
    finite = bool(np.isfinite(norm))
    notes = [f"sobolev_norm={norm:.6g} (K={K})"]
    hardy: tuple[float, ...] = ()
    ok = finite
    if order.regime is Regime.ABOVE_HALF:
        trace_ok = trace <= trace_tol
        notes.append(f"|u(0)|={trace:.3g} {'<=' if trace_ok else '>'} trace_tol={trace_tol:g}")
        ok = ok and trace_ok
    elif order.regime is Regime.HALF:
        H = hardy_integrals(u)
        hardy = tuple(float(x) for x in H)
        steps = np.diff(H)
        settled = steps[-1] <= max(trace_tol**2, 1e-12 * abs(H[-1]))
        shrinking = steps[-1] <= 0.5 * steps[-2] if steps[-2] > 0 else True
        converges = bool(settled or shrinking)
        notes.append(
            f"weighted integral over eps=2^-j h: last increment {steps[-1]:.3g}, "
            f"trend {'convergent' if converges else 'divergent'}"
        )
        ok = ok and converges
    notes.insert(0, f"regime={order.regime.value}")
    return RangeDiagnostic(ok, "; ".join(notes), norm, trace, hardy)
