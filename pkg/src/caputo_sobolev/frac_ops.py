r"""Fractional integral, its inverse and related operators on ``(0, T)``.

All operators act on :class:`GridFunction` samples. Singular convolution
kernels are integrated exactly against the piecewise-linear interpolant of
the data (product integration).
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import time_basis
from ._quadrature import exp_convolve, power_moments, uniform_convolve, weight_matrix
from .grids import FractionalOrder, GridFunction, as_order, l2_norm
from .mittag_leffler import ml_array, rgamma


class CaputoMethod(str, enum.Enum):
    """``spectral`` truncates the eigen-expansion, ``l1`` is the L1 scheme."""

    SPECTRAL = "spectral"
    L1 = "l1"


class RangeWarning(UserWarning):
    """Input does not look like it lies in the range of the fractional integral."""


def _order_value(alpha) -> float:
    # Accepts orders in (0, 1] so that semigroup sums like alpha + beta work.
    a = float(getattr(alpha, "alpha", alpha))
    if not 0.0 < a <= 1.0:
        raise ValueError(f"order {a} must lie in (0, 1]")
    return a


def rl_integral(u: GridFunction, alpha) -> GridFunction:
    r"""Riemann-Liouville integral :math:`J^\alpha u` on the grid of ``u``."""
    a = _order_value(alpha)
    return u.with_values(uniform_convolve(power_moments(a), u.values, u.h))


def resolvent_J(lam: float, u: GridFunction) -> GridFunction:
    r""":math:`(\lambda I + J)^{-1} u` with :math:`J` the plain integral."""
    if not lam > 0.0:
        raise ValueError(f"lambda={lam} must be positive")
    conv = exp_convolve(u.values, u.h, lam)
    return u.with_values(u.values / lam - conv / lam**2)


@dataclass(frozen=True)
class LogQuadrature:
    """Gauss-Legendre rule in ``s = log(lambda)`` over ``[s_min, s_max]``."""

    n_nodes: int = 400
    s_min: float = -30.0
    s_max: float = 30.0

    def __post_init__(self) -> None:
        if self.n_nodes < 2 or not self.s_min < self.s_max:
            raise ValueError(f"degenerate quadrature window {self}")

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        x, w = np.polynomial.legendre.leggauss(self.n_nodes)
        half = 0.5 * (self.s_max - self.s_min)
        return self.s_min + half * (x + 1.0), half * w


def balakrishnan_terms(u: GridFunction, alpha, quad: LogQuadrature = LogQuadrature()):
    """Truncated integral and the two analytic tail terms, separately.

    Returns ``(body, small_tail, large_tail)`` as value arrays; their sum is
    :func:`balakrishnan_J`.
    """
    a = as_order(alpha).alpha
    s, w = quad.nodes()
    scale = np.sin(np.pi * a) / np.pi
    body = np.zeros_like(u.values)
    # (lam I + J)^{-1} J u equals lam^{-1} times the exponential convolution.
    for si, wi in zip(s, w):
        lam = np.exp(si)
        body += (wi * lam ** (a - 1.0)) * exp_convolve(u.values, u.h, lam)
    Ju = np.concatenate(([0.0], np.cumsum(0.5 * u.h * (u.values[1:] + u.values[:-1]))))
    small = np.exp(a * quad.s_min) / a * u.values
    small[0] = 0.0
    large = np.exp(-(1.0 - a) * quad.s_max) / (1.0 - a) * Ju
    return scale * body, scale * small, scale * large


def balakrishnan_J(
    u: GridFunction,
    alpha,
    quad: LogQuadrature = LogQuadrature(),
    *,
    tail_correction: bool = True,
) -> GridFunction:
    r"""Fractional power of :math:`J` from its resolvent integral.

    .. math::

        J(\alpha) u = \frac{\sin \pi\alpha}{\pi} \int_0^\infty
            \lambda^{\alpha - 1} (\lambda I + J)^{-1} J u \, d\lambda

    With ``tail_correction`` the parts of the integral outside the window are
    added from their leading-order asymptotics.
    """
    body, small, large = balakrishnan_terms(u, alpha, quad)
    out = body + small + large if tail_correction else body
    return u.with_values(out)


@lru_cache(maxsize=16)
def _caputo_modes(K: int, alpha: float, T: float, N: int) -> np.ndarray:
    t = np.linspace(0.0, T, N + 1)
    lam = time_basis.eigenvalues(K, T)
    z = -(lam[:, None] * t[None, :] ** 2)
    E = ml_array(2.0, 2.0 - alpha, z.ravel()).reshape(z.shape)
    out = np.sqrt(2.0 / T) * np.sqrt(lam)[:, None] * t[None, :] ** (1.0 - alpha) * E
    out[:, 0] = 0.0
    out.setflags(write=False)
    return out


def caputo_mode(k: int, alpha, T: float, grid: GridFunction | int) -> GridFunction:
    r"""Caputo derivative of the ``k``-th sine mode in closed form.

    .. math::

        \partial_t^\alpha \psi_k(t) = \sqrt{2/T} \sqrt{\lambda_k}
            \, t^{1-\alpha} E_{2, 2-\alpha}(-\lambda_k t^2)
    """
    if int(k) != k or k < 1:
        raise ValueError(f"mode index k={k} must be a positive integer")
    a = as_order(alpha).alpha
    N = time_basis._n_intervals(grid, T)
    return GridFunction(T, _caputo_modes(int(k), a, float(T), N)[-1])


def caputo_mode_matrix(K: int, alpha, grid: GridFunction) -> np.ndarray:
    """``(K, N+1)`` samples of the Caputo derivatives of the first ``K`` modes."""
    return _caputo_modes(int(K), as_order(alpha).alpha, grid.domain_length, grid.n_intervals)


def _spectral_caputo(u: GridFunction, a: float, K: int) -> np.ndarray:
    c = time_basis.project(u, K)
    return c.coeffs @ caputo_mode_matrix(K, a, u)


def _l1_caputo(u: GridFunction, a: float) -> np.ndarray:
    v = u.values
    N = v.size - 1
    m = np.arange(N, dtype=float)
    b = (m + 1.0) ** (1.0 - a) - m ** (1.0 - a)
    out = np.zeros(N + 1)
    out[1:] = np.convolve(b, np.diff(v))[:N] * (u.h**-a * rgamma(2.0 - a))
    return out


def l1_caputo_values(values: np.ndarray, t: np.ndarray, alpha) -> np.ndarray:
    """L1 scheme on arbitrary increasing nodes ``t``, along the last axis of ``values``."""
    a = as_order(alpha).alpha
    t = np.asarray(t, dtype=float)
    D = t[:, None] - t[None, :]
    P = np.where(D > 0.0, D, 0.0) ** (1.0 - a)
    S = (P[:, :-1] - P[:, 1:]) * (rgamma(2.0 - a) / np.diff(t))
    return np.diff(values, axis=-1) @ S.T


@dataclass(frozen=True)
class CaputoDiagnostics:
    cauchy_increment: float
    tail_ratio: float
    range: time_basis.RangeDiagnostic


def spectral_diagnostics(u: GridFunction, alpha, K: int = time_basis.DEFAULT_K) -> CaputoDiagnostics:
    """Convergence and range evidence for the spectral Caputo derivative.

    ``cauchy_increment`` is the L2 norm of the difference between the ``K``
    and ``K // 2`` truncations.
    """
    order = as_order(alpha)
    full = _spectral_caputo(u, order.alpha, K)
    if K >= 2:
        half = _spectral_caputo(u, order.alpha, K // 2)
        inc = l2_norm(u.with_values(full - half))
    else:
        inc = float("nan")
    return CaputoDiagnostics(
        inc,
        time_basis.tail_ratio(u, order, K),
        time_basis.range_membership(u, order, K),
    )


def caputo(
    u: GridFunction,
    alpha,
    method: CaputoMethod | str = CaputoMethod.SPECTRAL,
    K: int = time_basis.DEFAULT_K,
    *,
    check_range: bool = True,
) -> GridFunction:
    """Caputo derivative of order ``alpha``.

    ``spectral`` projects ``u`` on ``K`` sine modes and differentiates each
    mode exactly; it is defined for every ``u`` in the range of the
    fractional integral. ``l1`` is the classical L1 finite-difference scheme
    for differentiable ``u``. A :class:`RangeWarning` is issued when the
    spectral method receives data that fail :func:`time_basis.range_membership`.
    """
    order: FractionalOrder = as_order(alpha)
    method = CaputoMethod(method)
    if method is CaputoMethod.L1:
        return u.with_values(_l1_caputo(u, order.alpha))
    if check_range:
        diag = time_basis.range_membership(u, order, K)
        if not diag.in_range:
            warnings.warn(f"input outside the fractional range: {diag.evidence}", RangeWarning, 2)
    return u.with_values(_spectral_caputo(u, order.alpha, K))


def j_inverse(u: GridFunction, alpha, K: int = time_basis.DEFAULT_K) -> GridFunction:
    """Inverse of the fractional integral on its range (spectral Caputo)."""
    return caputo(u, alpha, CaputoMethod.SPECTRAL, K)


MIN_RL_INTERVALS = 8
# Half-width of the difference stencil, in grid steps.
_STENCIL = 0.125


def rl_derivative(u: GridFunction, alpha) -> GridFunction:
    r"""Riemann-Liouville derivative :math:`\frac{d}{dt} J^{1-\alpha} u`.

    The integral is evaluated by product integration at ``t_n +- h/8`` and
    differenced centrally. The narrow stencil keeps the error small next to
    ``t = 0``, where the integral behaves like :math:`t^{1-\alpha}`. The
    endpoints use one-sided three-point formulas; the value at ``t = 0`` is a
    finite surrogate for a possibly infinite limit.
    """
    a = as_order(alpha).alpha
    N = u.n_intervals
    if N < MIN_RL_INTERVALS:
        raise ValueError(f"grid too coarse: N={N} < {MIN_RL_INTERVALS}")
    t = u.nodes
    d = _STENCIL * u.h
    m = power_moments(1.0 - a)
    inner = t[1:-1]
    targets = np.concatenate((inner - d, inner + d, [d, 2 * d, t[-1] - d, t[-1] - 2 * d, t[-1]]))
    g = weight_matrix(m, t, targets) @ u.values
    n = inner.size
    out = np.empty(N + 1)
    out[1:-1] = (g[n : 2 * n] - g[:n]) / (2 * d)
    g_d, g_2d, gT_d, gT_2d, gT = g[2 * n :]
    out[0] = (4 * g_d - g_2d) / (2 * d)  # g(0) = 0
    out[-1] = (3 * gT - 4 * gT_d + gT_2d) / (2 * d)
    return u.with_values(out)
