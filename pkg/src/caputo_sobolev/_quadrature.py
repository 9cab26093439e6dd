r"""Product integration of convolution kernels against piecewise-linear data.

For a kernel :math:`k(\tau)` with first and second antiderivatives
:math:`K_1(\tau) = \int_0^\tau k` and :math:`K_2(\tau) = \int_0^\tau K_1`, the
integral :math:`\int_0^s k(s - \sigma) f(\sigma) d\sigma` of the piecewise
linear interpolant of ``f`` is a finite combination of :math:`K_1` and
:math:`K_2` values. Weakly singular kernels are therefore handled exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.signal import lfilter

from .mittag_leffler import ml_array, rgamma

Moment = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class KernelMoments:
    """First and second antiderivatives of a convolution kernel, zero at 0."""

    K1: Moment
    K2: Moment


def power_moments(alpha: float) -> KernelMoments:
    """Moments of the Riemann-Liouville kernel ``tau**(alpha-1) / Gamma(alpha)``."""
    g1, g2 = rgamma(alpha + 1.0), rgamma(alpha + 2.0)
    return KernelMoments(lambda x: g1 * x**alpha, lambda x: g2 * x ** (alpha + 1.0))


def relaxation_moments(alpha: float, mu: float) -> KernelMoments:
    """Moments of ``tau**(alpha-1) * E_{alpha,alpha}(-mu tau**alpha)``."""
    if mu == 0.0:
        return power_moments(alpha)

    def K1(x):
        xa = x**alpha
        return xa * ml_array(alpha, alpha + 1.0, -mu * xa)

    def K2(x):
        xa = x**alpha
        return x * xa * ml_array(alpha, alpha + 2.0, -mu * xa)

    return KernelMoments(K1, K2)


def uniform_weights(m: KernelMoments, h: float, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Toeplitz weights ``(c, b)`` for :func:`apply_uniform` on ``N`` steps of size ``h``."""
    x = h * np.arange(N + 2)
    K1, K2 = m.K1(x), m.K2(x)
    dK2 = np.diff(K2) / h  # dK2[d-1] = (K2(dh) - K2((d-1)h)) / h
    a = np.zeros(N + 1)
    a[1:] = K1[1 : N + 1] - dK2[:N]
    # b[e] weights f_{n-e} as the right end of an interval
    b = dK2[: N + 1] - K1[: N + 1]
    return a + b, b


def apply_uniform(c: np.ndarray, b: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Discrete convolution of the product-integration weights with ``f``."""
    f = np.asarray(f, dtype=float)
    n = f.size
    out = np.convolve(c[:n], f)[:n] - b[:n] * f[0]
    out[0] = 0.0
    return out


def uniform_convolve(m: KernelMoments, f: np.ndarray, h: float) -> np.ndarray:
    """Product integration on the nodes of a uniform grid.

    The weights depend only on the node distance, so the sum is a discrete
    convolution.
    """
    c, b = uniform_weights(m, h, np.size(f) - 1)
    return apply_uniform(c, b, f)


def weight_matrix(m: KernelMoments, t: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Matrix ``W`` with ``W @ f`` the integral up to each target in ``s``.

    ``t`` are increasing interpolation nodes starting at 0, ``s`` arbitrary
    targets in ``[0, t[-1]]``.
    """
    t = np.asarray(t, dtype=float)
    s = np.atleast_1d(np.asarray(s, dtype=float))
    N = t.size - 1
    hj = np.diff(t)
    D = s[:, None] - t[None, :]
    full = D[:, 1:] >= 0.0  # interval j lies entirely below the target
    Dc = np.where(D > 0.0, D, 0.0)
    K1, K2 = m.K1(Dc), m.K2(Dc)
    dK2 = (K2[:, :-1] - K2[:, 1:]) / hj
    W = np.zeros((s.size, N + 1))
    W[:, :-1] += np.where(full, K1[:, :-1] - dK2, 0.0)
    W[:, 1:] += np.where(full, dK2 - K1[:, 1:], 0.0)

    # Partial interval [t_m, s] when the target is not a node.
    m_idx = np.clip(np.searchsorted(t, s, side="right") - 1, 0, N - 1)
    delta = s - t[m_idx]
    part = (delta > 0.0) & (s < t[-1])
    if np.any(part):
        d = delta[part]
        mi = m_idx[part]
        k1, k2 = m.K1(d), m.K2(d)
        slope_w = k2 / hj[mi]
        rows = np.nonzero(part)[0]
        W[rows, mi] += k1 - slope_w
        W[rows, mi + 1] += slope_w
    return W


_FACT = np.cumprod(np.r_[1.0, np.arange(1.0, 20.0)])


def _exp_weights(r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Weights (scaled by 1/lambda) of the old and new node for step ``r = h/lambda``."""
    r = np.asarray(r, dtype=float)
    w_old = np.empty_like(r)
    w_new = np.empty_like(r)
    small = r < 0.5
    big = ~small
    e = np.exp(-r[big])
    g = -np.expm1(-r[big]) / r[big]
    w_old[big] = g - e
    w_new[big] = 1.0 - g
    rs = r[small]
    term = np.ones_like(rs)
    so = np.zeros_like(rs)
    sn = np.zeros_like(rs)
    for n in range(1, 18):
        term = term * rs
        c = (-1) ** (n + 1) / _FACT[n + 1]
        sn += c * term
        so += c * n * term
    w_old[small] = so
    w_new[small] = sn
    return w_old, w_new


def exp_convolve(u: np.ndarray, h: float, lam: float) -> np.ndarray:
    r""":math:`\int_0^{t_n} e^{-(t_n - s)/\lambda} u(s) ds` for piecewise-linear ``u``."""
    u = np.asarray(u, dtype=float)
    r = h / lam
    w_old, w_new = _exp_weights(np.array([r]))
    decay = np.exp(-r)
    y = lfilter([lam * w_new[0], lam * w_old[0]], [1.0, -decay], u)
    # lfilter seeds y[0] = w_new * u[0]; remove that spurious start.
    y -= lam * w_new[0] * u[0] * decay ** np.arange(u.size)
    y[0] = 0.0
    return y
