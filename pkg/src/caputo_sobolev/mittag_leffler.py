r"""Two-parameter Mittag-Leffler function on the real axis.

.. math::

    E_{\alpha,\beta}(z) = \sum_{k=0}^{\infty} \frac{z^k}{\Gamma(\alpha k + \beta)}

Two evaluation regimes are used:

* ``taylor_series`` for :math:`z \ge 0` (all terms positive, no cancellation)
  and for :math:`-5 \le z < 0` whenever the largest series term stays below
  :data:`TAYLOR_MAX_TERM`, so that cancellation costs at most one digit.
* ``integral_representation`` everywhere else on the negative axis. This is
  the inverse Laplace transform

  .. math::

      E_{\alpha,\beta}(z) = \frac{1}{2\pi i} \int_{\mathcal{C}}
          \frac{e^s s^{\alpha-\beta}}{s^\alpha - z} \,\mathrm{d}s

  on a parabolic Hankel contour :math:`s(u) = \mu (1 + iu)^2`, discretised by
  the trapezoidal rule. Poles of the integrand that lie on the principal
  sheet (only possible for :math:`\alpha > 1`) and to the right of the
  contour are added back as residues. The contour parameters are chosen per
  argument so that the discretisation, truncation and pole errors are all
  below ``exp(-CONTOUR_LOG_TOL)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

#: Largest admissible ``|z|`` on the negative axis.
Z_MAX = 1.0e8
#: Radius of the Taylor regime on the negative axis.
TAYLOR_RADIUS = 5.0
#: Largest series term tolerated by the Taylor regime for ``z < 0``.
TAYLOR_MAX_TERM = 8.0
#: Largest admissible order for the contour regime.
ALPHA_MAX = 2.0
#: ``-log`` of the target absolute accuracy of the contour quadrature.
CONTOUR_LOG_TOL = 36.0

_EPS = np.finfo(float).eps
_MU_CANDIDATES = np.geomspace(0.02, 4.0, 40)
_MAX_DEPTH = 5.0
_LEFT_STRIP = 0.85
_POLE_MARGIN = 0.85
_STEP_LADDER = 16


class MittagLefflerError(ValueError):
    """Raised for invalid orders or arguments outside the supported range."""


def gamma(x):
    """Gamma function used by every module of the package."""
    return special.gamma(x)


def rgamma(x):
    """Reciprocal gamma function, ``1/gamma(x)``; exact zero at the poles."""
    return special.rgamma(x)


@dataclass(frozen=True)
class MLQuery:
    alpha: float
    beta: float
    z: float

    def __post_init__(self) -> None:
        if not (self.alpha > 0 and self.beta > 0):
            raise MittagLefflerError(
                f"invalid-order: alpha={self.alpha}, beta={self.beta} must be > 0"
            )
        if not math.isfinite(self.z):
            raise MittagLefflerError(f"out-of-range: z={self.z} is not finite")


@dataclass(frozen=True)
class MLResult:
    value: float
    est_abs_error: float
    regime: str  # "taylor_series" | "integral_representation"


# {{{ taylor series


def _taylor(alpha: float, beta: float, z: float, max_term: float | None):
    """Sum the series; return ``None`` if a term exceeds *max_term*."""
    if z == 0.0:
        return float(rgamma(beta)), 0.0

    logz = math.log(abs(z))
    sign = -1.0 if z < 0 else 1.0
    terms: list[float] = []
    k = 0
    chunk = 64
    while True:
        ks = np.arange(k, k + chunk, dtype=float)
        logt = ks * logz - special.gammaln(alpha * ks + beta)
        sgn = special.gammasgn(alpha * ks + beta) * sign ** (ks % 2)
        if max_term is not None and np.max(logt) > math.log(max_term):
            return None
        if ks[-1] * abs(logz) < 600.0:
            # direct powers keep full relative accuracy of each term
            vals = np.power(z, ks) * rgamma(alpha * ks + beta)
        else:
            vals = sgn * np.exp(logt)
        terms.extend(vals.tolist())
        k += chunk
        # stop once the decaying tail, bounded geometrically, is negligible
        ratio = math.exp(logt[-1] - logt[-2])
        if ratio < 1.0:
            bound = abs(vals[-1]) * ratio / (1.0 - ratio)
            if bound < 1e-18 * max(1.0, abs(math.fsum(terms))):
                break
        if k > 200_000:
            raise MittagLefflerError(
                f"out-of-range: series for z={z} did not converge"
            )

    value = math.fsum(terms)
    abs_sum = math.fsum(abs(t) for t in terms)
    ratio = math.exp(logt[-1] - logt[-2])
    est = float(abs(terms[-1]) * ratio / (1.0 - ratio) + 4.0 * _EPS * abs_sum)
    return value, est


# }}}


# {{{ contour integral


def _poles(alpha: float, z: np.ndarray):
    """Poles ``s^alpha = z`` on the principal sheet, as a list of arrays.

    Each entry is ``(p, on)`` where ``on`` masks the elements for which that
    branch of the pole lies strictly inside ``|arg s| < pi``.
    """
    x = np.abs(z)
    theta = np.where(z < 0, np.pi, 0.0)
    r = x ** (1.0 / alpha)
    jmax = int(math.ceil(alpha)) + 1
    out = []
    for j in range(-jmax, jmax + 1):
        ang = (theta + 2.0 * np.pi * j) / alpha
        on = (np.abs(ang) < np.pi) & (x > 0)
        if np.any(on):
            out.append((r * np.exp(1j * ang), on))
    return out


def _plan(alpha: float, beta: float, z: np.ndarray):
    """Choose contour parameters ``(mu, h, J)`` for every element of *z*."""
    A = CONTOUR_LOG_TOL
    poles = _poles(alpha, z) if alpha > 1.0 else []

    best_j = np.full(z.shape, np.inf)
    best_mu = np.zeros(z.shape)
    best_h = np.zeros(z.shape)
    for mu in _MU_CANDIDATES:
        # the integrand grows like |s|^-beta near the origin, which the
        # contour approaches as the strip widens towards the branch cut
        penalty = max(0.0, beta * math.log(1.0 / (mu * (1.0 - _LEFT_STRIP) ** 2)))
        d_left = np.full(z.shape, _LEFT_STRIP)
        d_right = np.full(z.shape, _MAX_DEPTH)
        for p, on in poles:
            v = 1.0 - np.sqrt(p / mu).real
            d_left = np.where(on & (v >= 0), np.minimum(d_left, _POLE_MARGIN * v), d_left)
            d_right = np.where(on & (v < 0), np.minimum(d_right, -_POLE_MARGIN * v), d_right)

        h_left = 2.0 * np.pi * d_left / (A + penalty)
        # 2 pi d / (A + mu (1 + d)^2) peaks at d = sqrt((A + mu) / mu)
        d = np.minimum(d_right, math.sqrt((A + mu) / mu))
        h_right = 2.0 * np.pi * d / (A + mu * (1.0 + d) ** 2)

        h = np.minimum(h_left, h_right)
        u_max = math.sqrt(1.0 + (A + 2.0) / mu)
        with np.errstate(divide="ignore"):
            J = np.ceil(u_max / h)
        better = J < best_j
        best_j = np.where(better, J, best_j)
        best_mu = np.where(better, mu, best_mu)
        best_h = np.where(better, h, best_h)

    if not np.all(np.isfinite(best_j)):
        raise MittagLefflerError("out-of-range: no admissible contour (pole on contour)")
    return best_mu, best_h, best_j.astype(int)


def _contour(alpha, beta, z, mu, h, J, *, with_abs=False):
    """Trapezoidal sum on the parabola plus swept residues (vectorised)."""
    out = np.zeros(z.shape)
    abs_sum = np.zeros(z.shape)

    # constant parameters allow a cheap node-by-node accumulation
    if np.ndim(mu) == 0 or (np.all(mu == mu.flat[0]) and np.all(h == h.flat[0])):
        mu0 = float(np.ravel(mu)[0])
        h0 = float(np.ravel(h)[0])
        J0 = int(np.max(J))
        u = h0 * np.arange(J0 + 1)
        s = mu0 * (1.0 + 1j * u) ** 2
        w = np.full(J0 + 1, 2.0)
        w[0] = 1.0
        c = w * np.exp(s) * s ** (alpha - beta) * (1.0 + 1j * u) * (h0 * mu0 / np.pi)
        sa = s**alpha
        for cj, aj in zip(c, sa):
            d = aj.real - z
            den = d * d + aj.imag**2
            term = (cj.real * d + cj.imag * aj.imag) / den
            out += term
            if with_abs:
                abs_sum += abs(cj) / np.sqrt(den)
        mu = np.full(z.shape, mu0)
    else:
        Jm = int(np.max(J))
        k = np.arange(Jm + 1)
        u = h[:, None] * k[None, :]
        s = mu[:, None] * (1.0 + 1j * u) ** 2
        w = np.where(k == 0, 1.0, 2.0)[None, :] * (k[None, :] <= J[:, None])
        c = w * np.exp(s) * s ** (alpha - beta) * (1.0 + 1j * u) * (h * mu / np.pi)[:, None]
        terms = c / (s**alpha - z[:, None])
        out = np.real(terms.sum(axis=1))
        if with_abs:
            abs_sum = np.abs(terms).sum(axis=1)

    if alpha > 1.0:
        for p, on in _poles(alpha, z):
            swept = on & (1.0 - np.sqrt(p / mu).real < 0)
            if np.any(swept):
                with np.errstate(over="ignore", invalid="ignore"):
                    res = (p ** (1.0 - beta) * np.exp(p) / alpha).real
                out = out + np.where(swept, res, 0.0)
                # exp(p) carries a phase error of order eps * |p|
                abs_sum = abs_sum + np.where(swept, np.abs(res) * (1.0 + np.abs(p)), 0.0)
    return out, abs_sum


# }}}


def _grouped_contours(alpha: float, beta: float, z: np.ndarray) -> np.ndarray:
    """Contour values for many arguments when each needs its own plan.

    Steps are rounded down to a ladder of ratio 2^(1/16); arguments sharing
    a scale and a rounded step then share the contour nodes.
    """
    mu, h, _ = _plan(alpha, beta, z)
    hq = np.exp2(np.floor(np.log2(h) * _STEP_LADDER) / _STEP_LADDER)
    u_max = np.sqrt(1.0 + (CONTOUR_LOG_TOL + 2.0) / mu)
    J = np.ceil(u_max / hq).astype(int)
    out = np.empty_like(z)
    keys = np.stack([mu, hq])
    _, group = np.unique(keys, axis=1, return_inverse=True)
    for g in np.unique(group):
        idx = np.flatnonzero(group == g)
        i0 = idx[0]
        out[idx], _ = _contour(alpha, beta, z[idx], np.float64(mu[i0]), np.float64(hq[i0]), J[idx])
    return out


def _check_range(alpha: float, z: float) -> None:
    if z < -Z_MAX:
        raise MittagLefflerError(f"out-of-range: z={z} < -Z_MAX={-Z_MAX}")
    if z > 0:
        # E grows like exp(z^(1/alpha)) on the positive axis
        if math.log(z) / alpha > math.log(700.0):
            raise MittagLefflerError(f"out-of-range: E_(alpha,beta)({z}) overflows")
    if z < 0 and alpha > ALPHA_MAX and abs(z) > TAYLOR_RADIUS:
        raise MittagLefflerError(
            f"out-of-range: alpha={alpha} > {ALPHA_MAX} only supported for |z| <= {TAYLOR_RADIUS}"
        )


def ml(q: MLQuery | float, beta: float | None = None, z: float | None = None) -> MLResult:
    """Evaluate :math:`E_{\\alpha,\\beta}(z)` with an error estimate.

    Accepts either an :class:`MLQuery` or the three numbers ``(alpha, beta, z)``.
    """
    if not isinstance(q, MLQuery):
        q = MLQuery(float(q), float(beta), float(z))
    alpha, beta, z = q.alpha, q.beta, q.z
    _check_range(alpha, z)

    if z >= 0.0:
        value, est = _taylor(alpha, beta, z, None)
        return MLResult(value, est, "taylor_series")

    if abs(z) <= TAYLOR_RADIUS:
        res = _taylor(alpha, beta, z, TAYLOR_MAX_TERM)
        if res is not None:
            return MLResult(res[0], res[1], "taylor_series")

    za = np.array([z])
    mu, h, J = _plan(alpha, beta, za)
    fine, abs_sum = _contour(alpha, beta, za, mu, h, J, with_abs=True)
    # a 10% coarser rule bounds the error of the finer one from above
    h2 = 1.1 * h
    J2 = np.ceil(J * h / h2).astype(int)
    coarse, _ = _contour(alpha, beta, za, mu, h2, J2)
    est = abs(fine[0] - coarse[0]) + 8.0 * _EPS * abs_sum[0]
    return MLResult(float(fine[0]), float(est), "integral_representation")


def ml_array(alpha: float, beta: float, z) -> np.ndarray:
    """Vectorised :math:`E_{\\alpha,\\beta}(z)` without error estimates.

    Non-positive arguments go through the contour rule (its accuracy is
    uniform down to ``z = 0``), positive ones through the series.
    """
    if not (alpha > 0 and beta > 0):
        raise MittagLefflerError(f"invalid-order: alpha={alpha}, beta={beta}")
    z = np.asarray(z, dtype=float)
    flat = z.ravel()
    if not np.all(np.isfinite(flat)):
        raise MittagLefflerError("out-of-range: non-finite argument")
    if flat.size and flat.min() < -Z_MAX:
        raise MittagLefflerError(f"out-of-range: z < -Z_MAX={-Z_MAX}")
    out = np.empty_like(flat)

    pos = flat > 0
    for i in np.flatnonzero(pos):
        out[i] = ml(MLQuery(alpha, beta, float(flat[i]))).value

    zero = flat == 0.0
    out[zero] = rgamma(beta)

    neg = flat < 0
    if np.any(neg):
        zn = flat[neg]
        if alpha > ALPHA_MAX:
            out[neg] = [ml(MLQuery(alpha, beta, float(v))).value for v in zn]
        else:
            if alpha <= 1.0:
                # pole-free: one contour serves every argument
                mu, h, J = _plan(alpha, beta, np.array([-1.0]))
                mu, h, J = mu[0], h[0], J[0]
                val, _ = _contour(alpha, beta, zn, np.asarray(mu), np.asarray(h), np.full(zn.shape, J))
            else:
                val = _grouped_contours(alpha, beta, zn)
            out[neg] = val
    return out.reshape(z.shape)


def ml_kernel(alpha, mu: float, t):
    r"""Heat-type kernel :math:`t^{\alpha-1} E_{\alpha,\alpha}(-\mu t^\alpha)`.

    *alpha* may be a float or a :class:`~caputo_sobolev.grids.FractionalOrder`;
    *t* may be a scalar or an array of strictly positive times.
    """
    alpha = float(getattr(alpha, "alpha", alpha))
    if mu < 0:
        raise ValueError(f"mu={mu} must be nonnegative")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0) or not np.all(np.isfinite(t_arr)):
        raise ValueError("nonpositive t: the kernel is singular at t = 0")
    vals = t_arr ** (alpha - 1.0) * ml_array(alpha, alpha, -mu * t_arr**alpha)
    return float(vals) if np.ndim(t) == 0 else vals
