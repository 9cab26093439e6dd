"""Discrete objects shared by all modules: orders, grid functions, spectra."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

HALF_TOL = 1e-12


class Regime(str, enum.Enum):
    BELOW_HALF = "below_half"
    HALF = "half"
    ABOVE_HALF = "above_half"


@dataclass(frozen=True)
class FractionalOrder:
    """Order ``0 < alpha < 1`` tagged by its position relative to one half."""

    alpha: float

    def __post_init__(self) -> None:
        a = float(self.alpha)
        if not (0.0 < a < 1.0):
            raise ValueError(f"alpha={a} must lie in (0, 1)")
        object.__setattr__(self, "alpha", a)

    @property
    def regime(self) -> Regime:
        if abs(self.alpha - 0.5) < HALF_TOL:
            return Regime.HALF
        return Regime.BELOW_HALF if self.alpha < 0.5 else Regime.ABOVE_HALF

    def __float__(self) -> float:
        return self.alpha


def as_order(alpha) -> FractionalOrder:
    return alpha if isinstance(alpha, FractionalOrder) else FractionalOrder(alpha)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real samples ``values[j] = u(j h)`` with ``h = domain_length / N``."""

    domain_length: float
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size < 3:
            raise ValueError("a grid function needs N >= 2 intervals")
        if not np.all(np.isfinite(values)):
            raise ValueError("grid function values must be finite")
        if not self.domain_length > 0:
            raise ValueError(f"domain_length={self.domain_length} must be positive")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "domain_length", float(self.domain_length))

    @classmethod
    def from_function(cls, f, domain_length: float, n_intervals: int) -> "GridFunction":
        t = np.linspace(0.0, domain_length, n_intervals + 1)
        return cls(domain_length, np.broadcast_to(f(t), t.shape))

    @classmethod
    def zeros_like(cls, other: "GridFunction") -> "GridFunction":
        return cls(other.domain_length, np.zeros_like(other.values))

    @property
    def n_intervals(self) -> int:
        return self.values.size - 1

    @property
    def h(self) -> float:
        return self.domain_length / self.n_intervals

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.domain_length, self.values.size)

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.domain_length, values)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        return self.with_values(self.values - other.values)

    def __mul__(self, c: float) -> "GridFunction":
        return self.with_values(c * self.values)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GridFunction)
            and self.domain_length == other.domain_length
            and np.array_equal(self.values, other.values)
        )


class Basis(str, enum.Enum):
    A_SINE = "A_sine_basis"
    DIRICHLET_LAPLACIAN = "dirichlet_laplacian"
    USER_SUPPLIED = "user_supplied"


@dataclass(frozen=True, eq=False)
class SpectralCoefficients:
    """Coefficients of a function in a named orthonormal eigenbasis.

    ``coeffs[k - 1]`` multiplies the ``k``-th basis function.
    """

    basis: Basis
    domain_length: float
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        coeffs = np.array(self.coeffs, dtype=float)
        if coeffs.ndim != 1 or coeffs.size < 1:
            raise ValueError("need at least one coefficient")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coefficients must be finite")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "basis", Basis(self.basis))
        object.__setattr__(self, "domain_length", float(self.domain_length))

    @property
    def K(self) -> int:
        return self.coeffs.size

    def with_coeffs(self, coeffs) -> "SpectralCoefficients":
        return SpectralCoefficients(self.basis, self.domain_length, coeffs)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SpectralCoefficients)
            and self.basis == other.basis
            and self.domain_length == other.domain_length
            and np.array_equal(self.coeffs, other.coeffs)
        )


def l2_norm(u: GridFunction, *, skip_first: bool = False) -> float:
    """Trapezoidal L2(0, T) norm; ``skip_first`` drops the interval at t = 0."""
    v = u.values[1:] if skip_first else u.values
    return float(np.sqrt(np.trapezoid(v**2, dx=u.h)))
