"""Fractional calculus on Sobolev scales and time-fractional diffusion."""

from .grids import Basis, FractionalOrder, GridFunction, Regime, SpectralCoefficients

__all__ = ["Basis", "FractionalOrder", "GridFunction", "Regime", "SpectralCoefficients"]
__version__ = "0.1.0"
