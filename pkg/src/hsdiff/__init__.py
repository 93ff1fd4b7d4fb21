"""Fractional-order Sobolev geometry on diffeomorphism groups.

Spectral H^s norms and right-invariant metrics, flows of time-dependent
vector fields, explicit short-path constructions that witness vanishing
geodesic distance for s <= 1/2, pseudo-spectral solvers for the
associated geodesic equations (Burgers, Camassa-Holm, modified
Constantin-Lax-Majda, Hunter-Saxton), and Bessel-kernel Green's
functions for the inertia operators.
"""

from . import errors, flow, geodesic, kernels, norms, shortpath, spectral
from .norms import Diffeo1D, MetricSpec
from .spectral import Field, Grid1D, MultiplierOp, SpectralField

__all__ = [
    "errors",
    "spectral",
    "norms",
    "flow",
    "shortpath",
    "geodesic",
    "kernels",
    "Grid1D",
    "Field",
    "SpectralField",
    "MultiplierOp",
    "MetricSpec",
    "Diffeo1D",
]

__version__ = "0.1.0"
