"""Discrete Fourier infrastructure on a uniform periodic grid.

Grids, real fields and their spectra, Fourier-multiplier operators
(fractional inertia operators, Hilbert transform, spectral derivative)
and smoothing convolution.

Conventions
-----------
* Unitary DFT: ``coeffs = fft(values) / sqrt(n)``, so the discrete
  Parseval identity ``sum |values|^2 == sum |coeffs|^2`` is literal.
* Wavenumbers are ``xi_k = 2*pi*k/L`` with ``k = -n/2+1, ..., n/2``
  stored in FFT layout (the Nyquist entry carries ``+n/2``).
* Odd symbols (derivative, Hilbert transform) zero the unpaired Nyquist
  mode so results stay real.
* Homogeneous symbols declare ``sigma(0) = 0`` and their inverses demand
  zero-mean input, matching the quotient of constants on Diff(S^1)/S^1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    HomogeneousNonzeroMean,
    KernelUnresolved,
    NonHermitianInput,
    SymbolSingularAtZero,
)

MEAN_TOL = 1e-10


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic sampling of a circle (or padded line window).

    Parameters
    ----------
    n_points : int
        Number of nodes; powers of two are recommended for the FFT.
    length : float
        Period L of the domain. Nodes are x_j = j*L/n, j = 0..n-1.
    """

    n_points: int
    length: float

    def __post_init__(self):
        if self.n_points < 2:
            raise ValueError("grid needs at least 2 points")
        if not self.length > 0:
            raise ValueError("grid length must be positive")

    @property
    def spacing(self) -> float:
        return self.length / self.n_points

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n_points) * self.spacing

    @property
    def wavenumbers(self) -> np.ndarray:
        n, L = self.n_points, self.length
        k = np.fft.fftfreq(n, d=1.0 / n)
        if n % 2 == 0:
            k = k.copy()
            k[n // 2] = n // 2  # store Nyquist as +n/2
        return 2.0 * np.pi * k / L


@dataclass
class Field:
    """Real-valued function samples on a grid."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_points,):
            raise ValueError("values must have one entry per grid node")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")

    def mean(self) -> float:
        return float(np.mean(self.values))


@dataclass
class SpectralField:
    """Complex Fourier coefficients of a field, unitary normalization."""

    grid: Grid1D
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.shape != (self.grid.n_points,):
            raise ValueError("coeffs must have one entry per wavenumber")

    def hermitian_defect(self) -> float:
        """Max deviation from coeff(-xi) == conj(coeff(xi))."""
        c = self.coeffs
        idx = (-np.arange(len(c))) % len(c)
        return float(np.max(np.abs(c[idx] - np.conj(c))))


@dataclass(frozen=True)
class MultiplierOp:
    """Fourier multiplier: field -> F^-1 [ symbol(xi) * F field ].

    ``odd`` marks sign-odd symbols whose unpaired Nyquist mode is zeroed.
    ``requires_zero_mean`` marks inverses of homogeneous operators.
    """

    symbol: Callable[[np.ndarray], np.ndarray]
    label: str
    odd: bool = False
    requires_zero_mean: bool = False

    def values_on(self, grid: Grid1D) -> np.ndarray:
        xi = grid.wavenumbers
        sig = np.asarray(self.symbol(xi), dtype=complex)
        if sig.shape != xi.shape:
            sig = np.broadcast_to(sig, xi.shape).astype(complex)
        else:
            sig = sig.copy()
        if not np.all(np.isfinite(sig)):
            zero = np.isclose(xi, 0.0)
            if np.any(~np.isfinite(sig[zero])):
                raise SymbolSingularAtZero(
                    f"symbol '{self.label}' undefined at xi=0; declare sigma(0)"
                )
            raise ValueError(f"symbol '{self.label}' not finite on grid wavenumbers")
        if self.odd and grid.n_points % 2 == 0:
            sig[grid.n_points // 2] = 0.0
        return sig


def forward(f: Field) -> SpectralField:
    """Unitary DFT of a real field."""
    coeffs = np.fft.fft(f.values) / np.sqrt(f.grid.n_points)
    return SpectralField(f.grid, coeffs)


def inverse(sf: SpectralField, hermitian_tol: float = 1e-10) -> Field:
    """Inverse unitary DFT; input must be Hermitian to tolerance."""
    scale = max(1.0, float(np.max(np.abs(sf.coeffs))) if len(sf.coeffs) else 1.0)
    if sf.hermitian_defect() > hermitian_tol * scale:
        raise NonHermitianInput(
            f"hermitian defect {sf.hermitian_defect():.3e} exceeds tolerance"
        )
    vals = np.fft.ifft(sf.coeffs) * np.sqrt(sf.grid.n_points)
    return Field(sf.grid, vals.real)


def apply_multiplier(op: MultiplierOp, f: Field) -> Field:
    """Apply a Fourier multiplier operator to a field."""
    if op.requires_zero_mean and abs(f.mean()) > MEAN_TOL:
        raise HomogeneousNonzeroMean(
            f"'{op.label}' needs zero-mean input, |mean| = {abs(f.mean()):.3e}"
        )
    sig = op.values_on(f.grid)
    coeffs = sig * np.fft.fft(f.values)
    vals = np.fft.ifft(coeffs)
    return Field(f.grid, vals.real)


def derivative_op() -> MultiplierOp:
    return MultiplierOp(lambda xi: 1j * xi, "d/dx", odd=True)


def hilbert_op() -> MultiplierOp:
    # sgn(0) = 0 annihilates the mean component
    return MultiplierOp(lambda xi: -1j * np.sign(xi), "hilbert", odd=True)


def hilbert(f: Field) -> Field:
    """Periodic Hilbert transform, symbol -i*sgn(xi)."""
    return apply_multiplier(hilbert_op(), f)


def derivative(f: Field) -> Field:
    """Spectral derivative, symbol i*xi."""
    return apply_multiplier(derivative_op(), f)


def bump(x):
    """Smooth compactly supported bump on (-1, 1), rescaled to peak 1."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    xi = x[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - xi * xi))
    return out


_BUMP_MASS = None


def bump_mass() -> float:
    """Integral of the unit bump over (-1, 1)."""
    global _BUMP_MASS
    if _BUMP_MASS is None:
        from scipy.integrate import quad

        _BUMP_MASS = quad(lambda t: float(bump(t)), -1.0, 1.0, epsabs=1e-14)[0]
    return _BUMP_MASS


def mollifier_values(grid: Grid1D, eps: float) -> np.ndarray:
    """Samples of G_eps(x) = (1/eps) G_1(x/eps) wrapped onto the grid.

    G_1 is the unit-mass normalization of the smooth bump. The samples
    are renormalized so the discrete mass h*sum equals 1 exactly, which
    makes convolution preserve the mean to roundoff.
    """
    if eps < 2.0 * grid.spacing:
        raise KernelUnresolved(
            f"eps = {eps:.3e} below twice the grid spacing {grid.spacing:.3e}"
        )
    if eps >= grid.length / 2.0:
        raise ValueError("mollifier wider than half the period")
    x = grid.nodes
    # signed distance to 0 on the circle
    d = (x + grid.length / 2.0) % grid.length - grid.length / 2.0
    g = bump(d / eps) / (eps * bump_mass())
    g /= grid.spacing * np.sum(g)
    return g


def mollify(f: Field, eps: float) -> Field:
    """Convolve a field with the smoothing kernel G_eps (unit mass)."""
    g = mollifier_values(f.grid, eps)
    h = f.grid.spacing
    conv = np.fft.ifft(np.fft.fft(f.values) * np.fft.fft(g)).real * h
    return Field(f.grid, conv)


def _inertia_symbol(s: float, variant: str) -> Callable[[np.ndarray], np.ndarray]:
    # s = 0 collapses every variant to the identity (plain L^2 pairing)
    if s == 0.0:
        return lambda xi: np.ones_like(np.asarray(xi, dtype=float))
    if variant == "hs":
        return lambda xi: (1.0 + xi * xi) ** s
    if variant == "hsbar":
        return lambda xi: 1.0 + np.abs(xi) ** (2.0 * s)
    if variant == "homogeneous":
        return lambda xi: np.abs(xi) ** (2.0 * s)
    raise ValueError(f"unknown variant '{variant}'")


def inertia_operator(spec) -> MultiplierOp:
    """Multiplier A with momentum m = A u for the given metric."""
    sym = _inertia_symbol(spec.s, spec.variant)
    return MultiplierOp(sym, f"A[{spec.variant},s={spec.s}]")


def inertia_inverse(spec) -> MultiplierOp:
    """Multiplier A^-1; homogeneous variants act on zero-mean fields only."""
    sym = _inertia_symbol(spec.s, spec.variant)
    homogeneous = spec.variant == "homogeneous" and spec.s > 0.0

    def inv(xi):
        vals = np.asarray(sym(xi), dtype=float)
        out = np.zeros_like(vals)
        nz = vals != 0.0
        out[nz] = 1.0 / vals[nz]
        return out

    return MultiplierOp(
        inv,
        f"Ainv[{spec.variant},s={spec.s}]",
        requires_zero_mean=homogeneous,
    )
