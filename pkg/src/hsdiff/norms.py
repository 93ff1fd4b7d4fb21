"""Fractional Sobolev norms and the right-invariant metric on diffeos.

Three norm variants on grid fields, all defined through the unitary DFT
coefficients ``fhat``:

* inhomogeneous H^s:     ||f||^2 = sum_k (1 + xi_k^2)^s |fhat_k|^2
* inhomogeneous Hbar^s:  ||f||^2 = sum_k (1 + |xi_k|^(2s)) |fhat_k|^2
* homogeneous:           ||f||^2 = sum_k |xi_k|^(2s) |fhat_k|^2,
  restricted to zero-mean fields.

The right-invariant metric at a diffeomorphism phi evaluates the chosen
inner product on X o phi^-1, Y o phi^-1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import spectral
from .errors import EmptySamples, HomogeneousNonzeroMean, NonInvertibleDiffeo
from .spectral import Field, Grid1D, MEAN_TOL

VARIANTS = ("hs", "hsbar", "homogeneous")


@dataclass(frozen=True)
class MetricSpec:
    """Sobolev order s plus norm variant and domain tag.

    domain is "circle" or "line"; the line case runs on a periodic
    window and only changes padding checks, not the formulas.
    """

    s: float
    variant: str = "hs"
    domain: str = "circle"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.s < 0:
            raise ValueError("Sobolev order s must be >= 0")
        if self.variant == "homogeneous" and not self.s > 0:
            raise ValueError("homogeneous variant requires s > 0")
        if self.domain not in ("circle", "line"):
            raise ValueError("domain must be 'circle' or 'line'")


class Diffeo1D:
    """Monotone sampled diffeomorphism in the universal cover.

    values[j] = phi(x_j) with phi(x + L) = phi(x) + L. Line-window
    diffeos (identity outside a compact set) fit the same representation.
    """

    def __init__(self, grid: Grid1D, values):
        self.grid = grid
        self.values = np.asarray(values, dtype=float)
        if self.values.shape != (grid.n_points,):
            raise ValueError("diffeo needs one value per node")
        slopes = self.slopes()
        if np.any(slopes <= 0):
            raise NonInvertibleDiffeo(
                f"min finite-difference slope {slopes.min():.3e} <= 0"
            )

    @classmethod
    def identity(cls, grid: Grid1D) -> "Diffeo1D":
        return cls(grid, grid.nodes)

    @classmethod
    def from_displacement(cls, grid: Grid1D, disp) -> "Diffeo1D":
        return cls(grid, grid.nodes + np.asarray(disp, dtype=float))

    @property
    def displacement(self) -> np.ndarray:
        return self.values - self.grid.nodes

    def slopes(self) -> np.ndarray:
        """Finite-difference slopes including the periodic wrap."""
        ext = np.append(self.values, self.values[0] + self.grid.length)
        return np.diff(ext) / self.grid.spacing

    def _interpolator(self) -> PchipInterpolator:
        # periodic extension by one winding on each side keeps evaluation
        # of phi and phi^-1 inside the covered range
        g = self.grid
        x = np.concatenate([g.nodes - g.length, g.nodes, g.nodes + g.length,
                            [2 * g.length]])
        y = np.concatenate([self.values - g.length, self.values,
                            self.values + g.length, [self.values[0] + 2 * g.length]])
        return PchipInterpolator(x, y, extrapolate=False)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        L = self.grid.length
        wind = np.floor(x / L)
        base = x - wind * L
        return self._interpolator()(base) + wind * L

    def inverse(self, y, tol: float = 1e-12):
        """phi^-1(y) by bisection on the monotone interpolant."""
        y = np.asarray(y, dtype=float)
        L = self.grid.length
        # phi(x) - x is periodic and bounded, so phi^-1(y) lies within
        # one displacement bound of y
        amp = np.max(np.abs(self.displacement)) + L
        lo = y - amp
        hi = y + amp
        f = self.__call__
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            too_low = f(mid) < y
            lo = np.where(too_low, mid, lo)
            hi = np.where(too_low, hi, mid)
            if np.max(hi - lo) < tol:
                break
        return 0.5 * (lo + hi)

    def compose(self, other: "Diffeo1D") -> "Diffeo1D":
        """self o other, sampled on the shared grid."""
        return Diffeo1D(self.grid, self(other.values))


def compose_field(f: Field, points) -> np.ndarray:
    """Evaluate a periodic field at arbitrary points by monotone cubic
    interpolation of its samples."""
    g = f.grid
    x = np.concatenate([g.nodes - g.length, g.nodes, g.nodes + g.length,
                        [2 * g.length]])
    y = np.concatenate([f.values, f.values, f.values, [f.values[0]]])
    interp = PchipInterpolator(x, y, extrapolate=False)
    pts = np.asarray(points, dtype=float) % g.length
    return interp(pts)


def _weights(spec: MetricSpec, grid: Grid1D) -> np.ndarray:
    return spectral.inertia_operator(spec).values_on(grid).real


def _check_mean(spec: MetricSpec, f: Field):
    if spec.variant == "homogeneous" and abs(f.mean()) > MEAN_TOL:
        raise HomogeneousNonzeroMean(
            f"homogeneous norm needs zero mean, |mean| = {abs(f.mean()):.3e}"
        )


def norm_sq(spec: MetricSpec, f: Field) -> float:
    _check_mean(spec, f)
    w = _weights(spec, f.grid)
    coeffs = spectral.forward(f).coeffs
    return float(np.sum(w * np.abs(coeffs) ** 2))


def norm(spec: MetricSpec, f: Field) -> float:
    """Sobolev norm of a field under the given metric spec."""
    return float(np.sqrt(max(norm_sq(spec, f), 0.0)))


def inner(spec: MetricSpec, f: Field, g: Field) -> float:
    """Sobolev inner product; inner(spec, f, f) == norm(spec, f)^2."""
    _check_mean(spec, f)
    _check_mean(spec, g)
    w = _weights(spec, f.grid)
    cf = spectral.forward(f).coeffs
    cg = spectral.forward(g).coeffs
    return float(np.real(np.sum(w * np.conj(cf) * cg)))


def metric_at(spec: MetricSpec, phi: Diffeo1D, X: Field, Y: Field) -> float:
    """Right-invariant metric G_phi(X, Y) = <X o phi^-1, Y o phi^-1>.

    Compositions use monotone cubic interpolation; phi^-1 is found by
    bisection on the interpolant. Reduces exactly to inner() at phi = id.
    """
    if np.array_equal(phi.values, phi.grid.nodes):
        return inner(spec, X, Y)
    inv_pts = phi.inverse(phi.grid.nodes)
    Xc = Field(X.grid, compose_field(X, inv_pts))
    Yc = Field(Y.grid, compose_field(Y, inv_pts))
    return inner(spec, Xc, Yc)


def equivalence_ratio(s: float, samples) -> tuple[float, float]:
    """(min, max) over samples of ||f||_{H^s} / ||f||_{Hbar^s}."""
    samples = list(samples)
    if not samples:
        raise EmptySamples("equivalence_ratio needs at least one field")
    ratios = []
    for f in samples:
        a = norm(MetricSpec(s, "hs"), f)
        b = norm(MetricSpec(s, "hsbar"), f)
        if b == 0.0:
            raise ValueError("zero field in sample list")
        ratios.append(a / b)
    return float(min(ratios)), float(max(ratios))


def multiplication_bound_probe(s: float, g: Field, samples) -> float:
    """Empirical lower bound for the operator norm of f -> g*f on H^s."""
    spec = MetricSpec(s, "hs")
    best = 0.0
    for f in samples:
        denom = norm(spec, f)
        if denom == 0.0:
            continue
        gf = Field(f.grid, g.values * f.values)
        best = max(best, norm(spec, gf) / denom)
    return best


def composition_bound_probe(s: float, phi: Diffeo1D, samples) -> tuple[float, float]:
    """(min, max) over samples of ||f o phi||_{H^s} / ||f||_{H^s}."""
    spec = MetricSpec(s, "hs")
    ratios = []
    for f in samples:
        denom = norm(spec, f)
        if denom == 0.0:
            continue
        fc = Field(f.grid, compose_field(f, phi.values))
        ratios.append(norm(spec, fc) / denom)
    if not ratios:
        raise EmptySamples("no nonzero samples")
    return float(min(ratios)), float(max(ratios))
