"""Flows of time-dependent vector fields and path functionals.

integrate_flow advances all grid nodes through the ODE
``d phi/dt = u(t, phi)`` with classical RK4, interpolating the stored
velocity frames linearly in time and with periodic cubic splines in
space. Path length and energy are trapezoid quadratures of the chosen
Sobolev norm over the stored frame times.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.interpolate import CubicSpline

from . import norms, spectral
from .errors import GridMismatch, MonotonicityLost
from .norms import Diffeo1D, MetricSpec
from .spectral import Field, Grid1D


@dataclass
class VelocityPath:
    """Time-sampled right-trivialized velocity u(t_k, x_j).

    frames is a (K+1, n) array; frames[k] are the samples of u(t_k, .).
    """

    grid: Grid1D
    times: np.ndarray
    frames: np.ndarray
    provenance: str = ""

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.frames = np.asarray(self.frames, dtype=float)
        if self.times.ndim != 1 or len(self.times) < 2:
            raise ValueError("need at least two time samples")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if self.frames.shape != (len(self.times), self.grid.n_points):
            raise ValueError("frames must be (len(times), n_points)")

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    def frame_field(self, k: int) -> Field:
        return Field(self.grid, self.frames[k])


@dataclass
class FlowResult:
    """Flow snapshots phi(t_k, .) and the endpoint diffeomorphism."""

    times: np.ndarray
    path: list
    endpoint: Diffeo1D
    snapshot_times: np.ndarray = dc_field(default=None)


class _FrameInterpolant:
    """u(t, x): linear in t between frames, periodic cubic in x.

    Cubic splines are linear in the data, so the spline of a blended
    frame equals the blend of the per-frame splines; only the two
    bracketing frame splines are kept alive at a time.
    """

    def __init__(self, path: VelocityPath):
        self.path = path
        g = path.grid
        self._x = np.append(g.nodes, g.length)
        self._cache = {}

    def _spline(self, k: int) -> CubicSpline:
        if k not in self._cache:
            vals = np.append(self.path.frames[k], self.path.frames[k][0])
            self._cache[k] = CubicSpline(self._x, vals, bc_type="periodic")
            for old in [key for key in self._cache if key < k - 1]:
                del self._cache[old]
        return self._cache[k]

    def __call__(self, k: int, theta: float, pos: np.ndarray) -> np.ndarray:
        wrapped = pos % self.path.grid.length
        lo = self._spline(k)(wrapped)
        if theta == 0.0:
            return lo
        hi = self._spline(k + 1)(wrapped)
        return (1.0 - theta) * lo + theta * hi


def integrate_flow(u: VelocityPath, substeps: int = 1,
                   snapshot_stride: int = 1) -> FlowResult:
    """Integrate d phi/dt = u(t, phi) from the identity with RK4.

    substeps RK4 steps are taken inside each stored frame interval.
    Snapshots are recorded every ``snapshot_stride`` frames (the
    endpoint is always recorded).
    """
    if substeps < 1:
        raise ValueError("substeps must be >= 1")
    g = u.grid
    interp = _FrameInterpolant(u)
    phi = g.nodes.astype(float).copy()
    snaps = [Diffeo1D(g, phi.copy())]
    snap_times = [u.times[0]]
    for k in range(len(u.times) - 1):
        t0, t1 = u.times[k], u.times[k + 1]
        dt = (t1 - t0) / substeps
        for j in range(substeps):
            th0 = j / substeps
            thh = (j + 0.5) / substeps
            th1 = (j + 1) / substeps
            k1 = interp(k, th0, phi)
            k2 = interp(k, thh, phi + 0.5 * dt * k1)
            k3 = interp(k, thh, phi + 0.5 * dt * k2)
            k4 = interp(k, th1, phi + dt * k3)
            phi = phi + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        ext = np.append(phi, phi[0] + g.length)
        if np.any(np.diff(ext) <= 0):
            raise MonotonicityLost(
                f"flow lines crossed at t = {t1:.6g}; increase resolution"
            )
        if (k + 1) % snapshot_stride == 0 or k == len(u.times) - 2:
            snaps.append(Diffeo1D(g, phi.copy()))
            snap_times.append(t1)
    return FlowResult(
        times=u.times,
        path=snaps,
        endpoint=snaps[-1],
        snapshot_times=np.asarray(snap_times),
    )


def frame_norms(spec: MetricSpec, u: VelocityPath) -> np.ndarray:
    """Sobolev norm of every stored frame, vectorized over frames."""
    w = spectral.inertia_operator(spec).values_on(u.grid).real
    coeffs = np.fft.fft(u.frames, axis=1) / np.sqrt(u.grid.n_points)
    if spec.variant == "homogeneous":
        means = np.abs(coeffs[:, 0]) / np.sqrt(u.grid.n_points)
        if np.any(means > spectral.MEAN_TOL):
            from .errors import HomogeneousNonzeroMean

            raise HomogeneousNonzeroMean(
                f"max |frame mean| = {means.max():.3e} for homogeneous spec"
            )
    sq = np.sum(w[None, :] * np.abs(coeffs) ** 2, axis=1)
    return np.sqrt(np.maximum(sq, 0.0))


def path_length(spec: MetricSpec, u: VelocityPath) -> float:
    """Trapezoid quadrature of t -> ||u(t, .)|| over the stored times."""
    return float(np.trapezoid(frame_norms(spec, u), u.times))


def path_energy(spec: MetricSpec, u: VelocityPath) -> float:
    """Trapezoid quadrature of the squared norm over the stored times."""
    return float(np.trapezoid(frame_norms(spec, u) ** 2, u.times))


def sup_displacement(phi0: Diffeo1D, phi1: Diffeo1D) -> float:
    """max_j |phi1(x_j) - phi0(x_j)| on the shared grid."""
    if phi0.grid != phi1.grid:
        raise GridMismatch("diffeos live on different grids")
    return float(np.max(np.abs(phi1.values - phi0.values)))
