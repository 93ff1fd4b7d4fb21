"""Explicit arbitrarily-short paths on Diff(S^1) and Diff_c(R).

Two constructions drive the geodesic length toward zero:

* Circle: a traveling-wave field u(t,x) = lam * f(t - x) built from the
  multiscale profile f = (1/N) sum_{j<N} psi(2^j x), whose flow realizes
  a rigid rotation. The shift is the integral I(lam) of
  lam f / (1 - lam f) over the support; the H^(1/2) energy decays
  like 1/N while the sup norm of f stays at 1.
* Line: a moving mollified plateau u(t,.) = indicator[g(t), f(t)] * G_eps
  with f(t) = t tan(alpha) and g^-1(x) = x - (1 - cot(alpha)) phi^-1(x),
  whose flow carries the identity to a target phi with phi(x) >= x; the
  H^s length collapses as alpha -> pi/4 for s < 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_simpson, quad, solve_ivp
from scipy.interpolate import PchipInterpolator

from . import flow as flow_mod
from .errors import (
    BracketFailure,
    EndpointCorrectionDiverged,
    KernelUnresolved,
    SingularIntegrand,
    UnresolvedScale,
)
from .norms import Diffeo1D, MetricSpec
from .spectral import Field, Grid1D, bump

LAMBDA_CAP = 1.0 - 1e-9


# ----------------------------------------------------------------------
# multiscale profile
# ----------------------------------------------------------------------

def multiscale_profile(N: int) -> Callable[[np.ndarray], np.ndarray]:
    """Analytic profile f(x) = (1/N) sum_{j<N} psi(2^j x), peak value 1."""
    if N < 1:
        raise ValueError("N must be a positive integer")

    def f(x):
        x = np.asarray(x, dtype=float)
        acc = np.zeros_like(x)
        for j in range(N):
            acc += bump((2.0 ** j) * x)
        return acc / N

    return f


def multiscale_function(N: int, grid: Grid1D, center: float = None) -> Field:
    """Sample the multiscale profile on the grid, centered mid-window.

    The finest bump has width 2^(2-N); resolving it is enforced as
    n_points >= 2^(N+4).
    """
    if grid.n_points < 2 ** (N + 4):
        raise UnresolvedScale(
            f"N = {N} needs n_points >= 2^{N + 4} = {2 ** (N + 4)}, "
            f"got {grid.n_points}"
        )
    if grid.length <= 2.0:
        raise ValueError("period must exceed the support diameter 2")
    if center is None:
        center = grid.length / 2.0
    prof = multiscale_profile(N)
    d = (grid.nodes - center + grid.length / 2.0) % grid.length - grid.length / 2.0
    return Field(grid, prof(d))


def _scale_breakpoints(N: int) -> list[float]:
    pts = [0.0]
    for j in range(N):
        w = 2.0 ** (-j)
        pts.extend([-w, w])
    return sorted(set(pts))


# ----------------------------------------------------------------------
# circle construction
# ----------------------------------------------------------------------

@dataclass
class CircleConstruction:
    """Traveling-wave data for the circle shift construction."""

    N: int
    lam: float
    target_shift: float
    grid: Grid1D
    center: float
    profile: Callable = dc_field(repr=False, default=None)
    support_diameter: float = 2.0
    T_shift: float = 0.0
    T_end: float = 0.0

    def velocity(self, t: float, x) -> np.ndarray:
        """u(t, x) = lam * f(t - x + center), argument wrapped."""
        x = np.asarray(x, dtype=float)
        L = self.grid.length
        y = (t - x + self.center + L / 2.0) % L - L / 2.0
        return self.lam * self.profile(y)


def shift_integral(construction: CircleConstruction, lam: float = None) -> float:
    """I(lam) = integral of lam f / (1 - lam f) over the support of f.

    The integrand develops a narrow near-singular core around the peak
    of f as lam -> 1, so the integral is assembled piecewise over the
    scale annuli with extra breakpoints at the estimated core width.
    """
    if lam is None:
        lam = construction.lam
    if lam == 0.0:
        return 0.0
    if lam < 0.0:
        raise ValueError("lam must be in [0, 1)")
    if lam >= 1.0 - 1e-12:  # max f = 1, so the integrand turns singular
        raise SingularIntegrand(f"lam = {lam} puts 1 - lam*max(f) below 1e-12")
    prof = construction.profile
    N = construction.N

    def integrand(t):
        ft = prof(t)
        return lam * ft / (1.0 - lam * ft)

    # near 0: f ~ 1 - curv*t^2/2 with curv = (2/N) sum 4^j, so the
    # integrand is a Lorentzian of this width:
    curv = 2.0 * (4.0 ** N - 1.0) / (3.0 * N)
    w_core = math.sqrt(max((1.0 - lam) / (lam * curv), 1e-300))
    pts = set(_scale_breakpoints(N))
    for m in (0.5, 1.0, 3.0, 10.0):
        pts.update((-m * w_core, m * w_core))
    # geometric ladder from the core to the finest scale keeps each
    # piece's dynamic range bounded, so the nested rule converges fast
    r = 10.0 * w_core
    while r < 2.0 ** (1 - N):
        r *= 4.0
        pts.update((-r, r))
    edges = sorted(p for p in pts if -1.0 <= p <= 1.0)
    if edges[0] > -1.0:
        edges.insert(0, -1.0)
    if edges[-1] < 1.0:
        edges.append(1.0)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b > a:
            total += _adaptive_gauss(integrand, a, b)
    return total


def _adaptive_gauss(fvec, a, b, tol: float = 1e-13, depth: int = 0) -> float:
    """Vectorized adaptive quadrature: nested fixed-order Gauss rules
    with recursive bisection until they agree."""
    from scipy.integrate import fixed_quad

    lo = fixed_quad(fvec, a, b, n=24)[0]
    hi = fixed_quad(fvec, a, b, n=48)[0]
    if abs(hi - lo) <= tol * max(1.0, abs(hi)) or depth >= 18:
        return hi
    mid = 0.5 * (a + b)
    return (_adaptive_gauss(fvec, a, mid, tol, depth + 1)
            + _adaptive_gauss(fvec, mid, b, tol, depth + 1))


def solve_lambda(construction: CircleConstruction, target_shift: float) -> float:
    """Invert I(lam) = target_shift, expanding the bracket toward 1.

    The root search runs in mu = -log(1 - lam), where I varies smoothly
    even as lam -> 1; the residual of the returned float64 lam is
    limited by ulp(lam) * I'(lam), which is what the final check
    reports when the profile needs lam closer to 1 than float64 allows.
    """
    if target_shift <= 0:
        raise ValueError("target_shift must be positive")
    from scipy.optimize import brentq

    def excess(mu):
        lam = 1.0 - math.exp(-mu)
        return shift_integral(construction, lam) - target_shift

    mu_cap = -math.log(1.0 - LAMBDA_CAP)
    mu_hi = -math.log(0.1)  # lam = 0.9
    while excess(mu_hi) < 0.0:
        mu_hi += math.log(4.0)
        if mu_hi >= mu_cap:
            if excess(mu_cap) < 0.0:
                raise BracketFailure(
                    f"I({LAMBDA_CAP}) < {target_shift}; profile too weak"
                )
            mu_hi = mu_cap
            break
    mu_star = brentq(excess, 1e-12, mu_hi, xtol=1e-13, rtol=8.9e-16,
                     maxiter=300)
    lam = 1.0 - math.exp(-mu_star)
    # scan the adjacent representable lambdas for the smallest residual
    candidates = {lam}
    for _ in range(2):
        candidates.add(np.nextafter(min(candidates), 0.0))
        candidates.add(np.nextafter(max(candidates), 1.0))
    resid, lam = min(
        (abs(shift_integral(construction, c) - target_shift), c)
        for c in candidates if 0.0 < c < 1.0 - 1e-12
    )
    if resid > 1e-10:
        raise BracketFailure(
            f"bisection residual {resid:.2e} > 1e-10; I'(lam) too steep "
            "for float64 lambda resolution at this scale count"
        )
    return lam


def circle_construction(N: int, target_shift: float, grid: Grid1D) -> CircleConstruction:
    """Solve for lam and assemble the timing bookkeeping.

    T_shift = support_diameter + I(lam) is the transit time of every
    trajectory through the moving support; T_end = T_shift + (L - 2)
    makes the endpoint a rigid rotation by target_shift.
    """
    if target_shift > grid.length:
        raise ValueError("target shift exceeds the period")
    con = CircleConstruction(
        N=N,
        lam=0.0,
        target_shift=target_shift,
        grid=grid,
        center=grid.length / 2.0,
        profile=multiscale_profile(N),
    )
    con.lam = solve_lambda(con, target_shift)
    con.T_shift = con.support_diameter + target_shift
    con.T_end = con.T_shift + grid.length - con.support_diameter
    return con


def default_circle_time_step(N: int, grid: Grid1D) -> float:
    # finest bump width over the unit wave speed, with margin
    return 2.0 ** (2 - N) / 10.0


def build_circle_path(N: int, target_shift: float, grid: Grid1D,
                      time_step: float = None):
    """Velocity path of the circle construction plus its bookkeeping.

    Returns (VelocityPath, CircleConstruction); the endpoint of
    integrate_flow over the path is the rotation by target_shift.
    """
    multiscale_function(N, grid)  # enforces the resolution precondition
    con = circle_construction(N, target_shift, grid)
    if time_step is None:
        time_step = default_circle_time_step(N, grid)
    n_frames = int(math.ceil(con.T_end / time_step)) + 1
    times = np.linspace(0.0, con.T_end, n_frames)
    frames = np.empty((n_frames, grid.n_points))
    L = grid.length
    block = max(1, 2 ** 22 // grid.n_points)
    for lo in range(0, n_frames, block):
        hi = min(lo + block, n_frames)
        phase = (times[lo:hi, None] - grid.nodes[None, :] + con.center
                 + L / 2.0) % L - L / 2.0
        frames[lo:hi] = con.lam * con.profile(phase)
    path = flow_mod.VelocityPath(
        grid, times, frames,
        provenance=f"circle(N={N}, shift={target_shift})",
    )
    return path, con


def transit_times(con: CircleConstruction, starts, rtol: float = 1e-12,
                  atol: float = 1e-13):
    """Per-trajectory transit time through the moving support, plus the
    final displacement, by adaptive integration with crossing events.

    The phase a(t) = t - phi(t,x0) + center advances monotonically and
    sweeps exactly one period over [0, T_end]; the support window
    [-1, 1] (mod L) is crossed once, possibly split across the wrap for
    trajectories that start inside it. Transit is measured between the
    entry/exit phase crossings of each individually integrated
    trajectory, so the scatter across starts gauges integration error.
    """
    L = con.grid.length
    out_transit = []
    out_disp = []
    for x0 in np.atleast_1d(np.asarray(starts, dtype=float)):
        raw0 = con.center - x0  # phase at t = 0, before unwinding
        a0 = raw0
        while a0 > 1.0:
            a0 -= L
        unwind = raw0 - a0

        def rhs(t, y):
            return [float(con.velocity(t, y[0]))]

        split = a0 >= -1.0
        levels = (1.0, L - 1.0) if split else (-1.0, 1.0)
        events = []
        for lev in levels:
            def ev(t, y, lev=lev):
                return (t - y[0] + con.center - unwind) - lev

            ev.direction = 1.0
            events.append(ev)

        sol = solve_ivp(rhs, (0.0, con.T_end), [x0], method="DOP853",
                        rtol=rtol, atol=atol, events=events, max_step=0.25)
        t_first, t_second = sol.t_events
        if split:
            part1 = t_first[0] if len(t_first) else 0.0
            part2 = con.T_end - (t_second[0] if len(t_second) else con.T_end)
            transit = part1 + part2
        else:
            if not (len(t_first) and len(t_second)):
                raise RuntimeError("trajectory did not cross the support")
            transit = t_second[0] - t_first[0]
        out_transit.append(transit)
        out_disp.append(sol.y[0, -1] - x0)
    return np.asarray(out_transit), np.asarray(out_disp)


# ----------------------------------------------------------------------
# line construction
# ----------------------------------------------------------------------

_PHI1_SPLINE = None


def mollifier_cdf(z):
    """CDF of the unit-mass bump G_1 on [-1, 1]."""
    global _PHI1_SPLINE
    if _PHI1_SPLINE is None:
        from .spectral import bump_mass

        zs = np.linspace(-1.0, 1.0, 8193)
        dens = bump(zs) / bump_mass()
        cdf = np.concatenate([[0.0], cumulative_simpson(dens, x=zs)])
        cdf /= cdf[-1]
        _PHI1_SPLINE = PchipInterpolator(zs, cdf, extrapolate=False)
    z = np.asarray(z, dtype=float)
    out = np.where(z >= 1.0, 1.0, 0.0).astype(float)
    mid = (z > -1.0) & (z < 1.0)
    if np.any(mid):
        out[mid] = _PHI1_SPLINE(z[mid])
    return out


@dataclass
class LineConstruction:
    """Moving-plateau data for the line construction.

    The control diffeomorphism feeds the trailing-boundary formula;
    shooting perturbs it so the mollified flow endpoint matches the
    requested target.
    """

    target: Diffeo1D
    alpha: float
    eps: float
    grid: Grid1D
    control: Diffeo1D = None

    def __post_init__(self):
        if not (math.pi / 4.0 < self.alpha < math.pi / 2.0):
            raise ValueError("alpha must lie in (pi/4, pi/2)")
        if np.any(self.target.displacement < -1e-12):
            raise ValueError("line construction needs target(x) >= x")
        slack = 1.0 - 1.0 / math.tan(self.alpha)
        if slack >= float(np.min(self.target.slopes())):
            raise ValueError(
                "alpha too steep for this target: need 1 - cot(alpha) < "
                "min target slope to keep the trailing boundary monotone"
            )
        if self.control is None:
            self.set_control(Diffeo1D(self.grid, self.target.values.copy()))
        else:
            self.set_control(self.control)

    def set_control(self, control: Diffeo1D):
        self.control = control
        # direct interpolant of the inverse: swap (x, psi(x)) samples and
        # extend with identity slope beyond the window
        nodes = self.grid.nodes
        vals = control.values
        y = np.concatenate([[vals[0] - 1.0], vals, [vals[-1] + 1.0]])
        x = np.concatenate([[nodes[0] - 1.0], nodes, [nodes[-1] + 1.0]])
        self._control_inv = PchipInterpolator(y, x, extrapolate=True)

    @property
    def cot_alpha(self) -> float:
        return 1.0 / math.tan(self.alpha)

    def f_upper(self, t):
        return np.asarray(t, dtype=float) * math.tan(self.alpha)

    def g_inverse(self, y):
        """g^-1(y) = y - (1 - cot(alpha)) * control^-1(y)."""
        y = np.asarray(y, dtype=float)
        return y - (1.0 - self.cot_alpha) * self._control_inv(y)

    def g_lower(self, t, tol: float = 1e-12):
        """Invert g^-1 by bisection (monotone by the alpha constraint)."""
        t = np.asarray(t, dtype=float)
        lo = t - 1e-9
        hi = self.f_upper(t) + np.max(self.control.displacement) + 1.0
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            low = self.g_inverse(mid) < t
            lo = np.where(low, mid, lo)
            hi = np.where(low, hi, mid)
            if np.max(hi - lo) < tol:
                break
        return 0.5 * (lo + hi)

    def support_window(self):
        """x-interval outside which the target is the identity."""
        disp = self.target.displacement
        nz = np.where(np.abs(disp) > 1e-13)[0]
        if len(nz) == 0:
            mid = self.grid.length / 2.0
            return (mid, mid)
        x = self.grid.nodes
        return (float(x[nz[0]]), float(x[nz[-1]]))

    def time_window(self, pad: float = None):
        if pad is None:
            pad = 3.0 * self.eps
        x_lo, x_hi = self.support_window()
        t0 = max(0.0, (x_lo - pad) * self.cot_alpha)
        t1 = x_hi + pad  # g(t) >= t, so all activity ends by then
        return t0, t1

    def delta_sup(self, n_samples: int = 2001) -> float:
        """sup over t of the plateau width f(t) - g(t)."""
        t0, t1 = self.time_window(pad=0.0)
        ts = np.linspace(t0, t1, n_samples)
        return float(np.max(self.f_upper(ts) - self.g_lower(ts)))


def explicit_line_flow(con: LineConstruction, t: float, x) -> np.ndarray:
    """Closed-form flow of the unmollified plateau field: at rest until
    the leading boundary arrives, unit-speed ride, frozen at target(x)
    once the trailing boundary passes."""
    x = np.asarray(x, dtype=float)
    phi_x = con.target(x)
    t_enter = x * con.cot_alpha
    t_exit = phi_x - (1.0 - con.cot_alpha) * x
    riding = t + (1.0 - con.cot_alpha) * x
    return np.where(t < t_enter, x, np.where(t <= t_exit, riding, phi_x))


def line_trajectory_events(con: LineConstruction, x0: float, t: float,
                           tol: float = 1e-12) -> float:
    """Trajectory through the unmollified field by event bookkeeping
    only: wait for the leading boundary f, ride at unit speed, stop when
    the trailing boundary g catches up. Uses just the boundary
    definitions, not the closed-form flow expression."""
    t_enter = x0 * con.cot_alpha
    if t <= t_enter:
        return float(x0)
    # exit time solves g_inverse(x0 + (s - t_enter)) = s; the residual is
    # strictly decreasing in s, so bisect
    lo = t_enter
    hi = t_enter + float(con.target(np.array([x0]))[0]) - x0 + 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if float(con.g_inverse(x0 + (mid - t_enter))) > mid:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    t_exit = 0.5 * (lo + hi)
    if t < t_exit:
        return float(x0 + (t - t_enter))
    return float(x0 + (t_exit - t_enter))


def line_frames(con: LineConstruction, time_step: float = None):
    """Sample u(t_k, x_j) for the whole active window, vectorized."""
    if time_step is None:
        time_step = con.eps / 8.0
    t0, t1 = con.time_window()
    n_frames = int(math.ceil((t1 - t0) / time_step)) + 1
    times = np.linspace(t0, t1, n_frames)
    g_vals = con.g_lower(times)
    f_vals = con.f_upper(times)
    x = con.grid.nodes
    frames = (mollifier_cdf((x[None, :] - g_vals[:, None]) / con.eps)
              - mollifier_cdf((x[None, :] - f_vals[:, None]) / con.eps))
    return times, frames


def build_line_path(target: Diffeo1D, alpha: float, eps: float, grid: Grid1D,
                    time_step: float = None, shoot_tol: float = 5e-4,
                    max_iterations: int = 50, damping: float = 0.5,
                    substeps: int = 1) -> flow_mod.VelocityPath:
    """Velocity path whose flow endpoint matches the target diffeo.

    Mollification perturbs the endpoint by O(eps); a damped shooting
    loop nudges the control diffeo feeding the trailing boundary until
    the integrated endpoint agrees with the target in sup norm. The
    final LineConstruction is attached as ``path.construction``.
    """
    if eps < 2.0 * grid.spacing:
        raise KernelUnresolved(
            f"eps = {eps:.3e} below twice the grid spacing {grid.spacing:.3e}"
        )
    con = LineConstruction(target, alpha, eps, grid)
    if np.allclose(target.displacement, 0.0):
        times = np.array([0.0, 1.0])
        frames = np.zeros((2, grid.n_points))
        path = flow_mod.VelocityPath(grid, times, frames,
                                     provenance=f"line(alpha={alpha:.6f})")
        path.construction = con
        return path

    err_sup = np.inf
    for _ in range(max_iterations):
        times, frames = line_frames(con, time_step)
        path = flow_mod.VelocityPath(
            grid, times, frames, provenance=f"line(alpha={alpha:.6f})"
        )
        result = flow_mod.integrate_flow(path, substeps=substeps,
                                         snapshot_stride=len(times))
        err = target.values - result.endpoint.values
        err_sup = float(np.max(np.abs(err)))
        if err_sup < shoot_tol:
            path.construction = con
            return path
        con.set_control(Diffeo1D(grid, con.control.values + damping * err))
    raise EndpointCorrectionDiverged(
        f"endpoint error {err_sup:.3e} after {max_iterations} iterations"
    )


# ----------------------------------------------------------------------
# sweeps
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class CircleFamily:
    target_shift: float


@dataclass(frozen=True)
class LineFamily:
    target: Diffeo1D
    eps: float


def vanish_sweep(spec: MetricSpec, family, params, grid: Grid1D = None,
                 substeps: int = 1, time_step: float = None) -> list[dict]:
    """Measure (length, energy, endpoint error) along a parameter sweep.

    Circle families sweep the scale count N; line families sweep the
    angle alpha. Rows are dicts with keys param, s, variant, length,
    energy, endpoint_error, T_end.
    """
    rows = []
    for p in params:
        if isinstance(family, CircleFamily):
            if grid is None:
                raise ValueError("circle sweep needs a grid")
            path, con = build_circle_path(int(p), family.target_shift, grid,
                                          time_step=time_step)
            result = flow_mod.integrate_flow(path, substeps=substeps,
                                             snapshot_stride=len(path.times))
            shift_err = float(np.max(np.abs(
                result.endpoint.displacement - family.target_shift)))
            t_end = con.T_end
        elif isinstance(family, LineFamily):
            path = build_line_path(family.target, float(p), family.eps,
                                   family.target.grid, time_step=time_step,
                                   substeps=substeps)
            result = flow_mod.integrate_flow(path, substeps=substeps,
                                             snapshot_stride=len(path.times))
            shift_err = float(np.max(np.abs(
                result.endpoint.values - family.target.values)))
            t_end = float(path.times[-1])
        else:
            raise TypeError("family must be CircleFamily or LineFamily")
        rows.append({
            "param": float(p),
            "s": spec.s,
            "variant": spec.variant,
            "length": flow_mod.path_length(spec, path),
            "energy": flow_mod.path_energy(spec, path),
            "endpoint_error": shift_err,
            "T_end": t_end,
        })
    return rows
