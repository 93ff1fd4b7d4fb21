"""Exception types raised by the numerical operators.

Each class corresponds to one failure mode of a documented contract, so
callers can react to a specific condition instead of parsing messages.
"""


class HsdiffError(Exception):
    """Base class for all library errors."""


class NonHermitianInput(HsdiffError):
    """Spectral coefficients do not satisfy Hermitian symmetry."""


class SymbolSingularAtZero(HsdiffError):
    """A homogeneous multiplier symbol has no declared value at xi=0."""


class KernelUnresolved(HsdiffError):
    """Mollifier width is below twice the grid spacing."""


class HomogeneousNonzeroMean(HsdiffError):
    """Homogeneous-norm operation applied to a field with nonzero mean."""


class NonInvertibleDiffeo(HsdiffError):
    """Sampled diffeomorphism has a non-positive finite-difference slope."""


class EmptySamples(HsdiffError):
    """A probe was given an empty sample list."""


class GridMismatch(HsdiffError):
    """Two objects that must share a grid do not."""


class MonotonicityLost(HsdiffError):
    """Flow lines crossed at grid resolution during integration."""


class UnresolvedScale(HsdiffError):
    """Grid too coarse for the finest scale of a multiscale construction."""


class SingularIntegrand(HsdiffError):
    """Shift integrand 1/(1 - lam*f) is singular: lam*max(f) too close to 1."""


class BracketFailure(HsdiffError):
    """Bisection bracket for the shift equation could not be expanded."""


class EndpointCorrectionDiverged(HsdiffError):
    """Shooting correction of the line construction did not converge."""


class CflViolation(HsdiffError):
    """Advective CFL guard tripped; integration halted before blow-up."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class QuadratureNonconvergent(HsdiffError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class DomainError(HsdiffError):
    """Parameter outside the validity range of a special-function formula."""


class SlowDecayWarning(UserWarning):
    """Oscillatory-branch quadrature converging slowly (conditional decay)."""
