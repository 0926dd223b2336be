"""Exception types shared across the toolkit."""


class GeometryError(Exception):
    """Base class for all geometric failures."""


class DimensionMismatch(GeometryError):
    """A vector or matrix does not have the ambient dimension n+3."""


class NotIsotropicPlane(GeometryError):
    """Two boundary points whose span is not a totally isotropic 2-plane."""


class NonSpacelikePair(GeometryError):
    """Spacelike distance requested for a non-spacelike pair of points."""


class DegeneratePairing(GeometryError):
    """A pairing that must be nonzero is below tolerance."""


class NonConformalChart(GeometryError):
    """Chart is not conformal for the induced metric at the queried point."""


class NonSpacelikeChart(GeometryError):
    """Tangent plane of an immersion is not positive definite."""


class ConvergenceError(GeometryError):
    """An iterative solver did not reach the requested residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class OutsideWindow(GeometryError):
    """A point falls outside a metric grid window."""


class BallTouchesBoundary(GeometryError):
    """A metric ball reaches the window boundary; perimeter is unreliable."""


class AmbiguousDomain(GeometryError):
    """An angular domain is ambiguous (cone point on or too close to a bounding ray)."""


class ScheduleError(GeometryError):
    """A renormalization schedule violates its admissibility conditions."""


class LoopValidationError(GeometryError):
    """A candidate loop fails the lightlike-polygon invariants."""
