"""Exception types raised across the package."""


class DualMinkError(Exception):
    """Base class for all package errors."""


class InvalidBody(DualMinkError):
    """Body data violates the origin-interior polytope invariants."""


class UnboundedWulff(InvalidBody):
    """The normals lie in a closed hemisphere, so the halfspace intersection is unbounded."""


class InvalidMeasure(DualMinkError):
    """Measure data is malformed or concentrated in a closed hemisphere.

    When the failure is hemisphere concentration, ``witness`` holds a unit
    vector ``v`` with ``v . u >= 0`` for every atom ``u``.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ShapeMismatch(DualMinkError):
    """Measure atoms and body normals do not line up."""


class NonFiniteIntegrand(DualMinkError):
    """An integrand returned inf or nan at a quadrature node."""


class NonConvexData(DualMinkError):
    """Support function data with h'' + h <= 0."""


class NotApplicable(DualMinkError):
    """Comparison check requested for a pair with an empty comparison set."""


class DepthCapExceeded(UserWarning):
    """Adaptive refinement stopped with mixed-cell triangles still present."""


class FormatError(DualMinkError):
    """A body, measure or manifest file is not well-formed JSON of the expected shape."""
