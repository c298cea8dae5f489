"""Exception hierarchy shared by the geometry, billiard and certificate modules."""


class GeometryError(Exception):
    """Base class for every error raised by this package."""


class TangentialDirection(GeometryError):
    """A shooting direction does not point strictly into the domain."""


class JunctionOffBoundary(GeometryError):
    """A junction flagged as a boundary junction is not on the boundary."""


class PointNotOnSupport(GeometryError):
    """Density was requested at a point outside the network support."""


class RadialConditionViolated(GeometryError):
    """The radial balance condition fails for the chosen basepoint."""


class NoConvergence(GeometryError):
    """An iterative search (closed billiard orbit) failed to close."""


class BracketInvalid(GeometryError):
    """Bracket endpoints do not have opposite signs."""


class QuadratureFailure(GeometryError):
    """Adaptive quadrature could not meet its tolerance within the depth cap."""


class OracleDegenerate(GeometryError):
    """Too many sampled lines coincide with the measured curve."""


class DomainError(GeometryError, ValueError):
    """Arguments fall outside the domain of a closed-form bound."""


class NotExcludable(GeometryError):
    """No exclusion branch applies to a billiard polygon for the given bound."""


class DisjointnessViolated(GeometryError):
    """Subdomains used in a Lusternik-Schnirelmann bound overlap."""


class ContainmentViolated(GeometryError):
    """A subdomain is not contained in the interior of the ambient domain."""


class InconclusiveCertificate(GeometryError):
    """The assembled bounds do not determine a width value."""
