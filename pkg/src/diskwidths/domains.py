"""Origin-centred disks and ellipses with boundary parametrisation and chords.

Every domain is axis aligned with semi-axis ``a`` along x and ``b`` along y,
``a >= b > 0``.  A disk of radius R is the ellipse with ``a = b = R``.
Boundary points are addressed by the angle parameter t, so that the point is
``(a cos t, b sin t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import TangentialDirection

# Geometric tolerance in plane units, read at call time so it can be changed globally.
DEFAULT_TOL = 1e-10

# Minimal inward component for a shooting direction.
ENTRY_THRESHOLD = 1e-12

TWO_PI = 2.0 * math.pi


class Point(NamedTuple):
    x: float
    y: float

    def __sub__(self, other):  # type: ignore[override]
        return Point(self.x - other[0], self.y - other[1])

    def __add__(self, other):  # type: ignore[override]
        return Point(self.x + other[0], self.y + other[1])

    def scaled(self, s: float) -> "Point":
        return Point(s * self.x, s * self.y)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


class Direction(NamedTuple):
    ux: float
    uy: float

    @classmethod
    def of(cls, vx: float, vy: float) -> "Direction":
        """Normalise an arbitrary nonzero vector."""
        n = math.hypot(vx, vy)
        if n == 0.0 or not math.isfinite(n):
            raise ValueError("cannot normalise a zero or non-finite vector")
        return cls(vx / n, vy / n)

    @classmethod
    def from_angle(cls, phi: float) -> "Direction":
        return cls(math.cos(phi), math.sin(phi))

    def dot(self, v) -> float:
        return self.ux * v[0] + self.uy * v[1]

    def reversed(self) -> "Direction":
        return Direction(-self.ux, -self.uy)


def dist(p, q) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def wrap_angle(t: float) -> float:
    """Reduce an angle parameter to [0, 2*pi)."""
    r = math.fmod(t, TWO_PI)
    if r < 0.0:
        r += TWO_PI
    # fmod of a tiny negative number can round up to exactly 2*pi
    return 0.0 if r >= TWO_PI else r


@dataclass(frozen=True)
class Domain:
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("semi-axes must be finite")
        if self.b <= 0.0:
            raise ValueError(f"semi-axes must be positive, got b={self.b}")
        if self.a < self.b:
            raise ValueError(f"expected a >= b (major axis along x), got a={self.a}, b={self.b}")

    @classmethod
    def disk(cls, radius: float = 1.0) -> "Domain":
        return cls(radius, radius)

    @classmethod
    def ellipse(cls, a: float, b: float) -> "Domain":
        return cls(a, b)

    @property
    def is_disk(self) -> bool:
        return self.a == self.b

    @property
    def focal_distance(self) -> float:
        """Distance from the centre to either focus (0 for a disk)."""
        return math.sqrt(max(self.a * self.a - self.b * self.b, 0.0))

    @property
    def foci(self) -> tuple[Point, Point]:
        f = self.focal_distance
        return Point(-f, 0.0), Point(f, 0.0)

    def describe(self) -> dict:
        if self.is_disk:
            return {"kind": "disk", "radius": self.a}
        return {"kind": "ellipse", "a": self.a, "b": self.b}

    def implicit(self, p) -> float:
        """x^2/a^2 + y^2/b^2 - 1; negative inside."""
        return (p[0] / self.a) ** 2 + (p[1] / self.b) ** 2 - 1.0

    def parameter_of(self, p) -> float:
        """Angle parameter of the boundary point closest (radially) to ``p``."""
        return wrap_angle(math.atan2(p[1] / self.b, p[0] / self.a))

    def support(self, nx: float, ny: float) -> float:
        """Support function h(n) = max over the domain of <n, z> for a unit n."""
        return math.sqrt((self.a * nx) ** 2 + (self.b * ny) ** 2)


@dataclass(frozen=True)
class Chord:
    """Segment between two boundary points, carrying their angle parameters."""

    p0: Point
    p1: Point
    t0: float
    t1: float

    @property
    def length(self) -> float:
        return dist(self.p0, self.p1)

    @property
    def direction(self) -> Direction:
        return Direction.of(self.p1.x - self.p0.x, self.p1.y - self.p0.y)

    def point_at(self, s: float) -> Point:
        """Affine point p0 + s (p1 - p0), s in [0, 1]."""
        return Point(self.p0.x + s * (self.p1.x - self.p0.x), self.p0.y + s * (self.p1.y - self.p0.y))

    def reversed(self) -> "Chord":
        return Chord(self.p1, self.p0, self.t1, self.t0)


def contains(domain: Domain, p, tol: float | None = None) -> str:
    """Classify ``p`` as ``"interior"``, ``"boundary"`` or ``"exterior"``.

    The implicit function is rescaled by the smaller semi-axis so that ``tol``
    is approximately a distance in plane units.
    """
    tol = DEFAULT_TOL if tol is None else tol
    if tol <= 0:
        raise ValueError("tol must be positive")
    # |grad f| ~ 2/b near the boundary, so f*b/2 approximates signed distance
    g = domain.implicit(p) * domain.b / 2.0
    if g < -tol:
        return "interior"
    if g > tol:
        return "exterior"
    return "boundary"


def boundary_point(domain: Domain, t: float) -> Point:
    return Point(domain.a * math.cos(t), domain.b * math.sin(t))


def tangent(domain: Domain, t: float) -> Direction:
    """Unit tangent of the counterclockwise boundary at parameter t."""
    return Direction.of(-domain.a * math.sin(t), domain.b * math.cos(t))


def outward_normal(domain: Domain, t: float) -> Direction:
    return Direction.of(math.cos(t) / domain.a, math.sin(t) / domain.b)


def chord_from(domain: Domain, t0: float, direction) -> Chord:
    """Shoot from boundary_point(t0) along ``direction`` to the far boundary point.

    Raises TangentialDirection unless the direction enters the domain with an
    inward component above ENTRY_THRESHOLD.
    """
    ux, uy = direction
    n = outward_normal(domain, t0)
    if -(n.ux * ux + n.uy * uy) <= ENTRY_THRESHOLD:
        raise TangentialDirection(f"direction {tuple(direction)} does not enter the domain at t={t0}")
    p = boundary_point(domain, t0)
    a2, b2 = domain.a * domain.a, domain.b * domain.b
    # (p + s u) on the boundary; s = 0 is the start, the other root is -2B/A.
    A = ux * ux / a2 + uy * uy / b2
    B = p.x * ux / a2 + p.y * uy / b2
    s = -2.0 * B / A
    q = Point(p.x + s * ux, p.y + s * uy)
    t1 = domain.parameter_of(q)
    return Chord(p, boundary_point(domain, t1), wrap_angle(t0), t1)


def chord_between(domain: Domain, t0: float, t1: float) -> Chord:
    """Chord joining two boundary parameters directly."""
    return Chord(boundary_point(domain, t0), boundary_point(domain, t1), wrap_angle(t0), wrap_angle(t1))


def diameters(domain: Domain) -> tuple[float, float]:
    """(d, D): lengths of the smallest and largest diameters."""
    return 2.0 * domain.b, 2.0 * domain.a


def point_segment_distance(p, a, b) -> tuple[float, float]:
    """Distance from p to segment ab and the clamped affine parameter."""
    ax, ay = a
    dx, dy = b[0] - ax, b[1] - ay
    L2 = dx * dx + dy * dy
    s = ((p[0] - ax) * dx + (p[1] - ay) * dy) / L2
    s = min(1.0, max(0.0, s))
    return math.hypot(ax + s * dx - p[0], ay + s * dy - p[1]), s


def segment_intersection(a, b, c, d):
    """Proper intersection point of segments ab and cd, or None."""
    r = (b[0] - a[0], b[1] - a[1])
    s = (d[0] - c[0], d[1] - c[1])
    den = r[0] * s[1] - r[1] * s[0]
    if abs(den) < 1e-15:
        return None
    qp = (c[0] - a[0], c[1] - a[1])
    u = (qp[0] * s[1] - qp[1] * s[0]) / den
    v = (qp[0] * r[1] - qp[1] * r[0]) / den
    eps = 1e-12
    if -eps <= u <= 1 + eps and -eps <= v <= 1 + eps:
        return Point(a[0] + u * r[0], a[1] + u * r[1])
    return None
