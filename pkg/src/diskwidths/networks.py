"""Finite free-boundary geodesic networks in planar domains.

A network is a list of junctions and multiplicity-weighted straight segments
between them.  Multiplicities are positive integers for genuine networks and
positive reals for generalised networks.  The checks here are numeric
residuals; callers choose their own thresholds.

Orientation convention for boundary forces: at a boundary junction J_l the
force is the weighted sum of unit vectors (J_l - J_i)/|J_l - J_i| over the
incident segments, i.e. directions pointing *toward* J_l.  With this choice
sum_l <F_l, J_l - x> equals the mass whenever the radial condition holds.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from . import domains
from .domains import Domain, Point, contains, dist, point_segment_distance, segment_intersection
from .errors import JunctionOffBoundary, PointNotOnSupport, RadialConditionViolated

INTERIOR = "interior"
BOUNDARY = "boundary"

INTEGRALITY_TOL = 1e-9


@dataclass(frozen=True)
class Junction:
    position: Point
    location: str = INTERIOR
    t: float | None = None

    def __post_init__(self):
        if self.location not in (INTERIOR, BOUNDARY):
            raise ValueError(f"unknown junction location {self.location!r}")
        x, y = self.position
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValueError("junction coordinates must be finite")
        object.__setattr__(self, "position", Point(float(x), float(y)))

    @property
    def on_boundary(self) -> bool:
        return self.location == BOUNDARY


@dataclass(frozen=True)
class NetworkSegment:
    i: int
    j: int
    multiplicity: float = 1.0

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("segment endpoints must differ")
        if not (self.multiplicity > 0 and math.isfinite(self.multiplicity)):
            raise ValueError(f"multiplicity must be positive, got {self.multiplicity}")

    @property
    def key(self) -> tuple[int, int]:
        return (min(self.i, self.j), max(self.i, self.j))


@dataclass(frozen=True)
class GeodesicNetwork:
    junctions: tuple[Junction, ...]
    segments: tuple[NetworkSegment, ...]

    def __init__(self, junctions: Iterable[Junction], segments: Iterable[NetworkSegment]):
        object.__setattr__(self, "junctions", tuple(junctions))
        object.__setattr__(self, "segments", tuple(segments))
        self._validate()

    def _validate(self):
        n = len(self.junctions)
        seen = set()
        for s in self.segments:
            if not (0 <= s.i < n and 0 <= s.j < n):
                raise ValueError(f"segment {s} references a missing junction")
            if s.key in seen:
                raise ValueError(f"duplicate segment {s.key}")
            seen.add(s.key)
            if dist(self.junctions[s.i].position, self.junctions[s.j].position) == 0.0:
                raise ValueError(f"zero-length segment {s.key}")

    @property
    def integral(self) -> bool:
        return all(float(s.multiplicity).is_integer() for s in self.segments)

    def endpoints(self, s: NetworkSegment) -> tuple[Point, Point]:
        return self.junctions[s.i].position, self.junctions[s.j].position

    def incident(self, k: int) -> list[tuple[NetworkSegment, int]]:
        """Segments at junction k, paired with the index of the far endpoint."""
        out = []
        for s in self.segments:
            if s.i == k:
                out.append((s, s.j))
            elif s.j == k:
                out.append((s, s.i))
        return out

    def scaled(self, lam: float) -> "GeodesicNetwork":
        js = [Junction(p.position.scaled(lam), p.location, p.t) for p in self.junctions]
        return GeodesicNetwork(js, self.segments)

    def union(self, other: "GeodesicNetwork") -> "GeodesicNetwork":
        """Disjoint union; junction indices of ``other`` are shifted."""
        off = len(self.junctions)
        segs = list(self.segments) + [NetworkSegment(s.i + off, s.j + off, s.multiplicity) for s in other.segments]
        return GeodesicNetwork(self.junctions + other.junctions, segs)

    # serialisation -------------------------------------------------------

    def to_dict(self) -> dict:
        js = []
        for j in self.junctions:
            d = {"x": j.position.x, "y": j.position.y, "location": j.location}
            if j.t is not None:
                d["t"] = j.t
            js.append(d)
        return {
            "junctions": js,
            "segments": [{"i": s.i, "j": s.j, "theta": s.multiplicity} for s in self.segments],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GeodesicNetwork":
        js = [Junction(Point(d["x"], d["y"]), d.get("location", INTERIOR), d.get("t")) for d in data["junctions"]]
        segs = [NetworkSegment(int(s["i"]), int(s["j"]), float(s.get("theta", 1.0))) for s in data["segments"]]
        return cls(js, segs)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "GeodesicNetwork":
        return cls.from_dict(json.loads(text))


# constructors -----------------------------------------------------------


def boundary_junction(dom: Domain, t: float) -> Junction:
    return Junction(domains.boundary_point(dom, t), BOUNDARY, domains.wrap_angle(t))


def diameter(dom: Domain, t: float, multiplicity: float = 1.0) -> GeodesicNetwork:
    """Chord from boundary parameter t through the centre to t + pi."""
    return GeodesicNetwork(
        [boundary_junction(dom, t), boundary_junction(dom, t + math.pi)],
        [NetworkSegment(0, 1, multiplicity)],
    )


def star(dom: Domain, ts: Sequence[float], multiplicities: Sequence[float] | None = None,
         centre: Point = Point(0.0, 0.0)) -> GeodesicNetwork:
    """Arms from an interior centre junction to the boundary points at ``ts``."""
    mults = multiplicities or [1.0] * len(ts)
    js = [Junction(centre, INTERIOR)] + [boundary_junction(dom, t) for t in ts]
    segs = [NetworkSegment(0, k + 1, m) for k, m in enumerate(mults)]
    return GeodesicNetwork(js, segs)


def diameter_between(dom: Domain, t0: float, t1: float, multiplicity: float = 1.0) -> GeodesicNetwork:
    return GeodesicNetwork([boundary_junction(dom, t0), boundary_junction(dom, t1)],
                           [NetworkSegment(0, 1, multiplicity)])


def crossing_diameters(dom: Domain, t1: float, t2: float) -> GeodesicNetwork:
    """Two distinct diameters, split at their common centre junction."""
    return star(dom, [t1, t1 + math.pi, t2, t2 + math.pi])


def polygon(dom: Domain, ts: Sequence[float], multiplicity: float = 1.0) -> GeodesicNetwork:
    """Closed inscribed polygon through boundary parameters ``ts`` (in order)."""
    js = [boundary_junction(dom, t) for t in ts]
    k = len(ts)
    segs = [NetworkSegment(i, (i + 1) % k, multiplicity) for i in range(k)]
    return GeodesicNetwork(js, segs)


# measurements -------------------------------------------------------------


def mass(net: GeodesicNetwork) -> float:
    return math.fsum(s.multiplicity * dist(*net.endpoints(s)) for s in net.segments)


def _resultant(net: GeodesicNetwork, k: int) -> np.ndarray:
    """Weighted sum of unit tangents leaving junction k."""
    p = net.junctions[k].position
    v = np.zeros(2)
    for s, other in net.incident(k):
        q = net.junctions[other].position
        d = dist(p, q)
        v += s.multiplicity * np.array([(q.x - p.x) / d, (q.y - p.y) / d])
    return v


def interior_residual(net: GeodesicNetwork) -> float:
    """Largest norm of the balance sum at an interior junction (0 if none)."""
    worst = 0.0
    for k, j in enumerate(net.junctions):
        if not j.on_boundary:
            worst = max(worst, float(np.hypot(*_resultant(net, k))))
    return worst


def short_junctions(net: GeodesicNetwork) -> list[int]:
    """Interior junctions with fewer than three incident segments."""
    return [k for k, j in enumerate(net.junctions) if not j.on_boundary and len(net.incident(k)) < 3]


def free_boundary_residual(net: GeodesicNetwork, dom: Domain, tol: float | None = None) -> float:
    """Largest tangential component of the resultant at a boundary junction."""
    worst = 0.0
    for k, j in enumerate(net.junctions):
        if not j.on_boundary:
            continue
        if contains(dom, j.position, tol) != "boundary":
            raise JunctionOffBoundary(f"junction {k} at {tuple(j.position)} is not on the boundary")
        t = j.t if j.t is not None else dom.parameter_of(j.position)
        tan = domains.tangent(dom, t)
        r = _resultant(net, k)
        worst = max(worst, abs(tan.ux * r[0] + tan.uy * r[1]))
    return worst


def radial_residual(net: GeodesicNetwork, x) -> float:
    """max over interior J_j of |sum_i theta_ij <(J_j - J_i)/|J_j - J_i|, J_j - x>|."""
    worst = 0.0
    for k, j in enumerate(net.junctions):
        if j.on_boundary:
            continue
        # the tangent based at J_i points toward J_j, i.e. minus the leaving tangent
        r = -_resultant(net, k)
        worst = max(worst, abs(r[0] * (j.position.x - x[0]) + r[1] * (j.position.y - x[1])))
    return worst


def density_at(net: GeodesicNetwork, p, tol: float | None = None) -> float:
    """One-dimensional density at p: half the total multiplicity of arms at p.

    An endpoint incidence contributes one arm (theta/2), a point inside a
    segment contributes two arms (theta).
    """
    tol = domains.DEFAULT_TOL if tol is None else tol
    total = 0.0
    for s in net.segments:
        a, b = net.endpoints(s)
        d, _ = point_segment_distance(p, a, b)
        if d > tol:
            continue
        if dist(p, a) <= tol or dist(p, b) <= tol:
            total += s.multiplicity / 2.0
        else:
            total += s.multiplicity
    if total == 0.0:
        raise PointNotOnSupport(f"{tuple(p)} is not on the network support")
    return total


def singular_points(net: GeodesicNetwork, tol: float | None = None) -> list[tuple[Point, str]]:
    """Junctions plus crossings of segments, each tagged interior/boundary.

    These are the only points where the density can differ from a plain
    segment-interior value.
    """
    tol = domains.DEFAULT_TOL if tol is None else tol
    pts: list[tuple[Point, str]] = [(j.position, j.location) for j in net.junctions]
    for s1, s2 in combinations(net.segments, 2):
        x = segment_intersection(*net.endpoints(s1), *net.endpoints(s2))
        if x is not None and all(dist(x, q) > tol for q, _ in pts):
            pts.append((x, INTERIOR))
    return pts


@dataclass
class BoundaryForce:
    junction: int
    force: tuple[float, float]
    radial: float
    angle: float
    distance: float

    @property
    def magnitude(self) -> float:
        return math.hypot(*self.force)


def boundary_forces(net: GeodesicNetwork, x, tol: float | None = None) -> list[BoundaryForce]:
    tol = domains.DEFAULT_TOL if tol is None else tol
    out = []
    for k, j in enumerate(net.junctions):
        if not j.on_boundary:
            continue
        rx, ry = j.position.x - x[0], j.position.y - x[1]
        r = math.hypot(rx, ry)
        if r <= tol:
            continue
        F = -_resultant(net, k)
        fmag = float(np.hypot(*F))
        if fmag == 0.0:
            continue
        radial = (F[0] * rx + F[1] * ry) / r
        cosang = max(-1.0, min(1.0, radial / fmag))
        out.append(BoundaryForce(k, (float(F[0]), float(F[1])), float(radial), math.acos(cosang), r))
    return out


def mass_via_forces(net: GeodesicNetwork, x, tol: float = 1e-9) -> float:
    """Mass recovered from boundary forces: sum_l F_radial(l) |J_l - x|."""
    res = radial_residual(net, x)
    if res > tol * (1.0 + mass(net)):
        raise RadialConditionViolated(f"radial residual {res:.3e} at basepoint {tuple(x)}")
    return math.fsum(f.radial * f.distance for f in boundary_forces(net, x))


@dataclass
class DensityReport:
    mu: float
    approximate: bool
    interior_max: float = 0.0
    boundary_max: float = 0.0
    violations: list[dict] = field(default_factory=list)
    evaluated: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_density_bounds(net: GeodesicNetwork, dom: Domain, mu: float, tol: float = 1e-9) -> DensityReport:
    """Compare densities with mu/2 (interior) and mu/(2 sqrt 2) (boundary).

    The bounds are theorems for the unit disk; for other domains the report is
    flagged approximate.
    """
    m = mass(net)
    if m > mu + tol:
        raise ValueError(f"mass {m} exceeds mu={mu}")
    rep = DensityReport(mu=mu, approximate=not (dom.is_disk and dom.a == 1.0))
    pts = singular_points(net)
    # one segment-interior sample per segment
    pts += [(Point(*(0.5 * (np.array(net.endpoints(s)[0]) + np.array(net.endpoints(s)[1])))), INTERIOR)
            for s in net.segments]
    for p, where in pts:
        theta = density_at(net, p)
        rep.evaluated.append({"x": p.x, "y": p.y, "location": where, "density": theta})
        if where == BOUNDARY:
            rep.boundary_max = max(rep.boundary_max, theta)
            if not theta < mu / (2.0 * math.sqrt(2.0)):
                rep.violations.append({"x": p.x, "y": p.y, "density": theta, "bound": "boundary"})
        else:
            rep.interior_max = max(rep.interior_max, theta)
            if theta > mu / 2.0 + tol:
                rep.violations.append({"x": p.x, "y": p.y, "density": theta, "bound": "interior"})
    return rep


def integrality_filter(net: GeodesicNetwork) -> tuple[bool, list[tuple[Point, float]]]:
    """Pass iff the density at every interior junction or crossing is a positive integer.

    Returns the verdict and the offending (point, density) pairs.
    """
    witnesses = []
    for p, where in singular_points(net):
        if where == BOUNDARY:
            continue
        theta = density_at(net, p)
        if theta < 1.0 - INTEGRALITY_TOL or abs(theta - round(theta)) > INTEGRALITY_TOL:
            witnesses.append((p, theta))
    return not witnesses, witnesses
