"""Billiards in disks and ellipses.

Reflection map, orbits, confocal caustics, focal-chord propagation and the
closed convex k-periodic orbits used by the classification step.  Closed
orbits in an ellipse are found by bisection on the caustic parameter lam:
the chord through the start point tangent to the confocal ellipse
x^2/(a^2 - lam) + y^2/(b^2 - lam) = 1 is iterated k times and lam is adjusted
until the orbit winds exactly once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import domains
from .domains import (Chord, Direction, Domain, boundary_point, chord_between, chord_from, dist,
                      point_segment_distance, segment_intersection, wrap_angle)
from .errors import NoConvergence
from .networks import GeodesicNetwork, diameter_between, polygon
from .roots import bisect

CLOSURE_TOL = 1e-9
MAX_BISECTION_DEPTH = 200


@dataclass(frozen=True)
class BilliardState:
    t: float
    dir: Direction

    @classmethod
    def aimed(cls, dom: Domain, t0: float, t1: float) -> "BilliardState":
        """State at boundary_point(t0) aimed at boundary_point(t1)."""
        p, q = boundary_point(dom, t0), boundary_point(dom, t1)
        return cls(t0, Direction.of(q.x - p.x, q.y - p.y))


@dataclass
class BilliardOrbit:
    chords: list[Chord]
    closed: bool = False
    period: int | None = None
    caustic: float | None = None

    @property
    def perimeter(self) -> float:
        return math.fsum(c.length for c in self.chords)

    @property
    def params(self) -> list[float]:
        return [c.t0 for c in self.chords] + ([self.chords[-1].t1] if self.chords else [])

    def to_network(self, dom: Domain) -> GeodesicNetwork:
        """Support of a closed orbit as a multiplicity-one network.

        A 2-periodic orbit traverses a single diameter, so its support is that
        diameter.
        """
        if not self.closed:
            raise ValueError("only closed orbits have a network support")
        ts = [c.t0 for c in self.chords]
        if len(ts) == 2:
            return diameter_between(dom, ts[0], ts[1])
        return polygon(dom, ts)

    def to_dict(self) -> dict:
        pts = [{"t": c.t0, "x": c.p0.x, "y": c.p0.y} for c in self.chords]
        if self.chords:
            last = self.chords[-1]
            pts.append({"t": last.t1, "x": last.p1.x, "y": last.p1.y})
        return {
            "points": pts,
            "closed": self.closed,
            "period": self.period,
            "perimeter": self.perimeter,
            "caustic": self.caustic,
        }


@dataclass(frozen=True)
class Caustic:
    lam: float
    a: float
    b: float

    @property
    def is_convex(self) -> bool:
        return 0.0 < self.lam < self.b * self.b

    @property
    def semi_axes(self) -> tuple[float, float] | None:
        if not self.is_convex:
            return None
        return math.sqrt(self.a * self.a - self.lam), math.sqrt(self.b * self.b - self.lam)

    @property
    def mean_radius(self) -> float | None:
        ax = self.semi_axes
        return None if ax is None else 0.5 * (ax[0] + ax[1])


def reflect_direction(dom: Domain, u: Direction, t: float) -> Direction:
    n = domains.outward_normal(dom, t)
    k = 2.0 * (u.ux * n.ux + u.uy * n.uy)
    return Direction.of(u.ux - k * n.ux, u.uy - k * n.uy)


def reflect(dom: Domain, c: Chord) -> Chord:
    """Next chord after reflecting at c.p1 (angle of incidence = angle of reflection)."""
    return chord_from(dom, c.t1, reflect_direction(dom, c.direction, c.t1))


def _closure_error(dom: Domain, start: BilliardState, last: Chord) -> float:
    p0 = boundary_point(dom, start.t)
    u = reflect_direction(dom, last.direction, last.t1)
    return max(dist(last.p1, p0), math.hypot(u.ux - start.dir.ux, u.uy - start.dir.uy))


def orbit(dom: Domain, s0: BilliardState, steps: int, tol: float = CLOSURE_TOL) -> BilliardOrbit:
    if steps < 1:
        raise ValueError("steps must be >= 1")
    chords = [chord_from(dom, s0.t, s0.dir)]
    for _ in range(steps - 1):
        chords.append(reflect(dom, chords[-1]))
    closed = _closure_error(dom, s0, chords[-1]) <= tol
    lam = caustic_of(dom, chords[0]).lam
    return BilliardOrbit(chords, closed, steps if closed else None, lam)


def caustic_of(dom: Domain, c: Chord) -> Caustic:
    """Confocal parameter of the conic tangent to the chord's line.

    Uses the homogeneous line form <n, z> = h with unit normal n, for which
    tangency to x^2/(a^2-lam) + y^2/(b^2-lam) = 1 reads
    lam = a^2 nx^2 + b^2 ny^2 - h^2.  This covers lines through the centre.
    """
    u = c.direction
    nx, ny = -u.uy, u.ux
    h = nx * c.p0.x + ny * c.p0.y
    lam = (dom.a * nx) ** 2 + (dom.b * ny) ** 2 - h * h
    return Caustic(lam, dom.a, dom.b)


def _segment_distance(p, q, r, s) -> float:
    """Euclidean distance between closed segments pq and rs."""
    if dist(r, s) == 0.0:
        return point_segment_distance(r, p, q)[0]
    if segment_intersection(p, q, r, s) is not None:
        return 0.0
    return min(
        point_segment_distance(p, r, s)[0],
        point_segment_distance(q, r, s)[0],
        point_segment_distance(r, p, q)[0],
        point_segment_distance(s, p, q)[0],
    )


def focal_chord_test(dom: Domain, c: Chord, tol: float = 1e-10) -> bool:
    """True iff the chord meets the closed segment between the foci."""
    f1, f2 = dom.foci
    return _segment_distance(c.p0, c.p1, f1, f2) <= tol


# closed orbits ----------------------------------------------------------


def regular_orbit(dom: Domain, k: int, start_t: float = 0.0, winding: int = 1) -> BilliardOrbit:
    """Analytic k-periodic orbit of a disk with the given winding number."""
    if not dom.is_disk:
        raise ValueError("regular orbits exist only in disks")
    step = 2.0 * math.pi * winding / k
    ts = [start_t + i * step for i in range(k + 1)]
    chords = [chord_between(dom, ts[i], ts[i + 1]) for i in range(k)]
    lam = caustic_of(dom, chords[0]).lam
    return BilliardOrbit(chords, True, k, lam)


def tangent_direction(dom: Domain, t: float, lam: float) -> Direction:
    """Counterclockwise direction at boundary_point(t) tangent to the lam-caustic."""
    p = boundary_point(dom, t)
    M = np.diag([dom.a ** 2 - lam, dom.b ** 2 - lam]) - np.outer(p, p)
    w, V = np.linalg.eigh(M)
    if not (w[0] < 0.0 < w[1]):
        raise ValueError(f"point is not outside the caustic lam={lam}")
    # unit normals n = cos(beta) V0 +- sin(beta) V1 solve n^T M n = 0
    beta = math.atan(math.sqrt(-w[0] / w[1]))
    n = math.cos(beta) * V[:, 0] + math.sin(beta) * V[:, 1]
    # either orientation of the line; keep the one turning counterclockwise about the centre
    u = (n[1], -n[0])
    if p[0] * u[1] - p[1] * u[0] < 0.0:
        u = (-u[0], -u[1])
    dirs = [Direction.of(*u)]
    n = math.cos(beta) * V[:, 0] - math.sin(beta) * V[:, 1]
    u = (n[1], -n[0])
    if p[0] * u[1] - p[1] * u[0] < 0.0:
        u = (-u[0], -u[1])
    dirs.append(Direction.of(*u))
    # both tangent lines now carry a counterclockwise orientation; the forward one
    # enters the domain
    nrm = domains.outward_normal(dom, t)
    dirs.sort(key=lambda d: d.ux * nrm.ux + d.uy * nrm.uy)
    return dirs[0]


def _advance(dom: Domain, t0: float, lam: float, k: int) -> float:
    """Total counterclockwise parameter advance after k bounces."""
    c = chord_from(dom, t0, tangent_direction(dom, t0, lam))
    total = 0.0
    for i in range(k):
        if i:
            c = reflect(dom, c)
        total += wrap_angle(c.t1 - c.t0)
    return total


def find_closed_orbit(dom: Domain, k: int, start_t: float = 0.0) -> BilliardOrbit:
    """Closed convex k-periodic orbit through boundary_point(start_t)."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if dom.is_disk:
        return regular_orbit(dom, k, start_t)
    if k == 2:
        # only the two axes close after two bounces
        t = wrap_angle(start_t)
        q = t / (math.pi / 2)
        if abs(q - round(q)) > 1e-12:
            raise NoConvergence("2-periodic orbits of an ellipse pass only through the axis vertices")
        s = BilliardState(t, Direction.of(-math.cos(t), -math.sin(t)))
        return orbit(dom, s, 2)
    b2 = dom.b * dom.b
    lo, hi = b2 * 1e-9, b2 * (1.0 - 1e-12)
    grid = np.linspace(lo, hi, 13)
    adv = [_advance(dom, start_t, lam, k) for lam in grid]
    if any(y < x - 1e-12 for x, y in zip(adv, adv[1:])):
        raise NoConvergence("rotation is not monotone in the caustic parameter")
    target = 2.0 * math.pi
    f = lambda lam: _advance(dom, start_t, lam, k) - target
    if not (adv[0] < target < adv[-1]):
        raise NoConvergence(f"no rotation-number-one {k}-orbit in the caustic range")
    lam = bisect(f, lo, hi, xtol=0.0, max_iter=MAX_BISECTION_DEPTH)
    s0 = BilliardState(start_t, tangent_direction(dom, start_t, lam))
    orb = orbit(dom, s0, k)
    if not orb.closed:
        raise NoConvergence(f"{k}-orbit from t={start_t} failed to close")
    orb.caustic = lam
    return orb


@dataclass
class PonceletReport:
    k: int
    perimeters: list[float]
    lambdas: list[float]
    perimeter_spread: float
    lambda_spread: float
    orbit_lambda_spread: float


def poncelet_invariance(dom: Domain, k: int, samples: int = 8) -> PonceletReport:
    """Closed k-orbits from ``samples`` start points; spreads of perimeter and caustic."""
    if k < 3:
        raise ValueError("k must be >= 3")
    per, lams, along = [], [], 0.0
    for i in range(samples):
        orb = find_closed_orbit(dom, k, 2.0 * math.pi * i / samples)
        per.append(orb.perimeter)
        ls = [caustic_of(dom, c).lam for c in orb.chords]
        along = max(along, max(ls) - min(ls))
        lams.append(ls[0])
    return PonceletReport(k, per, lams, max(per) - min(per), max(lams) - min(lams), along)


def chord_lengths(orb: BilliardOrbit) -> Sequence[float]:
    return [c.length for c in orb.chords]
