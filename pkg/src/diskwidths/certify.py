"""Width certificates for the unit disk and near-circular ellipses.

A certificate brackets the p-width between a lower and an upper bound and
intersects the bracket with the spectrum: the masses of the stationary
networks that survive the classification filters.  Upper bounds come from
the algebraic sweepouts, lower bounds from the smallest spectrum value or
from disjoint subdomains (Lusternik-Schnirelmann).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import billiards, networks
from .domains import Domain, diameters
from .errors import (ContainmentViolated, DisjointnessViolated, GeometryError, InconclusiveCertificate,
                     NoConvergence, NotExcludable)
from .networks import GeodesicNetwork
from .roots import golden_section_max
from .sweepouts import sup_table

STATIONARITY_TOL = 1e-9
ENUMERATION_MARGIN = 1e-6
CONTAINMENT_MARGIN = 1e-9
SQRT2 = math.sqrt(2.0)
DENSITY_CAP = 3.0 * SQRT2

# near-circle window
MAX_ASPECT = 1.05

# exclusion constants
CAUSTIC_SPLIT = 0.7
SIDE_FLOOR = 1.4


# candidates ---------------------------------------------------------------


@dataclass
class CandidateNetwork:
    description: str
    network: GeodesicNetwork
    mass: float
    label: str = ""
    kind: str = ""
    reason: str = ""
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"description": self.description, "mass": self.mass, "label": self.label, "kind": self.kind}
        if self.reason:
            out["reason"] = self.reason
        if self.details:
            out["details"] = self.details
        return out


@dataclass
class Exclusion:
    excluded: bool
    branch: str
    inequality: str


def polygon_exclusion(k: int, r: float, bound: float, perimeter: float | None = None) -> Exclusion:
    """Why a closed k-orbit with caustic radius r cannot have mass below ``bound``.

    Branches, tried in order:
      caustic-circumference  r > 0.7: perimeter >= 2 pi r >= 1.4 pi
      side-length            r <= 0.7, k >= 4: every side exceeds 2 sqrt(1 - 0.49) > 1.4
      triangle               k = 3: the perimeter itself (3 sqrt 3 for the regular triangle)
    """
    if k < 3:
        raise ValueError("k must be >= 3")
    if not 0 < r < 1:
        raise ValueError("caustic radius must lie in (0, 1)")
    if r > CAUSTIC_SPLIT and 2 * CAUSTIC_SPLIT * math.pi > bound:
        return Exclusion(True, "caustic-circumference", f"2*0.7*pi = {1.4 * math.pi:.6f} > {bound:.6f}")
    if r <= CAUSTIC_SPLIT and k >= 4 and 4 * SIDE_FLOOR > bound:
        return Exclusion(True, "side-length", f"4*1.4 = {4 * SIDE_FLOOR:.6f} > {bound:.6f}")
    if k == 3:
        per = perimeter if perimeter is not None else 2 * k * math.sqrt(1 - r * r)
        if per > bound:
            return Exclusion(True, "triangle", f"perimeter {per:.6f} > {bound:.6f}")
    raise NotExcludable(f"k={k}, r={r}: no exclusion branch applies below {bound}")


def _stationary(net: GeodesicNetwork, dom: Domain) -> bool:
    return (networks.interior_residual(net) <= STATIONARITY_TOL
            and networks.free_boundary_residual(net, dom) <= STATIONARITY_TOL)


def _diameter_candidates(dom: Domain) -> list[CandidateNetwork]:
    d, D = diameters(dom)
    if dom.is_disk:
        return [
            CandidateNetwork("diameter", networks.diameter(dom, 0.0), d, "d", "diameter"),
            CandidateNetwork("diameter with multiplicity 2", networks.diameter(dom, 0.0, 2.0), 2 * d, "2d",
                             "two-diameters"),
            CandidateNetwork("two crossing diameters", networks.crossing_diameters(dom, 0.0, math.pi / 2),
                             2 * d, "2d", "two-diameters"),
        ]
    minor, major = math.pi / 2, 0.0
    return [
        CandidateNetwork("minor axis", networks.diameter(dom, minor), d, "d", "diameter"),
        CandidateNetwork("major axis", networks.diameter(dom, major), D, "D", "diameter"),
        CandidateNetwork("minor axis with multiplicity 2", networks.diameter(dom, minor, 2.0), 2 * d, "2d",
                         "two-diameters"),
        CandidateNetwork("minor and major axes", networks.crossing_diameters(dom, major, minor), d + D, "d+D",
                         "two-diameters"),
        CandidateNetwork("major axis with multiplicity 2", networks.diameter(dom, major, 2.0), 2 * D, "2D",
                         "two-diameters"),
    ]


def _orbit_candidates(dom: Domain, k_max: int) -> list[tuple[CandidateNetwork, float, int]]:
    """Closed orbits with k >= 3 as (candidate, caustic radius, k)."""
    out = []
    for k in range(3, k_max + 1):
        if dom.is_disk:
            # every winding m < k/2 coprime to k: convex polygons and star polygons
            for m in range(1, (k + 1) // 2):
                if math.gcd(k, m) != 1:
                    continue
                orb = billiards.regular_orbit(dom, k, 0.0, m)
                r = math.cos(m * math.pi / k) * dom.a
                name = f"regular {k}-gon" if m == 1 else f"star polygon {{{k}/{m}}}"
                net = orb.to_network(dom)
                out.append((CandidateNetwork(name, net, orb.perimeter, f"P{k}" if m == 1 else f"P{k}/{m}",
                                             "orbit", details={"k": k, "winding": m, "caustic_radius": r}), r, k))
        else:
            try:
                orb = billiards.find_closed_orbit(dom, k, 0.0)
            except NoConvergence:
                continue
            r = billiards.Caustic(orb.caustic, dom.a, dom.b).mean_radius
            net = orb.to_network(dom)
            out.append((CandidateNetwork(f"closed {k}-orbit", net, orb.perimeter, f"P{k}", "orbit",
                                         details={"k": k, "winding": 1, "caustic_radius": r,
                                                  "caustic_lambda": orb.caustic}), r, k))
    return out


def screen_candidates(dom: Domain, mass_bound: float, k_max: int = 8
                      ) -> tuple[list[CandidateNetwork], list[CandidateNetwork]]:
    """(accepted, rejected) stationary networks below ``mass_bound``; rejections carry a reason."""
    if not mass_bound > 0:
        raise ValueError("mass_bound must be positive")
    if k_max < 5:
        raise ValueError("k_max must be >= 5")
    accepted: list[CandidateNetwork] = []
    rejected: list[CandidateNetwork] = []

    def admit(c: CandidateNetwork) -> str:
        if not _stationary(c.network, dom):
            return "not stationary"
        ok, bad = networks.integrality_filter(c.network)
        if not ok:
            return "non-integer density " + ", ".join(f"{t:g}" for _, t in bad)
        if c.mass >= mass_bound:
            return f"mass {c.mass:.6f} >= {mass_bound:.6f}"
        rep = networks.check_density_bounds(c.network, dom, mass_bound)
        if not rep.ok:
            return "density bound violated"
        return ""

    seen: set[tuple[str, float]] = set()
    for c in _diameter_candidates(dom):
        why = admit(c)
        if why:
            c.reason = why
            rejected.append(c)
            continue
        key = (c.kind, round(c.mass, 12))
        if key in seen:
            # the multiplicity-2 diameter is the coincident case of two diameters
            continue
        seen.add(key)
        accepted.append(c)

    # three arms at 120 degrees: stationary, but the centre has density 3/2
    if dom.is_disk:
        y = CandidateNetwork("triple junction", networks.star(dom, [0.0, 2 * math.pi / 3, 4 * math.pi / 3]),
                             3 * dom.a, "Y", "triple-junction")
        y.reason = admit(y) or "accepted"
        rejected.append(y)

    for c, r, k in _orbit_candidates(dom, k_max):
        why = admit(c)
        if not why:
            raise InconclusiveCertificate(f"{c.description} of mass {c.mass} passes every filter")
        try:
            ex = polygon_exclusion(k, r / dom.b if not dom.is_disk else r / dom.a, mass_bound,
                                   perimeter=c.mass)
            c.reason = f"{ex.branch}: {ex.inequality}"
        except NotExcludable as exc:
            raise InconclusiveCertificate(str(exc)) from exc
        c.details["filter"] = why
        rejected.append(c)

    if not dom.is_disk:
        # orbits crossing the focal segment: every chord is at least the latus rectum
        latus = 2 * dom.b ** 2 / dom.a
        if 3 * latus > mass_bound:
            rejected.append(CandidateNetwork("orbits through the focal segment", GeodesicNetwork([], []),
                                             3 * latus, "focal", "focal-chain",
                                             reason=f"focal-chain: 3*{latus:.6f} > {mass_bound:.6f}"))
        else:
            raise InconclusiveCertificate("focal-chain exclusion fails at this bound")
    return accepted, rejected


def enumerate_candidates(dom: Domain, mass_bound: float, k_max: int = 8) -> list[CandidateNetwork]:
    return screen_candidates(dom, mass_bound, k_max)[0]


# Lusternik-Schnirelmann ------------------------------------------------------


@dataclass(frozen=True)
class Subdomain:
    """Axis-aligned ellipse with centre (cx, cy) and semi-axes (ax, ay)."""

    cx: float
    cy: float
    ax: float
    ay: float

    @classmethod
    def ball(cls, cx: float, cy: float, r: float) -> "Subdomain":
        return cls(cx, cy, r, r)

    @property
    def first_width(self) -> float:
        return 2 * min(self.ax, self.ay)

    def support(self, nx, ny):
        return self.cx * nx + self.cy * ny + np.sqrt((self.ax * nx) ** 2 + (self.ay * ny) ** 2)


def _min_over_circle(f, n: int = 3600) -> float:
    th = np.linspace(0, 2 * math.pi, n, endpoint=False)
    vals = f(np.cos(th), np.sin(th))
    i = int(np.argmin(vals))
    step = 2 * math.pi / n
    _, m = golden_section_max(lambda t: -float(f(math.cos(t), math.sin(t))), th[i] - step, th[i] + step, 1e-12)
    return min(float(vals[i]), -m)


def containment_margin(dom: Domain, sub: Subdomain) -> float:
    return _min_over_circle(lambda nx, ny: np.sqrt((dom.a * nx) ** 2 + (dom.b * ny) ** 2) - sub.support(nx, ny))


def separation(s1: Subdomain, s2: Subdomain) -> float:
    """Largest gap h over directions: positive if disjoint, zero if touching."""
    return -_min_over_circle(lambda nx, ny: s1.support(nx, ny) + s2.support(-nx, -ny))


def ls_lower_bound(dom: Domain, subs: Sequence[Subdomain], tol: float = 1e-12) -> float:
    """Sum of first widths of pairwise interior-disjoint subdomains contained in dom."""
    if not subs:
        raise ValueError("need at least one subdomain")
    for s in subs:
        m = containment_margin(dom, s)
        if not m > CONTAINMENT_MARGIN:
            raise ContainmentViolated(f"subdomain {s} has containment margin {m:.3e}")
    for i in range(len(subs)):
        for j in range(i + 1, len(subs)):
            g = separation(subs[i], subs[j])
            if g < -tol:
                raise DisjointnessViolated(f"subdomains {i} and {j} overlap by {-g:.3e}")
    return math.fsum(s.first_width for s in subs)


def three_balls(dom: Domain) -> list[Subdomain]:
    """Radius 0.4 b balls centred on the circle of radius 0.55 b."""
    rc, r = 0.55 * dom.b, 0.4 * dom.b
    return [Subdomain.ball(rc * math.cos(2 * math.pi * i / 3), rc * math.sin(2 * math.pi * i / 3), r)
            for i in range(3)]


def half_copies(dom: Domain) -> list[Subdomain]:
    """Two half-scale copies rotated by pi/2, shifted to x = -b/2 and x = +b/2."""
    return [Subdomain(-dom.b / 2, 0.0, dom.b / 2, dom.a / 2), Subdomain(dom.b / 2, 0.0, dom.b / 2, dom.a / 2)]


# certificates ---------------------------------------------------------------


@dataclass
class Bound:
    value: float
    strict: bool = False
    evidence: list[dict] = field(default_factory=list)
    witness: list[float] | None = None

    def to_dict(self) -> dict:
        out = {"value": self.value, "strict": self.strict, "evidence": self.evidence}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class WidthCertificate:
    p: int
    domain: Domain
    lower: Bound
    upper: Bound
    spectrum: list[float]
    labels: list[str]
    conclusion: list[float]
    conclusion_labels: list[str]
    candidates: list[CandidateNetwork] = field(default_factory=list)
    rejected: list[CandidateNetwork] = field(default_factory=list)

    @property
    def value(self) -> float:
        if len(self.conclusion) != 1:
            raise ValueError("certificate concludes a set, not a single value")
        return self.conclusion[0]

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "domain": self.domain.describe(),
            "lower": self.lower.to_dict(),
            "upper": self.upper.to_dict(),
            "spectrum": self.spectrum,
            "spectrum_labels": self.labels,
            "conclusion": self.conclusion,
            "conclusion_labels": self.conclusion_labels,
            "candidates": [c.to_dict() for c in self.candidates],
            "rejected": [c.to_dict() for c in self.rejected],
        }


def check_window(dom: Domain, max_aspect: float = MAX_ASPECT):
    if dom.is_disk:
        if dom.a != 1.0:
            raise InconclusiveCertificate("only the unit disk is certified")
        return
    if dom.a / dom.b > max_aspect:
        raise InconclusiveCertificate(f"aspect ratio {dom.a / dom.b:.4f} exceeds {max_aspect}")
    if dom.a ** 2 > 2 * dom.b ** 2:
        raise InconclusiveCertificate("need a^2 <= 2 b^2")


def _upper(p: int, dom: Domain, samples: int, seed: int) -> Bound:
    res = sup_table(samples, seed)[p - 1]
    scale = dom.a
    ev = [{"kind": "sweepout", "p": p, "numeric_sup": res.sup, "proven_bound": res.bound,
           "samples": res.samples, "seed": seed}]
    if not dom.is_disk:
        ev.append({"kind": "inclusion", "statement": f"domain lies in the disk of radius {dom.a}",
                   "factor": scale})
    return Bound(res.bound * scale, False, ev, list(res.witness.coeffs))


def certify(p: int, dom: Domain, samples: int = 10_000, seed: int = 0, k_max: int = 8,
            max_aspect: float = MAX_ASPECT) -> WidthCertificate:
    """Certificate for the p-width of dom (unit disk or near-circular ellipse)."""
    if p not in (1, 2, 3, 4):
        raise ValueError("p must be in 1..4")
    check_window(dom, max_aspect)
    upper = _upper(p, dom, samples, seed)
    if not upper.value < DENSITY_CAP:
        raise InconclusiveCertificate(f"upper bound {upper.value} is not below 3 sqrt 2")
    try:
        accepted, rejected = screen_candidates(dom, upper.value + ENUMERATION_MARGIN, k_max)
    except GeometryError as exc:
        raise InconclusiveCertificate(f"classification failed: {exc}") from exc
    accepted.sort(key=lambda c: c.mass)
    spectrum = [c.mass for c in accepted]
    labels = [c.label for c in accepted]
    if not spectrum:
        raise InconclusiveCertificate("empty spectrum")

    if p in (1, 2):
        lower = Bound(spectrum[0], False, [{"kind": "spectrum-minimum", "value": spectrum[0]}])
    else:
        balls = three_balls(dom)
        v = ls_lower_bound(dom, balls)
        lower = Bound(v, False, [{"kind": "lusternik-schnirelmann", "value": v,
                                  "subdomains": [vars(s) for s in balls],
                                  "first_widths": [s.first_width for s in balls]}])

    if not dom.is_disk and p in (1, 2):
        # the two widths are distinct: two disjoint half copies force omega_2 > omega_1
        try:
            v = ls_lower_bound(dom, half_copies(dom))
        except GeometryError as exc:
            raise InconclusiveCertificate(f"tie-break construction failed: {exc}") from exc
        ev = {"kind": "tie-break", "value": v, "subdomains": [vars(s) for s in half_copies(dom)],
              "statement": "the first two widths differ"}
        if p == 1:
            upper = Bound(upper.value, True, upper.evidence + [ev], upper.witness)
        else:
            lower = Bound(lower.value, True, lower.evidence + [ev])

    def admissible(m: float) -> bool:
        lo_ok = m > lower.value if lower.strict else m >= lower.value
        hi_ok = m < upper.value if upper.strict else m <= upper.value
        return lo_ok and hi_ok

    concl = [(m, lab) for m, lab in zip(spectrum, labels) if admissible(m)]
    if not concl:
        raise InconclusiveCertificate(f"no spectrum value in [{lower.value}, {upper.value}]")
    if dom.is_disk and len(concl) != 1:
        raise InconclusiveCertificate(f"disk certificate is not a single value: {concl}")
    return WidthCertificate(p, dom, lower, upper, spectrum, labels, [m for m, _ in concl],
                            [lab for _, lab in concl], accepted, rejected)
