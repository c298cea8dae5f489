"""Quadratic curves c0 + c1 x + c2 y + c3 x^2 + c4 xy = 0 and their lengths in disks.

Because the span has no y^2 term, every such curve is linear in y:
(c4 x + c2) y = -(c3 x^2 + c1 x + c0).  Off the pole x = -c2/c4 the zero set
is the graph of a rational function of x; the only other pieces are vertical
lines (where both sides vanish identically).  Arc length inside a disk is the
integral of sqrt(1 + g'^2) over the x-intervals where the graph lies inside,
which are delimited by the real roots of a quartic.

Also here: the closed-form parabola length L(a), the sign of L'(a), the
maximising parabola, and the one-branch hyperbola family compared against it.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import BracketInvalid, QuadratureFailure
from .roots import bisect

QUAD_TOL = 1e-9
QUAD_DEPTH = 60
QUAD_MAX_INTERVALS = 4000

# relative threshold for degeneracy tests on max-normalised coefficients
DEGENERACY_EPS = 1e-12

TAGS = ("empty", "point", "line", "parallel-two-lines", "crossing-two-lines", "double-line", "parabola", "hyperbola")


class ConicCoeffs(NamedTuple):
    c0: float
    c1: float
    c2: float
    c3: float
    c4: float

    @classmethod
    def of(cls, coeffs: Sequence[float]) -> "ConicCoeffs":
        if len(coeffs) != 5:
            raise ValueError("expected 5 coefficients (1, x, y, x^2, xy)")
        c = cls(*(float(v) for v in coeffs))
        if not all(math.isfinite(v) for v in c):
            raise ValueError("coefficients must be finite")
        if not any(c):
            raise ValueError("the zero polynomial does not define a curve")
        return c

    def normalized(self) -> "ConicCoeffs":
        m = max(abs(v) for v in self)
        return ConicCoeffs(*(v / m for v in self))

    def __call__(self, x, y):
        return self.c0 + self.c1 * x + self.c2 * y + self.c3 * x * x + self.c4 * x * y


# Gauss-Kronrod 7-15 nodes and weights on [-1, 1]
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss nodes are the odd-indexed Kronrod nodes
_GW = np.zeros(15)
_GW[[1, 3, 5]] = _WG[:3]
_GW[7] = _WG[3]
_GW[[9, 11, 13]] = _WG[2::-1]


def _gk15(f, a: float, b: float) -> tuple[float, float]:
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    fx = f(mid + half * _NODES)
    k = half * float(_KW @ fx)
    return k, abs(k - half * float(_GW @ fx))


def adaptive_quad(f: Callable[[np.ndarray], np.ndarray], lo: float, hi: float, tol: float = QUAD_TOL,
                  max_depth: int = QUAD_DEPTH) -> float:
    """Integrate a vectorised f over [lo, hi] by Gauss-Kronrod 7-15 with interval halving.

    The interval with the largest error estimate |K15 - G7| is halved until
    the summed estimate is below ``tol``.  Intervals at ``max_depth`` are not
    split again; QuadratureFailure is raised if the budget cannot be met.
    """
    if hi <= lo:
        return 0.0
    k, e = _gk15(f, lo, hi)
    heap = [(-e, lo, hi, 0, k)]
    total_k, total_e = k, e
    frozen_k = frozen_e = 0.0
    evaluated = 1
    while total_e + frozen_e > max(tol, 1e-14 * abs(total_k)) and heap:
        ne, a, b, depth, k = heapq.heappop(heap)
        if depth >= max_depth or b - a <= 1e-15 * max(1.0, abs(a)):
            frozen_e -= ne
            frozen_k += k
            total_e += ne
            if frozen_e > tol:
                raise QuadratureFailure(f"tolerance {tol:g} not reached near [{a!r}, {b!r}]")
            continue
        mid = 0.5 * (a + b)
        k1, e1 = _gk15(f, a, mid)
        k2, e2 = _gk15(f, mid, b)
        evaluated += 2
        total_k += k1 + k2 - k
        total_e += e1 + e2 + ne
        heapq.heappush(heap, (-e1, a, mid, depth + 1, k1))
        heapq.heappush(heap, (-e2, mid, b, depth + 1, k2))
        if evaluated >= QUAD_MAX_INTERVALS:
            raise QuadratureFailure(f"tolerance {tol:g} not reached after {evaluated} intervals "
                                    f"(error {total_e:.2e})")
    # re-sum to shed the drift of the running total
    return math.fsum([item[4] for item in heap] + [frozen_k])


# classification -------------------------------------------------------------


def classify(q: Sequence[float]) -> str:
    """Type of the real zero set, by the quadratic-form and 3x3 discriminants."""
    c0, c1, c2, c3, c4 = ConicCoeffs.of(q).normalized()
    eps = DEGENERACY_EPS
    if abs(c3) <= eps and abs(c4) <= eps:
        return "empty" if abs(c1) <= eps and abs(c2) <= eps else "line"
    if abs(c4) <= eps:
        if abs(c2) > eps:
            return "parabola"
        disc = c1 * c1 - 4.0 * c3 * c0
        if disc > eps:
            return "parallel-two-lines"
        if disc < -eps:
            return "empty"
        return "double-line"
    # c4 != 0: the quadratic part is indefinite (determinant -c4^2/4 < 0)
    det = (-c3 * c2 * c2 - c4 * c4 * c0 + c1 * c2 * c4) / 4.0
    return "crossing-two-lines" if abs(det) <= eps else "hyperbola"


# geometry of the zero set ----------------------------------------------------


@dataclass
class _ZeroSet:
    """Graph y = -N(x)/(c4 x + c2) with N = c3 x^2 + c1 x + c0, plus vertical lines.

    When c4 != 0, N = (c4 x + c2)(q1 x + q0) + rem with rem = N(pole).
    """

    c: ConicCoeffs                       # max-normalised coefficients
    graph: bool = False
    q1: float = 0.0
    q0: float = 0.0
    rem: float = 0.0
    pole: float | None = None
    verticals: list[float] = field(default_factory=list)

    @property
    def has_graph(self) -> bool:
        return self.graph

    def g(self, x):
        c0, c1, c2, c3, c4 = self.c
        if self.pole is not None and not self.rem:
            return -(self.q1 * x + self.q0)
        return -(c3 * x * x + c1 * x + c0) / (c4 * x + c2)

    def dg(self, x):
        # quotient form; the split form q1 x + q0 cancels badly when c4 is tiny
        c0, c1, c2, c3, c4 = self.c
        if self.pole is not None and not self.rem:
            return -self.q1 + 0.0 * x
        d = c4 * x + c2
        n = c3 * x * x + c1 * x + c0
        return -((2.0 * c3 * x + c1) * d - c4 * n) / (d * d)


def _zero_set(q: ConicCoeffs) -> _ZeroSet:
    c0, c1, c2, c3, c4 = q.normalized()
    eps = DEGENERACY_EPS
    if abs(c4) <= eps:
        c4 = 0.0
    zs = _ZeroSet(ConicCoeffs(c0, c1, c2, c3, c4))
    if abs(c2) <= eps and c4 == 0.0:
        # c3 x^2 + c1 x + c0 = 0: vertical lines only
        if abs(c3) > eps:
            disc = c1 * c1 - 4 * c3 * c0
            if disc > eps:
                s = math.sqrt(disc)
                r1 = (-c1 - math.copysign(s, c1)) / (2 * c3)
                zs.verticals = sorted({r1, c0 / (c3 * r1)} if r1 != 0 else {0.0, -c1 / c3})
            elif disc >= -eps:
                zs.verticals = [-c1 / (2 * c3)]
        elif abs(c1) > eps:
            zs.verticals = [-c0 / c1]
        return zs
    zs.graph = True
    if c4 == 0.0:
        return zs
    # N = (c4 x + c2)(q1 x + q0) + rem
    zs.q1 = c3 / c4
    zs.q0 = (c1 - zs.q1 * c2) / c4
    zs.pole = -c2 / c4
    zs.rem = (c3 * zs.pole + c1) * zs.pole + c0
    if abs(zs.rem) <= eps:
        zs.rem = 0.0
        zs.verticals = [zs.pole]
    return zs


def _pmul(p, q):
    out = [0.0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def _horner(P, x):
    v = 0.0
    for a in P:
        v = v * x + a
    return v


def _crossings(zs: _ZeroSet, disk: tuple[float, float, float]) -> list[float]:
    """x-coordinates where the graph meets the circle of ``disk``.

    These are the real roots of P = ((x - cx)^2 - r^2) D^2 + M^2 with
    D = c4 x + c2 and M = N + cy D.  Companion-matrix roots seed the search;
    near-coincident seeds are resolved by a local quadratic model because
    near-degenerate curves produce root pairs closer than sqrt(eps).
    """
    cx, cy, r = disk
    c0, c1, c2, c3, c4 = zs.c
    D2 = [c4 * c4, 2 * c4 * c2, c2 * c2]
    M = [c3, c1 + cy * c4, c0 + cy * c2]
    A = _pmul([1.0, -2 * cx, cx * cx - r * r], D2)
    B = _pmul(M, M)
    P = [a + b for a, b in zip(A, B)]
    scale = max(abs(v) for v in P)
    i = 0
    while i < len(P) and abs(P[i]) <= 1e-14 * scale:
        i += 1
    P = P[i:]
    if len(P) < 2:
        return []

    def value(x):
        # factored form keeps relative accuracy when D and M are both small
        d = c4 * x + c2
        m = (M[0] * x + M[1]) * x + M[2]
        return ((x - cx) ** 2 - r * r) * d * d + m * m

    n = len(P) - 1
    dP = [a * (n - k) for k, a in enumerate(P[:-1])]
    seeds = sorted(float(z.real) for z in np.roots(P) if abs(z.imag) <= 1e-6 * (1.0 + abs(z)))
    clusters: list[list[float]] = []
    for s in seeds:
        if clusters and s - clusters[-1][-1] <= 1e-6 * (1.0 + abs(s)):
            clusters[-1].append(s)
        else:
            clusters.append([s])
    out = []
    for cl in clusters:
        x0 = sum(cl) / len(cl)
        if abs(x0 - cx) > 2.0 * r:
            # outside the disk's x-range; never a cut
            continue
        if len(cl) == 1:
            x = x0
            for _ in range(6):
                d = _horner(dP, x)
                if d == 0.0:
                    break
                step = value(x) / d
                x -= step
                if abs(step) <= 1e-16 * (1.0 + abs(x)):
                    break
            out.append(x)
            continue
        out.append(x0)
        out.extend(x0 + t for t in _local_roots(zs, disk, x0, max(abs(v - x0) for v in cl)))
    return out


def _local_roots(zs: _ZeroSet, disk, x0: float, spread: float) -> list[float]:
    """Real roots t of P(x0 + t) near 0, from Taylor factors evaluated at x0.

    The factors are expanded about x0 before multiplying, which keeps the
    local coefficients accurate where the global ones have cancelled.
    """
    cx, cy, r = disk
    c0, c1, c2, c3, c4 = zs.c
    u = x0 - cx
    circ = [1.0, 2.0 * u, (u - r) * (u + r)]
    d = [c4, c4 * x0 + c2]
    m = [c3, 2.0 * c3 * x0 + c1 + cy * c4, (c3 * x0 + c1 + cy * c4) * x0 + c0 + cy * c2]
    A = _pmul(circ, _pmul(d, d))
    B = _pmul(m, m)
    B = [0.0] * (len(A) - len(B)) + B
    T = [a + b for a, b in zip(A, B)]
    # rescale t = sigma w so the cluster sits at |w| ~ 1
    sigma = max(spread, 1e-12)
    k = len(T) - 1
    W = [c * sigma ** (k - i) for i, c in enumerate(T)]
    top = max(abs(v) for v in W)
    if top == 0.0:
        return []
    while W and abs(W[0]) <= 1e-300:
        W = W[1:]
    if len(W) < 2:
        return []
    ws = np.roots(W)
    window = 1e-6 * (1.0 + abs(x0)) / sigma + 4.0
    return [float(w.real) * sigma for w in ws if abs(w.imag) <= 1e-6 * (1.0 + abs(w)) and abs(w) <= window]


Disk = tuple  # (cx, cy, r)


def _inside(disks: Sequence[Disk], x, y, slack: float = 1e-13) -> bool:
    return all((x - cx) ** 2 + (y - cy) ** 2 - r * r <= slack * r * r for cx, cy, r in disks)


def arc_length_in_disks(q: Sequence[float], disks: Sequence[Disk], tol: float = QUAD_TOL) -> float:
    """Length of {Q = 0} inside the intersection of closed disks (cx, cy, r)."""
    q = ConicCoeffs.of(q)
    zs = _zero_set(q)
    lo = max(cx - r for cx, cy, r in disks)
    hi = min(cx + r for cx, cy, r in disks)
    if hi <= lo:
        return 0.0
    total = 0.0
    for x0 in zs.verticals:
        if not lo < x0 < hi:
            continue
        ylo, yhi = -math.inf, math.inf
        for cx, cy, r in disks:
            h = math.sqrt(max(r * r - (x0 - cx) ** 2, 0.0))
            ylo, yhi = max(ylo, cy - h), min(yhi, cy + h)
        total += max(0.0, yhi - ylo)
    if not zs.has_graph:
        return total
    cuts = {lo, hi}
    for d in disks:
        cuts.update(x for x in _crossings(zs, d) if lo < x < hi)
    if zs.pole is not None and lo < zs.pole < hi:
        cuts.add(zs.pole)
    c0, c1, c2, c3, c4 = zs.c
    if zs.pole is None and c3 and lo < -c1 / (2 * c3) < hi:
        cuts.add(-c1 / (2 * c3))
    cuts = sorted(cuts)
    pieces = [(a, b) for a, b in zip(cuts, cuts[1:]) if b > a]
    for a, b in pieces:
        m = 0.5 * (a + b)
        if zs.pole is not None and a <= zs.pole <= b and zs.rem:
            continue
        if _inside(disks, m, float(zs.g(m))):
            total += _graph_length(zs, a, b, tol / len(pieces))
    return total


def _graph_length(zs: _ZeroSet, a: float, b: float, tol: float) -> float:
    integrand = lambda x: np.sqrt(1.0 + zs.dg(x) ** 2)
    if zs.pole is None or not zs.rem:
        return adaptive_quad(integrand, a, b, tol)
    da, db = sorted((abs(a - zs.pole), abs(b - zs.pole)))
    if da >= b - a:
        return adaptive_quad(integrand, a, b, tol)
    # near a pole the graph turns within |x - pole| ~ sqrt(rem); integrate in log-distance
    da = max(da, 1e-300)
    c3, c4 = zs.c.c3, zs.c.c4

    def f(s):
        # offset from the pole taken directly, not as x - pole
        t = np.exp(s)
        return np.sqrt(1.0 + ((zs.rem - c3 * t * t) / (c4 * t * t)) ** 2) * t

    return adaptive_quad(f, math.log(da), math.log(db), tol)


def disk_length(q: Sequence[float], radius: float = 1.0, tol: float = QUAD_TOL) -> float:
    """Arc length of {Q = 0} inside the origin-centred disk of the given radius."""
    return arc_length_in_disks(q, [(0.0, 0.0, radius)], tol)


# intersections with lines -------------------------------------------------


@dataclass
class LineHits:
    count: int
    points: list[tuple[float, float]]
    tangencies: list[tuple[float, float]]
    coincident: bool = False


def line_restriction(q: Sequence[float], rho: float, theta: float) -> tuple[float, float, float]:
    """Coefficients (A, B, C) of Q(rho n + s t) = A s^2 + B s + C."""
    c0, c1, c2, c3, c4 = q
    nx, ny = math.cos(theta), math.sin(theta)
    tx, ty = -ny, nx
    A = c3 * tx * tx + c4 * tx * ty
    B = c1 * tx + c2 * ty + 2 * c3 * rho * nx * tx + c4 * rho * (nx * ty + ny * tx)
    C = c0 + c1 * rho * nx + c2 * rho * ny + c3 * rho * rho * nx * nx + c4 * rho * rho * nx * ny
    return A, B, C


def line_hits(q: Sequence[float], rho: float, theta: float, eps: float = 1e-12) -> LineHits:
    """Intersections of {Q = 0} with the line x cos(theta) + y sin(theta) = rho."""
    if rho < 0:
        raise ValueError("rho must be non-negative")
    q = ConicCoeffs.of(q).normalized()
    A, B, C = line_restriction(q, rho, theta)
    nx, ny = math.cos(theta), math.sin(theta)
    at = lambda s: (rho * nx - s * ny, rho * ny + s * nx)
    if abs(A) <= eps and abs(B) <= eps:
        if abs(C) <= eps:
            return LineHits(0, [], [], coincident=True)
        return LineHits(0, [], [])
    if abs(A) <= eps:
        return LineHits(1, [at(-C / B)], [])
    disc = B * B - 4 * A * C
    if abs(disc) <= eps:
        return LineHits(0, [], [at(-B / (2 * A))])
    if disc < 0:
        return LineHits(0, [], [])
    s1 = (-B - math.copysign(math.sqrt(disc), B)) / (2 * A)
    s2 = C / (A * s1)
    return LineHits(2, sorted([at(s1), at(s2)]), [])


# parabola family y = a x^2 - 1 ----------------------------------------------


def parabola_coeffs(a: float) -> ConicCoeffs:
    """a x^2 - y - 1 = 0."""
    return ConicCoeffs(-1.0, 0.0, -1.0, a, 0.0)


def parabola_crossing(a: float) -> float:
    """Positive x where y = a x^2 - 1 meets the unit circle."""
    return math.sqrt(2 * a - 1) / a


def parabola_L(a: float) -> float:
    """Closed-form length inside the unit disk of y = a x^2 - 1, a >= 1."""
    # a = 1 still meets the circle transversally, at (+-1, 0)
    if not a >= 1:
        raise ValueError("the parabola family requires a >= 1")
    r8 = math.sqrt(8 * a - 3)
    r2 = math.sqrt(2 * a - 1)
    return (math.log(r8 + 2 * r2) + 2 * r2 * r8) / (2 * a)


def sign_expr(z: float) -> float:
    """Expression whose sign is the sign of L'(a) at a = (z + 1)/2."""
    if not z > 0:
        raise ValueError("z must be positive")
    s = math.sqrt(4 * z + 1)
    return 2 * s / math.sqrt(z) - math.log(s + 2 * math.sqrt(z))


def maximize_parabola(z_lo: float = 99.0, z_hi: float = 299.0) -> tuple[float, float]:
    """(a0, L0): the unique critical point of L and the maximal length."""
    try:
        z = bisect(sign_expr, z_lo, z_hi, xtol=0.0)
    except BracketInvalid as exc:
        raise BracketInvalid(f"sign expression does not change sign on [{z_lo}, {z_hi}]") from exc
    a0 = (z + 1) / 2
    L0 = parabola_L(a0)
    if not L0 > 4.0:
        raise ArithmeticError(f"maximal parabola length {L0} does not exceed 4")
    return a0, L0


# one-branch hyperbola family ------------------------------------------------


def hyperbola_admissible(c: float, d: float) -> bool:
    return c > 0 and d > 0 and (c / d) * math.sqrt(d * d + 1) - (1 + c) > 0


def hyperbola_crossing(c: float, d: float) -> float:
    """Positive x where H(x) = (c/d) sqrt(d^2 + x^2) - (1 + c) meets the unit circle."""
    k = (c / d) ** 2
    y = -(1 + 2 * c - k) / (1 + k)
    return math.sqrt(max(0.0, 1 - y * y))


def hyperbola_branch_length(c: float, d: float, tol: float = QUAD_TOL) -> float:
    """Length in the unit disk of the branch through (0, -1) with vertical axis."""
    if not hyperbola_admissible(c, d):
        raise ValueError(f"(c, d) = ({c}, {d}) is not admissible")
    xs = hyperbola_crossing(c, d)
    k = c / d
    f = lambda x: np.sqrt(1.0 + (k * x / np.sqrt(d * d + x * x)) ** 2)
    return 2.0 * adaptive_quad(f, 0.0, xs, tol)


@dataclass
class HyperbolaSearch:
    length: float
    c: float
    d: float
    starts: int


def hyperbola_branch_max(starts: Sequence[tuple[float, float]] | None = None, c_max: float = 1e4,
                         tol: float = 1e-10) -> HyperbolaSearch:
    """Multi-start local maximisation of the branch length over admissible (c, d).

    The search runs in (log c, log a_eff) with a_eff = c/(2 d^2), the vertex
    curvature parameter matching the parabola a x^2 - 1.
    """
    if starts is None:
        starts = [(c, a) for c in (0.5, 5.0, 50.0, 500.0) for a in (5.0, 30.0, 94.0, 300.0)]
    lc_max = math.log(c_max)

    def unpack(v):
        c = math.exp(min(v[0], lc_max))
        a = math.exp(v[1])
        return c, math.sqrt(c / (2 * a))

    def neg_len(v):
        c, d = unpack(v)
        if not hyperbola_admissible(c, d):
            return 0.0
        return -hyperbola_branch_length(c, d, tol)

    best = HyperbolaSearch(0.0, math.nan, math.nan, len(starts))
    for c0, a0 in starts:
        res = minimize(neg_len, [math.log(c0), math.log(a0)], method="Nelder-Mead",
                       bounds=[(math.log(1e-3), lc_max), (math.log(1.0), math.log(1e5))],
                       options={"xatol": 1e-9, "fatol": 1e-13, "maxiter": 2000})
        if -res.fun > best.length:
            c, d = unpack(res.x)
            best = HyperbolaSearch(float(-res.fun), c, d, len(starts))
    return best


def sample_curve(q: Sequence[float], radius: float = 1.0, n: int = 400) -> list[list[tuple[float, float]]]:
    """Polylines tracing {Q = 0} inside the disk, for plotting."""
    zs = _zero_set(ConicCoeffs.of(q))
    disks = [(0.0, 0.0, radius)]
    out = []
    for x0 in zs.verticals:
        if abs(x0) < radius:
            h = math.sqrt(radius * radius - x0 * x0)
            out.append([(x0, -h), (x0, h)])
    if zs.has_graph:
        cuts = sorted({-radius, radius, *[x for x in _crossings(zs, disks[0]) if abs(x) < radius]}
                      | ({zs.pole} if zs.pole is not None and abs(zs.pole) < radius else set()))
        for a, b in zip(cuts, cuts[1:]):
            m = 0.5 * (a + b)
            if zs.pole is not None and a <= zs.pole <= b and zs.rem:
                continue
            if _inside(disks, m, float(zs.g(m))):
                xs = np.linspace(a, b, n)
                out.append([(float(x), float(y)) for x, y in zip(xs, zs.g(xs))])
    return out
