"""Length from line counts, and local mass bounds for the degree-two family.

A curve's length is half the measure of the lines meeting it, counted with
multiplicity: lines x cos(theta) + y sin(theta) = rho with rho >= 0 and
theta in [0, 2 pi), measure d rho d theta.  The estimator integrates the
count over lines meeting a measurement region with the midpoint rule.

Oracles are vectorised: given arrays rho, theta (same shape) they return the
intersection points as arrays X, Y of shape (..., k) with NaN padding, and a
boolean array flagging lines contained in the curve.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .conics import ConicCoeffs, arc_length_in_disks, classify
from .domains import Domain
from .errors import DomainError, OracleDegenerate

Oracle = Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray, np.ndarray]]

# a sampled coincident fraction above this is not a measure-zero accident
DEGENERATE_FRACTION = 1e-3


@dataclass(frozen=True)
class LineParam:
    rho: float
    theta: float

    def __post_init__(self):
        if self.rho < 0:
            raise ValueError("rho must be non-negative")
        if not 0.0 <= self.theta < 2 * math.pi:
            raise ValueError("theta must lie in [0, 2 pi)")

    @classmethod
    def normalized(cls, rho: float, theta: float) -> "LineParam":
        if rho < 0:
            rho, theta = -rho, theta + math.pi
        return cls(rho, theta % (2 * math.pi))


@dataclass(frozen=True)
class Ball:
    cx: float
    cy: float
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("ball radius must be positive")


@dataclass(frozen=True)
class QuadratureGrid:
    n_theta: int = 256
    n_rho: int = 512

    def __post_init__(self):
        if self.n_theta < 8 or self.n_rho < 8:
            raise ValueError("grid needs at least 8 points per axis")

    def halved(self) -> "QuadratureGrid":
        return QuadratureGrid(max(8, self.n_theta // 2), max(8, self.n_rho // 2))


Region = Ball | Domain


def _region_frame(region: Region) -> tuple[float, float, float]:
    """(cx, cy, rho_max): lines through the region have local rho <= rho_max."""
    if isinstance(region, Ball):
        return region.cx, region.cy, region.r
    return 0.0, 0.0, region.a


def _inside_region(region: Region, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    # strict: points on the region boundary are not counted
    if isinstance(region, Ball):
        return (X - region.cx) ** 2 + (Y - region.cy) ** 2 < region.r ** 2
    return (X / region.a) ** 2 + (Y / region.b) ** 2 < 1.0


# oracles ---------------------------------------------------------------


def conic_oracle(q: Sequence[float], eps: float = 1e-12) -> Oracle:
    """Intersections of lines with {Q = 0}; tangencies are not counted."""
    c0, c1, c2, c3, c4 = ConicCoeffs.of(q).normalized()
    if classify((c0, c1, c2, c3, c4)) == "double-line":
        # every line meets a double line at a double root; count it once
        x0 = -c1 / (2 * c3)
        return _vertical_oracle(x0)

    def hits(rho, theta):
        nx, ny = np.cos(theta), np.sin(theta)
        tx, ty = -ny, nx
        A = c3 * tx * tx + c4 * tx * ty
        B = c1 * tx + c2 * ty + 2 * c3 * rho * nx * tx + c4 * rho * (nx * ty + ny * tx)
        C = c0 + c1 * rho * nx + c2 * rho * ny + c3 * rho * rho * nx * nx + c4 * rho * rho * nx * ny
        lin = np.abs(A) <= eps
        coincident = lin & (np.abs(B) <= eps) & (np.abs(C) <= eps)
        disc = B * B - 4 * A * C
        with np.errstate(divide="ignore", invalid="ignore"):
            # relative threshold: separated root pairs count even when disc is tiny
            sq = np.sqrt(np.where(disc > 1e-15 * (B * B + np.abs(4 * A * C)), disc, np.nan))
            # stable pair of roots
            s1 = (-B - np.copysign(sq, B)) / (2 * A)
            s2 = C / (A * s1)
            sl = np.where(np.abs(B) > eps, -C / B, np.nan)
        S = np.stack([np.where(lin, sl, s1), np.where(lin, np.nan, s2)], axis=-1)
        X = rho[..., None] * nx[..., None] + S * tx[..., None]
        Y = rho[..., None] * ny[..., None] + S * ty[..., None]
        return X, Y, coincident

    return hits


def _vertical_oracle(x0: float) -> Oracle:
    def hits(rho, theta):
        nx, ny = np.cos(theta), np.sin(theta)
        coincident = (np.abs(ny) <= 1e-15) & (np.abs(rho - x0 * nx) <= 1e-15)
        with np.errstate(divide="ignore", invalid="ignore"):
            y = np.where(np.abs(ny) > 1e-15, (rho - x0 * nx) / ny, np.nan)
        return np.full(np.shape(rho) + (1,), x0), y[..., None], coincident

    return hits


def circle_oracle(cx: float, cy: float, r: float) -> Oracle:
    def hits(rho, theta):
        nx, ny = np.cos(theta), np.sin(theta)
        h = rho - (cx * nx + cy * ny)
        with np.errstate(invalid="ignore"):
            w = np.sqrt(np.where(np.abs(h) < r, r * r - h * h, np.nan))
        fx, fy = cx + h * nx, cy + h * ny
        X = np.stack([fx - w * ny, fx + w * ny], axis=-1)
        Y = np.stack([fy + w * nx, fy - w * nx], axis=-1)
        return X, Y, np.zeros(np.shape(rho), dtype=bool)

    return hits


def segment_oracle(p, q) -> Oracle:
    px, py = p
    dx, dy = q[0] - px, q[1] - py

    def hits(rho, theta):
        nx, ny = np.cos(theta), np.sin(theta)
        den = nx * dx + ny * dy
        num = rho - (nx * px + ny * py)
        coincident = (np.abs(den) <= 1e-15) & (np.abs(num) <= 1e-15)
        with np.errstate(divide="ignore", invalid="ignore"):
            u = num / den
        u = np.where((u >= 0) & (u <= 1), u, np.nan)
        return (px + u * dx)[..., None], (py + u * dy)[..., None], coincident

    return hits


def union_oracle(*oracles: Oracle) -> Oracle:
    def hits(rho, theta):
        parts = [o(rho, theta) for o in oracles]
        X = np.concatenate([p[0] for p in parts], axis=-1)
        Y = np.concatenate([p[1] for p in parts], axis=-1)
        C = np.logical_or.reduce([p[2] for p in parts])
        return X, Y, C

    return hits


# estimator ---------------------------------------------------------------


@dataclass
class CroftonResult:
    length: float
    error: float
    coarse: float
    coincident_fraction: float
    grid: QuadratureGrid

    def to_dict(self) -> dict:
        return {"length": self.length, "error_estimate": self.error, "coarse": self.coarse,
                "coincident_fraction": self.coincident_fraction,
                "grid": {"n_theta": self.grid.n_theta, "n_rho": self.grid.n_rho}}


def _midpoint_estimate(hits: Oracle, region: Region, grid: QuadratureGrid) -> tuple[float, float]:
    cx, cy, rmax = _region_frame(region)
    dth = 2 * math.pi / grid.n_theta
    dr = rmax / grid.n_rho
    th = (np.arange(grid.n_theta) + 0.5) * dth
    rl = (np.arange(grid.n_rho) + 0.5) * dr
    TH, RL = np.meshgrid(th, rl, indexing="ij")
    # local (about the region centre) to global line parameters; same line, same measure
    rho = RL + cx * np.cos(TH) + cy * np.sin(TH)
    theta = np.where(rho < 0, TH + math.pi, TH) % (2 * math.pi)
    rho = np.abs(rho)
    X, Y, coincident = hits(rho, theta)
    inside = _inside_region(region, X, Y) & np.isfinite(X)
    counts = inside.sum(axis=-1).astype(float)
    counts[coincident] = 0.0
    frac = float(coincident.mean())
    return 0.5 * float(counts.sum()) * dr * dth, frac


def crofton_length(hits: Oracle, region: Region, grid: QuadratureGrid | None = None) -> CroftonResult:
    """Midpoint-rule Crofton estimate with a coarse-grid error estimate."""
    grid = grid or QuadratureGrid()
    fine, frac = _midpoint_estimate(hits, region, grid)
    if frac > DEGENERATE_FRACTION:
        raise OracleDegenerate(f"{frac:.2%} of sampled lines lie in the curve")
    coarse, _ = _midpoint_estimate(hits, region, grid.halved())
    return CroftonResult(fine, abs(fine - coarse), coarse, frac, grid)


# no concentration of mass ------------------------------------------------


def local_mass_bound(p0: float, s: float) -> float:
    """Bound on the length of a degree-two curve in the ball of radius s about (p0, 0), outside the unit circle."""
    if not s > 0:
        raise DomainError("s must be positive")
    if p0 < 0:
        raise DomainError("p0 must be non-negative")
    if p0 == 0:
        return 4 * s * math.pi
    if s >= p0:
        raise DomainError(f"the bound needs s < p0 (got s={s}, p0={p0})")
    return 4 * s * (math.pi / 2 + math.asin(s / p0))


def scan_bound(p0: float, s: float) -> float:
    """local_mass_bound where it applies, else the centred value 4 pi s."""
    return local_mass_bound(p0, s) if p0 == 0 or s < p0 else 4 * math.pi * s


@dataclass
class ScanRow:
    radius: float
    sup_mass: float
    bound: float
    worst_ratio: float
    witness: tuple[float, ...]
    centre: tuple[float, float]


def default_centres(n: int, seed: int = 0) -> list[tuple[float, float]]:
    rng = np.random.default_rng(seed)
    fixed = [(0.0, 0.0), (0.5, 0.0)]
    r = 0.95 * np.sqrt(rng.random(max(0, n - len(fixed))))
    a = 2 * math.pi * rng.random(len(r))
    return fixed + [(float(x), float(y)) for x, y in zip(r * np.cos(a), r * np.sin(a))]


def no_concentration_scan(p: int, samples: int = 200, radii: Sequence[float] = (0.2, 0.1, 0.05),
                          seed: int = 0, centres: Sequence[tuple[float, float]] | None = None,
                          tol: float = 1e-9) -> list[ScanRow]:
    """Measured local mass over sampled classes and centres, per radius.

    The mass in B_s(P) is the exact length of {Q = 0} inside B_s(P) and the
    unit disk.  ``bound`` is the largest closed-form bound over the centres
    and ``worst_ratio`` the largest measured/bound ratio.
    """
    from .sweepouts import sample_classes

    if list(radii) != sorted(radii, reverse=True) or any(s <= 0 for s in radii):
        raise ValueError("radii must be positive and decreasing")
    classes = sample_classes(p, samples, seed)
    centres = list(centres) if centres is not None else default_centres(16, seed)
    rows = []
    for s in radii:
        best, best_q, best_c, worst, top_bound = -1.0, (), (0.0, 0.0), 0.0, 0.0
        for cx, cy in centres:
            b = scan_bound(math.hypot(cx, cy), s)
            top_bound = max(top_bound, b)
            for v in classes:
                m = arc_length_in_disks(v, [(0.0, 0.0, 1.0), (cx, cy, s)], tol)
                worst = max(worst, m / b)
                if m > best:
                    best, best_q, best_c = m, tuple(float(x) for x in v), (cx, cy)
        rows.append(ScanRow(s, best, top_bound, worst, best_q, best_c))
    return rows


def scan_csv(rows: Sequence[ScanRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["radius", "sup_mass", "bound", "worst_ratio"])
    for r in rows:
        w.writerow([repr(r.radius), repr(r.sup_mass), repr(r.bound), repr(r.worst_ratio)])
    return buf.getvalue()
