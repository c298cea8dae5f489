"""The algebraic sweepout family: projective classes [Q] of polynomials in span{1, x, y, x^2, xy}.

Index p uses the first p + 1 basis functions, so p = 1 gives vertical lines,
p = 2 all lines, p = 3 adds x^2 (parabolas with vertical axis) and p = 4 adds
xy.  Each class is sent to {Q = 0} inside the unit disk, and the module
estimates the supremum of that length over the class space.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import norm, qmc

from .conics import ConicCoeffs, disk_length, maximize_parabola
from .errors import QuadratureFailure
from .roots import golden_section_max

BASIS = ("1", "x", "y", "x^2", "xy")
MIN_SAMPLES = 1000
SAMPLE_TOL = 1e-6
REFINE_TOL = 1e-10
BOUND_SLACK = 1e-6
POLISH_PASSES = 60


# coefficients below this (relative to the unit vector) do not choose the sign
SIGN_EPS = 1e-12


def _canonical(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    nz = np.flatnonzero(np.abs(v) > SIGN_EPS)
    if v[nz[0]] < 0:
        v = -v
    return v


@dataclass(frozen=True)
class ProjectiveClass:
    """Unit representative with first nonzero coefficient positive."""

    coeffs: tuple[float, ...]
    p: int

    @classmethod
    def of(cls, coeffs: Sequence[float], p: int | None = None) -> "ProjectiveClass":
        v = np.zeros(5)
        v[: len(coeffs)] = coeffs
        if not np.all(np.isfinite(v)) or not np.any(v):
            raise ValueError("coefficients must be finite and not all zero")
        top = int(np.flatnonzero(v)[-1])
        p = max(top, 1) if p is None else p
        if not 1 <= p <= 4:
            raise ValueError("p must be in 1..4")
        if top > p:
            raise ValueError(f"class uses {BASIS[top]} which is outside the p={p} family")
        return cls(tuple(float(x) for x in _canonical(v)), p)

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.coeffs)

    def conic(self) -> ConicCoeffs:
        return ConicCoeffs(*self.coeffs)


def evaluate(p: int, cls: ProjectiveClass, tol: float = REFINE_TOL) -> tuple[ConicCoeffs, float]:
    if cls.p > p or any(cls.coeffs[p + 1:]):
        raise ValueError(f"class is not in the p={p} family")
    q = cls.conic()
    return q, disk_length(q, 1.0, tol)


def lemma_bound(p: int) -> float:
    """Proven bound on lengths in the p-family: 2 for lines, L0 otherwise."""
    if p in (1, 2):
        return 2.0
    if p in (3, 4):
        return maximize_parabola()[1]
    raise ValueError("p must be in 1..4")


def sample_classes(p: int, n: int, seed: int = 0) -> np.ndarray:
    """n canonical unit vectors (rows, length 5) from a scrambled Sobol sequence."""
    if not 1 <= p <= 4:
        raise ValueError("p must be in 1..4")
    m = max(0, math.ceil(math.log2(max(n, 1))))
    u = qmc.Sobol(d=p + 1, scramble=True, seed=seed).random_base2(m)[:n]
    g = norm.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    first = g[:, 0] != 0
    sign = np.where(first, np.sign(g[:, 0]), np.sign(g[:, 1]))
    out = np.zeros((len(g), 5))
    out[:, : p + 1] = g * sign[:, None]
    return out


def symmetry_images(v: Sequence[float]) -> list[np.ndarray]:
    """Images under x -> -x, y -> -y and their composition, canonicalised."""
    v = np.asarray(v, dtype=float)
    flips = [np.ones(5), np.array([1, -1, 1, 1, -1.0]), np.array([1, 1, -1, 1, -1.0]),
             np.array([1, -1, -1, 1, 1.0])]
    return [_canonical(v * f) for f in flips]


def class_distance(u: Sequence[float], v: Sequence[float]) -> float:
    """Distance between classes modulo sign and the reflection symmetries."""
    v = _canonical(np.asarray(v, dtype=float))
    return min(float(np.linalg.norm(w - v)) for w in symmetry_images(u))


def parabola_class(a: float) -> ProjectiveClass:
    return ProjectiveClass.of([-1.0, 0.0, -1.0, a, 0.0], 3)


def _length(v: np.ndarray, tol: float) -> float:
    try:
        return disk_length(ConicCoeffs(*v), 1.0, tol)
    except QuadratureFailure:
        return -math.inf


def _line_search(v: np.ndarray, d: np.ndarray, step: float, tol: float, best: float):
    """Golden-section along the great circle through v with tangent d."""
    w = d - (d @ v) * v
    nw = np.linalg.norm(w)
    if nw < 1e-12:
        return v, best
    w /= nw
    f = lambda t: _length(math.cos(t) * v + math.sin(t) * w, tol)
    t, val = golden_section_max(f, -step, step, tol=1e-10)
    if val > best:
        return _canonical(math.cos(t) * v + math.sin(t) * w), val
    return v, best


def _refine(v: np.ndarray, p: int, passes: int, step: float, tol: float,
            min_gain: float = -1.0) -> tuple[np.ndarray, float]:
    """Coordinate-wise golden-section ascent along great circles of the sphere.

    After each pass the net displacement of the pass is searched as an extra
    direction, which follows curved ridges faster than coordinates alone.
    Stops after ``passes`` or when a pass gains less than ``min_gain``.
    """
    v = _canonical(v)
    best = _length(v, tol)
    for _ in range(passes):
        start, before = v, best
        for i in range(p + 1):
            e = np.zeros(5)
            e[i] = 1.0
            v, best = _line_search(v, e, step, tol, best)
        if best > before:
            v, best = _line_search(v, v - start, step, tol, best)
        if best - before < min_gain:
            break
        step = max(0.5 * step, 1e-3)
    return v, best


@dataclass
class SupResult:
    p: int
    sup: float
    witness: ProjectiveClass
    bound: float
    samples: int
    failures: int = 0
    top: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "sup": self.sup,
            "bound": self.bound,
            "witness": list(self.witness.coeffs),
            "samples": self.samples,
            "quadrature_failures": self.failures,
        }


def sup_length(p: int, samples: int = 10_000, seed: int = 0, refine_top: int = 10, passes: int = 3,
               step: float = 0.2, starts: Sequence[Sequence[float]] = ()) -> SupResult:
    """Largest disk length found over the p-family, with its witness class.

    Global stage: ``samples`` Sobol classes at a cheap quadrature tolerance.
    Local stage: the best ``refine_top`` samples (plus ``starts``) are refined
    at the tight tolerance.  Ties keep the lowest sample index.
    """
    if samples < MIN_SAMPLES:
        raise ValueError(f"sampling budget must be at least {MIN_SAMPLES}")
    pts = sample_classes(p, samples, seed)
    lengths = np.array([_length(v, SAMPLE_TOL) for v in pts])
    failures = int(np.sum(~np.isfinite(lengths)))
    # stable sort keeps the lowest index first among equal lengths
    order = np.argsort(-lengths, kind="stable")[:refine_top]
    cands = [pts[i] for i in order]
    for s in starts:
        v = np.zeros(5)
        v[: len(s)] = s
        if np.any(v[p + 1:]):
            raise ValueError("warm start lies outside the family")
        cands.append(v)
    best_v, best = None, -math.inf
    for v in cands:
        rv, val = _refine(np.asarray(v, dtype=float), p, passes, step, REFINE_TOL)
        if val > best:
            best_v, best = rv, val
    best_v, best = _refine(best_v, p, POLISH_PASSES, step / 8, REFINE_TOL, min_gain=1e-13)
    bound = lemma_bound(p)
    if best > bound + BOUND_SLACK:
        raise ArithmeticError(f"p={p}: found length {best} above the bound {bound}")
    return SupResult(p, best, ProjectiveClass.of(best_v, p), bound, samples, failures,
                     [float(x) for x in lengths[order]])


@functools.lru_cache(maxsize=32)
def sup_table(samples: int = 10_000, seed: int = 0) -> tuple[SupResult, ...]:
    """sup_length for p = 1..4, each warm-started from the previous witness."""
    out: list[SupResult] = []
    for p in range(1, 5):
        starts = [out[-1].witness.coeffs] if out else []
        out.append(sup_length(p, samples, seed, starts=starts))
    return tuple(out)
