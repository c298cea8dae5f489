"""Bracketed scalar root finding and 1-D maximisation."""

from __future__ import annotations

import math
from typing import Callable

from .errors import BracketInvalid

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def bisect(f: Callable[[float], float], lo: float, hi: float, xtol: float = 0.0, max_iter: int = 200) -> float:
    """Root of f in [lo, hi] by bisection.

    The endpoint signs are checked first; equal signs raise BracketInvalid.
    Iteration stops when the bracket is no wider than ``xtol``, when the
    midpoint stops moving in floating point, or after ``max_iter`` halvings.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise BracketInvalid(f"f({lo})={flo:.6g} and f({hi})={fhi:.6g} have the same sign")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or hi - lo <= xtol:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def golden_section_max(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-8,
                       max_iter: int = 200) -> tuple[float, float]:
    """Maximise a unimodal f on [lo, hi]; returns (argmax, max).

    The endpoints are compared with the interior optimum so a monotone
    objective returns its better endpoint.
    """
    a, b = lo, hi
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = f(d)
    best = max([(fc, c), (fd, d), (f(lo), lo), (f(hi), hi)])
    return best[1], best[0]
