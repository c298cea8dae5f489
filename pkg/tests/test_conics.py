import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from diskwidths import conics
from diskwidths.conics import (ConicCoeffs, adaptive_quad, arc_length_in_disks, classify, disk_length,
                               hyperbola_admissible, hyperbola_branch_length, hyperbola_branch_max, line_hits,
                               maximize_parabola, parabola_coeffs, parabola_crossing, parabola_L, sign_expr)
from diskwidths.errors import BracketInvalid, QuadratureFailure

A0 = 94.091282
L0 = 4.00267

coeff = st.floats(-10.0, 10.0, allow_nan=False).filter(lambda v: v == 0.0 or abs(v) > 1e-3)
conic_vectors = st.tuples(coeff, coeff, coeff, coeff, coeff).filter(lambda c: any(c))


def reference_length(a):
    """Independent check: integrate the graph length with scipy."""
    xs = parabola_crossing(a)
    val, _ = integrate.quad(lambda x: math.sqrt(1 + 4 * a * a * x * x), -xs, xs, epsabs=1e-13, epsrel=1e-13)
    return val


class TestCoefficients:
    def test_validation(self):
        with pytest.raises(ValueError):
            ConicCoeffs.of([0, 0, 0, 0, 0])
        with pytest.raises(ValueError):
            ConicCoeffs.of([1, 2, 3])
        with pytest.raises(ValueError):
            ConicCoeffs.of([math.inf, 0, 0, 0, 1])

    def test_evaluation(self):
        q = ConicCoeffs(1, 2, 3, 4, 5)
        assert q(1.0, -1.0) == 1 + 2 - 3 + 4 - 5
        assert max(abs(v) for v in q.normalized()) == 1.0


class TestClassify:
    @pytest.mark.parametrize("q,tag", [
        ((0, 1, 0, 0, 0), "line"),
        ((0, 0, 0, 0, 1), "crossing-two-lines"),
        ((-1, 0, -1, 1, 0), "parabola"),
        ((1, 0, 0, 0, 0), "empty"),
        ((-1, 0, 0, 1, 0), "parallel-two-lines"),
        ((1, 0, 0, 1, 0), "empty"),
        ((0, 0, 0, 1, 0), "double-line"),
        ((-0.1, 0, 0, 0, 1), "hyperbola"),
        ((0, 1, 1, 0, 1), "hyperbola"),
        ((1, 1, 1, 0, 1), "crossing-two-lines"),
    ])
    def test_tags(self, q, tag):
        assert classify(q) == tag
        assert tag in conics.TAGS

    @given(conic_vectors, st.floats(1e-3, 1e3), st.booleans())
    def test_scale_invariant(self, q, lam, flip):
        lam = -lam if flip else lam
        assert classify(q) == classify([lam * v for v in q])


class TestDiskLength:
    def test_examples(self):
        assert disk_length((0, 1, 0, 0, 0)) == pytest.approx(2.0, abs=1e-14)
        assert disk_length((0, 0, 0, 0, 1)) == pytest.approx(4.0, abs=1e-14)
        assert disk_length((-1, 0, -1, 1, 0)) == pytest.approx(2.95789, abs=1e-5)

    def test_degenerate_sets(self):
        assert disk_length((1, 0, 0, 0, 0)) == 0.0
        assert disk_length((0, 0, 0, 1, 0)) == pytest.approx(2.0)
        assert disk_length((-0.25, 0, 0, 1, 0)) == pytest.approx(4 * math.sqrt(0.75))
        assert disk_length((2, 1, 0, 0, 0)) == 0.0

    def test_radius_scaling(self):
        q = (0.1, 0.2, -0.7, 0.4, 0.3)
        assert disk_length(q, 2.0) == pytest.approx(2.0 * disk_length((0.1, 0.4, -1.4, 1.6, 1.2)), rel=1e-10)

    def test_steep_parabola_cluster(self):
        # nearly coincident crossings near the circle
        q = (0.1, 0.0, 1e-9, -1.0, 0.0)
        two_chords = 4 * math.sqrt(1 - 0.1)
        assert disk_length(q) == pytest.approx(two_chords, abs=1e-6)

    def test_tiny_xy_term_matches_parabola(self):
        q = [0.0, 0.0, 2.5625, 5.0, 1.192092896e-07]
        assert disk_length(q) == pytest.approx(disk_length(q[:4] + [0.0]), abs=1e-7)

    def test_nearly_coincident_diameters(self):
        # x (8.27 x + 4.8e-8 y) = 0: two diameters at an angle of about 6e-9
        assert disk_length([0.0, 0.0, 0.0, -8.269658435469408, -4.828372276610007e-08]) == pytest.approx(4.0)

    def test_far_hyperbola_is_empty(self):
        assert disk_length([0.783, -2.03e-08, 0.0, 0.0, 2.24e-09]) == 0.0

    def test_factored_pair(self):
        # y (x + 0.5) = 0 splits into a vertical chord and a diameter
        assert disk_length([0.0, 0.0, 0.5, 0.0, 1.0]) == pytest.approx(2.0 + 2 * math.sqrt(0.75))

    @pytest.mark.parametrize("eps", [1e-1, 1e-3, 1e-6, 1e-9, -1e-3, -1e-9])
    def test_two_branch_hyperbola_at_most_four(self, eps):
        assert disk_length((-eps, 0, 0, 0, 1)) <= 4.0 + 1e-9

    def test_two_branch_hyperbola_approaches_four(self):
        lens = [disk_length((-eps, 0, 0, 0, 1)) for eps in (1e-1, 1e-2, 1e-4, 1e-8)]
        assert all(b > a for a, b in zip(lens, lens[1:]))
        assert lens[-1] == pytest.approx(4.0, abs=1e-3)

    @given(conic_vectors, st.integers(-8, 8), st.booleans())
    def test_power_of_two_scaling_is_bitwise(self, q, k, flip):
        lam = (-1.0 if flip else 1.0) * 2.0 ** k
        assert disk_length(q) == disk_length([lam * v for v in q])

    @given(conic_vectors, st.floats(1e-3, 1e3), st.booleans())
    def test_scale_invariance(self, q, lam, flip):
        lam = -lam if flip else lam
        assert disk_length([lam * v for v in q]) == pytest.approx(disk_length(q), abs=1e-12)

    @given(conic_vectors)
    def test_bounded_by_four_plus(self, q):
        assert 0.0 <= disk_length(q) <= L0 + 1e-6

    def test_arc_in_two_disks(self):
        # the diameter x = 0 inside the ball of radius 0.3 about (0, 0.5)
        assert arc_length_in_disks((0, 1, 0, 0, 0), [(0, 0, 1), (0, 0.5, 0.3)]) == pytest.approx(0.6)
        assert arc_length_in_disks((0, 1, 0, 0, 0), [(0, 0, 1), (0, 0.9, 0.3)]) == pytest.approx(0.4)


class TestLineHits:
    def test_examples(self):
        assert line_hits((0, 1, 0, 0, 0), 0.0, 0.0).coincident
        h = line_hits((0, 1, 0, 0, 0), 0.5, 0.0)
        assert h.count == 0 and not h.coincident
        h = line_hits((0, 0, 0, 0, 1), 0.3, 0.7)
        assert h.count == 2
        for x, y in h.points:
            assert abs(x * y) <= 1e-12
            assert x * math.cos(0.7) + y * math.sin(0.7) == pytest.approx(0.3)

    def test_tangency_flagged(self):
        # y = x^2 - 1 touches y = -1 at the vertex
        h = line_hits((-1, 0, -1, 1, 0), 1.0, 1.5 * math.pi)
        assert h.count == 0 and len(h.tangencies) == 1
        assert h.tangencies[0] == pytest.approx((0.0, -1.0), abs=1e-12)

    def test_negative_rho(self):
        with pytest.raises(ValueError):
            line_hits((0, 1, 0, 0, 0), -0.1, 0.0)


class TestParabola:
    @pytest.mark.parametrize("a,expected", [(1.0, 2.95789), (2.0, 3.61146)])
    def test_closed_form_examples(self, a, expected):
        assert parabola_L(a) == pytest.approx(expected, abs=1e-5)

    def test_closed_form_at_one(self):
        s5 = math.sqrt(5.0)
        assert parabola_L(1.0) == pytest.approx((math.log(s5 + 2) + 2 * s5) / 2, abs=1e-15)

    def test_domain(self):
        with pytest.raises(ValueError):
            parabola_L(0.5)

    def test_matches_disk_length_and_reference(self):
        rng = np.random.default_rng(0)
        for a in rng.uniform(1.0, 500.0, 200):
            closed = parabola_L(a)
            assert abs(closed - disk_length(parabola_coeffs(a))) <= 1e-7
            assert abs(closed - reference_length(a)) <= 1e-9

    def test_limit_is_two_diameters(self):
        # past a0 the length decreases to 4, so it approaches from above
        vals = [parabola_L(a) for a in (1e3, 1e4, 1e5, 1e6, 1e8)]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert 4.0 < parabola_L(1e6) < 4.0 + 1e-5
        assert parabola_L(1e6) == pytest.approx(reference_length(1e6), abs=1e-9)

    @pytest.mark.parametrize("z,expected", [(99.0, 0.320), (299.0, -0.235)])
    def test_sign_expr_examples(self, z, expected):
        assert sign_expr(z) == pytest.approx(expected, abs=1e-3)

    def test_sign_expr_root(self):
        assert abs(sign_expr(2 * A0 - 1)) <= 1e-6

    def test_sign_expr_decreasing(self):
        z = np.geomspace(0.51, 1e6, 4000)
        vals = np.array([sign_expr(v) for v in z])
        assert np.all(np.diff(vals) < 0)

    @given(st.floats(1.01, 1e5))
    def test_sign_expr_matches_derivative_sign(self, z):
        a = (z + 1) / 2
        h = 1e-6 * a
        d = (parabola_L(a + h) - parabola_L(a - h)) / (2 * h)
        if abs(sign_expr(z)) > 1e-4:
            assert math.copysign(1, d) == math.copysign(1, sign_expr(z))

    def test_maximize(self):
        a0, l0 = maximize_parabola()
        assert a0 == pytest.approx(A0, abs=1e-4)
        assert l0 == pytest.approx(L0, abs=1e-4)
        assert l0 > 4.0
        assert parabola_L(a0 - 1) < l0 and parabola_L(a0 + 1) < l0

    def test_maximize_bad_bracket(self):
        with pytest.raises(BracketInvalid):
            maximize_parabola(200.0, 299.0)


class TestHyperbola:
    def test_admissibility(self):
        assert hyperbola_admissible(10.0, 1.0)
        assert not hyperbola_admissible(0.1, 10.0)
        assert not hyperbola_admissible(-1.0, 1.0)
        with pytest.raises(ValueError):
            hyperbola_branch_length(0.1, 10.0)

    def test_matches_graph_quadrature(self):
        c, d = 5.0, 1.0
        xs = conics.hyperbola_crossing(c, d)
        y = (c / d) * math.sqrt(d * d + xs * xs) - (1 + c)
        assert xs * xs + y * y == pytest.approx(1.0)
        f = lambda x: math.sqrt(1 + (c * x / (d * math.sqrt(d * d + x * x))) ** 2)
        ref = 2 * integrate.quad(f, 0, xs, epsabs=1e-13)[0]
        assert hyperbola_branch_length(c, d) == pytest.approx(ref, abs=1e-9)

    @pytest.mark.parametrize("a", [5.0, 30.0, A0])
    def test_approaches_parabola_from_below(self, a):
        gaps = [parabola_L(a) - hyperbola_branch_length(c, math.sqrt(c / (2 * a))) for c in (1.0, 10.0, 1e2, 1e3, 1e4)]
        assert all(g > 0 for g in gaps)
        assert all(b < a_ for a_, b in zip(gaps, gaps[1:]))

    def test_branch_max_below_parabola_max(self):
        res = hyperbola_branch_max()
        assert res.length < maximize_parabola()[1]
        assert res.length == pytest.approx(L0, abs=1e-5)

    @given(st.floats(0.05, 1e3), st.floats(1.0, 1e3))
    def test_any_admissible_branch_below_L0(self, c, a_eff):
        d = math.sqrt(c / (2 * a_eff))
        if hyperbola_admissible(c, d):
            assert hyperbola_branch_length(c, d) < 4.00267


class TestQuadrature:
    def test_polynomial_exact(self):
        assert adaptive_quad(lambda x: x ** 5 - x, 0.0, 2.0) == pytest.approx(64 / 6 - 2, abs=1e-13)

    def test_sqrt_endpoint(self):
        assert adaptive_quad(np.sqrt, 0.0, 1.0, 1e-12) == pytest.approx(2 / 3, abs=1e-11)

    def test_empty_interval(self):
        assert adaptive_quad(np.sin, 1.0, 1.0) == 0.0

    def test_failure_reported(self):
        with pytest.raises(QuadratureFailure):
            adaptive_quad(lambda x: np.sign(np.sin(1e4 * x)) / np.sqrt(np.abs(x - 0.3) + 1e-300), 0.0, 1.0, 1e-14)


def test_sample_curve_points_on_curve():
    q = (-1, 0, -1, 30, 0)
    pieces = conics.sample_curve(q, 1.0, 50)
    assert pieces
    for x, y in (pt for piece in pieces for pt in piece):
        assert abs(ConicCoeffs(*q)(x, y)) <= 1e-9
        assert x * x + y * y <= 1 + 1e-9
