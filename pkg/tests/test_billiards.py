import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from diskwidths.billiards import (BilliardState, caustic_of, chord_lengths, find_closed_orbit, focal_chord_test,
                                  orbit, poncelet_invariance, reflect, regular_orbit)
from diskwidths.domains import Direction, Domain, boundary_point, chord_between, chord_from, wrap_angle
from diskwidths.errors import NoConvergence
from netgen import ray_to_boundary

DISK = Domain.disk()
E = Domain.ellipse(1.05, 0.95)
NEAR = Domain.ellipse(1.02, 0.98)


def test_reflect_examples():
    nxt = reflect(DISK, chord_between(DISK, 0.0, 2 * math.pi / 3))
    assert nxt.t0 == pytest.approx(2 * math.pi / 3)
    assert nxt.t1 == pytest.approx(4 * math.pi / 3)
    back = reflect(DISK, chord_between(DISK, 0.0, math.pi))
    assert back.p1 == pytest.approx((1.0, 0.0), abs=1e-15)
    major = reflect(E, chord_from(E, 0.0, (-1.0, 0.0)))
    assert major.p0 == pytest.approx((-1.05, 0.0), abs=1e-15)
    assert major.p1 == pytest.approx((1.05, 0.0), abs=1e-15)


def test_orbit_examples():
    sq = orbit(DISK, BilliardState.aimed(DISK, 0.0, math.pi / 2), 4)
    assert sq.closed and sq.period == 4
    assert sq.perimeter == pytest.approx(4 * math.sqrt(2.0), abs=1e-12)
    tri = orbit(DISK, BilliardState.aimed(DISK, 0.0, 2 * math.pi / 3), 3)
    assert tri.closed
    assert tri.perimeter == pytest.approx(3 * math.sqrt(3.0), abs=1e-12)
    p2 = orbit(DISK, BilliardState(0.0, Direction(-1.0, 0.0)), 2)
    assert p2.closed and p2.perimeter == pytest.approx(4.0)
    with pytest.raises(ValueError):
        orbit(DISK, BilliardState(0.0, Direction(-1.0, 0.0)), 0)


def test_open_orbit_not_closed():
    o = orbit(DISK, BilliardState.aimed(DISK, 0.0, 1.0), 5)
    assert not o.closed and o.period is None


def test_caustic_examples():
    t = math.acos(0.5)
    lam = caustic_of(DISK, chord_between(DISK, t, -t)).lam
    assert lam == pytest.approx(0.75, abs=1e-15)
    assert caustic_of(DISK, chord_between(DISK, t, -t)).mean_radius == pytest.approx(0.5)
    # a diameter is tangent only to the degenerate caustic of radius 0, i.e. lam = b^2
    dia = caustic_of(DISK, chord_between(DISK, 0.3, 0.3 + math.pi))
    assert dia.lam == pytest.approx(1.0, abs=1e-15)
    assert not dia.is_convex
    f = E.focal_distance
    # vertical chord through the focus: the latus rectum
    y = E.b * math.sqrt(1 - (f / E.a) ** 2)
    c = chord_from(E, E.parameter_of((f, y)), (0.0, -1.0))
    assert caustic_of(E, c).lam == pytest.approx(E.b ** 2, abs=1e-12)
    assert not caustic_of(E, c).is_convex


@given(st.floats(-1.0, 1.0), st.floats(0.0, math.pi))
def test_focal_chords_have_no_convex_caustic(s, phi):
    x = s * E.focal_distance
    u = (math.cos(phi), math.sin(phi))
    start = ray_to_boundary(E, (x, 0.0), (-u[0], -u[1]))
    c = chord_from(E, E.parameter_of(start), u)
    assert caustic_of(E, c).lam >= E.b ** 2 - 1e-12


def test_caustic_semi_axes():
    c = caustic_of(E, chord_between(E, 0.3, 2.0))
    assert c.is_convex
    ax, ay = c.semi_axes
    assert ax ** 2 - ay ** 2 == pytest.approx(E.a ** 2 - E.b ** 2)


def test_focal_chord_examples():
    assert focal_chord_test(E, chord_from(E, 0.0, (-1.0, 0.0)))
    assert focal_chord_test(E, chord_from(E, math.pi / 2, (0.0, -1.0)))
    t = math.acos(1 / E.a)
    assert not focal_chord_test(E, chord_between(E, t, -t))


def test_find_closed_orbit_examples():
    tri = find_closed_orbit(DISK, 3, math.pi / 2)
    assert tri.chords[0].p0 == pytest.approx((0.0, 1.0), abs=1e-15)
    assert tri.perimeter == pytest.approx(3 * math.sqrt(3.0), abs=1e-12)
    d = find_closed_orbit(DISK, 2, 0.0)
    assert chord_lengths(d) == pytest.approx([2.0, 2.0])
    sq = find_closed_orbit(Domain.ellipse(1.001, 0.999), 4, 0.0)
    assert sq.closed
    assert abs(sq.perimeter - 4 * math.sqrt(2.0)) <= 1e-2


def test_ellipse_two_orbits_only_on_axes():
    assert find_closed_orbit(NEAR, 2, math.pi / 2).perimeter == pytest.approx(4 * 0.98)
    assert find_closed_orbit(NEAR, 2, 0.0).perimeter == pytest.approx(4 * 1.02)
    with pytest.raises(NoConvergence):
        find_closed_orbit(NEAR, 2, 0.4)
    with pytest.raises(ValueError):
        find_closed_orbit(NEAR, 1, 0.0)


@pytest.mark.parametrize("k", [3, 4, 5, 6])
def test_ellipse_orbit_closes_with_one_winding(k):
    orb = find_closed_orbit(NEAR, k, 0.9)
    assert orb.closed and orb.period == k
    adv = sum(wrap_angle(c.t1 - c.t0) for c in orb.chords)
    assert adv == pytest.approx(2 * math.pi, abs=1e-8)
    assert 0 < orb.caustic < NEAR.b ** 2


def test_poncelet_examples():
    assert poncelet_invariance(DISK, 3, 8).perimeter_spread <= 1e-9
    assert poncelet_invariance(NEAR, 3, 8).perimeter_spread <= 1e-6
    assert poncelet_invariance(NEAR, 4, 8).lambda_spread <= 1e-8
    with pytest.raises(ValueError):
        poncelet_invariance(NEAR, 2)


@given(st.floats(0.0, 2 * math.pi), st.floats(0.2, 2.9))
def test_caustic_invariant_along_orbit(t0, dt):
    c0 = chord_between(NEAR, t0, t0 + dt)
    if focal_chord_test(NEAR, c0, 1e-6):
        return
    o = orbit(NEAR, BilliardState(c0.t0, c0.direction), 30)
    lams = [caustic_of(NEAR, c).lam for c in o.chords]
    for i, lam in enumerate(lams):
        assert abs(lam - lams[0]) <= 1e-9 * max(i, 1)


def test_focal_propagation():
    rng = np.random.default_rng(11)
    f = NEAR.focal_distance
    for _ in range(100):
        x = rng.uniform(-f, f)
        phi = rng.uniform(0, math.pi)
        u = (math.cos(phi), math.sin(phi))
        start = ray_to_boundary(NEAR, (x, 0.0), (-u[0], -u[1]))
        o = orbit(NEAR, BilliardState(NEAR.parameter_of(start), Direction(*u)), 25)
        assert all(focal_chord_test(NEAR, c, 1e-9) for c in o.chords)


@given(st.floats(0.0, 2 * math.pi), st.floats(0.1, 3.0))
def test_disk_angular_width_preserved(t0, dt):
    o = orbit(DISK, BilliardState.aimed(DISK, t0, t0 + dt), 12)
    widths = [wrap_angle(c.t1 - c.t0) for c in o.chords]
    assert max(widths) - min(widths) <= 1e-9


@pytest.mark.parametrize("k", range(2, 13))
def test_regular_perimeter(k):
    assert regular_orbit(DISK, k, 0.1).perimeter == pytest.approx(2 * k * math.sin(math.pi / k), abs=1e-10)


@given(st.integers(3, 12), st.floats(0.01, 0.99))
def test_caustic_radius_side_arithmetic(k, r):
    # a chord tangent to the circle of radius r has length 2 sqrt(1 - r^2)
    t = math.acos(r)
    c = chord_between(DISK, t, -t)
    assert c.length == pytest.approx(2 * math.sqrt(1 - r * r), abs=1e-12)
    if r <= 0.7:
        assert c.length > 1.4
    else:
        assert 2 * math.pi * r > 3 * math.sqrt(2.0)


def test_monotone_rotation_guard():
    # rotation after k bounces grows with the caustic parameter
    from diskwidths.billiards import _advance
    lams = np.linspace(1e-6, NEAR.b ** 2 * 0.999, 20)
    adv = [_advance(NEAR, 0.4, lam, 5) for lam in lams]
    assert all(b > a for a, b in zip(adv, adv[1:]))


def test_orbit_json_shape():
    d = find_closed_orbit(NEAR, 3, 0.0).to_dict()
    assert len(d["points"]) == 4
    assert d["closed"] and d["period"] == 3
    assert d["points"][0]["x"] == pytest.approx(boundary_point(NEAR, 0.0).x)
