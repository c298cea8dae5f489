import math

import numpy as np
import pytest

from diskwidths import networks
from diskwidths.certify import (Subdomain, certify, enumerate_candidates, half_copies, ls_lower_bound,
                                polygon_exclusion, screen_candidates, three_balls)
from diskwidths.domains import Domain
from diskwidths.errors import ContainmentViolated, DisjointnessViolated, InconclusiveCertificate, NotExcludable

DISK = Domain.disk()
NEAR = Domain.ellipse(1.02, 0.98)
BOUND = 3 * math.sqrt(2.0)


class TestPolygonExclusion:
    def test_examples(self):
        ex = polygon_exclusion(5, 0.8, BOUND)
        assert ex.excluded and ex.branch == "caustic-circumference"
        ex = polygon_exclusion(4, 0.5, BOUND)
        assert ex.excluded and ex.branch == "side-length"
        ex = polygon_exclusion(3, 0.5, BOUND)
        assert ex.excluded and ex.branch == "triangle"
        assert "5.196152" in ex.inequality

    def test_not_excludable(self):
        with pytest.raises(NotExcludable):
            polygon_exclusion(4, 0.5, 6.0)
        with pytest.raises(NotExcludable):
            polygon_exclusion(3, 0.5, 6.0)

    def test_arguments(self):
        with pytest.raises(ValueError):
            polygon_exclusion(2, 0.5, BOUND)
        with pytest.raises(ValueError):
            polygon_exclusion(4, 1.0, BOUND)


class TestEnumeration:
    def test_disk(self):
        cands = enumerate_candidates(DISK, BOUND, 8)
        assert sorted(c.mass for c in cands) == pytest.approx([2.0, 4.0])
        for c in cands:
            assert networks.interior_residual(c.network) <= 1e-9
            assert networks.free_boundary_residual(c.network, DISK) <= 1e-9

    def test_disk_rejections(self):
        _, rejected = screen_candidates(DISK, BOUND, 8)
        y = [c for c in rejected if c.kind == "triple-junction"]
        assert len(y) == 1 and "1.5" in y[0].reason
        orbits = [c for c in rejected if c.kind == "orbit"]
        ks = {c.details["k"] for c in orbits}
        assert ks == set(range(3, 9))
        for c in orbits:
            assert c.reason.split(":")[0] in {"caustic-circumference", "side-length", "triangle"}
            if c.details["winding"] == 1 and c.details["k"] >= 4:
                assert c.reason.startswith("caustic-circumference")
        tri = [c for c in orbits if c.details["k"] == 3]
        assert tri[0].reason.startswith("triangle")

    def test_ellipse(self):
        cands = enumerate_candidates(NEAR, 4.2, 8)
        assert sorted(c.mass for c in cands) == pytest.approx([1.96, 2.04, 3.92, 4.0, 4.08], abs=1e-12)
        assert sorted(c.label for c in cands) == sorted(["d", "D", "2d", "d+D", "2D"])

    def test_ellipse_focal_chain(self):
        _, rejected = screen_candidates(NEAR, 4.2, 8)
        focal = [c for c in rejected if c.kind == "focal-chain"]
        assert focal and focal[0].mass > 4.2

    def test_arguments(self):
        with pytest.raises(ValueError):
            enumerate_candidates(DISK, 0.0)
        with pytest.raises(ValueError):
            enumerate_candidates(DISK, BOUND, 4)

    def test_low_bound_keeps_only_diameter(self):
        assert [c.mass for c in enumerate_candidates(DISK, 3.0)] == pytest.approx([2.0])


class TestLowerBounds:
    def test_three_balls(self):
        balls = three_balls(DISK)
        assert ls_lower_bound(DISK, balls) == pytest.approx(2.4)
        d = math.dist((balls[0].cx, balls[0].cy), (balls[1].cx, balls[1].cy))
        assert d == pytest.approx(0.55 * math.sqrt(3.0))

    def test_single_ball(self):
        assert ls_lower_bound(DISK, [Subdomain.ball(0.1, 0.0, 0.4)]) == pytest.approx(0.8)

    def test_half_copies(self):
        subs = half_copies(NEAR)
        assert NEAR.a ** 2 <= 2 * NEAR.b ** 2
        assert ls_lower_bound(NEAR, subs) == pytest.approx(2 * subs[0].first_width)
        assert ls_lower_bound(NEAR, subs) == pytest.approx(1.96)

    def test_violations(self):
        with pytest.raises(DisjointnessViolated):
            ls_lower_bound(DISK, [Subdomain.ball(0.0, 0.0, 0.4), Subdomain.ball(0.5, 0.0, 0.4)])
        with pytest.raises(ContainmentViolated):
            ls_lower_bound(DISK, [Subdomain.ball(0.7, 0.0, 0.4)])
        with pytest.raises(ValueError):
            ls_lower_bound(DISK, [])


def _check_sound(cert):
    for m in cert.conclusion:
        assert cert.lower.value <= m <= cert.upper.value
        assert m in cert.spectrum


@pytest.mark.slow
class TestCertify:
    @pytest.mark.parametrize("p,value", [(1, 2.0), (2, 2.0), (3, 4.0), (4, 4.0)])
    def test_disk(self, p, value):
        cert = certify(p, DISK)
        assert cert.value == value
        _check_sound(cert)

    def test_disk_lower_bound_evidence(self):
        cert = certify(3, DISK)
        ev = cert.lower.evidence[0]
        assert ev["kind"] == "lusternik-schnirelmann"
        assert ev["value"] == pytest.approx(2.4)
        assert cert.lower.value > 2.0

    def test_disk_monotone(self):
        values = [certify(p, DISK).value for p in range(1, 5)]
        assert values == sorted(values) == [2.0, 2.0, 4.0, 4.0]

    def test_ellipse(self):
        assert certify(1, NEAR).conclusion == pytest.approx([1.96])
        assert certify(2, NEAR).conclusion == pytest.approx([2.04])
        for p in (3, 4):
            cert = certify(p, NEAR)
            assert cert.conclusion == pytest.approx([3.92, 4.0, 4.08])
            assert cert.conclusion_labels == ["2d", "d+D", "2D"]
            _check_sound(cert)

    def test_ellipse_ordering(self):
        assert certify(1, NEAR).value < certify(2, NEAR).value

    def test_stability_under_perturbation(self):
        rng = np.random.default_rng(0)
        base = {p: certify(p, NEAR).conclusion_labels for p in range(1, 5)}
        for _ in range(5):
            da, db = rng.uniform(-1e-3, 1e-3, 2)
            dom = Domain.ellipse(1.02 + da, 0.98 + db)
            for p in range(1, 5):
                assert certify(p, dom).conclusion_labels == base[p]

    def test_window(self):
        with pytest.raises(InconclusiveCertificate):
            certify(1, Domain.ellipse(1.2, 1.0))
        with pytest.raises(InconclusiveCertificate):
            certify(1, Domain.disk(2.0))
        with pytest.raises(ValueError):
            certify(5, DISK)

    def test_json_shape(self):
        d = certify(4, NEAR).to_dict()
        assert d["domain"] == {"kind": "ellipse", "a": 1.02, "b": 0.98}
        assert d["upper"]["value"] == pytest.approx(1.02 * 4.002670297679955)
        assert {c["label"] for c in d["candidates"]} == {"d", "D", "2d", "d+D", "2D"}
        assert all("reason" in c for c in d["rejected"])
