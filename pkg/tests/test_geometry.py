import math
from itertools import combinations

import numpy as np
import pytest

from voidsel.errors import DegeneratePair, DegenerateExtentWarning, DuplicateSitesWarning, EmptyInput
from voidsel.geometry import (
    Arc,
    Circle,
    DomainCircle,
    bounding_circle,
    bounding_rect,
    circumcircle,
    diametral_circle,
    gabriel_pairs,
    hausdorff_distance,
    is_empty_circle,
    nearest_site,
    voronoi,
)


def brute_gabriel(pts):
    """O(n^3) scan straight from the definition."""
    out = []
    for i, j in combinations(range(len(pts)), 2):
        c = (pts[i] + pts[j]) / 2
        r = np.linalg.norm(pts[i] - pts[j]) / 2
        if all(np.linalg.norm(pts[k] - c) >= r - 1e-12 for k in range(len(pts)) if k not in (i, j)):
            out.append((i, j))
    return out


def exact_min_circle(pts):
    """Smallest enclosing circle by enumerating every pair and triple."""
    n = len(pts)
    i, j = np.triu_indices(n, 1)
    centers = [(pts[i] + pts[j]) / 2]
    tri = np.array(list(combinations(range(n), 3)))
    a, b, c = pts[tri[:, 0]], pts[tri[:, 1]], pts[tri[:, 2]]
    d = 2 * (a[:, 0] * (b[:, 1] - c[:, 1]) + b[:, 0] * (c[:, 1] - a[:, 1]) + c[:, 0] * (a[:, 1] - b[:, 1]))
    ok = np.abs(d) > 1e-12
    a, b, c, d = a[ok], b[ok], c[ok], d[ok]
    sa, sb, sc = (a ** 2).sum(1), (b ** 2).sum(1), (c ** 2).sum(1)
    ux = (sa * (b[:, 1] - c[:, 1]) + sb * (c[:, 1] - a[:, 1]) + sc * (a[:, 1] - b[:, 1])) / d
    uy = (sa * (c[:, 0] - b[:, 0]) + sb * (a[:, 0] - c[:, 0]) + sc * (b[:, 0] - a[:, 0])) / d
    centers.append(np.c_[ux, uy])
    best = np.inf
    for cs in centers:
        for s in range(0, len(cs), 20000):
            block = cs[s:s + 20000]
            far = np.sqrt(((block[:, None, :] - pts[None, :, :]) ** 2).sum(-1)).max(axis=1)
            best = min(best, float(far.min()))
    return best


class TestCircles:
    def test_diametral_examples(self):
        c = diametral_circle((0, 0), (2, 0))
        assert c.center == (1.0, 0.0) and c.radius == 1.0
        c = diametral_circle((0, 0), (0, 4))
        assert c.center == (0.0, 2.0) and c.radius == 2.0
        with pytest.raises(DegeneratePair):
            diametral_circle((1, 1), (1, 1))

    def test_circumcircle_equidistant(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            p = rng.uniform(-5, 5, size=(3, 2))
            c = circumcircle(*p)
            d = np.linalg.norm(p - np.array(c.center), axis=1)
            assert np.ptp(d) <= 1e-9 * max(1.0, d.max())

    def test_empty_circle(self):
        c = diametral_circle((0, 0), (2, 0))
        assert not is_empty_circle(c, [(1, 0)])
        assert is_empty_circle(c, [])
        # boundary contact does not count
        assert is_empty_circle(c, [(0, 0), (2, 0), (1, 1)])

    def test_empty_circle_vs_scan(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            pts = rng.uniform(0, 1, size=(15, 2))
            c = Circle(tuple(rng.uniform(0, 1, 2)), float(rng.uniform(0, 0.4)))
            excl = {int(rng.integers(15))}
            expect = not any(
                np.linalg.norm(pts[k] - np.array(c.center)) < c.radius for k in range(15) if k not in excl
            )
            assert is_empty_circle(c, pts, exclude=excl) == expect


class TestBounding:
    def test_trivial(self):
        d = bounding_circle([(3, 4)])
        assert d.center == (3.0, 4.0) and d.radius == 0.0
        d = bounding_circle([(0, 0), (2, 0)])
        assert d.center == pytest.approx((1.0, 0.0)) and d.radius == pytest.approx(1.0)
        with pytest.raises(EmptyInput):
            bounding_circle([])

    @pytest.mark.parametrize("seed", range(5))
    def test_near_minimal(self, seed):
        pts = np.random.default_rng(seed).normal(size=(100, 2))
        d = bounding_circle(pts)
        assert np.all(np.linalg.norm(pts - np.array(d.center), axis=1) <= d.radius + 1e-12)
        assert d.radius <= 1.1 * exact_min_circle(pts)

    def test_rect_radius(self):
        r = bounding_rect([(0, 0), (1, 0), (0, 1), (1, 1)])
        assert (r.width, r.height) == (1.0, 1.0)
        assert r.radius == pytest.approx(math.sqrt(2) / 2)
        assert bounding_rect([(0, 0), (3, 4)]).radius == pytest.approx(2.5)

    def test_rect_degenerate(self):
        with pytest.warns(DegenerateExtentWarning):
            r = bounding_rect([(1, 1), (1, 1)])
        assert r.width > 0 and r.height > 0
        assert r.contains([(1, 1)]).all()


class TestGabriel:
    def test_triangle_and_line(self):
        tri = [(0, 0), (1, 0), (0.5, math.sqrt(3) / 2)]
        assert gabriel_pairs(tri) == [(0, 1), (0, 2), (1, 2)]
        assert gabriel_pairs([(0, 0), (1, 0), (2, 0)]) == [(0, 1), (1, 2)]

    @pytest.mark.parametrize("seed", range(20))
    def test_matches_definition_scan(self, seed):
        pts = np.random.default_rng(seed).uniform(0, 1, size=(20, 2))
        assert gabriel_pairs(pts) == brute_gabriel(pts)


class TestHausdorff:
    def test_examples(self):
        a = [(0, 0), (1, 2)]
        assert hausdorff_distance(a, a) == 0.0
        assert hausdorff_distance([(0, 0)], [(3, 4)]) == 5.0
        assert hausdorff_distance([(0, 0), (10, 0)], [(0, 1)]) == pytest.approx(math.sqrt(101))
        with pytest.raises(EmptyInput):
            hausdorff_distance([], [(0, 0)])


class TestVoronoi:
    def test_single_site(self):
        dom = DomainCircle((0.0, 0.0), 1.0)
        (cell,) = voronoi([(0.2, 0.1)], dom)
        assert cell.area() == pytest.approx(math.pi)
        assert all(isinstance(e, Arc) for e in cell.edges)

    def test_symmetric_pair_halves(self):
        dom = DomainCircle((0.0, 0.0), 1.0)
        cells = voronoi([(-0.5, 0.0), (0.5, 0.0)], dom)
        for c in cells:
            assert c.area() == pytest.approx(math.pi / 2)
            chords = [e for e in c.edges if not isinstance(e, Arc)]
            assert len(chords) == 1
            assert chords[0].start[0] == pytest.approx(0.0, abs=1e-12)
            assert chords[0].end[0] == pytest.approx(0.0, abs=1e-12)

    def test_nearest_site_property(self):
        rng = np.random.default_rng(11)
        dom = DomainCircle((0.0, 0.0), 1.0)
        ang = rng.uniform(0, 2 * np.pi, 30)
        rad = np.sqrt(rng.uniform(0, 0.95, 30))
        sites = np.c_[rad * np.cos(ang), rad * np.sin(ang)]
        cells = voronoi(sites, dom)
        ang = rng.uniform(0, 2 * np.pi, 2000)
        rad = np.sqrt(rng.uniform(0, 1, 2000))
        probes = np.c_[rad * np.cos(ang), rad * np.sin(ang)]
        near = nearest_site(sites, probes)
        for p, n in zip(probes, near):
            owners = [c.site for c in cells if c.contains(p, tol=1e-9)]
            assert n in owners

    def test_duplicate_sites_warn(self):
        dom = DomainCircle((0.0, 0.0), 1.0)
        with pytest.warns(DuplicateSitesWarning):
            cells = voronoi([(0.1, 0.1), (0.1, 0.1), (-0.3, 0.0)], dom)
        assert sorted(c.site for c in cells) == [0, 2]
