"""Property-based checks of the library invariants."""
import math

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from voidsel.discovery import (
    balance_chords,
    balanced_view_curve,
    balanced_view_pairs,
    cluster_hull,
    gabriel_ignorance_zones,
    knndn_births,
    manifold_ignorance_boundary,
    social_counts,
    social_distance_segment,
)
from voidsel.evaluation import (
    RawDataset,
    contraharmonic_mean,
    cross_validate,
    fit_pca,
    knn_predict,
    stratified_folds,
)
from voidsel.geometry import (
    DomainCircle,
    bounding_circle,
    bounding_rect,
    circumcircle,
    gabriel_pairs,
    hausdorff_distance,
    is_empty_circle,
    voronoi,
)
from voidsel.ignorance import (
    CuriosityRegion,
    build_model,
    certainty_ellipse,
    ignorant_mask,
    zone_from_void,
)
from voidsel.selection import cnn, enn, ips

FAST = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
SLOW = settings(max_examples=8, deadline=None, suppress_health_check=[HealthCheck.too_slow])

dyadic = st.integers(-64, 64).map(lambda k: k / 32)


def point_sets(min_size=3, max_size=25):
    """Distinct points on a 1/1000 lattice in the unit square."""
    cell = st.tuples(st.integers(0, 1000), st.integers(0, 1000))
    return st.lists(cell, min_size=min_size, max_size=max_size, unique=True).map(
        lambda c: np.array(c, dtype=float).reshape(-1, 2) / 1000
    )


def generic_points(min_size=4, max_size=40, classes=3):
    """Seeded uniform points: no exact distance ties (almost surely)."""
    def make(args):
        n, seed = args
        rng = np.random.default_rng(seed)
        return rng.uniform(0, 1, (n, 2)), rng.integers(0, classes, n)
    return st.tuples(st.integers(min_size, max_size), st.integers(0, 2**32 - 1)).map(make)


def spread_out(pts, gap=1e-3):
    d = np.hypot(pts[:, None, 0] - pts[None, :, 0], pts[:, None, 1] - pts[None, :, 1])
    np.fill_diagonal(d, np.inf)
    return d.min() > gap


def labelled(min_size=4, max_size=25, classes=3):
    return point_sets(min_size, max_size).flatmap(
        lambda p: st.tuples(st.just(p), arrays(np.int64, len(p), elements=st.integers(0, classes - 1)))
    )


def disk_probes(n, seed, R=1.0):
    rng = np.random.default_rng(seed)
    a = rng.uniform(0, 2 * np.pi, n)
    r = R * np.sqrt(rng.uniform(0, 1, n))
    return np.c_[r * np.cos(a), r * np.sin(a)]


# --------------------------------------------------------------------------- geometry


@FAST
@given(st.lists(st.tuples(dyadic, dyadic), min_size=3, max_size=20, unique=True),
       st.integers(-3, 3), st.integers(-3, 3))
def test_gabriel_rigid_motion(pts, tx, ty):
    P = np.array(pts)
    base = set(gabriel_pairs(P))
    assert all(i < j for i, j in base)
    rotated = np.c_[-P[:, 1] + tx, P[:, 0] + ty]
    mirrored = np.c_[-P[:, 0], P[:, 1]]
    assert set(gabriel_pairs(rotated)) == base
    assert set(gabriel_pairs(mirrored)) == base
    perm = np.arange(len(P))[::-1]
    back = {tuple(sorted((int(perm[i]), int(perm[j])))) for i, j in gabriel_pairs(P[perm])}
    assert back == base


@FAST
@given(point_sets(1, 8), point_sets(1, 8), point_sets(1, 8))
def test_hausdorff_metric(a, b, c):
    ab = hausdorff_distance(a, b)
    assert ab == pytest.approx(hausdorff_distance(b, a), abs=1e-12)
    assert hausdorff_distance(a, a) == 0.0
    assert ab <= hausdorff_distance(a, c) + hausdorff_distance(c, b) + 1e-9


@FAST
@given(point_sets(1, 30))
def test_bounding_shapes_contain(pts):
    d = bounding_circle(pts)
    assert (np.hypot(*(pts - np.array(d.center)).T) <= d.radius + 1e-12).all()
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        r = bounding_rect(pts)
    assert r.contains(pts, tol=1e-12).all()


@FAST
@given(point_sets(3, 3))
def test_circumcircle_equidistant(p):
    a, b, c = p
    assume(abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])) > 1e-4)
    cc = circumcircle(a, b, c)
    d = np.hypot(*(p - np.array(cc.center)).T)
    assert np.ptp(d) <= 1e-9 * max(1.0, cc.radius)


@FAST
@given(point_sets(1, 25))
def test_voronoi_tiles_disk(pts):
    assume(len(pts) == 1 or spread_out(pts, 1e-4))
    dom = DomainCircle((0.5, 0.5), 0.75)
    cells = voronoi(pts, dom)
    total = sum(c.area() for c in cells)
    assert total == pytest.approx(math.pi * 0.75 ** 2, rel=1e-6)


# --------------------------------------------------------------------------- ignorance


@FAST
@given(st.floats(0.01, 10), st.floats(0, 1), st.floats(0, 1))
def test_zone_formula(R, u, v):
    r1, r2 = sorted((2 * R * u, 2 * R * v))
    e1, e2 = zone_from_void(r1, R), zone_from_void(r2, R)
    assert e1 <= e2
    assert e1 <= r1 * (1 + 1e-12)
    assert zone_from_void(2 * R, R) == pytest.approx(2 * R)


@FAST
@given(st.floats(0.01, 10), st.floats(0, 1))
def test_ellipse_identities(R, f):
    e = certainty_ellipse(f * R, R)
    assert e.semi_major + e.semi_minor == pytest.approx(e.h, rel=1e-12, abs=1e-15)
    assert e.semi_major >= e.semi_minor - 1e-15


@FAST
@given(labelled(1, 15))
def test_prototypes_certain(data):
    pts, lab = data
    assume(spread_out(pts, 1e-6) if len(pts) > 1 else True)
    dom = bounding_circle(pts)
    assume(dom.radius > 1e-3)
    m = build_model(pts, lab, dom)
    assert not ignorant_mask(pts, m).any()


@SLOW
@given(labelled(2, 8), labelled(2, 8))
def test_curiosity_regions_disjoint(a, b):
    dom = DomainCircle((0.5, 0.5), 0.75)
    ma, mb = build_model(*a, dom), build_model(*b, dom)
    probes = disk_probes(2000, 0, 0.75) + 0.5
    prof = CuriosityRegion(ma, mb, "professor").contains(probes)
    stud = CuriosityRegion(mb, ma, "student").contains(probes)
    assert not (prof & stud).any()


@SLOW
@given(labelled(1, 8))
def test_refining_delta_moves_frontier_only_nearby(data):
    pts, lab = data
    dom = DomainCircle((0.5, 0.5), 0.75)
    delta = 2 * math.pi * dom.radius / 720
    coarse = build_model(pts, lab, dom, delta)
    fine = build_model(pts, lab, dom, delta / 2)
    probes = disk_probes(3000, 1, 0.75) + 0.5
    changed = ignorant_mask(probes, coarse) != ignorant_mask(probes, fine)
    for p in probes[changed]:
        margin = np.min(np.hypot(*(fine.sample_points - p).T) - fine.zone_radii)
        assert abs(margin) <= 2 * delta


# --------------------------------------------------------------------------- discovery


@FAST
@given(labelled(2, 20))
def test_foci_are_empty(data):
    pts, lab = data
    assume(spread_out(pts))
    for f in gabriel_ignorance_zones(pts, lab):
        assert is_empty_circle(f.circle, pts, tol=1e-9)
        assert len(set(lab[list(f.parents)].tolist())) >= 2


@FAST
@given(labelled(2, 25, classes=4), st.integers(1, 3))
def test_knndn_budget(data, k):
    pts, lab = data
    C = len(set(lab.tolist()))
    assume(C >= 2 and k <= C - 1)
    births = knndn_births(pts, lab, k)
    use = np.zeros(len(pts), int)
    seen = set()
    for b in births:
        assert b.parents not in seen
        seen.add(b.parents)
        use[list(b.parents)] += 1
    assert use.max(initial=0) <= k
    assert len(births) <= k * len(pts) / 2
    assert births == knndn_births(pts, lab, k)


@FAST
@given(point_sets(1, 10), point_sets(1, 10))
def test_manifold_children_equidistant(a, b):
    import warnings

    A, B = cluster_hull(a, 0), cluster_hull(b + 1.5, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        kids = manifold_ignorance_boundary(A, B)
    D = hausdorff_distance(A.vertices, B.vertices)
    for kid in kids:
        k = np.array(kid)
        da = np.min(np.hypot(*(A.vertices - k).T))
        # every child is a midpoint of a near-Hausdorff pair
        assert da <= D / 2 * 1.01 + 1e-9
        pair = [(i, j) for i in range(len(A.vertices)) for j in range(len(B.vertices))
                if np.allclose((A.vertices[i] + B.vertices[j]) / 2, k, atol=1e-12)]
        assert pair
        i, j = pair[0]
        assert abs(np.linalg.norm(k - A.vertices[i]) - np.linalg.norm(k - B.vertices[j])) <= 1e-9


@FAST
@given(point_sets(3, 10), point_sets(3, 10))
def test_balanced_ratio(a, b):
    A, B = cluster_hull(a, 0), cluster_hull(b + np.array([1.6, 0.3]), 1)
    kids = balanced_view_curve(A, B)
    for (i, j), kid in zip(balanced_view_pairs(A, B), kids):
        ai, bj = A.vertices[i], B.vertices[j]
        k = np.array(kid)
        L = np.linalg.norm(bj - ai)
        da, db = np.linalg.norm(k - ai), np.linalg.norm(k - bj)
        assert da + db == pytest.approx(L, rel=1e-9)        # on the segment
        ca, cb = balance_chords(A, B, i, j)
        if ca > 0 and cb > 0:
            assert da / db == pytest.approx(cb / ca, rel=1e-6)
        else:
            assert da == pytest.approx(db, rel=1e-9)


@FAST
@given(labelled(2, 15, classes=2))
def test_social_recount(data):
    pts, lab = data
    assume(spread_out(pts))
    pairs = [(i, j) for i, j in gabriel_pairs(pts) if lab[i] != lab[j]]
    assume(pairs)
    i, j = pairs[0]
    for seg in social_distance_segment(i, j, pts, lab):
        lo, hi = seg.t
        for t in np.linspace(lo, hi, 9)[1:-1]:
            ca, cb = social_counts(t, i, j, pts, lab)
            assert ca == cb


# --------------------------------------------------------------------------- selection


@SLOW
@given(labelled(2, 30))
def test_ips_output_valid(data):
    pts, lab = data
    s = ips(pts, lab)
    assert len(set(s.indices)) == len(s.indices)
    assert all(0 <= i < len(pts) for i in s.indices)
    assert s.iterations <= len(pts) + 1
    assert s == ips(pts, lab)


@FAST
@given(labelled(2, 40), st.integers(0, 5))
def test_cnn_consistent(data, seed):
    pts, lab = data
    idx = list(cnn(pts, lab, seed).indices)
    # duplicates with conflicting labels cannot all be satisfied
    uniq = {}
    for p, l in zip(map(tuple, pts), lab):
        uniq.setdefault(p, set()).add(int(l))
    assume(all(len(v) == 1 for v in uniq.values()))
    assert (knn_predict(pts[idx], lab[idx], pts) == lab).all()


@FAST
@given(generic_points(), st.randoms(use_true_random=False))
def test_enn_order_independent(data, rnd):
    pts, lab = data
    perm = list(range(len(pts)))
    rnd.shuffle(perm)
    perm = np.array(perm)
    a = {tuple(pts[i]) for i in enn(pts, lab).indices}
    b = {tuple(pts[perm][i]) for i in enn(pts[perm], lab[perm]).indices}
    assert a == b


# --------------------------------------------------------------------------- eval


@FAST
@given(st.lists(st.floats(0, 100), min_size=1, max_size=50))
def test_contraharmonic_dominates(xs):
    ch, ar = contraharmonic_mean(xs), float(np.mean(xs))
    assert ch >= ar - 1e-9 * max(1.0, ar)
    if ch == pytest.approx(ar, rel=1e-12, abs=1e-12) and sum(xs) > 0:
        assert max(xs) - min(xs) <= 1e-4 * max(1.0, max(xs))


@FAST
@given(arrays(np.float64, st.tuples(st.integers(5, 40), st.integers(2, 6)), elements=st.floats(-10, 10)))
def test_pca_captured_variance(X):
    cov = np.cov(X, rowvar=False)
    lam = np.linalg.eigvalsh(cov)
    assume(lam[-2:].sum() > 1e-6)
    p = fit_pca(X, 2)
    Z = p.transform(X)
    captured = np.var(Z, axis=0, ddof=1).sum() / np.trace(cov)
    assert captured == pytest.approx(p.explained_variance, abs=1e-9)


@FAST
@given(arrays(np.int64, st.integers(10, 80), elements=st.integers(0, 3)), st.integers(2, 10), st.integers(0, 99))
def test_fold_partition(y, folds, seed):
    assume(len(y) >= folds)
    f = stratified_folds(y, folds, np.random.default_rng(seed))
    sizes = np.bincount(f, minlength=folds)
    assert sizes.sum() == len(y) and sizes.max() - sizes.min() <= 1


@FAST
@given(labelled(2, 40))
def test_knn_self_label(data):
    pts, lab = data
    assert (knn_predict(pts, lab, pts) == lab).all()


@SLOW
@given(labelled(12, 40, classes=2), st.integers(0, 50))
def test_metrics_deterministic(data, seed):
    pts, lab = data
    d = RawDataset(pts, lab, ("a", "b"), ("p", "q"))
    a = cross_validate(d, folds=3, repeats=2, seed=seed)
    b = cross_validate(d, folds=3, repeats=2, seed=seed)
    assert a.er == b.er and a.rr == b.rr
