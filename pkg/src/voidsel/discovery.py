"""
Exploratory ignorance discovery directly on labelled points.

* ``gabriel_ignorance_zones``: empty circles touching two (diametral) or three
  (circumscribed) points that carry different labels.
* ``knndn``: "k nearest and different neighbours", midpoints between
  differently labelled points under a per-point usage budget.
* ``manifold_ignorance_boundary`` and ``balanced_view_curve``: children
  between two cluster boundaries given as closed polylines.
* ``social_distance_segment``: the part of a segment AB where equally many
  same-label neighbours surround A and B.
"""
from __future__ import annotations

import heapq
import itertools
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    CollinearPoints,
    EmptyInput,
    InvalidK,
    NoTangentPairs,
    NotGabrielPair,
    OverlappingBoundariesWarning,
)
from .geometry import (
    GEOM_TOL,
    Circle,
    as_points,
    circumcircle,
    diametral_circle,
    gabriel_pairs,
    hausdorff_distance,
)

Point = tuple[float, float]


def _pt(p) -> Point:
    return (float(p[0]), float(p[1]))


@dataclass(frozen=True)
class IgnoranceFocus:
    position: Point
    parents: tuple[int, ...]
    circle: Circle


@dataclass(frozen=True)
class ClusterBoundary:
    """Closed polyline around one cluster (last vertex joins the first)."""
    label: object
    vertices: np.ndarray

    def __post_init__(self):
        v = as_points(self.vertices)
        if len(v) == 0:
            raise EmptyInput("a boundary needs at least one vertex")
        object.__setattr__(self, "vertices", v)

    def edges(self) -> list[tuple[np.ndarray, np.ndarray]]:
        v = self.vertices
        if len(v) < 2:
            return []
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]


@dataclass(frozen=True)
class IgnoranceSegment:
    """Piece of segment AB; ``t`` gives its parameter range along A->B and
    ``closed`` says whether each end belongs to it."""
    start: Point
    end: Point
    parents: tuple[int, int]
    t: tuple[float, float]
    closed: tuple[bool, bool] = (True, True)


@dataclass(frozen=True)
class Birth:
    point: Point
    parents: tuple[int, int]
    label: object = None        # set when the child was recoloured


# ---------------------------------------------------------------------------
# Gabriel-neighbour zones


def _empty_triples(pts: np.ndarray) -> set[tuple[int, int, int]]:
    """All non-collinear triples whose circumcircle has an empty interior.

    Candidates come from a Delaunay triangulation; every triangle is then
    widened to all points lying on its circumcircle, so cocircular sets
    contribute every triple.  Small or degenerate inputs use a direct scan.
    """
    n = len(pts)
    found: set[tuple[int, int, int]] = set()
    if n < 3:
        return found
    simplices = None
    if n >= 4:
        try:
            from scipy.spatial import Delaunay, QhullError

            simplices = Delaunay(pts).simplices
        except (QhullError, ValueError):
            simplices = None
    if simplices is None:
        simplices = list(itertools.combinations(range(n), 3))
    scale = max(1.0, float(np.abs(pts).max()))
    for tri in simplices:
        i, j, k = sorted(int(t) for t in tri)
        try:
            c = circumcircle(pts[i], pts[j], pts[k])
        except CollinearPoints:
            continue
        d = np.hypot(pts[:, 0] - c.center[0], pts[:, 1] - c.center[1])
        tol = GEOM_TOL * max(scale, c.radius)
        if (d < c.radius - tol).any():
            continue
        on = np.flatnonzero(np.abs(d - c.radius) <= tol)
        for t in itertools.combinations(sorted(on.tolist()), 3):
            found.add(t)
    return found


def gabriel_ignorance_zones(points, labels) -> list[IgnoranceFocus]:
    """Two-point zones over heterogeneous Gabriel pairs, then three-point
    zones over empty circumcircles of triples carrying at least two labels."""
    pts = as_points(points)
    labels = np.asarray(labels)
    if len(pts) < 2:
        raise EmptyInput("need at least two points")
    if len(np.unique(labels)) < 2:
        return []
    out = []
    for i, j in gabriel_pairs(pts):
        if labels[i] != labels[j]:
            c = diametral_circle(pts[i], pts[j])
            out.append(IgnoranceFocus(_pt(c.center), (i, j), c))
    for t in sorted(_empty_triples(pts)):
        if len({labels[t[0]], labels[t[1]], labels[t[2]]}) < 2:
            continue
        try:
            c = circumcircle(pts[t[0]], pts[t[1]], pts[t[2]])
        except CollinearPoints:
            continue
        out.append(IgnoranceFocus(_pt(c.center), t, c))
    return out


# ---------------------------------------------------------------------------
# kNNDN


def _strictly_inside_hull(p: np.ndarray, members: np.ndarray, tol: float = GEOM_TOL) -> bool:
    if len(members) < 3:
        return False
    from scipy.spatial import ConvexHull, QhullError

    try:
        hull = ConvexHull(members)
    except (QhullError, ValueError):
        return False
    return bool((hull.equations[:, :2] @ p + hull.equations[:, 2] < -tol).all())


def knndn_births(points, labels, k: int = 1, recolor: bool = False) -> list[Birth]:
    """kNNDN births in order.

    Pairs of differently labelled points are processed by increasing
    distance.  A point may parent at most ``k`` children and at most one with
    any given partner.  Among equally distant pairs the one whose parents
    waited longest since their last birth goes first (never-used parents count
    as having waited since the start), then the lexicographically smallest
    index pair.  With ``recolor`` a child strictly inside the convex hull of a
    cluster other than its parents' joins that cluster and may parent later
    births.
    """
    pts = [np.asarray(p, dtype=float) for p in as_points(points)]
    labs = list(np.asarray(labels).tolist())
    n_classes = len(set(labs))
    if not 1 <= k <= max(n_classes - 1, 0):
        raise InvalidK(f"k must lie in [1, {n_classes - 1}] for {n_classes} classes, got {k}")
    scale = max(1.0, max(float(np.abs(p).max()) for p in pts))
    tie = GEOM_TOL * scale

    heap: list[tuple[float, int, int]] = []

    def push_pairs(new: int):
        for other in range(new):
            if labs[other] != labs[new]:
                heapq.heappush(heap, (float(np.linalg.norm(pts[new] - pts[other])), other, new))

    for j in range(len(pts)):
        push_pairs(j)
    used = [0] * len(pts)
    last = [-1] * len(pts)
    births: list[Birth] = []
    it = 0
    while heap:
        d0 = heap[0][0]
        group = []
        while heap and heap[0][0] <= d0 + tie:
            group.append(heapq.heappop(heap))
        group = [g for g in group if used[g[1]] < k and used[g[2]] < k]
        if not group:
            continue

        def freshness(g):
            wa, wb = it - last[g[1]], it - last[g[2]]
            return (-min(wa, wb), -max(wa, wb), g[1], g[2])

        group.sort(key=freshness)
        _, a, b = group[0]
        for g in group[1:]:
            heapq.heappush(heap, g)
        child = 0.5 * (pts[a] + pts[b])
        used[a] += 1
        used[b] += 1
        last[a] = last[b] = it
        it += 1
        new_label = None
        if recolor:
            for lab in sorted(set(labs) - {labs[a], labs[b]}, key=str):
                members = np.array([p for p, l in zip(pts, labs) if l == lab])
                if _strictly_inside_hull(child, members):
                    new_label = lab
                    break
        births.append(Birth(_pt(child), (a, b), new_label))
        if new_label is not None:
            pts.append(child)
            labs.append(new_label)
            used.append(0)
            last.append(-1)
            push_pairs(len(pts) - 1)
    return births


def knndn(points, labels, k: int = 1, recolor: bool = False) -> list[Point]:
    """Ignorance points (children) produced by :func:`knndn_births`."""
    return [b.point for b in knndn_births(points, labels, k, recolor)]


# ---------------------------------------------------------------------------
# cluster boundaries


def cluster_hull(points, label=None) -> ClusterBoundary:
    """Convex hull of a point cluster as a counter-clockwise boundary."""
    pts = as_points(points)
    if len(pts) < 3:
        return ClusterBoundary(label, pts)
    from scipy.spatial import ConvexHull, QhullError

    try:
        hull = ConvexHull(pts)
    except (QhullError, ValueError):
        # collinear cluster: keep the two extreme points
        d = pts - pts.mean(axis=0)
        axis = np.linalg.svd(d, full_matrices=False)[2][0]
        proj = d @ axis
        return ClusterBoundary(label, pts[[int(np.argmin(proj)), int(np.argmax(proj))]])
    return ClusterBoundary(label, pts[hull.vertices])


def manifold_ignorance_boundary(a: ClusterBoundary, b: ClusterBoundary, tau_rel: float = 0.01) -> list[Point]:
    """Midpoints of the vertex pairs whose distance is within ``tau_rel`` of
    the Hausdorff distance between the two boundaries, ordered along ``a``."""
    A, B = a.vertices, b.vertices
    D = hausdorff_distance(A, B)
    scale = max(1.0, float(np.abs(A).max()), float(np.abs(B).max()))
    if D <= GEOM_TOL * scale:
        warnings.warn("boundaries overlap (Hausdorff distance ~ 0); no ignorance boundary",
                      OverlappingBoundariesWarning, stacklevel=2)
        return []
    d = np.hypot(A[:, None, 0] - B[None, :, 0], A[:, None, 1] - B[None, :, 1])
    ii, jj = np.nonzero(np.abs(d - D) <= tau_rel * D)
    return [_pt(0.5 * (A[i] + B[j])) for i, j in zip(ii, jj)]


def _chord_beyond(polygon: ClusterBoundary, start: np.ndarray, direction: np.ndarray, tol: float) -> float:
    """Length of the first crossing of ``polygon`` met when leaving vertex
    ``start`` along ``direction`` (0 if the ray does not meet it again)."""
    best = np.inf
    for p, q in polygon.edges():
        e = q - p
        den = direction[0] * e[1] - direction[1] * e[0]
        w = p - start
        if abs(den) <= 1e-15:
            # parallel: only collinear edges matter; take their far end
            if abs(w[0] * direction[1] - w[1] * direction[0]) <= tol:
                for v in (p, q):
                    t = float(np.dot(v - start, direction))
                    if t > tol:
                        best = min(best, t)
            continue
        t = (w[0] * e[1] - w[1] * e[0]) / den
        s = (w[0] * direction[1] - w[1] * direction[0]) / den
        if t > tol and -tol <= s <= 1 + tol:
            best = min(best, float(t))
    return 0.0 if not np.isfinite(best) else best


def balanced_view_pairs(a: ClusterBoundary, b: ClusterBoundary) -> list[tuple[int, int]]:
    """Vertex pairs (i of ``a``, j of ``b``) whose diametral disc holds no
    vertex of either boundary in its interior."""
    A, B = a.vertices, b.vertices
    allv = np.vstack((A, B))
    scale = max(1.0, float(np.abs(allv).max()))
    pairs = []
    for i in range(len(A)):
        for j in range(len(B)):
            c = 0.5 * (A[i] + B[j])
            r2 = float(((A[i] - B[j]) ** 2).sum()) / 4.0
            d2 = ((allv - c) ** 2).sum(axis=1)
            d2[i] = d2[len(A) + j] = np.inf
            if not (d2 < r2 - 4 * GEOM_TOL * scale * np.sqrt(r2)).any():
                pairs.append((i, j))
    return pairs


def balanced_view_curve(a: ClusterBoundary, b: ClusterBoundary) -> list[Point]:
    """Children placed on each tangent segment so that their distances to
    the two ends are in the inverse ratio of the chords the segment's line
    cuts from each boundary.  A segment whose line cuts no chord from a
    boundary (an outer tangent) yields its midpoint."""
    A, B = a.vertices, b.vertices
    pairs = balanced_view_pairs(a, b)
    if not pairs:
        raise NoTangentPairs("no vertex pair sees across the gap")
    scale = max(1.0, float(np.abs(A).max()), float(np.abs(B).max()))
    tol = GEOM_TOL * scale
    out = []
    for i, j in pairs:
        ai, bj = A[i], B[j]
        L = float(np.linalg.norm(bj - ai))
        if L <= tol:
            continue
        u = (bj - ai) / L
        ca = _chord_beyond(a, ai, -u, tol)
        cb = _chord_beyond(b, bj, u, tol)
        if ca <= tol or cb <= tol:
            t = 0.5 * L
        else:
            t = L * cb / (ca + cb)
        out.append(_pt(ai + t * u))
    return out


def balance_chords(a: ClusterBoundary, b: ClusterBoundary, i: int, j: int) -> tuple[float, float]:
    """Chord lengths cut from ``a`` beyond vertex i and from ``b`` beyond
    vertex j by the line through them."""
    ai, bj = a.vertices[i], b.vertices[j]
    u = (bj - ai) / np.linalg.norm(bj - ai)
    scale = max(1.0, float(np.abs(a.vertices).max()), float(np.abs(b.vertices).max()))
    return _chord_beyond(a, ai, -u, GEOM_TOL * scale), _chord_beyond(b, bj, u, GEOM_TOL * scale)


# ---------------------------------------------------------------------------
# density-aware segments


def social_counts(t: float, ia: int, ib: int, points, labels) -> tuple[int, int]:
    """Same-label neighbour counts around A and B for the point at parameter
    ``t`` along AB (closed discs, the centres themselves excluded)."""
    pts = as_points(points)
    labels = np.asarray(labels)
    L = float(np.linalg.norm(pts[ib] - pts[ia]))
    da = np.hypot(*(pts - pts[ia]).T)
    db = np.hypot(*(pts - pts[ib]).T)
    ra, rb = t * L, (1.0 - t) * L
    slack = GEOM_TOL * max(1.0, L)
    ma = (labels == labels[ia]) & (da <= ra + slack)
    mb = (labels == labels[ib]) & (db <= rb + slack)
    ma[ia] = False
    mb[ib] = False
    return int(ma.sum()), int(mb.sum())


def social_distance_segment(ia: int, ib: int, points, labels) -> list[IgnoranceSegment]:
    """Parts of segment AB (A = point ``ia``, B = point ``ib``) where the
    closed disc around A reaching the position holds as many A-labelled
    points as the disc around B reaching it holds B-labelled points.

    Counts only change at the critical radii given by the distances of the
    same-label points to A and to B, so the answer is assembled exactly from
    the critical parameters and the open intervals between them.
    """
    pts = as_points(points)
    labels = np.asarray(labels)
    if ia == ib or labels[ia] == labels[ib]:
        raise NotGabrielPair("A and B must be distinct and differently labelled")
    pair = (min(ia, ib), max(ia, ib))
    if pair not in set(gabriel_pairs(pts)):
        raise NotGabrielPair(f"points {ia} and {ib} are not Gabriel neighbours")
    A, B = pts[ia], pts[ib]
    L = float(np.linalg.norm(B - A))
    same_a = np.flatnonzero(labels == labels[ia])
    same_b = np.flatnonzero(labels == labels[ib])
    crit = {0.0, 1.0}
    for p in same_a:
        if p != ia:
            crit.add(float(np.linalg.norm(pts[p] - A)) / L)
    for p in same_b:
        if p != ib:
            crit.add(1.0 - float(np.linalg.norm(pts[p] - B)) / L)
    ts = sorted(t for t in crit if 0.0 <= t <= 1.0)

    def equal(t):
        ca, cb = social_counts(t, ia, ib, pts, labels)
        return ca == cb

    # pieces: ("pt", t) at critical values and ("open", t0, t1) between them
    pieces = []
    for n, t in enumerate(ts):
        pieces.append((t, t, equal(t)))
        if n + 1 < len(ts) and ts[n + 1] - t > 1e-15:
            pieces.append((t, ts[n + 1], equal(0.5 * (t + ts[n + 1]))))

    out = []
    cur = None
    for t0, t1, ok in pieces:
        if not ok:
            if cur is not None:
                out.append(cur)
                cur = None
            continue
        is_point = t0 == t1
        if cur is None:
            cur = [t0, t1, is_point, is_point]
        else:
            cur[1] = t1
            cur[3] = is_point
    if cur is not None:
        out.append(cur)
    segs = []
    for t0, t1, c0, c1 in out:
        segs.append(IgnoranceSegment(_pt(A + t0 * (B - A)), _pt(A + t1 * (B - A)), (ia, ib),
                                     (float(t0), float(t1)), (bool(c0), bool(c1))))
    return segs
