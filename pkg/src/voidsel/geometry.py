"""
Planar geometry kernel: circles, bounding domains, Gabriel pairs, Hausdorff
distance and Voronoi diagrams clipped to a circular or rectangular domain.

Point sets are passed around as ``(n, 2)`` float arrays; single points may be
any length-2 sequence.  All functions are pure.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import (
    CollinearPoints,
    DegenerateExtentWarning,
    DegeneratePair,
    DuplicateSitesWarning,
    EmptyInput,
    GeometryError,
)

AREA_TOL = 1e-12
GEOM_TOL = 1e-9
RECT_INFLATE = 1e-9
DUPLICATE_TOL = 1e-12

TWO_PI = 2.0 * math.pi


def as_points(points) -> np.ndarray:
    """Coerce ``points`` to a finite ``(n, 2)`` float array."""
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        return arr.reshape(0, 2)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise GeometryError(f"expected (n, 2) points, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise GeometryError("points must have finite coordinates")
    return arr


def as_point(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float).reshape(-1)
    if arr.shape != (2,) or not np.all(np.isfinite(arr)):
        raise GeometryError(f"not a finite 2-D point: {p!r}")
    return arr


@dataclass(frozen=True)
class Circle:
    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise GeometryError("circle radius must be >= 0")

    def contains(self, p, tol: float = GEOM_TOL) -> bool:
        return math.dist(self.center, tuple(p)) <= self.radius + tol


@dataclass(frozen=True)
class DomainCircle:
    """Circular domain centred at ``center`` with scaling radius ``radius``."""

    center: tuple[float, float]
    radius: float

    kind = "circle"

    def __post_init__(self):
        if not self.radius >= 0:
            raise GeometryError("domain radius must be >= 0")

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        cx, cy = self.center
        r = self.radius
        return (cx - r, cy - r, cx + r, cy + r)

    @property
    def perimeter(self) -> float:
        return TWO_PI * self.radius

    @property
    def area(self) -> float:
        return math.pi * self.radius**2

    def contains(self, points, tol: float = GEOM_TOL) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        d = np.hypot(pts[:, 0] - self.center[0], pts[:, 1] - self.center[1])
        return d <= self.radius + tol

    def boundary_distance(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        d = np.hypot(pts[:, 0] - self.center[0], pts[:, 1] - self.center[1])
        return np.abs(d - self.radius)

    def boundary_samples(self, delta: float) -> np.ndarray:
        n = max(3, int(math.ceil(self.perimeter / delta - 1e-9)))
        theta = np.arange(n) * (TWO_PI / n)
        return np.column_stack(
            (self.center[0] + self.radius * np.cos(theta),
             self.center[1] + self.radius * np.sin(theta))
        )

    def outer_polygon(self) -> np.ndarray:
        # square comfortably enclosing the disk, CCW
        cx, cy = self.center
        h = 2.0 * self.radius + 1.0
        return np.array([[cx - h, cy - h], [cx + h, cy - h], [cx + h, cy + h], [cx - h, cy + h]])


@dataclass(frozen=True)
class DomainRect:
    """Axis-aligned rectangular domain; ``radius`` is half the diagonal."""

    origin: tuple[float, float]
    width: float
    height: float

    kind = "rect"

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise GeometryError("rectangle extents must be positive")

    @property
    def radius(self) -> float:
        return math.hypot(self.width, self.height) / 2.0

    @property
    def center(self) -> tuple[float, float]:
        return (self.origin[0] + self.width / 2.0, self.origin[1] + self.height / 2.0)

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        x0, y0 = self.origin
        return (x0, y0, x0 + self.width, y0 + self.height)

    @property
    def perimeter(self) -> float:
        return 2.0 * (self.width + self.height)

    @property
    def area(self) -> float:
        return self.width * self.height

    def contains(self, points, tol: float = GEOM_TOL) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        x0, y0, x1, y1 = self.bbox
        return (
            (pts[:, 0] >= x0 - tol) & (pts[:, 0] <= x1 + tol)
            & (pts[:, 1] >= y0 - tol) & (pts[:, 1] <= y1 + tol)
        )

    def boundary_distance(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        x0, y0, x1, y1 = self.bbox
        dx = np.minimum(np.abs(pts[:, 0] - x0), np.abs(pts[:, 0] - x1))
        dy = np.minimum(np.abs(pts[:, 1] - y0), np.abs(pts[:, 1] - y1))
        inside = self.contains(pts, tol=0.0)
        # outside points: distance to the rectangle itself
        ox = np.maximum(np.maximum(x0 - pts[:, 0], pts[:, 0] - x1), 0.0)
        oy = np.maximum(np.maximum(y0 - pts[:, 1], pts[:, 1] - y1), 0.0)
        return np.where(inside, np.minimum(dx, dy), np.hypot(ox, oy))

    def boundary_samples(self, delta: float) -> np.ndarray:
        corners = self.outer_polygon()
        out = []
        for a, b in zip(corners, np.roll(corners, -1, axis=0)):
            n = max(1, int(math.ceil(np.linalg.norm(b - a) / delta - 1e-9)))
            t = np.arange(n) / n
            out.append(a + t[:, None] * (b - a))
        return np.vstack(out)

    def outer_polygon(self) -> np.ndarray:
        x0, y0, x1, y1 = self.bbox
        return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])


Domain = Union[DomainCircle, DomainRect]


# ---------------------------------------------------------------------------
# circles


def circumcircle(p1, p2, p3) -> Circle:
    a, b, c = as_point(p1), as_point(p2), as_point(p3)
    bx, by = b - a
    cx, cy = c - a
    d = bx * cy - by * cx
    if abs(d) / 2.0 < AREA_TOL:
        raise CollinearPoints(f"points {tuple(a)}, {tuple(b)}, {tuple(c)} are collinear")
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / (2.0 * d)
    uy = (bx * c2 - cx * b2) / (2.0 * d)
    center = (a[0] + ux, a[1] + uy)
    return Circle(center, math.hypot(ux, uy))


def diametral_circle(p1, p2) -> Circle:
    a, b = as_point(p1), as_point(p2)
    if np.array_equal(a, b):
        raise DegeneratePair(f"identical points {tuple(a)}")
    m = (a + b) / 2.0
    return Circle((m[0], m[1]), float(np.linalg.norm(a - b)) / 2.0)


def is_empty_circle(c: Circle, points, exclude=(), tol: float = GEOM_TOL) -> bool:
    """True iff no point outside ``exclude`` lies strictly inside ``c``."""
    pts = as_points(points)
    if len(pts) == 0:
        return True
    d = np.hypot(pts[:, 0] - c.center[0], pts[:, 1] - c.center[1])
    inside = d < c.radius - tol
    if exclude:
        inside[list(exclude)] = False
    return not inside.any()


def _circle_from(boundary: list) -> tuple[np.ndarray, float]:
    if len(boundary) == 0:
        return np.zeros(2), -1.0
    if len(boundary) == 1:
        return boundary[0].copy(), 0.0
    if len(boundary) == 2:
        m = (boundary[0] + boundary[1]) / 2.0
        return m, float(np.linalg.norm(boundary[0] - m))
    c = circumcircle(*boundary)
    return np.array(c.center), c.radius


def _minidisk(pts: np.ndarray) -> tuple[np.ndarray, float]:
    # Welzl's algorithm in its iterative move-to-front form
    def inside(c, r, p):
        return r >= 0 and np.linalg.norm(p - c) <= r * (1 + 1e-12) + 1e-15

    c, r = pts[0].copy(), 0.0
    for i in range(1, len(pts)):
        if inside(c, r, pts[i]):
            continue
        c, r = pts[i].copy(), 0.0
        for j in range(i):
            if inside(c, r, pts[j]):
                continue
            c, r = _circle_from([pts[i], pts[j]])
            for k in range(j):
                if inside(c, r, pts[k]):
                    continue
                try:
                    c, r = _circle_from([pts[i], pts[j], pts[k]])
                except CollinearPoints:
                    # the farthest pair spans the circle
                    trio = [pts[i], pts[j], pts[k]]
                    best = max(
                        ((trio[a], trio[b]) for a in range(3) for b in range(a + 1, 3)),
                        key=lambda ab: np.linalg.norm(ab[0] - ab[1]),
                    )
                    c, r = _circle_from(list(best))
    return c, r


def bounding_circle(points) -> DomainCircle:
    """Minimal enclosing circle of ``points``.

    The radius is reset to the farthest input distance so containment holds
    exactly in floating point.
    """
    pts = as_points(points)
    if len(pts) == 0:
        raise EmptyInput("bounding_circle needs at least one point")
    uniq = np.unique(pts, axis=0)
    order = np.random.default_rng(0).permutation(len(uniq))
    c, _ = _minidisk(uniq[order])
    r = float(np.max(np.hypot(pts[:, 0] - c[0], pts[:, 1] - c[1])))
    return DomainCircle((float(c[0]), float(c[1])), r)


def bounding_rect(points) -> DomainRect:
    pts = as_points(points)
    if len(pts) == 0:
        raise EmptyInput("bounding_rect needs at least one point")
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    x, y = hi - lo
    if x <= 0 or y <= 0:
        warnings.warn(
            f"degenerate extent (X={x}, Y={y}); inflating by {RECT_INFLATE}",
            DegenerateExtentWarning,
            stacklevel=2,
        )
        if x <= 0:
            lo[0] -= RECT_INFLATE / 2
            x = RECT_INFLATE
        if y <= 0:
            lo[1] -= RECT_INFLATE / 2
            y = RECT_INFLATE
    return DomainRect((float(lo[0]), float(lo[1])), float(x), float(y))


# ---------------------------------------------------------------------------
# point-set relations


def gabriel_pairs(points) -> list[tuple[int, int]]:
    """All index pairs ``(i, j)``, ``i < j``, whose diametral disk has an empty
    strict interior.

    A third point ``k`` lies strictly inside the disk over ``(i, j)`` exactly
    when the angle at ``k`` is obtuse, i.e. ``(pk - pi) . (pk - pj) < 0``.
    """
    pts = as_points(points)
    n = len(pts)
    sq = np.einsum("ij,ij->i", pts, pts)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * pts @ pts.T, 0.0)
    pairs = []
    for i in range(n - 1):
        js = np.arange(i + 1, n)
        # val[k, j] = 2 (pk - pi).(pk - pj)
        val = d2[:, i][:, None] + d2[:, js] - d2[i, js][None, :]
        tol = 4.0 * GEOM_TOL * np.sqrt(d2[i, js])
        val[i, :] = 0.0
        val[js, np.arange(len(js))] = 0.0
        ok = ~(val < -tol[None, :]).any(axis=0) & (d2[i, js] > 0)
        pairs.extend((i, int(j)) for j in js[ok])
    return pairs


def hausdorff_distance(set_a, set_b) -> float:
    a, b = as_points(set_a), as_points(set_b)
    if len(a) == 0 or len(b) == 0:
        raise EmptyInput("hausdorff_distance needs two nonempty sets")
    d = np.hypot(a[:, None, 0] - b[None, :, 0], a[:, None, 1] - b[None, :, 1])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


# ---------------------------------------------------------------------------
# Voronoi


@dataclass(frozen=True)
class Segment:
    start: tuple[float, float]
    end: tuple[float, float]
    neighbor: int | None  # None: lies on the domain boundary

    @property
    def length(self) -> float:
        return math.dist(self.start, self.end)

    def point_at(self, t: float) -> tuple[float, float]:
        return (
            self.start[0] + t * (self.end[0] - self.start[0]),
            self.start[1] + t * (self.end[1] - self.start[1]),
        )


@dataclass(frozen=True)
class Arc:
    """Counter-clockwise arc of the domain circle from ``theta0`` to ``theta1``."""

    center: tuple[float, float]
    radius: float
    theta0: float
    theta1: float
    neighbor = None

    @property
    def sweep(self) -> float:
        return self.theta1 - self.theta0

    @property
    def length(self) -> float:
        return self.radius * self.sweep

    def point_at(self, t: float) -> tuple[float, float]:
        th = self.theta0 + t * self.sweep
        return (self.center[0] + self.radius * math.cos(th),
                self.center[1] + self.radius * math.sin(th))

    @property
    def start(self) -> tuple[float, float]:
        return self.point_at(0.0)

    @property
    def end(self) -> tuple[float, float]:
        return self.point_at(1.0)


Edge = Union[Segment, Arc]


@dataclass(frozen=True)
class VoronoiCell:
    site: int
    edges: tuple[Edge, ...]

    @property
    def neighbors(self) -> list[int]:
        return [e.neighbor for e in self.edges if isinstance(e, Segment) and e.neighbor is not None]

    def area(self) -> float:
        total = 0.0
        for e in self.edges:
            if isinstance(e, Segment):
                (x1, y1), (x2, y2) = e.start, e.end
                total += x1 * y2 - x2 * y1
            else:
                cx, cy = e.center
                r = e.radius
                total += (
                    r * cx * (math.sin(e.theta1) - math.sin(e.theta0))
                    - r * cy * (math.cos(e.theta1) - math.cos(e.theta0))
                    + r * r * e.sweep
                )
        return total / 2.0

    def contains(self, p, tol: float = GEOM_TOL) -> bool:
        x, y = as_point(p)
        for e in self.edges:
            if isinstance(e, Segment):
                (ax, ay), (bx, by) = e.start, e.end
                cross = (bx - ax) * (y - ay) - (by - ay) * (x - ax)
                if cross < -tol * max(e.length, 1.0):
                    return False
            elif math.hypot(x - e.center[0], y - e.center[1]) > e.radius + tol:
                return False
        return True


def _clip_halfplane(poly, labels, normal, offset, label, tol):
    """Keep the part of a convex CCW polygon with ``normal . x <= offset``."""
    n = len(poly)
    f = [normal[0] * v[0] + normal[1] * v[1] - offset for v in poly]
    if max(f) <= tol:
        return poly, labels
    if min(f) > tol:
        return [], []
    out_v, out_l = [], []
    for k in range(n):
        k2 = (k + 1) % n
        v, w = poly[k], poly[k2]
        fin, fnext = f[k] <= tol, f[k2] <= tol
        if fin:
            out_v.append(v)
            out_l.append(labels[k])
            if not fnext:
                t = f[k] / (f[k] - f[k2])
                out_v.append((v[0] + t * (w[0] - v[0]), v[1] + t * (w[1] - v[1])))
                out_l.append(label)
        elif fnext:
            t = f[k] / (f[k] - f[k2])
            out_v.append((v[0] + t * (w[0] - v[0]), v[1] + t * (w[1] - v[1])))
            out_l.append(labels[k])
    # drop zero-length edges; the later vertex carries the real edge label
    vs, ls = [], []
    for v, l in zip(out_v, out_l):
        if vs and math.dist(vs[-1], v) <= tol:
            vs[-1], ls[-1] = v, l
        else:
            vs.append(v)
            ls.append(l)
    while len(vs) > 1 and math.dist(vs[-1], vs[0]) <= tol:
        vs.pop(0)
        ls.pop(0)
    return vs, ls


def _clip_disk(poly, labels, center, radius, tol) -> tuple[Edge, ...]:
    cx, cy = center
    r2 = radius * radius
    segs = []
    n = len(poly)
    for k in range(n):
        (ax, ay), (bx, by) = poly[k], poly[(k + 1) % n]
        dx, dy = bx - ax, by - ay
        fx, fy = ax - cx, ay - cy
        a = dx * dx + dy * dy
        if a == 0:
            continue
        b = 2.0 * (fx * dx + fy * dy)
        c = fx * fx + fy * fy - r2
        disc = b * b - 4.0 * a * c
        if disc <= 0:
            continue
        sq = math.sqrt(disc)
        t0 = max(0.0, (-b - sq) / (2.0 * a))
        t1 = min(1.0, (-b + sq) / (2.0 * a))
        if (t1 - t0) * math.sqrt(a) <= tol:
            continue
        seg = Segment((ax + t0 * dx, ay + t0 * dy), (ax + t1 * dx, ay + t1 * dy), labels[k])
        segs.append(seg)
    if not segs:
        return (Arc(center, radius, 0.0, TWO_PI),)
    edges: list[Edge] = []
    for k, seg in enumerate(segs):
        edges.append(seg)
        nxt = segs[(k + 1) % len(segs)]
        if math.dist(seg.end, nxt.start) > tol:
            th0 = math.atan2(seg.end[1] - cy, seg.end[0] - cx)
            th1 = math.atan2(nxt.start[1] - cy, nxt.start[0] - cx)
            while th1 <= th0:
                th1 += TWO_PI
            edges.append(Arc(center, radius, th0, th1))
    return tuple(edges)


def unique_sites(sites) -> tuple[np.ndarray, list[int]]:
    """Indices of sites kept after merging near-duplicates (first one wins)."""
    pts = as_points(sites)
    keep: list[int] = []
    for i in range(len(pts)):
        if keep:
            d = np.hypot(*(pts[keep] - pts[i]).T)
            if d.min() < DUPLICATE_TOL:
                warnings.warn(
                    f"site {i} duplicates an earlier site; merged",
                    DuplicateSitesWarning,
                    stacklevel=3,
                )
                continue
        keep.append(i)
    return pts, keep


def _neighbor_candidates(pts: np.ndarray) -> list[np.ndarray] | None:
    """Delaunay neighbours of each point, or None when no triangulation exists."""
    if len(pts) < 4:
        return None
    from scipy.spatial import Delaunay, QhullError

    try:
        tri = Delaunay(pts)
    except QhullError:
        return None
    if len(tri.coplanar):
        return None
    indptr, indices = tri.vertex_neighbor_vertices
    return [indices[indptr[k]:indptr[k + 1]] for k in range(len(pts))]


def voronoi(sites, domain: Domain) -> list[VoronoiCell]:
    """Voronoi cells of ``sites`` clipped to ``domain``.

    Each cell is the intersection of the half-planes closer to its site than
    to every other site, started from the domain's outer polygon and finally
    clipped against the domain circle (which introduces arc edges).
    Neighbour indices on straight edges refer to positions in ``sites``.

    Only Delaunay neighbours can contribute a bisector, so when a
    triangulation exists the clipping loop is restricted to them.
    """
    pts, keep = unique_sites(sites)
    if not keep:
        return []
    scale = max(domain.radius, 1.0)
    tol = GEOM_TOL * scale * 1e-3
    kept = pts[keep]
    candidates = _neighbor_candidates(kept)
    outer = [tuple(v) for v in domain.outer_polygon()]
    cells = []
    for a, i in enumerate(keep):
        p = kept[a]
        others = np.arange(len(kept)) if candidates is None else candidates[a]
        d = np.hypot(kept[others, 0] - p[0], kept[others, 1] - p[1])
        order = np.argsort(d, kind="stable")
        poly = list(outer)
        labels: list[int | None] = [None] * len(poly)
        for o in order:
            b = others[o]
            if b == a:
                continue
            reach = max(math.dist(v, p) for v in poly)
            if d[o] / 2.0 > reach + tol:
                break
            q = kept[b]
            normal = ((q[0] - p[0]) / d[o], (q[1] - p[1]) / d[o])
            offset = (q @ q - p @ p) / (2.0 * d[o])
            poly, labels = _clip_halfplane(poly, labels, normal, offset, keep[b], tol)
            if not poly:
                break
        if isinstance(domain, DomainCircle):
            edges = _clip_disk(poly, labels, domain.center, domain.radius, tol)
        else:
            edges = tuple(
                Segment(poly[k], poly[(k + 1) % len(poly)], labels[k]) for k in range(len(poly))
            )
        cells.append(VoronoiCell(i, edges))
    return cells


def nearest_site(sites, query) -> np.ndarray:
    """Index of the nearest site for each query point (ties: lowest index)."""
    s = as_points(sites)
    q = np.atleast_2d(np.asarray(query, dtype=float))
    d = (q[:, None, 0] - s[None, :, 0]) ** 2 + (q[:, None, 1] - s[None, :, 1]) ** 2
    return np.argmin(d, axis=1)


def polygon_area(vertices: Sequence) -> float:
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
