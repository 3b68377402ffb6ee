"""
Ignorance model of a labelled prototype set inside a bounded domain.

Voids are empty circles centred on the domain boundary or on a decision
boundary (a Voronoi edge between differently labelled prototypes).  A void of
radius ``r`` produces an ignorance zone of radius ``r**2 / (2 R)`` around the
same centre, ``R`` being the domain's scaling radius.  Boundaries are
discretised at arc-length step ``delta``; the ignorance area is then the union
of the zone disks of the boundary samples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DomainMismatch,
    EmptyPrototypes,
    GeometryError,
    InvalidDistance,
    InvalidRadius,
    NotOnBoundary,
    OutsideDomain,
)
from .geometry import (
    GEOM_TOL,
    Domain,
    DomainCircle,
    Segment,
    VoronoiCell,
    as_point,
    as_points,
    voronoi,
)

DOMAIN_BOUNDARY = 0
DECISION_BOUNDARY = 1
KIND_NAMES = {DOMAIN_BOUNDARY: "domain-boundary", DECISION_BOUNDARY: "decision-boundary"}

DEFAULT_SAMPLES = 720
GRID_SIZE = 256
N_RAYS = 64


def default_delta(domain: Domain) -> float:
    return 2.0 * math.pi * domain.radius / DEFAULT_SAMPLES


def zone_from_void(r: float, R: float) -> float:
    """Ignorance-zone radius produced by a void of radius ``r``."""
    if not R > 0:
        raise InvalidRadius(f"domain radius must be positive, got {R}")
    if r < 0 or r > 2.0 * R * (1 + 1e-12):
        raise InvalidRadius(f"void radius {r} outside [0, 2R] for R={R}")
    return r * r / (2.0 * R)


@dataclass(frozen=True)
class CertaintyEllipse:
    center: tuple[float, float]
    semi_major: float
    semi_minor: float
    minor_axis: tuple[float, float]
    phi: float
    h: float

    def contains(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float)) - np.asarray(self.center)
        ux, uy = self.minor_axis
        along = pts[:, 0] * ux + pts[:, 1] * uy
        across = -pts[:, 0] * uy + pts[:, 1] * ux
        with np.errstate(divide="ignore", invalid="ignore"):
            v = (along / self.semi_minor) ** 2 + (across / self.semi_major) ** 2
        return v <= 1.0

    def radius_towards(self, angle: float) -> float:
        """Distance from the centre to the ellipse along ``angle`` (radians,
        measured from the minor axis)."""
        c, s = math.cos(angle), math.sin(angle)
        if self.semi_minor == 0:
            return 0.0
        return 1.0 / math.sqrt((c / self.semi_minor) ** 2 + (s / self.semi_major) ** 2)


def certainty_ellipse(phi: float, R: float, center=None, minor_axis=None) -> CertaintyEllipse:
    """Believed-certainty ellipse of a lone prototype at distance ``phi`` from
    the centre of a circular domain of radius ``R``.

    Without ``center`` the domain centre is the origin and the prototype sits
    on the positive x axis.
    """
    if not R > 0:
        raise InvalidRadius(f"domain radius must be positive, got {R}")
    if phi < 0 or phi > R:
        raise InvalidDistance(f"phi={phi} must lie in [0, R={R}]")
    h = math.sqrt(max(R * R - phi * phi, 0.0))
    a = h * (2.0 * R - h) / (2.0 * R)
    b = h * h / (2.0 * R)
    if center is None:
        center = (phi, 0.0)
    if minor_axis is None:
        minor_axis = (1.0, 0.0)
    return CertaintyEllipse(tuple(map(float, center)), a, b, tuple(map(float, minor_axis)), phi, h)


def certainty_ellipse_for(prototype, domain: DomainCircle) -> CertaintyEllipse:
    p = as_point(prototype)
    o = np.asarray(domain.center, dtype=float)
    off = p - o
    phi = float(np.hypot(*off))
    axis = (1.0, 0.0) if phi == 0 else (off[0] / phi, off[1] / phi)
    return certainty_ellipse(min(phi, domain.radius), domain.radius, center=p, minor_axis=axis)


@dataclass(frozen=True)
class BoundarySample:
    position: tuple[float, float]
    kind: str
    void_radius: float
    zone_radius: float


@dataclass(frozen=True)
class DecisionEdge:
    start: tuple[float, float]
    end: tuple[float, float]
    left: int
    right: int

    @property
    def length(self) -> float:
        return math.dist(self.start, self.end)


@dataclass(frozen=True)
class Subdomain:
    label: object
    members: tuple[int, ...]


@dataclass(frozen=True)
class CuriosityCircle:
    focus: tuple[float, float]
    radius: float


@dataclass(frozen=True, eq=False)
class IgnoranceModel:
    domain: Domain
    prototypes: np.ndarray
    labels: np.ndarray
    delta: float
    cells: tuple[VoronoiCell, ...] = ()
    subdomains: tuple[Subdomain, ...] = ()
    decision_edges: tuple[DecisionEdge, ...] = ()
    sample_points: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    sample_kinds: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int8))
    void_radii: np.ndarray = field(default_factory=lambda: np.zeros(0))
    zone_radii: np.ndarray = field(default_factory=lambda: np.zeros(0))
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def R(self) -> float:
        return self.domain.radius

    @property
    def is_empty(self) -> bool:
        return len(self.prototypes) == 0

    @property
    def samples(self) -> list[BoundarySample]:
        return [
            BoundarySample((float(p[0]), float(p[1])), KIND_NAMES[int(k)], float(r), float(e))
            for p, k, r, e in zip(self.sample_points, self.sample_kinds, self.void_radii, self.zone_radii)
        ]

    def zone_order(self) -> np.ndarray:
        """Sample indices by decreasing zone radius, ties by smallest (x, y)."""
        if len(self.zone_radii) == 0:
            return np.zeros(0, dtype=int)
        key = np.round(self.zone_radii / (self.R * 1e-9))
        return np.lexsort((self.sample_points[:, 1], self.sample_points[:, 0], -key))

    def ignorant(self, points) -> np.ndarray:
        """Vectorised ignorance predicate (no domain check).

        A prototype's own location is always certain, even when it sits on
        the domain boundary and a zone touches it (zero-radius zone at the
        prototype itself, or the 2R zone diametrically opposite).
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.is_empty:
            return np.ones(len(pts), dtype=bool)
        out = _covered(pts, self.sample_points, self.zone_radii)
        if out.any():
            tol = GEOM_TOL * max(self.R, 1.0)
            out[out] = ~_covered(pts[out], self.prototypes, np.full(len(self.prototypes), tol))
        return out


def _covered(pts: np.ndarray, centers: np.ndarray, radii: np.ndarray, chunk: int = 2048) -> np.ndarray:
    out = np.zeros(len(pts), dtype=bool)
    if len(centers) == 0:
        return out
    r2 = radii**2
    for s in range(0, len(pts), chunk):
        p = pts[s:s + chunk]
        dx = p[:, None, 0] - centers[None, :, 0]
        dy = p[:, None, 1] - centers[None, :, 1]
        out[s:s + chunk] = (dx * dx + dy * dy <= r2[None, :]).any(axis=1)
    return out


def _merge_cells(cells, labels) -> tuple[Subdomain, ...]:
    parent = {c.site: c.site for c in cells}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for c in cells:
        for j in c.neighbors:
            if j in parent and labels[j] == labels[c.site]:
                a, b = find(c.site), find(j)
                if a != b:
                    parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for c in cells:
        groups.setdefault(find(c.site), []).append(c.site)
    return tuple(
        Subdomain(labels[root], tuple(sorted(members)))
        for root, members in sorted(groups.items())
    )


def _sample_segment(a, b, delta) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    n = max(1, int(math.ceil(np.linalg.norm(b - a) / delta - 1e-9)))
    t = np.linspace(0.0, 1.0, n + 1)
    return a + t[:, None] * (b - a)


def build_model(prototypes, labels, domain: Domain, delta: float | None = None) -> IgnoranceModel:
    """Ignorance model of labelled ``prototypes`` inside ``domain``.

    Same-label Voronoi neighbours are merged into subdomains; the remaining
    Voronoi edges are decision boundaries.  Domain and decision boundaries are
    sampled every ``delta`` (default: 720 samples around a circle of radius
    ``R``) and each sample carries its void and zone radii.
    """
    if not domain.radius > 0:
        raise GeometryError("domain must have a positive radius")
    if delta is None:
        delta = default_delta(domain)
    if not delta > 0:
        raise ValueError("delta must be positive")
    pts = as_points(prototypes)
    labels = np.asarray(labels)
    if len(labels) != len(pts):
        raise ValueError("prototypes and labels differ in length")
    if len(pts) == 0:
        return IgnoranceModel(domain, pts, labels, delta)
    if not domain.contains(pts, tol=GEOM_TOL * max(domain.radius, 1.0)).all():
        raise OutsideDomain("all prototypes must lie inside the domain")

    cells = tuple(voronoi(pts, domain))
    lab = labels.tolist()
    subdomains = _merge_cells(cells, lab)
    edges = []
    for c in cells:
        for e in c.edges:
            if isinstance(e, Segment) and e.neighbor is not None and c.site < e.neighbor:
                if lab[c.site] != lab[e.neighbor] and e.length > 0:
                    edges.append(DecisionEdge(
                        (float(e.start[0]), float(e.start[1])),
                        (float(e.end[0]), float(e.end[1])),
                        c.site, e.neighbor,
                    ))

    blocks = [domain.boundary_samples(delta)]
    kinds = [np.full(len(blocks[0]), DOMAIN_BOUNDARY, dtype=np.int8)]
    for e in edges:
        s = _sample_segment(e.start, e.end, delta)
        blocks.append(s)
        kinds.append(np.full(len(s), DECISION_BOUNDARY, dtype=np.int8))
    samples = np.vstack(blocks)
    kinds_arr = np.concatenate(kinds)

    void = _nearest_distance(samples, pts)
    void = np.minimum(void, 2.0 * domain.radius)
    zone = void * void / (2.0 * domain.radius)
    return IgnoranceModel(
        domain, pts, labels, delta, cells, subdomains, tuple(edges), samples, kinds_arr, void, zone
    )


def _nearest_distance(q: np.ndarray, pts: np.ndarray, chunk: int = 4096) -> np.ndarray:
    out = np.empty(len(q))
    for s in range(0, len(q), chunk):
        block = q[s:s + chunk]
        d2 = (block[:, None, 0] - pts[None, :, 0]) ** 2 + (block[:, None, 1] - pts[None, :, 1]) ** 2
        out[s:s + chunk] = np.sqrt(d2.min(axis=1))
    return out


def _on_decision_edge(q: np.ndarray, edges, tol: float) -> bool:
    for e in edges:
        a = np.asarray(e.start)
        b = np.asarray(e.end)
        ab = b - a
        t = np.clip(np.dot(q - a, ab) / max(np.dot(ab, ab), 1e-300), 0.0, 1.0)
        if np.linalg.norm(a + t * ab - q) <= tol:
            return True
    return False


def void_radius_at(q, model: IgnoranceModel) -> float:
    """Radius of the void centred at boundary point ``q``."""
    p = as_point(q)
    if model.is_empty:
        raise EmptyPrototypes("model has no prototypes, hence no voids")
    tol = GEOM_TOL * max(model.R, 1.0)
    on_domain = model.domain.boundary_distance(p)[0] <= tol
    if not on_domain and not _on_decision_edge(p, model.decision_edges, tol):
        raise NotOnBoundary(f"{tuple(p)} lies on neither a domain nor a decision boundary")
    return float(_nearest_distance(p[None, :], model.prototypes)[0])


def is_ignorant(p, model: IgnoranceModel) -> bool:
    q = as_point(p)
    if not model.domain.contains(q, tol=GEOM_TOL * max(model.R, 1.0))[0]:
        raise OutsideDomain(f"{tuple(q)} lies outside the domain")
    return bool(model.ignorant(q)[0])


def ignorant_mask(points, model: IgnoranceModel) -> np.ndarray:
    """Vectorised ``is_ignorant``; points outside the domain map to False."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    inside = model.domain.contains(pts, tol=GEOM_TOL * max(model.R, 1.0))
    out = np.zeros(len(pts), dtype=bool)
    if inside.any():
        out[inside] = model.ignorant(pts[inside])
    return out


def largest_ignorance_zone(model: IgnoranceModel) -> CuriosityCircle:
    if model.is_empty:
        c = model.domain.center
        return CuriosityCircle((float(c[0]), float(c[1])), float(model.R))
    k = int(model.zone_order()[0])
    q = model.sample_points[k]
    return CuriosityCircle((float(q[0]), float(q[1])), float(model.zone_radii[k]))


# ---------------------------------------------------------------------------
# curiosity zones


@dataclass(frozen=True)
class _Lattice:
    xs: np.ndarray
    ys: np.ndarray
    step: float

    @classmethod
    def over(cls, domain: Domain, n: int) -> "_Lattice":
        x0, y0, x1, y1 = domain.bbox
        side = max(x1 - x0, y1 - y0)
        step = side / n
        xs = x0 + (np.arange(n) + 0.5) * step
        ys = y0 + (np.arange(n) + 0.5) * step
        return cls(xs, ys, step)

    def points(self) -> np.ndarray:
        gx, gy = np.meshgrid(self.xs, self.ys)
        return np.column_stack((gx.ravel(), gy.ravel()))


def _raster_ignorance(model: IgnoranceModel, lat: _Lattice, inside: np.ndarray) -> np.ndarray:
    """Ignorance membership at lattice nodes (rows: y, columns: x).

    Memoised on the model per lattice size, since a model is immutable."""
    key = ("raster", len(lat.xs))
    if key not in model._memo:
        model._memo[key] = _rasterize(model, lat, inside)
    return model._memo[key]


def _rasterize(model: IgnoranceModel, lat: _Lattice, inside: np.ndarray) -> np.ndarray:
    if model.is_empty:
        return inside.copy()
    mask = np.zeros_like(inside)
    x0, y0, h = lat.xs[0], lat.ys[0], lat.step
    nx, ny = len(lat.xs), len(lat.ys)
    for (qx, qy), e in zip(model.sample_points, model.zone_radii):
        i0 = max(0, int(math.ceil((qx - e - x0) / h)))
        i1 = min(nx - 1, int(math.floor((qx + e - x0) / h)))
        j0 = max(0, int(math.ceil((qy - e - y0) / h)))
        j1 = min(ny - 1, int(math.floor((qy + e - y0) / h)))
        if i0 > i1 or j0 > j1:
            continue
        dx = lat.xs[i0:i1 + 1] - qx
        dy = lat.ys[j0:j1 + 1] - qy
        mask[j0:j1 + 1, i0:i1 + 1] |= (dy[:, None] ** 2 + dx[None, :] ** 2) <= e * e
    return mask & inside


class CuriosityRegion:
    """Membership predicate of a curiosity region and its inscribed circles.

    ``professor``: ignorant for both actors.  ``student``: ignorant for the
    student (``self_model``) but not for the professor (``other_model``).
    """

    def __init__(self, self_model: IgnoranceModel, other_model: IgnoranceModel, mode: str,
                 grid: int = GRID_SIZE):
        if self_model.domain != other_model.domain:
            raise DomainMismatch("both models must share one domain")
        if mode not in ("professor", "student"):
            raise ValueError(f"unknown curiosity mode {mode!r}")
        self.mode = mode
        self.self_model = self_model
        self.other_model = other_model
        self.domain = self_model.domain
        self.lattice = _Lattice.over(self.domain, grid)
        pts = self.lattice.points()
        inside = self.domain.contains(pts, tol=0.0).reshape(grid, grid)
        a = _raster_ignorance(self_model, self.lattice, inside)
        b = _raster_ignorance(other_model, self.lattice, inside)
        self.mask = a & b if mode == "professor" else a & ~b
        self.whole_domain = mode == "professor" and self_model.is_empty and other_model.is_empty
        self._clearance = None

    def contains(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        inside = self.domain.contains(pts, tol=0.0)
        out = np.zeros(len(pts), dtype=bool)
        if not inside.any():
            return out
        p = pts[inside]
        a = self.self_model.ignorant(p)
        b = self.other_model.ignorant(p)
        out[inside] = a & b if self.mode == "professor" else a & ~b
        return out

    @property
    def clearance(self) -> np.ndarray:
        """Lattice estimate of the inscribed radius at every node."""
        if self._clearance is None:
            from scipy.ndimage import distance_transform_edt

            padded = np.pad(self.mask, 1, constant_values=False)
            edt = distance_transform_edt(padded)[1:-1, 1:-1]
            self._clearance = np.where(self.mask, np.maximum(edt - 0.5, 0.0) * self.lattice.step, 0.0)
        return self._clearance

    def is_empty(self) -> bool:
        return not self.mask.any()

    def _local(self, c: np.ndarray, reach: float):
        """Zone disks of both models able to reach within ``reach`` of ``c``."""
        out = []
        for model in (self.self_model, self.other_model):
            if model.is_empty:
                out.append(None)
                continue
            d = np.hypot(model.sample_points[:, 0] - c[0], model.sample_points[:, 1] - c[1])
            near = d <= model.zone_radii + reach
            out.append((model.sample_points[near], model.zone_radii[near]))
        return out

    def _member(self, pts: np.ndarray, local) -> np.ndarray:
        res = self.domain.contains(pts, tol=0.0)
        for disks, want in zip(local, (True, self.mode == "professor")):
            hit = np.ones(len(pts), dtype=bool) if disks is None else _covered(pts, *disks)
            res &= hit if want else ~hit
        return res

    def radius_at(self, c, hint: float, local=None) -> float:
        """Inscribed radius at ``c``: distance to the nearest point failing
        membership, probed along ``N_RAYS`` rays and refined by bisection.
        Probing covers ``hint`` +- two lattice steps."""
        c = np.asarray(c, dtype=float)
        h = self.lattice.step
        lo_r = max(0.0, hint - 2.0 * h)
        hi_r = hint + 2.0 * h
        if local is None:
            local = self._local(c, hi_r)
        if not self._member(c[None, :], local)[0]:
            return 0.0
        radii = np.linspace(lo_r, hi_r, 9)
        ang = np.arange(N_RAYS) * (2.0 * math.pi / N_RAYS)
        dirs = np.column_stack((np.cos(ang), np.sin(ang)))
        pts = c[None, None, :] + radii[None, :, None] * dirs[:, None, :]
        fails = ~self._member(pts.reshape(-1, 2), local).reshape(N_RAYS, len(radii))
        rays = np.flatnonzero(fails.any(axis=1))
        if len(rays) == 0:
            return float(hi_r)
        first = np.argmax(fails[rays], axis=1)
        if (first == 0).any():
            return float(lo_r)
        a = radii[first - 1]
        b = radii[first]
        d = dirs[rays]
        for _ in range(12):
            m = 0.5 * (a + b)
            ok = self._member(c[None, :] + m[:, None] * d, local)
            a = np.where(ok, m, a)
            b = np.where(ok, b, m)
        return float(a.min())

    def refine(self, node: tuple[int, int]) -> CuriosityCircle:
        """Golden-section refinement of the inscribed circle around a node,
        one pass per axis within one lattice step."""
        j, i = node
        h = self.lattice.step
        c = np.array([self.lattice.xs[i], self.lattice.ys[j]])
        hint = float(self.clearance[j, i])
        local = self._local(c, hint + 4.0 * h)
        best_r = self.radius_at(c, hint, local)
        invphi = (math.sqrt(5.0) - 1.0) / 2.0
        for axis in (0, 1):
            a, b = c[axis] - h, c[axis] + h

            def f(t):
                x = c.copy()
                x[axis] = t
                return self.radius_at(x, hint, local)

            x1 = b - invphi * (b - a)
            x2 = a + invphi * (b - a)
            f1, f2 = f(x1), f(x2)
            for _ in range(4):
                if f1 >= f2:
                    b, x2, f2 = x2, x1, f1
                    x1 = b - invphi * (b - a)
                    f1 = f(x1)
                else:
                    a, x1, f1 = x1, x2, f2
                    x2 = a + invphi * (b - a)
                    f2 = f(x2)
            t, ft = (x1, f1) if f1 >= f2 else (x2, f2)
            if ft > best_r:
                c[axis], best_r = t, ft
        return CuriosityCircle((float(c[0]), float(c[1])), float(best_r))

    def circles(self, min_radius: float = 0.0, refine: bool | str = True):
        """Inscribed circles in decreasing size: the largest first, then the
        largest one centred outside every circle already produced.

        ``refine`` may be True (refine every circle), False (lattice estimates
        only) or ``"first"`` (refine only the largest)."""
        if self.whole_domain:
            c = self.domain.center
            yield CuriosityCircle((float(c[0]), float(c[1])), float(self.domain.radius))
            return
        clear = self.clearance.copy()
        gx, gy = np.meshgrid(self.lattice.xs, self.lattice.ys)
        first = True
        while True:
            flat = int(np.argmax(clear))
            j, i = divmod(flat, clear.shape[1])
            if clear[j, i] <= 0 or clear[j, i] <= min_radius:
                return
            polish = refine is True or (refine == "first" and first)
            first = False
            circle = self.refine((j, i)) if polish else CuriosityCircle(
                (float(self.lattice.xs[i]), float(self.lattice.ys[j])), float(clear[j, i]))
            r_block = max(circle.radius, self.lattice.step)
            blocked = (gx - circle.focus[0]) ** 2 + (gy - circle.focus[1]) ** 2 <= r_block**2
            blocked[j, i] = True
            clear[blocked] = 0.0
            if circle.radius > min_radius:
                yield circle


def largest_curiosity_zone(self_model: IgnoranceModel, other_model: IgnoranceModel,
                           mode: str) -> CuriosityCircle:
    region = CuriosityRegion(self_model, other_model, mode)
    for circle in region.circles():
        return circle
    c = self_model.domain.center
    return CuriosityCircle((float(c[0]), float(c[1])), 0.0)
