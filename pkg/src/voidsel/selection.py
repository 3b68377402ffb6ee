"""
Prototype selectors for nearest-neighbour classification.

Ignorance-driven selectors grow a prototype set by repeatedly locating the
largest zone the current prototypes know nothing about and acquiring the
training point closest to its centre.  ``ips`` does this for a single
learner; ``aps`` plays two learners against each other.  ``cnn`` and ``enn``
are the classical condensing and editing baselines, and ``qop`` lifts any of
the 2-D selectors to n-D data through leave-one-attribute-out projections.

Every selector takes training points ``X`` (rows) and integer labels ``y``
and returns indices into them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import EmptyInput, InvalidK, NotHighDimensional
from .evaluation import fit_pca
from .geometry import bounding_circle, bounding_rect
from .ignorance import CuriosityRegion, build_model

SINGLE, PROFESSOR, STUDENT = "single", "professor", "student"
CURIOSITY_SATISFIED = "curiosity-satisfied"
EPSILON_THRESHOLD = "epsilon-threshold"


@dataclass(frozen=True)
class Acquisition:
    """One acquisition step: the zone that was queried and the point taken."""
    iteration: int
    focus: tuple[float, float]
    radius: float
    index: int


@dataclass(frozen=True)
class Selection:
    indices: tuple[int, ...]
    actor: str = SINGLE
    iterations: int = 0
    stop_reason: str = CURIOSITY_SATISFIED
    history: tuple[Acquisition, ...] = ()

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def retention(self, n_train: int) -> float:
        return 100.0 * len(self.indices) / n_train if n_train else 0.0


@dataclass(frozen=True)
class SelectorConfig:
    """Settings shared by the ignorance-driven selectors.

    ``eps0`` is the stopping zone radius as a fraction of the domain's
    scaling radius.  ``delta`` is the boundary sampling step (``None`` picks
    720 samples around the domain circle).  ``max_circles`` bounds how many
    successive curiosity circles an adversarial actor inspects per turn.
    """
    domain: str = "circle"
    eps0: float = 0.01
    delta: float | None = None
    seed: int = 0
    max_iterations: int | None = None
    max_circles: int = 64

    def __post_init__(self):
        if not self.eps0 > 0:
            raise ValueError(f"eps0 must be positive, got {self.eps0}")
        if self.domain not in ("circle", "rect"):
            raise ValueError(f"unknown domain kind {self.domain!r}")
        if self.delta is not None and not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.max_circles < 1:
            raise ValueError("max_circles must be >= 1")


def make_domain(X, kind: str = "circle"):
    return bounding_circle(X) if kind == "circle" else bounding_rect(X)


def _check_train(X, y):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    if X.ndim != 2 or len(X) == 0:
        raise EmptyInput("training set is empty")
    if len(X) != len(y):
        raise ValueError("X and y differ in length")
    return X, y


def _nearest_in_circle(X, available, focus, radius):
    """Index of the available point nearest to ``focus`` within the closed
    circle, or None.  Distance ties go to the lower index."""
    cand = np.flatnonzero(available)
    if len(cand) == 0:
        return None
    d = np.hypot(X[cand, 0] - focus[0], X[cand, 1] - focus[1])
    inside = d <= radius * (1 + 1e-12)
    if not inside.any():
        return None
    pick = np.flatnonzero(inside)[np.argmin(d[inside])]
    return int(cand[pick])


# ---------------------------------------------------------------------------
# incremental selection


def ips(X, y, cfg: SelectorConfig = SelectorConfig()) -> Selection:
    """Incremental ignorance-driven selection on 2-D training data.

    Each iteration builds the ignorance model of the prototypes chosen so
    far, walks its zones from the largest down (ties by smallest x then y)
    and acquires the unselected point nearest to the first zone centre whose
    zone circle holds any.  It stops once the largest zone is no larger than
    ``eps0 * R`` or no zone above that size holds a point.
    """
    X, y = _check_train(X, y)
    domain = make_domain(X, cfg.domain)
    R = domain.radius
    if R == 0:
        return _coincident(domain, SINGLE)
    floor = cfg.eps0 * R
    cap = cfg.max_iterations if cfg.max_iterations is not None else len(X)
    available = np.ones(len(X), dtype=bool)
    chosen: list[int] = []
    history: list[Acquisition] = []
    reason = CURIOSITY_SATISFIED
    it = 0
    while it < cap:
        it += 1
        if not chosen:
            c = domain.center
            centers = np.array([[c[0], c[1]]])
            radii = np.array([R])
        else:
            model = build_model(X[chosen], y[chosen], domain, cfg.delta)
            order = model.zone_order()
            centers = model.sample_points[order]
            radii = model.zone_radii[order]
        if radii[0] <= floor:
            reason = EPSILON_THRESHOLD
            break
        keep = radii > floor
        centers, radii = centers[keep], radii[keep]
        pick = _first_zone_hit(X, available, centers, radii)
        if pick is None:
            reason = CURIOSITY_SATISFIED
            break
        z, idx = pick
        chosen.append(idx)
        available[idx] = False
        history.append(Acquisition(it, (float(centers[z, 0]), float(centers[z, 1])), float(radii[z]), idx))
    return Selection(tuple(chosen), SINGLE, it, reason, tuple(history))


def _coincident(domain, actor: str) -> Selection:
    """All training points share one location: the first of them answers
    every query, so a single acquisition satisfies curiosity."""
    c = (float(domain.center[0]), float(domain.center[1]))
    return Selection((0,), actor, 1, CURIOSITY_SATISFIED, (Acquisition(1, c, 0.0, 0),))


def _first_zone_hit(X, available, centers, radii, chunk: int = 512):
    """First zone (in the given order) containing an available point, with
    the available point nearest its centre."""
    cand = np.flatnonzero(available)
    if len(cand) == 0:
        return None
    P = X[cand]
    for s in range(0, len(centers), chunk):
        c = centers[s:s + chunk]
        d = np.hypot(c[:, None, 0] - P[None, :, 0], c[:, None, 1] - P[None, :, 1])
        hit = d <= radii[s:s + chunk, None] * (1 + 1e-12)
        rows = np.flatnonzero(hit.any(axis=1))
        if len(rows):
            z = rows[0]
            dz = np.where(hit[z], d[z], np.inf)
            return s + int(z), int(cand[int(np.argmin(dz))])
    return None


# ---------------------------------------------------------------------------
# adversarial selection


def _curiosity_pick(region: CuriosityRegion, X, available, floor: float, max_circles: int):
    """Walk the region's inscribed circles from the largest down and return
    (circle, index) for the first one holding an available point."""
    if region.is_empty() and not region.whole_domain:
        return None
    inside = region.contains(X[available]) if available.any() else np.zeros(0, dtype=bool)
    if not inside.any():
        return None
    for n, circle in enumerate(region.circles(min_radius=floor, refine="first")):
        if n >= max_circles:
            break
        idx = _nearest_in_circle(X, available, circle.focus, circle.radius)
        if idx is not None:
            return circle, idx
    return None


def aps(X, y, cfg: SelectorConfig = SelectorConfig()) -> tuple[Selection, Selection]:
    """Adversarial selection between a professor and a student.

    The professor probes where both actors are ignorant; the student probes
    where it is ignorant but the professor is not.  Each turn both actors
    acquire the unselected point nearest their curiosity focus (inside the
    curiosity circle); on a clash the student keeps the point and the
    professor passes.  Returns ``(professor, student)``.
    """
    X, y = _check_train(X, y)
    domain = make_domain(X, cfg.domain)
    if domain.radius == 0:
        return _coincident(domain, PROFESSOR), Selection((), STUDENT, 1)
    floor = cfg.eps0 * domain.radius
    cap = cfg.max_iterations if cfg.max_iterations is not None else len(X)
    available = np.ones(len(X), dtype=bool)
    prof: list[int] = []
    stud: list[int] = []
    hist = {PROFESSOR: [], STUDENT: []}
    reason = CURIOSITY_SATISFIED
    it = 0
    while it < cap and available.any():
        it += 1
        pm = build_model(X[prof], y[prof], domain, cfg.delta)
        sm = build_model(X[stud], y[stud], domain, cfg.delta)
        p_reg = CuriosityRegion(pm, sm, "professor")
        s_reg = CuriosityRegion(sm, pm, "student")
        p_pick = _curiosity_pick(p_reg, X, available, floor, cfg.max_circles)
        s_pick = _curiosity_pick(s_reg, X, available, floor, cfg.max_circles)
        if p_pick is None and s_pick is None:
            if _largest_radius(p_reg) <= floor and _largest_radius(s_reg) <= floor:
                reason = EPSILON_THRESHOLD
            break
        if s_pick is not None:
            circle, idx = s_pick
            stud.append(idx)
            available[idx] = False
            hist[STUDENT].append(Acquisition(it, circle.focus, circle.radius, idx))
        if p_pick is not None and (s_pick is None or p_pick[1] != s_pick[1]):
            circle, idx = p_pick
            prof.append(idx)
            available[idx] = False
            hist[PROFESSOR].append(Acquisition(it, circle.focus, circle.radius, idx))
    return (
        Selection(tuple(prof), PROFESSOR, it, reason, tuple(hist[PROFESSOR])),
        Selection(tuple(stud), STUDENT, it, reason, tuple(hist[STUDENT])),
    )


def _largest_radius(region: CuriosityRegion) -> float:
    if region.whole_domain:
        return region.domain.radius
    return float(region.clearance.max()) if region.mask.any() else 0.0


def aps_professor(X, y, cfg: SelectorConfig = SelectorConfig()) -> Selection:
    return aps(X, y, cfg)[0]


def aps_both(X, y, cfg: SelectorConfig = SelectorConfig()) -> Selection:
    """Professor and student selections pooled, in acquisition order."""
    p, s = aps(X, y, cfg)
    hist = sorted(p.history + s.history, key=lambda a: (a.iteration, a.index))
    return Selection(tuple(a.index for a in hist), SINGLE, p.iterations, p.stop_reason, tuple(hist))


# ---------------------------------------------------------------------------
# classical baselines


def cnn(X, y, seed: int = 0) -> Selection:
    """Hart's condensed nearest neighbour.

    One randomly drawn seed per class, then repeated passes in dataset order
    adding every point the current subset misclassifies, until a pass adds
    nothing.
    """
    X, y = _check_train(X, y)
    rng = np.random.default_rng(seed)
    chosen = [int(rng.choice(np.flatnonzero(y == c))) for c in np.unique(y)]
    in_set = np.zeros(len(X), dtype=bool)
    in_set[chosen] = True
    passes = 0
    while True:
        passes += 1
        added = False
        for i in range(len(X)):
            if in_set[i]:
                continue
            P = X[chosen]
            j = int(np.argmin(((P - X[i]) ** 2).sum(axis=1)))
            if y[chosen[j]] != y[i]:
                chosen.append(i)
                in_set[i] = True
                added = True
        if not added:
            break
    return Selection(tuple(chosen), SINGLE, passes, CURIOSITY_SATISFIED)


def enn(X, y, k: int = 3) -> Selection:
    """Wilson's edited nearest neighbour: drop every point whose label
    disagrees with the majority of its ``k`` nearest neighbours in the
    original set (vote ties go to the smaller class id)."""
    if k < 1 or k % 2 == 0:
        raise InvalidK(f"k must be a positive odd integer, got {k}")
    X, y = _check_train(X, y)
    if len(X) == 1:
        return Selection((0,), SINGLE, 1, CURIOSITY_SATISFIED)
    kk = min(k, len(X) - 1)
    d2 = ((X[:, None, :] - X[None, :, :]) ** 2).sum(axis=2)
    np.fill_diagonal(d2, np.inf)
    nn = np.argsort(d2, axis=1, kind="stable")[:, :kk]
    keep = []
    for i in range(len(X)):
        vals, counts = np.unique(y[nn[i]], return_counts=True)
        if vals[np.argmax(counts)] == y[i]:
            keep.append(i)
    return Selection(tuple(keep), SINGLE, 1, CURIOSITY_SATISFIED)


# ---------------------------------------------------------------------------
# n-D lifting


def projections(X) -> list[np.ndarray]:
    """2-D PCA projection of the full data followed by one projection per
    removed attribute."""
    X = np.asarray(X, dtype=float)
    out = [fit_pca(X, 2).transform(X)]
    for i in range(X.shape[1]):
        Xi = np.delete(X, i, axis=1)
        out.append(fit_pca(Xi, 2).transform(Xi))
    return out


def combine(selections: list, rule: str = "count", k: int | None = None) -> tuple[int, ...]:
    """Merge per-projection selections.

    ``count``: keep an index present in at least ``k`` of the sets (all sets,
    the full-data projection included).  ``star``: first set intersected with
    the union of the others.
    """
    sets = [set(getattr(s, "indices", s)) for s in selections]
    n = len(sets) - 1
    if rule == "count":
        k = n if k is None else k
        if not 1 <= k <= max(n, 1):
            raise InvalidK(f"k must lie in [1, {n}], got {k}")
        counts: dict[int, int] = {}
        for s in sets:
            for i in s:
                counts[i] = counts.get(i, 0) + 1
        return tuple(sorted(i for i, c in counts.items() if c >= k))
    if rule == "star":
        rest = set().union(*sets[1:]) if n else set()
        return tuple(sorted(sets[0] & rest))
    raise ValueError(f"unknown combination rule {rule!r}")


SELECTORS_2D: dict[str, Callable] = {
    "ips": ips,
    "aps-professor": aps_professor,
    "aps-both": aps_both,
}


def qop(X, y, selector: str = "ips", rule: str = "count", k: int | None = None,
        cfg: SelectorConfig = SelectorConfig(), return_parts: bool = False):
    """Quasi-orthogonal projections: run a 2-D selector on every projection
    from :func:`projections` and merge the results with :func:`combine`."""
    X, y = _check_train(X, y)
    if X.shape[1] <= 2:
        raise NotHighDimensional(f"need more than 2 attributes, got {X.shape[1]}")
    if selector not in SELECTORS_2D:
        raise ValueError(f"unknown selector {selector!r}")
    fn = SELECTORS_2D[selector]
    parts = [fn(P, y, cfg) for P in projections(X)]
    sel = Selection(combine(parts, rule, k), SINGLE, len(parts), CURIOSITY_SATISFIED)
    return (sel, parts) if return_parts else sel
