"""
SVG figures of datasets, ignorance models, selections and discovery output.

Figures are written with a fixed SVG hash salt and without a date stamp, so
identical inputs give byte-identical files.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.collections import LineCollection, PatchCollection  # noqa: E402
from matplotlib.patches import Circle as CirclePatch  # noqa: E402
from matplotlib.patches import Rectangle  # noqa: E402

from .geometry import DomainCircle  # noqa: E402

SVG_SALT = "voidsel"
MAX_VOIDS = 120


def _style():
    return {
        "svg.hashsalt": SVG_SALT,
        "svg.fonttype": "none",
        "path.simplify": False,
    }


def new_figure(ncols: int = 1, size: float = 6.0):
    with plt.rc_context(_style()):
        fig, axes = plt.subplots(1, ncols, figsize=(size * ncols, size), squeeze=False)
    return fig, list(axes[0])


def save_svg(fig, path) -> None:
    """Write ``fig`` as SVG with deterministic ids and no timestamp."""
    with plt.rc_context(_style()):
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)


def _colors(n: int):
    cmap = plt.get_cmap("tab10")
    return [cmap(i % 10) for i in range(n)]


def draw_domain(ax, domain) -> None:
    if isinstance(domain, DomainCircle):
        ax.add_patch(CirclePatch(domain.center, domain.radius, fill=False, ec="red", lw=1.5))
    else:
        ax.add_patch(Rectangle(domain.origin, domain.width, domain.height, fill=False, ec="red", lw=1.5))
    x0, y0, x1, y1 = domain.bbox
    pad = 0.05 * max(x1 - x0, y1 - y0)
    ax.set_xlim(x0 - pad, x1 + pad)
    ax.set_ylim(y0 - pad, y1 + pad)
    ax.set_aspect("equal")


def draw_points(ax, X, y, n_classes: int | None = None, size: float = 12, alpha: float = 0.6) -> None:
    X = np.asarray(X)
    y = np.asarray(y)
    n = int(n_classes if n_classes is not None else (y.max() + 1 if len(y) else 1))
    cols = _colors(n)
    for c in range(n):
        m = y == c
        if m.any():
            ax.scatter(X[m, 0], X[m, 1], s=size, color=cols[c], alpha=alpha, lw=0, label=f"class {c}")


def draw_prototypes(ax, X, y, indices, n_classes: int, marker: str = "o", size: float = 60) -> None:
    idx = np.asarray(list(indices), dtype=int)
    if len(idx) == 0:
        return
    cols = _colors(n_classes)
    for c in np.unique(y[idx]):
        m = idx[y[idx] == c]
        ax.scatter(X[m, 0], X[m, 1], s=size, color=cols[int(c)], marker=marker, edgecolors="black", lw=1.2, zorder=4)


def draw_model(ax, model, voids: bool = True, zones: bool = True) -> None:
    """Void circles (blue, a thinned subset) and ignorance-zone discs (red)."""
    if model.is_empty:
        return
    pts, r, e = model.sample_points, model.void_radii, model.zone_radii
    if voids and len(pts):
        step = max(1, len(pts) // MAX_VOIDS)
        circles = [CirclePatch(p, rr) for p, rr in zip(pts[::step], r[::step])]
        ax.add_collection(PatchCollection(circles, facecolor="none", edgecolor="tab:blue", lw=0.3, alpha=0.5))
    if zones and len(pts):
        discs = [CirclePatch(p, ee) for p, ee in zip(pts, e) if ee > 0]
        ax.add_collection(PatchCollection(discs, facecolor="salmon", edgecolor="none", alpha=0.25))
    if model.decision_edges:
        segs = [(d.start, d.end) for d in model.decision_edges]
        ax.add_collection(LineCollection(segs, colors="black", lw=1.0))


def draw_focus(ax, focus, radius: float | None = None, color: str = "darkred", label: str | None = None) -> None:
    ax.plot([focus[0]], [focus[1]], marker="x", ms=10, mew=2, color=color, zorder=5, label=label)
    if radius:
        ax.add_patch(CirclePatch(focus, radius, fill=False, ec=color, ls="--", lw=1.0))


def draw_circles(ax, circles, color: str = "tab:purple") -> None:
    patches = [CirclePatch(c.center, c.radius) for c in circles]
    if patches:
        ax.add_collection(PatchCollection(patches, facecolor="none", edgecolor=color, lw=0.8))


def fold_scatter(ax, er, rr, title: str = "") -> None:
    """Per-fold error against retention, with the arithmetic means."""
    ax.scatter(rr, er, s=14, color="tab:blue", alpha=0.6, lw=0)
    ax.axvline(float(np.mean(rr)), color="gray", lw=0.8, ls="--")
    ax.axhline(float(np.mean(er)), color="gray", lw=0.8, ls="--")
    ax.set_xlabel("retention rate (%)")
    ax.set_ylabel("error rate (%)")
    if title:
        ax.set_title(title)
