"""
Command-line front end.

    voidsel evaluate --dataset iris --selector ips --out iris_ips.json
    voidsel render   --dataset wine --selector ips --iterations 1 --svg wine.svg
    voidsel discover --dataset iris --method gabriel --out foci.json

``--dataset`` takes a file path or the short name of a bundled dataset;
names are looked up in ``$VOID_DATA_DIR`` first.  Every command prints a
tab-separated summary on stdout; ``--out`` writes a JSON results document and
``--svg`` a figure.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 output error.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from . import __version__
from .discovery import (
    balanced_view_curve,
    cluster_hull,
    gabriel_ignorance_zones,
    knndn_births,
    manifold_ignorance_boundary,
    social_distance_segment,
)
from .errors import DataError, InvalidK, NoTangentPairs, NotGabrielPair, VoidselError
from .evaluation import (
    DATASETS,
    RawDataset,
    cross_validate_sets,
    fit_pca,
    load_csv,
    minmax_normalize,
    reduce_2d,
    resolve_dataset,
    select_all,
)
from .geometry import gabriel_pairs
from .ignorance import CuriosityRegion, build_model, largest_ignorance_zone
from .selection import SelectorConfig, aps, cnn, enn, ips, make_domain, qop

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_OUTPUT = 0, 2, 3, 4

SELECTORS = ("full", "ips", "aps", "cnn", "enn", "qop")
METHODS = ("gabriel", "knndn", "manifold", "balanced", "social")


class ConfigError(Exception):
    pass


class OutputError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    dataset: str
    label_col: str | None = None
    reduction: str | None = None
    selector: str = "ips"
    domain: str = "circle"
    eps0: float = 0.01
    delta: float | None = None
    k: int | None = None
    folds: int = 10
    repeats: int = 10
    seed: int = 0
    out: str | None = None
    svg: str | None = None
    method: str = "gabriel"
    iterations: int | None = None
    actor: str = "professor"
    rule: str = "count"
    base: str = "ips"
    dims: int | None = None

    def validate(self) -> None:
        if not self.eps0 > 0:
            raise ConfigError(f"--eps0 must be positive (got {self.eps0})")
        if self.delta is not None and not self.delta > 0:
            raise ConfigError(f"--delta must be positive (got {self.delta})")
        if self.folds < 2:
            raise ConfigError(f"--folds must be at least 2 (got {self.folds})")
        if self.repeats < 1:
            raise ConfigError(f"--repeats must be at least 1 (got {self.repeats})")
        if self.k is not None and self.k < 1:
            raise ConfigError(f"--k must be at least 1 (got {self.k})")
        if self.selector == "enn" and self.k is not None and self.k % 2 == 0:
            raise ConfigError(f"--k must be odd for enn (got {self.k})")
        if self.iterations is not None and self.iterations < 0:
            raise ConfigError(f"--iterations must be nonnegative (got {self.iterations})")
        if self.dims is not None and self.dims < 3:
            raise ConfigError(f"--dims must be at least 3 (got {self.dims})")

    def selector_config(self) -> SelectorConfig:
        return SelectorConfig(domain=self.domain, eps0=self.eps0, delta=self.delta, seed=self.seed,
                              max_iterations=self.iterations)

    def echo(self) -> dict:
        return {
            "reduction": _reduction(self), "selector": self.selector, "domain": self.domain,
            "eps0": self.eps0, "delta": self.delta, "k": self.k, "folds": self.folds,
            "repeats": self.repeats, "seed": self.seed, "iterations": self.iterations,
            "actor": self.actor, "rule": self.rule, "base": self.base, "dims": self.dims,
            "method": self.method,
        }


# ---------------------------------------------------------------------------
# data


def _load(cfg: RunConfig) -> RawDataset:
    name = cfg.dataset
    label = cfg.label_col
    if label is None:
        label = DATASETS[name][1] if name in DATASETS else "-1"
    try:
        path = resolve_dataset(name)
    except FileNotFoundError as exc:
        raise DataError(str(exc)) from None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        d = load_csv(path, label, name=Path(name).stem if name not in DATASETS else name)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    if d.n_classes < 2:
        raise DataError(f"{path}: need at least two classes")
    return d


def _reduction(cfg: RunConfig) -> str:
    if cfg.reduction is not None:
        return cfg.reduction
    return DATASETS[cfg.dataset][2] if cfg.dataset in DATASETS else "chi2"


def _prepare(cfg: RunConfig, d: RawDataset) -> RawDataset:
    """Scaled data in the space the selector works in."""
    if cfg.selector == "qop":
        d = minmax_normalize(d)
        if d.n_features < 3:
            raise ConfigError("qop needs at least three attributes")
        if cfg.dims is not None and cfg.dims < d.n_features:
            pca = fit_pca(d.X, cfg.dims)
            from dataclasses import replace

            d = replace(d, X=pca.transform(d.X), feature_names=tuple(f"pc{i + 1}" for i in range(cfg.dims)))
        return d
    try:
        return reduce_2d(d, _reduction(cfg))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


# ---------------------------------------------------------------------------
# selectors


def _selector(cfg: RunConfig):
    """Callable returning named index sets for one training block."""
    scfg = cfg.selector_config()
    s = cfg.selector
    if s == "full":
        return lambda X, y: {"selection": select_all(X, y)}
    if s == "ips":
        return lambda X, y: {"selection": ips(X, y, scfg)}
    if s == "aps":
        def run(X, y):
            p, st = aps(X, y, scfg)
            both = tuple(p.indices) + tuple(st.indices)
            first = {"professor": p, "both": both}
            return {"selection": first[cfg.actor], "professor": p, "student": st, "both": both}
        return run
    if s == "cnn":
        return lambda X, y: {"selection": cnn(X, y, cfg.seed)}
    if s == "enn":
        k = cfg.k if cfg.k is not None else 3
        return lambda X, y: {"selection": enn(X, y, k)}
    if s == "qop":
        def run(X, y):
            return {"selection": qop(X, y, cfg.base, cfg.rule, cfg.k, scfg)}
        return run
    raise ConfigError(f"unknown selector {s!r}")


def _metrics_doc(m) -> dict:
    return {
        "er_mean": m.er_mean,
        "er_contraharmonic": m.er_contraharmonic,
        "rr_mean": m.rr_mean,
        "rr_contraharmonic": m.rr_contraharmonic,
        "quality_arithmetic": m.quality(),
        "quality_contraharmonic": m.quality(contraharmonic=True),
    }


def _dataset_doc(d: RawDataset) -> dict:
    return {"name": d.name, "rows": len(d), "features": list(d.feature_names), "classes": list(d.classes),
            "dropped_rows": d.dropped_rows}


# ---------------------------------------------------------------------------
# output


def _write_json(path: str, doc: dict) -> None:
    try:
        with open(path, "w") as f:
            json.dump(doc, f, indent=2)
            f.write("\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from None


def _write_svg(path: str, fig) -> None:
    from .plotting import save_svg

    try:
        save_svg(fig, path)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from None


def _tsv(rows: list[list]) -> None:
    for r in rows:
        print("\t".join(_fmt(v) for v in r))


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.4f}"
    return str(v)


# ---------------------------------------------------------------------------
# commands


def cmd_evaluate(cfg: RunConfig) -> int:
    d = _prepare(cfg, _load(cfg))
    if cfg.selector == "qop" and cfg.base not in ("ips", "aps-professor", "aps-both"):
        raise ConfigError(f"unknown qop base selector {cfg.base!r}")
    runs = cross_validate_sets(d, _selector(cfg), cfg.folds, cfg.repeats, cfg.seed)
    main = runs["selection"]
    doc = {
        "command": "evaluate",
        "version": __version__,
        "dataset": _dataset_doc(d),
        "selector": cfg.selector,
        "seed": cfg.seed,
        "config": cfg.echo(),
        "metrics": _metrics_doc(main),
        "per_fold": {"er": main.er, "rr": main.rr},
    }
    extra = {k: v for k, v in runs.items() if k != "selection"}
    if extra:
        doc["sets"] = {k: {"metrics": _metrics_doc(v), "per_fold": {"er": v.er, "rr": v.rr}}
                       for k, v in extra.items()}
    rows = [["dataset", "selector", "set", "er_mean", "er_contraharmonic", "rr_mean", "rr_contraharmonic",
             "quality"]]
    for name, m in [("selection", main)] + list(extra.items()):
        rows.append([d.name, cfg.selector, name, m.er_mean, m.er_contraharmonic, m.rr_mean,
                     m.rr_contraharmonic, m.quality()])
    if cfg.out:
        _write_json(cfg.out, doc)
    if cfg.svg:
        from .plotting import fold_scatter, new_figure

        fig, (ax,) = new_figure(1, 5.0)
        fold_scatter(ax, main.er, main.rr, f"{d.name}: {cfg.selector}")
        _write_svg(cfg.svg, fig)
    _tsv(rows)
    return EXIT_OK


def cmd_render(cfg: RunConfig) -> int:
    from .plotting import draw_domain, draw_focus, draw_model, draw_points, draw_prototypes, new_figure

    if cfg.selector == "qop":
        raise ConfigError("render works on 2-D selections; qop is not drawable")
    d = _prepare(cfg, _load(cfg))
    X, y = d.X, d.y
    nc = len(d.classes)
    scfg = cfg.selector_config()
    domain = make_domain(X, cfg.domain)
    fig, (ax,) = new_figure(1, 6.0)
    draw_domain(ax, domain)
    draw_points(ax, X, y, nc)
    doc = {"command": "render", "version": __version__, "dataset": _dataset_doc(d), "selector": cfg.selector,
           "seed": cfg.seed, "config": cfg.echo()}
    if cfg.selector == "aps":
        p, s = aps(X, y, scfg)
        pm = build_model(X[list(p.indices)], y[list(p.indices)], domain, cfg.delta)
        sm = build_model(X[list(s.indices)], y[list(s.indices)], domain, cfg.delta)
        draw_model(ax, pm)
        draw_prototypes(ax, X, y, p.indices, nc, marker="s")
        draw_prototypes(ax, X, y, s.indices, nc, marker="^")
        foci = {}
        for actor, reg in (("professor", CuriosityRegion(pm, sm, "professor")),
                           ("student", CuriosityRegion(sm, pm, "student"))):
            c = next(iter(reg.circles()), None)
            if c is not None:
                draw_focus(ax, c.focus, c.radius, color="darkred" if actor == "professor" else "darkgreen")
                foci[actor] = {"focus": list(c.focus), "radius": c.radius}
        doc["professor"] = list(p.indices)
        doc["student"] = list(s.indices)
        doc["curiosity"] = foci
        rows = [["actor", "prototypes"], ["professor", len(p)], ["student", len(s)]]
    else:
        if cfg.selector == "ips":
            sel = list(ips(X, y, scfg).indices)
        elif cfg.selector == "cnn":
            sel = list(cnn(X, y, cfg.seed).indices)
        elif cfg.selector == "enn":
            sel = list(enn(X, y, cfg.k if cfg.k is not None else 3).indices)
        else:
            sel = list(range(len(y)))
        if cfg.iterations is not None and cfg.selector != "ips":
            sel = sel[:cfg.iterations]
        model = build_model(X[sel], y[sel], domain, cfg.delta)
        draw_model(ax, model)
        draw_prototypes(ax, X, y, sel, nc)
        if sel:
            z = largest_ignorance_zone(model)
            draw_focus(ax, z.focus, z.radius)
            doc["next_focus"] = {"focus": list(z.focus), "radius": z.radius}
        doc["selection"] = sel
        doc["voids"] = int(len(model.sample_points))
        rows = [["selector", "prototypes", "boundary_samples"], [cfg.selector, len(sel), len(model.sample_points)]]
    if cfg.svg:
        _write_svg(cfg.svg, fig)
    else:
        import matplotlib.pyplot as plt

        plt.close(fig)
    if cfg.out:
        _write_json(cfg.out, doc)
    _tsv(rows)
    return EXIT_OK


def cmd_discover(cfg: RunConfig) -> int:
    if cfg.method not in METHODS:
        raise ConfigError(f"unknown method {cfg.method!r}")
    d = _prepare(cfg, _load(cfg))
    X, y = d.X, d.y
    doc = {"command": "discover", "version": __version__, "dataset": _dataset_doc(d), "method": cfg.method,
           "config": cfg.echo()}
    points: list = []
    circles: list = []
    segments: list = []
    rows: list[list] = []
    if cfg.method == "gabriel":
        foci = gabriel_ignorance_zones(X, y)
        doc["foci"] = [{"position": list(f.position), "parents": list(f.parents), "radius": f.circle.radius}
                       for f in foci]
        rows = [["x", "y", "radius", "parents"]] + [
            [f.position[0], f.position[1], f.circle.radius, "-".join(map(str, f.parents))] for f in foci]
        points = [f.position for f in foci]
        circles = [f.circle for f in foci]
    elif cfg.method == "knndn":
        k = cfg.k if cfg.k is not None else 1
        try:
            births = knndn_births(X, y, k)
        except InvalidK as exc:
            raise ConfigError(str(exc)) from None
        doc["points"] = [{"position": list(b.point), "parents": list(b.parents)} for b in births]
        rows = [["x", "y", "parents"]] + [[b.point[0], b.point[1], f"{b.parents[0]}-{b.parents[1]}"]
                                          for b in births]
        points = [b.point for b in births]
    elif cfg.method in ("manifold", "balanced"):
        hulls = {int(c): cluster_hull(X[y == c], int(c)) for c in np.unique(y)}
        pairs = []
        rows = [["class_a", "class_b", "x", "y"]]
        for a, b in combinations(sorted(hulls), 2):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                if cfg.method == "manifold":
                    kids = manifold_ignorance_boundary(hulls[a], hulls[b])
                else:
                    try:
                        kids = balanced_view_curve(hulls[a], hulls[b])
                    except NoTangentPairs:
                        kids = []
            pairs.append({"classes": [a, b], "points": [list(p) for p in kids]})
            rows += [[a, b, p[0], p[1]] for p in kids]
            points += kids
        doc["pairs"] = pairs
        doc["hulls"] = {str(c): h.vertices.tolist() for c, h in hulls.items()}
    else:
        out = []
        rows = [["a", "b", "x0", "y0", "x1", "y1"]]
        for i, j in gabriel_pairs(X):
            if y[i] == y[j]:
                continue
            try:
                segs = social_distance_segment(i, j, X, y)
            except NotGabrielPair:
                continue
            for s in segs:
                out.append({"parents": [i, j], "start": list(s.start), "end": list(s.end), "t": list(s.t),
                            "closed": list(s.closed)})
                rows.append([i, j, s.start[0], s.start[1], s.end[0], s.end[1]])
                segments.append((s.start, s.end))
        doc["segments"] = out
    if cfg.out:
        _write_json(cfg.out, doc)
    if cfg.svg:
        from matplotlib.collections import LineCollection

        from .plotting import draw_circles, draw_domain, draw_points, new_figure

        fig, (ax,) = new_figure(1, 6.0)
        draw_domain(ax, make_domain(X, cfg.domain))
        draw_points(ax, X, y, len(d.classes))
        if circles:
            draw_circles(ax, circles)
        if points:
            P = np.asarray(points)
            ax.scatter(P[:, 0], P[:, 1], s=10, marker="+", color="black", zorder=5)
        if segments:
            ax.add_collection(LineCollection(segments, colors="black", lw=2.0))
        _write_svg(cfg.svg, fig)
    _tsv(rows)
    return EXIT_OK


COMMANDS = {"evaluate": cmd_evaluate, "render": cmd_render, "discover": cmd_discover}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dataset", required=True, help="CSV path or bundled dataset name")
    common.add_argument("--label-col", default=None, help="label column name or index (default: last)")
    common.add_argument("--reduction", choices=("chi2", "pca", "none"), default=None,
                        help="2-D reduction (default: per bundled dataset, else chi2)")
    common.add_argument("--selector", choices=SELECTORS, default="ips")
    common.add_argument("--domain", choices=("circle", "rect"), default="circle")
    common.add_argument("--eps0", type=float, default=0.01, help="stopping zone radius as a fraction of R")
    common.add_argument("--delta", type=float, default=None, help="boundary sampling step")
    common.add_argument("--k", type=int, default=None, help="k for enn, knndn and the qop count rule")
    common.add_argument("--folds", type=int, default=10)
    common.add_argument("--repeats", type=int, default=10)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="JSON results document")
    common.add_argument("--svg", default=None, help="SVG figure")
    common.add_argument("--method", choices=METHODS, default="gabriel")
    common.add_argument("--iterations", type=int, default=None, help="stop selection after this many steps")
    common.add_argument("--actor", choices=("professor", "both"), default="professor",
                        help="which aps set is scored as the selection")
    common.add_argument("--rule", choices=("count", "star"), default="count", help="qop combination rule")
    common.add_argument("--base", choices=("ips", "aps-professor", "aps-both"), default="ips",
                        help="2-D selector run by qop")
    common.add_argument("--dims", type=int, default=None, help="qop: PCA dimensionality before projecting")

    parser = argparse.ArgumentParser(prog="voidsel", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("evaluate", parents=[common], help="cross-validate a selector")
    sub.add_parser("render", parents=[common], help="draw a selection and its ignorance model")
    sub.add_parser("discover", parents=[common], help="run an ignorance discovery method")
    return parser


def parse_config(argv=None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    cfg = RunConfig(**{k.replace("-", "_"): v for k, v in vars(ns).items()})
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:        # argparse: --help / --version (0) or usage errors (2)
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OutputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except VoidselError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
