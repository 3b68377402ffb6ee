"""
Datasets, preprocessing, nearest-neighbour classification and the repeated
cross-validation harness used to score prototype selectors.

A selector is any callable ``selector(X, y) -> indices`` (or an object with an
``indices`` attribute, such as :class:`voidsel.selection.Selection`).  Error
rate (ER) is the percentage of held-out points misclassified by 1-NN over the
selected prototypes; retention rate (RR) is the percentage of the training
block that was selected.
"""
from __future__ import annotations

import csv
import os
import time
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DegenerateCovarianceWarning,
    EmptyInput,
    EmptyPrototypes,
    InvalidK,
    MissingLabelColumn,
    MissingValuesWarning,
    NegativeFeatures,
    ParseError,
    TooFewRows,
    ZeroWeights,
)

MISSING_MARKERS = frozenset({"?", ""})
DATA_ENV = "VOID_DATA_DIR"


@dataclass(frozen=True)
class RawDataset:
    """Feature matrix with integer class ids.

    ``classes[i]`` is the original label text of class id ``i``; ids follow the
    sorted order of the label strings (numeric labels sort numerically).
    """
    X: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...]
    classes: tuple[str, ...]
    name: str = ""
    dropped_rows: int = 0

    def __post_init__(self):
        if self.X.ndim != 2 or len(self.X) != len(self.y):
            raise ValueError("X must be 2-D with one label per row")
        if self.X.shape[1] != len(self.feature_names):
            raise ValueError("feature_names does not match the column count")

    def __len__(self) -> int:
        return len(self.y)

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def n_classes(self) -> int:
        return len(np.unique(self.y))

    def subset(self, columns: Sequence[int]) -> "RawDataset":
        cols = list(columns)
        return replace(self, X=self.X[:, cols], feature_names=tuple(self.feature_names[c] for c in cols))

    def without(self, column: int) -> "RawDataset":
        return self.subset([c for c in range(self.n_features) if c != column])


# ---------------------------------------------------------------------------
# loading


def _label_key(s: str):
    try:
        return (0, float(s), s)
    except ValueError:
        return (1, 0.0, s)


def load_csv(path, label_col: str | int = -1, delimiter: str | None = None, name: str | None = None) -> RawDataset:
    """Read a delimited text file with a header row.

    ``label_col`` is a column name or a (possibly negative) position.  Rows
    containing a missing marker (``?`` or an empty field) are dropped, with a
    :class:`MissingValuesWarning` giving the count.
    """
    path = Path(path)
    with open(path, newline="") as f:
        text = f.read()
    if delimiter is None:
        first = text.split("\n", 1)[0]
        try:
            delimiter = csv.Sniffer().sniff(first, delimiters=",;\t").delimiter
        except csv.Error:
            delimiter = ","
    rows = [r for r in csv.reader(text.splitlines(), delimiter=delimiter) if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if not body:
        raise ParseError(f"{path}: no data rows below the header")

    if isinstance(label_col, str) and not label_col.lstrip("-").isdigit():
        if label_col not in header:
            raise MissingLabelColumn(f"{path}: no column named {label_col!r}")
        li = header.index(label_col)
    else:
        li = int(label_col)
        if not -len(header) <= li < len(header):
            raise MissingLabelColumn(f"{path}: label column {li} out of range for {len(header)} columns")
        li %= len(header)

    feats = [i for i in range(len(header)) if i != li]
    values, labels = [], []
    dropped = 0
    for lineno, r in enumerate(body, start=2):
        if len(r) != len(header):
            raise ParseError(f"{path}:{lineno}: expected {len(header)} fields, found {len(r)}")
        cells = [c.strip() for c in r]
        if any(cells[i] in MISSING_MARKERS for i in range(len(cells))):
            dropped += 1
            continue
        try:
            values.append([float(cells[i]) for i in feats])
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from None
        labels.append(cells[li])
    if dropped:
        warnings.warn(f"{path.name}: dropped {dropped} rows with missing values", MissingValuesWarning, stacklevel=2)
    if not values:
        raise ParseError(f"{path}: every row has missing values")
    X = np.asarray(values, dtype=float)
    if not np.isfinite(X).all():
        raise ParseError(f"{path}: non-finite feature values")
    classes = tuple(sorted(set(labels), key=_label_key))
    index = {c: i for i, c in enumerate(classes)}
    y = np.array([index[c] for c in labels], dtype=int)
    return RawDataset(X, y, tuple(header[i] for i in feats), classes, name or path.stem, dropped)


# bundled datasets: file name, label column, 2-D reduction used in the experiments
DATASETS = {
    "iris": ("iris.csv", "class", "chi2"),
    "wine": ("wine.csv", "class", "chi2"),
    "pima": ("pima.csv", "class", "chi2"),
    "breast_cancer": ("breast_cancer.csv", "class", "pca"),
    "ionosphere": ("ionosphere.csv", "class", "pca"),
    "glass": ("glass.csv", "type", "pca"),
    "bupa": ("bupa.csv", "selector", "pca"),
    "transfusion": ("transfusion.csv", "donated", "pca"),
}


def data_dirs() -> list[Path]:
    """Directories searched for dataset files: ``$VOID_DATA_DIR`` first, then
    the copies shipped with the package."""
    dirs = []
    env = os.environ.get(DATA_ENV)
    if env:
        dirs.append(Path(env))
    dirs.append(Path(__file__).parent / "data")
    return dirs


def resolve_dataset(name_or_path) -> Path:
    p = Path(name_or_path)
    if p.exists():
        return p
    fname = DATASETS[str(name_or_path)][0] if str(name_or_path) in DATASETS else p.name
    for d in data_dirs():
        if (d / fname).exists():
            return d / fname
    raise FileNotFoundError(f"dataset {name_or_path!r} not found (searched {', '.join(map(str, data_dirs()))})")


def load_dataset(name: str) -> RawDataset:
    """Load one of the bundled datasets by short name."""
    if name not in DATASETS:
        raise KeyError(f"unknown dataset {name!r}; known: {', '.join(DATASETS)}")
    fname, label, _ = DATASETS[name]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MissingValuesWarning)
        return load_csv(resolve_dataset(name), label, name=name)


# ---------------------------------------------------------------------------
# preprocessing


def minmax_normalize(d: RawDataset) -> RawDataset:
    """Scale every column to [0, 1]; constant columns become 0."""
    if len(d) == 0:
        raise EmptyInput("cannot normalise an empty dataset")
    lo = d.X.min(axis=0)
    span = d.X.max(axis=0) - lo
    safe = np.where(span > 0, span, 1.0)
    X = np.where(span > 0, (d.X - lo) / safe, 0.0)
    return replace(d, X=X)


def chi2_scores(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Chi-squared statistic of each nonnegative feature against the classes.

    Observed: feature mass summed per class.  Expected: the feature's total
    mass split in proportion to class frequencies.
    """
    X = np.asarray(X, dtype=float)
    if (X < 0).any():
        raise NegativeFeatures("chi-squared scores need nonnegative features")
    classes, inv = np.unique(y, return_inverse=True)
    Y = np.zeros((len(y), len(classes)))
    Y[np.arange(len(y)), inv] = 1.0
    observed = Y.T @ X
    expected = np.outer(Y.mean(axis=0), X.sum(axis=0))
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(expected > 0, (observed - expected) ** 2 / np.where(expected > 0, expected, 1.0), 0.0)
    return terms.sum(axis=0)


def chi2_top2(d: RawDataset) -> RawDataset:
    """Keep the two columns with the highest chi-squared score (ties go to
    the lower column index), in their original order."""
    if d.n_features < 2:
        raise ValueError("need at least two features")
    scores = chi2_scores(d.X, d.y)
    order = sorted(range(d.n_features), key=lambda i: (-scores[i], i))
    return d.subset(sorted(order[:2]))


@dataclass(frozen=True)
class PCAResult:
    components: np.ndarray      # (2, n) rows are unit loadings
    eigenvalues: np.ndarray     # full spectrum, descending
    mean: np.ndarray

    @property
    def explained_variance(self) -> float:
        total = self.eigenvalues.sum()
        return float(self.eigenvalues[:2].sum() / total) if total > 0 else 0.0

    def transform(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) @ self.components.T


def fit_pca(X, n_components: int = 2) -> PCAResult:
    X = np.asarray(X, dtype=float)
    mean = X.mean(axis=0)
    cov = np.cov(X - mean, rowvar=False, bias=False) if len(X) > 1 else np.zeros((X.shape[1],) * 2)
    cov = np.atleast_2d(cov)
    vals, vecs = np.linalg.eigh(cov)
    order = np.argsort(vals)[::-1]
    vals = np.clip(vals[order], 0.0, None)
    vecs = vecs[:, order].T
    rank = int((vals > 1e-12 * max(vals[0], 1e-300)).sum()) if vals[0] > 0 else 0
    comps = np.zeros((n_components, X.shape[1]))
    for i in range(min(n_components, len(vecs))):
        if i >= rank:
            break
        v = vecs[i]
        k = int(np.argmax(np.abs(v)))
        comps[i] = v if v[k] > 0 else -v
    if rank < n_components:
        warnings.warn(f"covariance has rank {rank}; padding with zero components",
                      DegenerateCovarianceWarning, stacklevel=2)
    return PCAResult(comps, vals, mean)


def pca_top2(d: RawDataset) -> tuple[RawDataset, float]:
    """Project onto the two leading principal components."""
    if d.n_features < 2:
        raise ValueError("need at least two features")
    pca = fit_pca(d.X, 2)
    X2 = pca.transform(d.X)
    return replace(d, X=X2, feature_names=("pc1", "pc2")), pca.explained_variance


def reduce_2d(d: RawDataset, method: str) -> RawDataset:
    """Min-max scale, then reduce to two columns with ``chi2`` or ``pca``
    (``none`` requires an already 2-D dataset)."""
    d = minmax_normalize(d)
    if method == "chi2":
        return chi2_top2(d)
    if method == "pca":
        return pca_top2(d)[0]
    if method == "none":
        if d.n_features != 2:
            raise ValueError(f"reduction 'none' needs 2 features, dataset has {d.n_features}")
        return d
    raise ValueError(f"unknown reduction {method!r}")


# ---------------------------------------------------------------------------
# classification


def knn_predict(prototypes, proto_labels, queries, k: int = 1, chunk: int = 2048) -> np.ndarray:
    """Majority label of the ``k`` nearest prototypes for every query.

    Distance ties go to the lower prototype index, vote ties to the smaller
    class id.
    """
    P = np.asarray(prototypes, dtype=float)
    L = np.asarray(proto_labels)
    Q = np.atleast_2d(np.asarray(queries, dtype=float))
    if len(P) == 0:
        raise EmptyPrototypes("no prototypes to classify with")
    if k < 1:
        raise InvalidK(f"k must be >= 1, got {k}")
    k = min(k, len(P))
    out = np.empty(len(Q), dtype=L.dtype)
    for s in range(0, len(Q), chunk):
        q = Q[s:s + chunk]
        d2 = ((q[:, None, :] - P[None, :, :]) ** 2).sum(axis=2)
        if k == 1:
            out[s:s + chunk] = L[np.argmin(d2, axis=1)]
            continue
        nn = np.argsort(d2, axis=1, kind="stable")[:, :k]
        for row, idx in enumerate(nn):
            vals, counts = np.unique(L[idx], return_counts=True)
            out[s + row] = vals[np.argmax(counts)]
    return out


def knn_classify(prototypes, labels, query, k: int = 1):
    """Label of a single query point."""
    return knn_predict(prototypes, labels, [query], k)[0]


# ---------------------------------------------------------------------------
# metrics


def contraharmonic_mean(xs) -> float:
    """Sum of squares over sum; 0 for an all-zero list."""
    x = np.asarray(list(xs), dtype=float)
    if x.size == 0:
        raise EmptyInput("contraharmonic mean of an empty list")
    if (x < 0).any():
        raise ValueError("contraharmonic mean needs nonnegative values")
    s = x.sum()
    return float((x * x).sum() / s) if s > 0 else 0.0


def overall_quality(er: float, rr: float, alpha: float = 1.0, beta: float = 1.0) -> float:
    """``100 - (alpha*ER + beta*RR) / (alpha + beta)``."""
    if alpha + beta == 0:
        raise ZeroWeights("alpha + beta must be nonzero")
    return 100.0 - (alpha * er + beta * rr) / (alpha + beta)


@dataclass
class Metrics:
    er: list[float]
    rr: list[float]
    wall_time: float = 0.0
    folds: int = 10
    repeats: int = 10
    extra: dict = field(default_factory=dict)

    @property
    def er_mean(self) -> float:
        return float(np.mean(self.er))

    @property
    def rr_mean(self) -> float:
        return float(np.mean(self.rr))

    @property
    def er_contraharmonic(self) -> float:
        return contraharmonic_mean(self.er)

    @property
    def rr_contraharmonic(self) -> float:
        return contraharmonic_mean(self.rr)

    def quality(self, alpha: float = 1.0, beta: float = 1.0, contraharmonic: bool = False) -> float:
        if contraharmonic:
            return overall_quality(self.er_contraharmonic, self.rr_contraharmonic, alpha, beta)
        return overall_quality(self.er_mean, self.rr_mean, alpha, beta)


# ---------------------------------------------------------------------------
# cross-validation


def stratified_folds(y, folds: int, rng: np.random.Generator) -> np.ndarray:
    """Fold id per row: each class is shuffled and dealt round-robin, the
    dealing position carrying over from one class to the next so fold sizes
    differ by at most one."""
    y = np.asarray(y)
    out = np.empty(len(y), dtype=int)
    pos = 0
    for c in np.unique(y):
        idx = np.flatnonzero(y == c)
        rng.shuffle(idx)
        out[idx] = (pos + np.arange(len(idx))) % folds
        pos = (pos + len(idx)) % folds
    return out


def _indices(sel) -> np.ndarray:
    idx = getattr(sel, "indices", sel)
    return np.asarray(list(idx), dtype=int)


def select_all(X, y) -> np.ndarray:
    """The identity selector: keep the whole training set."""
    return np.arange(len(y))


def cross_validate(d: RawDataset, selector: Callable = select_all, folds: int = 10, repeats: int = 10,
                   seed: int = 0, progress: Callable | None = None) -> Metrics:
    """Repeated stratified k-fold evaluation of ``selector`` with 1-NN."""
    runs = cross_validate_sets(d, lambda X, y: {"selection": selector(X, y)}, folds, repeats, seed, progress)
    return runs["selection"]


def cross_validate_sets(d: RawDataset, selector: Callable, folds: int = 10, repeats: int = 10,
                        seed: int = 0, progress: Callable | None = None) -> dict[str, Metrics]:
    """Like :func:`cross_validate` for a selector returning several named
    index sets per training block (e.g. both actors of an adversarial run);
    every set is scored on the same splits."""
    if folds < 2:
        raise ValueError(f"folds must be >= 2, got {folds}")
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    if len(d) < folds:
        raise TooFewRows(f"{len(d)} rows cannot fill {folds} folds")
    rng = np.random.default_rng(seed)
    er: dict[str, list[float]] = {}
    rr: dict[str, list[float]] = {}
    t0 = time.perf_counter()
    for rep in range(repeats):
        assign = stratified_folds(d.y, folds, rng)
        for f in range(folds):
            test = assign == f
            Xtr, ytr = d.X[~test], d.y[~test]
            for name, sel in selector(Xtr, ytr).items():
                chosen = _indices(sel)
                if len(chosen):
                    pred = knn_predict(Xtr[chosen], ytr[chosen], d.X[test])
                    e = 100.0 * float(np.mean(pred != d.y[test]))
                else:
                    e = 100.0
                er.setdefault(name, []).append(e)
                rr.setdefault(name, []).append(100.0 * len(chosen) / len(ytr))
                if progress is not None:
                    progress(rep, f, name, er[name][-1], rr[name][-1])
    wall = time.perf_counter() - t0
    return {name: Metrics(er[name], rr[name], wall, folds, repeats) for name in er}
