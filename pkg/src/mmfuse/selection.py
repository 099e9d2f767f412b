"""Correlation-based feature subset selection (CFS).

Feature-class and feature-feature correlations are symmetric
uncertainties.  Numeric attributes are discretized for this purpose only,
with Fayyad-Irani MDL cuts on the class.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from itertools import combinations
from math import fsum, log2, sqrt
from typing import Sequence

import numpy as np

from . import kernels
from .dataset import Dataset
from .errors import DataError
from .preprocess import project

MAX_STALE = 5
MAX_EXHAUSTIVE = 20


@dataclass(frozen=True)
class FeatureSubset:
    indices: tuple[int, ...]
    merit: float
    names: tuple[str, ...] = ()
    trace: tuple[tuple[tuple[int, ...], float], ...] = field(default=(), repr=False, compare=False)

    def __len__(self):
        return len(self.indices)


def _codes(col) -> tuple[np.ndarray, int]:
    uniq, inv = np.unique(np.asarray(col), return_inverse=True)
    return inv.astype(np.intp), len(uniq)


def symmetric_uncertainty(a, b) -> float:
    """2 I(a; b) / (H(a) + H(b)) for two discrete columns; 0 if either is constant."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise DataError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    if a.size == 0:
        return 0.0
    ca, na = _codes(a)
    cb, nb = _codes(b)
    table = kernels.contingency(ca, cb, na, nb)
    ha = kernels.entropy(table.sum(axis=1))
    hb = kernels.entropy(table.sum(axis=0))
    if ha == 0.0 or hb == 0.0:
        return 0.0
    hab = kernels.entropy(table.ravel())
    su = 2.0 * (ha + hb - hab) / (ha + hb)
    return min(max(su, 0.0), 1.0)


def mdl_cut_points(values, labels, n_classes: int) -> list[float]:
    """Fayyad-Irani recursive entropy cuts accepted by the MDL criterion."""
    values = np.asarray(values, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.intp)
    n = len(values)
    if n < 2:
        return []
    gain, t, _ = kernels.best_split(values, labels, n_classes, 1)
    if gain <= 0:
        return []
    left = values <= t
    k = np.count_nonzero(np.bincount(labels, minlength=n_classes))
    k1 = np.count_nonzero(np.bincount(labels[left], minlength=n_classes))
    k2 = np.count_nonzero(np.bincount(labels[~left], minlength=n_classes))
    ent = kernels.entropy(np.bincount(labels, minlength=n_classes))
    e1 = kernels.entropy(np.bincount(labels[left], minlength=n_classes))
    e2 = kernels.entropy(np.bincount(labels[~left], minlength=n_classes))
    delta = log2(3 ** k - 2) - (k * ent - k1 * e1 - k2 * e2)
    if gain <= (log2(n - 1) + delta) / n:
        return []
    return (mdl_cut_points(values[left], labels[left], n_classes) + [t]
            + mdl_cut_points(values[~left], labels[~left], n_classes))


def discretize_for_correlation(dataset: Dataset) -> np.ndarray:
    """Integer-coded copy of ``dataset.X`` (MDL bins for numeric columns)."""
    if dataset.labels is None:
        raise DataError("feature selection needs a labelled dataset")
    n_classes = len(dataset.schema.class_labels)
    out = np.empty(dataset.X.shape, dtype=np.intp)
    for j, a in enumerate(dataset.schema.attributes):
        col = dataset.X[:, j]
        if a.is_numeric:
            cuts = mdl_cut_points(col, dataset.labels, n_classes)
            out[:, j] = np.searchsorted(np.array(sorted(cuts)), col, side="left")
        else:
            out[:, j] = col.astype(np.intp)
    return out


class CfsEvaluator:
    """Precomputed correlations for fast subset merit evaluation."""

    def __init__(self, dataset: Dataset):
        codes = discretize_for_correlation(dataset)
        d = codes.shape[1]
        self.names = dataset.schema.names
        self.class_su = np.array([symmetric_uncertainty(codes[:, j], dataset.labels) for j in range(d)])
        self.pair_su = np.eye(d)
        for i, j in combinations(range(d), 2):
            self.pair_su[i, j] = self.pair_su[j, i] = symmetric_uncertainty(codes[:, i], codes[:, j])

    @property
    def d(self) -> int:
        return len(self.class_su)

    def merit(self, subset: Sequence[int]) -> float:
        s = sorted(subset)
        k = len(s)
        if k == 0:
            raise DataError("merit of an empty subset is undefined")
        num = fsum(self.class_su[i] for i in s)
        ff = fsum(self.pair_su[i, j] for i, j in combinations(s, 2))
        return num / sqrt(k + 2.0 * ff)

    def subset(self, indices, merit, trace=()) -> FeatureSubset:
        idx = tuple(sorted(int(i) for i in indices))
        return FeatureSubset(idx, float(merit), tuple(self.names[i] for i in idx), tuple(trace))


def cfs_merit(subset: Sequence[int], dataset: Dataset) -> float:
    """k * mean(r_cf) / sqrt(k + k (k - 1) * mean(r_ff)) over symmetric uncertainties."""
    if len(subset) == 0:
        raise DataError("merit of an empty subset is undefined")
    return CfsEvaluator(dataset).merit(subset)


def _fallback(ev: CfsEvaluator, best, best_merit, trace):
    if best and best_merit > 0:
        return ev.subset(best, best_merit, trace)
    j = int(np.argmax(ev.class_su))
    return ev.subset((j,), ev.merit((j,)), trace)


def select_best_first(dataset: Dataset, max_stale: int = MAX_STALE,
                      evaluator: CfsEvaluator | None = None) -> FeatureSubset:
    """Forward best-first search from the empty set, stopping after ``max_stale``
    consecutive expansions that fail to improve the best merit."""
    ev = evaluator or CfsEvaluator(dataset)
    if ev.d == 0:
        raise DataError("dataset has no attributes")
    heap: list = [(-0.0, ())]
    visited = {()}
    best, best_merit = (), 0.0
    trace = []
    stale = 0
    while heap and stale < max_stale:
        _, s = heapq.heappop(heap)
        improved = False
        for f in range(ev.d):
            if f in s:
                continue
            t = tuple(sorted(s + (f,)))
            if t in visited:
                continue
            visited.add(t)
            m = ev.merit(t)
            trace.append((t, m))
            heapq.heappush(heap, (-m, t))
            if m > best_merit:
                best, best_merit, improved = t, m, True
        stale = 0 if improved else stale + 1
    return _fallback(ev, best, best_merit, trace)


def select_exhaustive(dataset: Dataset, evaluator: CfsEvaluator | None = None) -> FeatureSubset:
    """Global merit maximizer over all non-empty subsets (smaller, then lexicographic, wins ties)."""
    ev = evaluator or CfsEvaluator(dataset)
    if ev.d == 0:
        raise DataError("dataset has no attributes")
    if ev.d > MAX_EXHAUSTIVE:
        raise DataError(f"exhaustive search limited to {MAX_EXHAUSTIVE} attributes, got {ev.d}")
    best, best_merit = None, -1.0
    for k in range(1, ev.d + 1):
        for s in combinations(range(ev.d), k):
            m = ev.merit(s)
            if m > best_merit:
                best, best_merit = s, m
    return ev.subset(best, best_merit)


def select_per_source(dataset: Dataset) -> dict[str, FeatureSubset]:
    """Best-first CFS run on each source's columns; indices refer to ``dataset``."""
    out = {}
    for src in dataset.schema.sources:
        cols = dataset.schema.indices_of(src)
        fs = select_best_first(project(dataset, cols))
        idx = tuple(cols[i] for i in fs.indices)
        out[src] = FeatureSubset(idx, fs.merit, tuple(dataset.schema.names[i] for i in idx), fs.trace)
    return out
