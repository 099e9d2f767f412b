"""Min-max normalization, equal-width binning, class cut-offs and projection."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .dataset import CATEGORICAL, Attribute, AttributeSchema, Dataset, write_dataset_csv
from .errors import DataError

THREE_BINS = ("LOW", "MEDIUM", "HIGH")


@dataclass(frozen=True)
class NormalizationParams:
    names: tuple[str, ...]
    mins: tuple[float, ...]
    maxs: tuple[float, ...]

    def __post_init__(self):
        for n, lo, hi in zip(self.names, self.mins, self.maxs):
            if lo > hi:
                raise DataError(f"attribute {n!r}: min {lo} > max {hi}")


@dataclass(frozen=True)
class BinningParams:
    names: tuple[str, ...]
    mins: tuple[float, ...]
    widths: tuple[float, ...]
    n_bins: int

    def __post_init__(self):
        if self.n_bins < 2:
            raise DataError("n_bins must be at least 2")
        if any(w < 0 for w in self.widths):
            raise DataError("bin widths must be non-negative")

    @property
    def bin_labels(self) -> tuple[str, ...]:
        return bin_labels(self.n_bins)


@dataclass(frozen=True)
class ClassCutoffs:
    """Cut-off points on the 0-10 mark scale and one label per interval.

    Intervals are ``[0, c1), [c1, c2), ..., [ck, 10]``; ``labels`` run in
    ascending mark order.
    """

    cutpoints: tuple[float, ...] = (5.0,)
    labels: tuple[str, ...] = ("FAIL", "PASS")

    def __post_init__(self):
        object.__setattr__(self, "cutpoints", tuple(float(c) for c in self.cutpoints))
        object.__setattr__(self, "labels", tuple(self.labels))
        c = self.cutpoints
        if any(b <= a for a, b in zip(c, c[1:])):
            raise DataError("cut-offs must be strictly increasing")
        if any(not 0.0 < x <= 10.0 for x in c):
            raise DataError("cut-offs must lie in (0, 10]")
        if len(self.labels) != len(c) + 1:
            raise DataError("need exactly one label per interval")
        if len(set(self.labels)) != len(self.labels):
            raise DataError("interval labels must be distinct")

    @classmethod
    def default(cls) -> ClassCutoffs:
        return cls()

    @property
    def class_order(self) -> tuple[str, ...]:
        """Labels from the highest interval down (PASS before FAIL)."""
        return tuple(reversed(self.labels))


def bin_labels(n_bins: int) -> tuple[str, ...]:
    if n_bins == 3:
        return THREE_BINS
    return tuple(f"BIN{i + 1}" for i in range(n_bins))


def _require_numeric(dataset: Dataset):
    bad = [a.name for a in dataset.schema.attributes if not a.is_numeric]
    if bad:
        raise DataError(f"attributes must be numeric: {', '.join(bad)}")


def min_max_normalize(dataset: Dataset, params: NormalizationParams | None = None):
    """Rescale every attribute to [0, 1] by (x - min) / (max - min).

    With ``params`` given, the stored ranges are reused and values outside
    them are clamped.  A constant attribute maps to 0.
    """
    _require_numeric(dataset)
    X = dataset.X
    if params is None:
        if len(dataset) == 0:
            raise DataError("cannot fit normalization on an empty dataset")
        mins = tuple(float(np.nanmin(X[:, j])) for j in range(X.shape[1]))
        maxs = tuple(float(np.nanmax(X[:, j])) for j in range(X.shape[1]))
        params = NormalizationParams(dataset.schema.names, mins, maxs)
    elif params.names != dataset.schema.names:
        raise DataError("normalization params do not match the dataset's attributes")
    Z = apply_normalization(X, params)
    return dataset.replace(X=Z), params


def apply_normalization(X, params: NormalizationParams) -> np.ndarray:
    """Array-level min-max rescaling with stored ranges (clamped to [0, 1])."""
    X = np.asarray(X, dtype=np.float64)
    Z = np.empty_like(X)
    for j, (lo, hi) in enumerate(zip(params.mins, params.maxs)):
        if hi > lo:
            Z[..., j] = np.clip((X[..., j] - lo) / (hi - lo), 0.0, 1.0)
        else:
            Z[..., j] = np.where(np.isnan(X[..., j]), np.nan, 0.0)
    return Z


def apply_binning(X, params: BinningParams) -> np.ndarray:
    """Array-level bin indices with stored bin edges."""
    X = np.asarray(X, dtype=np.float64)
    B = np.empty_like(X)
    n = params.n_bins
    flat_x = X.reshape(-1, X.shape[-1])
    flat_b = B.reshape(-1, X.shape[-1])
    for j, (lo, w) in enumerate(zip(params.mins, params.widths)):
        for i, x in enumerate(flat_x[:, j]):
            flat_b[i, j] = np.nan if math.isnan(x) else _bin_index(float(x), lo, w, n)
    return B


def _bin_index(x: float, lo: float, w: float, n: int) -> int:
    if w <= 0 or x <= lo:
        return 0
    k = min(int(math.floor((x - lo) / w)), n - 1)
    # settle float rounding against the literal boundaries lo + i*w
    while k + 1 < n and x >= lo + (k + 1) * w:
        k += 1
    while k > 0 and x < lo + k * w:
        k -= 1
    return k


def equal_width_discretize(dataset: Dataset, n_bins: int = 3, params: BinningParams | None = None):
    """Assign each value to one of ``n_bins`` equal-width bins.

    Bins are half-open ``[min + i*w, min + (i+1)*w)`` with the last bin
    closed at max.  Out-of-range values (held-out data) go to the end bins.
    """
    if n_bins < 2:
        raise DataError("n_bins must be at least 2")
    _require_numeric(dataset)
    X = dataset.X
    if params is None:
        if len(dataset) == 0:
            raise DataError("cannot fit binning on an empty dataset")
        mins, widths = [], []
        for j in range(X.shape[1]):
            lo, hi = float(np.nanmin(X[:, j])), float(np.nanmax(X[:, j]))
            mins.append(lo)
            widths.append((hi - lo) / n_bins)
        params = BinningParams(dataset.schema.names, tuple(mins), tuple(widths), n_bins)
    elif params.names != dataset.schema.names:
        raise DataError("binning params do not match the dataset's attributes")
    n = params.n_bins
    B = apply_binning(X, params)
    labels = bin_labels(n)
    schema = AttributeSchema(
        tuple(Attribute(a.name, a.source, CATEGORICAL, labels) for a in dataset.schema.attributes),
        dataset.schema.class_labels)
    return dataset.replace(schema=schema, X=B), params


def discretize_class(scores: Iterable[float], cutoffs: ClassCutoffs | None = None) -> list[str]:
    """Map raw 0-10 marks to class labels (default: >= 5 PASS, else FAIL)."""
    cutoffs = cutoffs or ClassCutoffs.default()
    out = []
    for s in scores:
        s = float(s)
        if not 0.0 <= s <= 10.0:
            raise DataError(f"mark {s} outside [0, 10]")
        k = sum(1 for c in cutoffs.cutpoints if s >= c)
        out.append(cutoffs.labels[k])
    return out


def project(dataset: Dataset, subset) -> Dataset:
    """Restrict to a subset of attributes (indices or a FeatureSubset), schema order kept."""
    indices = getattr(subset, "indices", subset)
    idx = sorted(set(int(i) for i in indices))
    if not idx:
        raise DataError("cannot project onto an empty attribute subset")
    d = dataset.n_attributes
    bad = [i for i in idx if not 0 <= i < d]
    if bad:
        raise DataError(f"attribute index out of range: {bad}")
    return dataset.replace(schema=dataset.schema.select(idx), X=dataset.X[:, idx])


def project_names(dataset: Dataset, names: Sequence[str]) -> Dataset:
    try:
        return project(dataset, [dataset.schema.index(n) for n in names])
    except KeyError as exc:
        raise DataError(f"unknown attribute {exc}") from None


def impute_missing(dataset: Dataset, reference: Dataset | None = None) -> Dataset:
    """Fill NaN cells with the reference data's mean (numeric) or mode (categorical)."""
    ref = reference if reference is not None else dataset
    X = np.array(dataset.X, copy=True)
    for j, a in enumerate(dataset.schema.attributes):
        col = ref.X[:, j]
        col = col[~np.isnan(col)]
        if a.is_numeric:
            fill = float(col.mean()) if col.size else 0.0
        else:
            fill = float(np.bincount(col.astype(np.intp), minlength=len(a.categories)).argmax()) if col.size else 0.0
        X[np.isnan(X[:, j]), j] = fill
    return dataset.replace(X=X)


def emit_derived(dataset: Dataset, stem, n_bins: int = 3, header_lines: Sequence[str] = ()):
    """Write ``<stem>.numeric.csv`` and ``<stem>.discrete.csv``; return both paths."""
    stem = Path(stem)
    numeric, _ = min_max_normalize(dataset)
    discrete, _ = equal_width_discretize(numeric, n_bins)
    p_num = stem.with_name(stem.name + ".numeric.csv")
    p_dis = stem.with_name(stem.name + ".discrete.csv")
    write_dataset_csv(numeric, p_num, header_lines=header_lines)
    write_dataset_csv(discrete, p_dis, header_lines=header_lines)
    return p_num, p_dis
