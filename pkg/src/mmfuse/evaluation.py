"""Stratified k-fold cross-validation, accuracy, AUC and averaged summaries."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .dataset import Dataset
from .errors import DataError
from .learners import LearnerSpec, VoteSpec, argmax_label, train


@dataclass(frozen=True)
class FoldAssignment:
    folds: tuple[int, ...]
    k: int
    seed: int

    def test_indices(self, f: int) -> np.ndarray:
        return np.flatnonzero(np.asarray(self.folds) == f)

    def train_indices(self, f: int) -> np.ndarray:
        return np.flatnonzero(np.asarray(self.folds) != f)


def stratified_folds(labels, k: int, seed: int = 1) -> FoldAssignment:
    """Shuffle each class with a seeded RNG, then deal round-robin into ``k`` folds.

    Dealing continues across classes (class order = label index order), so
    fold sizes differ by at most one.
    """
    labels = np.asarray(labels)
    n = len(labels)
    if k < 2:
        raise DataError("k must be at least 2")
    if k > n:
        raise DataError(f"k={k} exceeds the number of instances ({n})")
    rng = np.random.default_rng(seed)
    folds = np.empty(n, dtype=np.intp)
    pos = 0
    for c in np.unique(labels):
        members = np.flatnonzero(labels == c)
        for m in members[rng.permutation(len(members))]:
            folds[m] = pos % k
            pos += 1
    return FoldAssignment(tuple(int(f) for f in folds), k, seed)


def accuracy(predicted, actual) -> float:
    """Percentage of correct predictions."""
    predicted, actual = list(predicted), list(actual)
    if len(predicted) != len(actual):
        raise DataError(f"length mismatch: {len(predicted)} predictions, {len(actual)} labels")
    if not actual:
        raise DataError("accuracy of an empty prediction set is undefined")
    return 100.0 * sum(p == a for p, a in zip(predicted, actual)) / len(actual)


def auc(scores, labels, positive=0) -> float:
    """Area under the ROC curve for ``positive`` via midrank Mann-Whitney U."""
    scores = np.asarray(scores, dtype=np.float64)
    is_pos = np.array([l == positive for l in labels], dtype=bool)
    if scores.shape != is_pos.shape:
        raise DataError("scores and labels differ in length")
    p = int(is_pos.sum())
    f = len(is_pos) - p
    if p == 0 or f == 0:
        raise DataError("AUC is undefined unless both classes are present")
    ranks = kernels.midranks(scores)
    u = ranks[is_pos].sum() - p * (p + 1) / 2.0
    return float(u / (p * f))


@dataclass
class EvalReport:
    mode: str
    representation: str
    algorithm: str
    ids: tuple[str, ...]
    actual: tuple[str, ...]
    predicted: tuple[str, ...]
    pass_probability: tuple[float, ...]
    accuracy_pct: float
    auc: float
    k: int
    seed: int

    @property
    def cell(self) -> tuple[str, str, str]:
        return self.mode, self.representation, self.algorithm

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("ids", "actual", "predicted", "pass_probability"):
            d[key] = list(d[key])
        return d

    @classmethod
    def from_dict(cls, d) -> EvalReport:
        d = dict(d)
        for key in ("ids", "actual", "predicted"):
            d[key] = tuple(d[key])
        d["pass_probability"] = tuple(float(v) for v in d["pass_probability"])
        return cls(**d)


def merge_columns(parts: Sequence[Dataset]) -> Dataset:
    """Side-by-side merge of datasets sharing ids and labels (e.g. per-source views)."""
    first = parts[0]
    for p in parts[1:]:
        if p.ids != first.ids or not np.array_equal(p.labels, first.labels):
            raise DataError("per-source datasets must share ids and labels in the same order")
    from .dataset import AttributeSchema
    schema = AttributeSchema(tuple(a for p in parts for a in p.schema.attributes), first.schema.class_labels)
    return first.replace(schema=schema, X=np.hstack([p.X for p in parts]))


def _fitter(learner) -> Callable[[Dataset], object]:
    if isinstance(learner, (LearnerSpec, VoteSpec)):
        return lambda ds: train(learner, ds)
    if callable(learner):
        return learner
    raise TypeError(f"cannot train {learner!r}")


def cross_validate(learner, dataset, k: int = 10, seed: int = 1, *, mode: str = "",
                   representation: str = "", algorithm: str | None = None,
                   folds: FoldAssignment | None = None) -> EvalReport:
    """Pooled out-of-fold predictions and metrics for one learner.

    ``learner`` is a LearnerSpec, a VoteSpec, or any callable mapping a
    training Dataset to an object with ``distribution(row)``.  ``dataset``
    may be a list of per-source datasets; they share one fold assignment.
    """
    if isinstance(dataset, (list, tuple)):
        dataset = merge_columns(dataset)
    if dataset.labels is None:
        raise DataError("cross-validation needs labelled data")
    fit = _fitter(learner)
    folds = folds or stratified_folds(dataset.labels, k, seed)
    if len(folds.folds) != len(dataset):
        raise DataError("fold assignment does not match the dataset")
    n_classes = len(dataset.schema.class_labels)
    dists = np.zeros((len(dataset), n_classes))
    for f in range(folds.k):
        test = folds.test_indices(f)
        if len(test) == 0:
            continue
        model = fit(dataset.take(folds.train_indices(f)))
        for i in test:
            dists[i] = model.distribution(dataset.X[i])
    labels = dataset.schema.class_labels
    pred = tuple(labels[argmax_label(d)] for d in dists)
    actual = tuple(labels[i] for i in dataset.labels)
    if algorithm is None:
        algorithm = getattr(learner, "algorithm", getattr(learner, "__name__", "custom"))
    return EvalReport(mode, representation, algorithm, dataset.ids, actual, pred,
                      tuple(float(d[0]) for d in dists), accuracy(pred, actual),
                      auc(dists[:, 0], actual, labels[0]), folds.k, folds.seed)


@dataclass(frozen=True)
class SummaryRow:
    mode: str
    representation: str
    accuracy_pct: float
    auc: float
    n_algorithms: int


def summarize(reports: Sequence[EvalReport]) -> list[SummaryRow]:
    """Unweighted mean accuracy and AUC per (mode, representation), first-seen order."""
    groups: dict[tuple[str, str], list[EvalReport]] = {}
    for r in reports:
        groups.setdefault((r.mode, r.representation), []).append(r)
    return [SummaryRow(m, rep, float(np.mean([r.accuracy_pct for r in rs])),
                       float(np.mean([r.auc for r in rs])), len(rs))
            for (m, rep), rs in groups.items()]
