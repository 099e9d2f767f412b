"""Shared model contract: learner specs, conditions, rules and distributions."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from ..dataset import AttributeSchema
from ..errors import ConfigError, DataError

ALGORITHMS = ("C45Tree", "REPTree", "RandomTree", "Ripper", "PartRules", "NNGE")

ALIASES = {
    "c45tree": "C45Tree", "c45": "C45Tree", "j48": "C45Tree",
    "reptree": "REPTree",
    "randomtree": "RandomTree",
    "ripper": "Ripper", "jrip": "Ripper",
    "partrules": "PartRules", "part": "PartRules",
    "nnge": "NNGE",
}

# name -> (default, validator)
_PARAMS = {
    "C45Tree": {
        "confidence": (0.25, lambda v: 0.0 < v <= 0.5),
        "min_leaf": (2, lambda v: int(v) == v and v >= 1),
        "pruned": (True, lambda v: isinstance(v, bool)),
    },
    "REPTree": {
        "min_leaf": (2, lambda v: int(v) == v and v >= 1),
        "prune_folds": (3, lambda v: int(v) == v and v >= 2),
        "pruned": (True, lambda v: isinstance(v, bool)),
    },
    "RandomTree": {
        "k": (0, lambda v: int(v) == v and v >= 0),
        "min_leaf": (1, lambda v: int(v) == v and v >= 1),
    },
    "Ripper": {
        "prune_folds": (3, lambda v: int(v) == v and v >= 2),
        "optimizations": (2, lambda v: int(v) == v and v >= 0),
        "dl_slack": (64.0, lambda v: v >= 0),
    },
    "PartRules": {
        "confidence": (0.25, lambda v: 0.0 < v <= 0.5),
        "min_leaf": (2, lambda v: int(v) == v and v >= 1),
    },
    "NNGE": {},
}


def canonical_algorithm(name: str) -> str:
    key = str(name).strip().lower()
    if key not in ALIASES:
        raise ConfigError(f"unknown algorithm {name!r}; expected one of {', '.join(ALGORITHMS)}")
    return ALIASES[key]


@dataclass(frozen=True)
class LearnerSpec:
    """Algorithm name, hyperparameters and seed for one learner."""

    algorithm: str
    params: dict = field(default_factory=dict)
    seed: int = 1

    def __post_init__(self):
        algo = canonical_algorithm(self.algorithm)
        object.__setattr__(self, "algorithm", algo)
        table = _PARAMS[algo]
        merged = {k: d for k, (d, _) in table.items()}
        for k, v in dict(self.params).items():
            if k not in table:
                raise ConfigError(f"{algo}: unknown hyperparameter {k!r}")
            if not table[k][1](v):
                raise ConfigError(f"{algo}: hyperparameter {k}={v!r} out of range")
            merged[k] = v
        object.__setattr__(self, "params", merged)
        if not isinstance(self.seed, (int, np.integer)):
            raise ConfigError("seed must be an integer")

    def __getitem__(self, key):
        return self.params[key]


def argmax_label(dist) -> int:
    """Index of the largest entry; exact ties go to the earlier class."""
    dist = np.asarray(dist)
    best = 0
    for i in range(1, len(dist)):
        if dist[i] > dist[best]:
            best = i
    return best


def counts_to_distribution(counts, fallback: int | None = None) -> np.ndarray:
    """Relative class frequencies; all-zero counts give a one-hot on ``fallback``."""
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    if total > 0:
        return counts / total
    out = np.zeros(len(counts))
    out[0 if fallback is None else fallback] = 1.0
    return out


def average_distributions(dists: Sequence[np.ndarray]) -> np.ndarray:
    """Component-wise arithmetic mean, accumulated in list order."""
    if not dists:
        raise ValueError("nothing to average")
    acc = np.zeros(len(dists[0]))
    for d in dists:
        acc = acc + d
    return acc / len(dists)


def label_of_counts(counts, fallback: int = 0) -> int:
    return argmax_label(counts_to_distribution(counts, fallback))


def format_number(v) -> str:
    v = float(v)
    if v == int(v) and abs(v) < 2 ** 53:
        return str(int(v))
    return repr(v)


def format_counts(labels: Sequence[str], counts) -> str:
    return "(" + ", ".join(f"{l}={format_number(c)}" for l, c in zip(labels, counts)) + ")"


@dataclass(frozen=True)
class Condition:
    """A single test on one attribute.

    ``op`` is one of ``<=``, ``>``, ``<``, ``>=`` (numeric threshold),
    ``=`` (category index) or ``in`` (set of category indices).
    """

    attr: int
    op: str
    value: Any

    def test(self, row) -> bool:
        v = row[self.attr]
        op = self.op
        if op == "<=":
            return v <= self.value
        if op == ">":
            return v > self.value
        if op == "<":
            return v < self.value
        if op == ">=":
            return v >= self.value
        if op == "=":
            return int(v) == self.value
        if op == "in":
            return int(v) in self.value
        raise ValueError(f"unknown operator {op!r}")

    def mask(self, X) -> np.ndarray:
        col = X[:, self.attr]
        op = self.op
        if op == "<=":
            return col <= self.value
        if op == ">":
            return col > self.value
        if op == "<":
            return col < self.value
        if op == ">=":
            return col >= self.value
        if op == "=":
            return col == self.value
        return np.isin(col, list(self.value))

    def render(self, schema: AttributeSchema) -> str:
        a = schema.attributes[self.attr]
        if self.op == "=":
            return f"{a.name} = {a.categories[self.value]}"
        if self.op == "in":
            return f"{a.name} in {{{', '.join(a.categories[i] for i in sorted(self.value))}}}"
        return f"{a.name} {self.op} {float(self.value)!r}"


@dataclass
class Rule:
    conditions: tuple[Condition, ...]
    counts: np.ndarray
    target: int

    def covers(self, row) -> bool:
        return all(c.test(row) for c in self.conditions)

    def mask(self, X) -> np.ndarray:
        m = np.ones(len(X), dtype=bool)
        for c in self.conditions:
            m &= c.mask(X)
        return m

    @property
    def distribution(self) -> np.ndarray:
        return counts_to_distribution(self.counts, self.target)

    @property
    def label(self) -> int:
        return argmax_label(self.distribution)


class Model:
    """Trained classifier bound to its training schema."""

    spec: LearnerSpec
    schema: AttributeSchema

    def distribution(self, row) -> np.ndarray:
        raise NotImplementedError

    def check_row(self, row) -> np.ndarray:
        row = np.asarray(row, dtype=np.float64)
        if row.shape != (len(self.schema),):
            raise DataError(f"instance has {row.shape[-1] if row.ndim else 0} values, "
                            f"model expects {len(self.schema)}")
        return row

    def label(self, row) -> int:
        return argmax_label(self.distribution(row))

    def distributions(self, X) -> np.ndarray:
        return np.vstack([self.distribution(r) for r in np.asarray(X)]) if len(X) else \
            np.zeros((0, len(self.schema.class_labels)))


class RuleListModel(Model):
    """Ordered rule list ending with a catch-all default rule."""

    def __init__(self, spec, schema, rules: list[Rule]):
        if not rules or rules[-1].conditions:
            raise ValueError("rule list must end with a default rule")
        self.spec, self.schema, self.rules = spec, schema, rules

    def distribution(self, row):
        row = self.check_row(row)
        for r in self.rules:
            if r.covers(row):
                return r.distribution
        raise AssertionError("default rule must fire")

    def fire_counts(self, X, y, n_classes):
        """Recompute each rule's counts from first-match coverage of (X, y)."""
        left = np.ones(len(X), dtype=bool)
        for r in self.rules:
            m = r.mask(X) & left
            r.counts = np.bincount(y[m], minlength=n_classes).astype(np.float64)
            left &= ~m


def class_counts(y, n_classes) -> np.ndarray:
    return np.bincount(np.asarray(y, dtype=np.intp), minlength=n_classes).astype(np.float64)
