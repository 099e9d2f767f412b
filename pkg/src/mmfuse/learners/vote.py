"""Vote meta-classifier: arithmetic mean of base class distributions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dataset import AttributeSchema
from ..errors import DataError
from .base import LearnerSpec, Model, average_distributions


@dataclass(frozen=True)
class VoteMember:
    tag: str
    spec: LearnerSpec
    attributes: tuple[str, ...]


@dataclass(frozen=True)
class VoteSpec:
    """One base learner per member, each trained on its own attribute subset."""

    members: tuple[VoteMember, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise ValueError("a vote needs at least one base learner")

    @property
    def algorithm(self) -> str:
        algos = {m.spec.algorithm for m in self.members}
        return algos.pop() if len(algos) == 1 else "Vote"


class VoteModel(Model):
    def __init__(self, bases: list[tuple[str, Model]], spec: VoteSpec | None = None):
        if not bases:
            raise ValueError("a vote needs at least one base model")
        labels = bases[0][1].schema.class_labels
        if any(m.schema.class_labels != labels for _, m in bases):
            raise DataError("base models disagree on class labels")
        attrs, seen = [], {}
        for _, m in bases:
            for a in m.schema.attributes:
                if a.name in seen:
                    if seen[a.name] != a:
                        raise DataError(f"attribute {a.name!r} differs between base models")
                    continue
                seen[a.name] = a
                attrs.append(a)
        self.spec = spec
        self.schema = AttributeSchema(tuple(attrs), labels)
        self.bases = list(bases)
        self.columns = [np.array([self.schema.index(n) for n in m.schema.names], dtype=np.intp)
                        for _, m in bases]

    def base_distributions(self, row):
        row = self.check_row(row)
        return [m.distribution(row[cols]) for (_, m), cols in zip(self.bases, self.columns)]

    def distribution(self, row):
        return average_distributions(self.base_distributions(row))
