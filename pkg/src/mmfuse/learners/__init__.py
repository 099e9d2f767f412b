"""White-box learners behind one contract: train, predict, export rules."""
from __future__ import annotations

from typing import Mapping

import numpy as np

from ..dataset import Dataset
from ..errors import DataError
from ..preprocess import project_names
from .base import ALGORITHMS, LearnerSpec, Model, RuleListModel, argmax_label, canonical_algorithm
from .nnge import ExemplarModel, build_nnge
from .part import build_part
from .ripper import build_ripper
from .rules import export_rules, interpret_rules, parse_rules
from .trees import TreeModel, build_c45, build_random_tree, build_reptree
from .vote import VoteMember, VoteModel, VoteSpec

BUILDERS = {
    "C45Tree": build_c45,
    "REPTree": build_reptree,
    "RandomTree": build_random_tree,
    "Ripper": build_ripper,
    "PartRules": build_part,
    "NNGE": build_nnge,
}


def train(spec, dataset: Dataset) -> Model:
    """Fit a single learner (LearnerSpec) or a vote (VoteSpec) on a labelled dataset."""
    if isinstance(spec, VoteSpec):
        bases = [(m.tag, train(m.spec, project_names(dataset, m.attributes))) for m in spec.members]
        return VoteModel(bases, spec)
    if dataset.labels is None:
        raise DataError("training data must be labelled")
    if len(dataset) == 0:
        raise DataError("cannot train on an empty dataset")
    if dataset.has_missing:
        raise DataError("training data has missing values; impute them first")
    return BUILDERS[spec.algorithm](spec, dataset.schema, np.asarray(dataset.X), np.asarray(dataset.labels))


def _as_row(model: Model, instance):
    if isinstance(instance, Mapping):
        row = []
        for a in model.schema.attributes:
            if a.name not in instance:
                raise DataError(f"instance lacks attribute {a.name!r}")
            v = instance[a.name]
            if not a.is_numeric and isinstance(v, str):
                if v not in a.categories:
                    raise DataError(f"{a.name}: unknown category {v!r}")
                v = a.categories.index(v)
            row.append(float(v))
        return np.array(row)
    return instance


def predict_distribution(model: Model, instance) -> np.ndarray:
    """Class probabilities in schema label order."""
    return model.distribution(_as_row(model, instance))


def predict_label(model: Model, instance) -> str:
    return model.schema.class_labels[argmax_label(predict_distribution(model, instance))]


__all__ = [
    "ALGORITHMS", "LearnerSpec", "Model", "TreeModel", "RuleListModel", "ExemplarModel",
    "VoteMember", "VoteModel", "VoteSpec", "canonical_algorithm", "export_rules",
    "interpret_rules", "parse_rules", "predict_distribution", "predict_label", "train",
]
