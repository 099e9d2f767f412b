"""PART-style rule lists built from partial pruned C4.5 trees."""
from __future__ import annotations

import numpy as np

from .. import kernels
from .base import Rule, RuleListModel, class_counts, label_of_counts
from .trees import Node, _estimated_leaf, _Grower, choose_gain_ratio, partition


class _PartialBuilder(_Grower):
    def __init__(self, X, y, schema, min_leaf, cf):
        super().__init__(X, y, schema, min_leaf, choose_gain_ratio)
        self.cf = cf

    def expand(self, idx, parent_counts=None) -> Node:
        if len(idx) == 0:
            return Node(parent_counts, np.zeros(self.n_classes))
        counts = class_counts(self.y[idx], self.n_classes)
        node = Node(counts)
        if np.count_nonzero(counts) <= 1 or len(idx) < 2 * self.min_leaf:
            return node
        split = self.chooser(self, idx)
        if split is None:
            return node
        parts = partition(self.X, idx, split, self.n_cats[split.attr])
        node.split = split
        node.children = [None] * len(parts)
        for i, p in enumerate(parts):
            if len(p) == 0:
                node.children[i] = Node(counts, np.zeros(self.n_classes))
        order = sorted((i for i, p in enumerate(parts) if len(p)),
                       key=lambda i: (kernels.entropy(class_counts(self.y[parts[i]], self.n_classes)), i))
        for i in order:
            child = self.expand(parts[i], counts)
            node.children[i] = child
            if not child.is_leaf:
                break
        if all(c is not None and c.is_leaf for c in node.children):
            tree_err = sum(_estimated_leaf(c, self.cf) for c in node.children)
            if _estimated_leaf(node, self.cf) <= tree_err + 0.1:
                node.make_leaf()
        return node


def _best_leaf(node, path=()):
    """(coverage, conditions, leaf) of the expanded leaf covering most instances."""
    if node.is_leaf:
        return float(node.train.sum()), path, node
    best = None
    for cond, child in zip(node.child_conditions(), node.children):
        if child is None:
            continue
        cand = _best_leaf(child, path + (cond,))
        if best is None or cand[0] > best[0]:
            best = cand
    return best


def build_part(spec, schema, X, y) -> RuleListModel:
    n_classes = len(schema.class_labels)
    builder = _PartialBuilder(X, y, schema, spec["min_leaf"], spec["confidence"])
    remaining = np.arange(len(y))
    rules: list[Rule] = []
    while len(remaining):
        root = builder.expand(remaining)
        if root.is_leaf:
            break
        cover, conds, leaf = _best_leaf(root)
        rule = Rule(tuple(conds), leaf.train.copy(), label_of_counts(leaf.train))
        covered = rule.mask(X[remaining])
        if cover <= 0 or not covered.any():
            break
        rules.append(rule)
        remaining = remaining[~covered]
    counts = class_counts(y[remaining] if len(remaining) else y, n_classes)
    rules.append(Rule((), counts, label_of_counts(counts)))
    return RuleListModel(spec, schema, rules)
