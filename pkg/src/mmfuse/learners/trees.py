"""C4.5-style, reduced-error-pruned and random decision trees."""
from __future__ import annotations

from dataclasses import dataclass
from math import sqrt
from statistics import NormalDist

import numpy as np

from .. import kernels
from .base import Condition, Model, argmax_label, class_counts, counts_to_distribution, label_of_counts


@dataclass
class Split:
    attr: int
    gain: float
    split_info: float
    threshold: float | None = None  # None for a multiway categorical split

    @property
    def gain_ratio(self) -> float:
        return self.gain / self.split_info if self.split_info > 0 else 0.0


class Node:
    """Tree node.

    ``counts`` drive prediction (an empty branch inherits its parent's);
    ``train`` holds the class counts of training instances actually
    reaching the node.
    """

    __slots__ = ("counts", "train", "split", "children")

    def __init__(self, counts, train=None):
        self.counts = np.asarray(counts, dtype=np.float64)
        self.train = self.counts.copy() if train is None else np.asarray(train, dtype=np.float64)
        self.split: Split | None = None
        self.children: list[Node] = []

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def make_leaf(self):
        self.split = None
        self.children = []

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def leaves(self):
        if self.is_leaf:
            yield self
        else:
            for c in self.children:
                yield from c.leaves()

    def child_conditions(self) -> list[Condition]:
        s = self.split
        if s.threshold is not None:
            return [Condition(s.attr, "<=", s.threshold), Condition(s.attr, ">", s.threshold)]
        return [Condition(s.attr, "=", v) for v in range(len(self.children))]

    def route(self, row) -> Node:
        s = self.split
        if s.threshold is not None:
            return self.children[0] if row[s.attr] <= s.threshold else self.children[1]
        return self.children[int(row[s.attr])]

    def paths(self, prefix=()):
        """Yield (conditions, leaf) for every root-to-leaf path."""
        if self.is_leaf:
            yield prefix, self
            return
        for cond, child in zip(self.child_conditions(), self.children):
            yield from child.paths(prefix + (cond,))


class TreeModel(Model):
    def __init__(self, spec, schema, root: Node):
        self.spec, self.schema, self.root = spec, schema, root

    def leaf(self, row) -> Node:
        node = self.root
        while not node.is_leaf:
            node = node.route(row)
        return node

    def distribution(self, row):
        row = self.check_row(row)
        return counts_to_distribution(self.leaf(row).counts)

    @property
    def size(self) -> int:
        return self.root.size()

    @property
    def n_leaves(self) -> int:
        return sum(1 for _ in self.root.leaves())


# -- split evaluation ----------------------------------------------------------

def evaluate_split(X, y, idx, j, numeric, n_cats, n_classes, min_leaf) -> Split | None:
    """Best split on attribute ``j`` for rows ``idx``; None if no valid split."""
    col = X[idx, j]
    ys = y[idx]
    if numeric:
        gain, t, si = kernels.best_split(col, ys, n_classes, min_leaf)
        if gain < 0:
            return None
        return Split(j, gain, si, t)
    table = kernels.contingency(col.astype(np.intp), ys, n_cats, n_classes)
    sizes = table.sum(axis=1)
    if np.count_nonzero(sizes >= min_leaf) < 2:
        return None
    n = len(idx)
    base = kernels.entropy(table.sum(axis=0))
    cond = sum(s / n * kernels.entropy(row) for s, row in zip(sizes, table) if s > 0)
    return Split(j, base - cond, kernels.entropy(sizes))


def partition(X, idx, split: Split, n_cats):
    col = X[idx, split.attr]
    if split.threshold is not None:
        m = col <= split.threshold
        return [idx[m], idx[~m]]
    return [idx[col == v] for v in range(n_cats)]


class _Grower:
    def __init__(self, X, y, schema, min_leaf, chooser):
        self.X, self.y = X, y
        self.n_classes = len(schema.class_labels)
        self.numeric = schema.numeric_mask
        self.n_cats = [len(a.categories) for a in schema.attributes]
        self.min_leaf = min_leaf
        self.chooser = chooser

    def splits(self, idx, attrs):
        out = []
        for j in attrs:
            s = evaluate_split(self.X, self.y, idx, j, self.numeric[j], self.n_cats[j],
                               self.n_classes, self.min_leaf)
            if s is not None:
                out.append(s)
        return out

    def grow(self, idx, parent_counts=None) -> Node:
        if len(idx) == 0:
            return Node(parent_counts, np.zeros(self.n_classes))
        counts = class_counts(self.y[idx], self.n_classes)
        node = Node(counts)
        if np.count_nonzero(counts) <= 1 or len(idx) < 2 * self.min_leaf:
            return node
        split = self.chooser(self, idx)
        if split is None:
            return node
        node.split = split
        node.children = [self.grow(part, counts)
                         for part in partition(self.X, idx, split, self.n_cats[split.attr])]
        return node


def choose_gain_ratio(grower, idx):
    cands = [s for s in grower.splits(idx, range(grower.X.shape[1])) if s.gain > 1e-12]
    if not cands:
        return None
    avg = sum(s.gain for s in cands) / len(cands)
    best = None
    for s in cands:
        if s.gain >= avg - 1e-3 and (best is None or s.gain_ratio > best.gain_ratio):
            best = s
    return best


def choose_info_gain(grower, idx):
    best = None
    for s in grower.splits(idx, range(grower.X.shape[1])):
        if s.gain > 1e-12 and (best is None or s.gain > best.gain):
            best = s
    return best


# -- pessimistic pruning -------------------------------------------------------

def added_errors(n, e, cf) -> float:
    """Upper-confidence-bound correction for ``e`` errors in ``n`` instances."""
    if n <= 0:
        return 0.0
    if e < 1:
        base = n * (1 - cf ** (1.0 / n))
        if e == 0:
            return base
        return base + e * (added_errors(n, 1, cf) - base)
    if e + 0.5 >= n:
        return max(n - e, 0.0)
    z = NormalDist().inv_cdf(1 - cf)
    f = (e + 0.5) / n
    r = (f + z * z / (2 * n) + z * sqrt(f / n - f * f / n + z * z / (4 * n * n))) / (1 + z * z / n)
    return r * n - e


def _leaf_errors(node):
    t = node.train
    return float(t.sum() - t.max()) if t.sum() > 0 else 0.0


def _estimated_leaf(node, cf):
    e = _leaf_errors(node)
    return e + added_errors(float(node.train.sum()), e, cf)


def _estimated_subtree(node, cf):
    if node.is_leaf:
        return _estimated_leaf(node, cf)
    return sum(_estimated_subtree(c, cf) for c in node.children)


def _training_errors(node):
    if node.is_leaf:
        return _leaf_errors(node)
    return sum(_training_errors(c) for c in node.children)


def collapse(node):
    """Drop subtrees that do not reduce training error."""
    if node.is_leaf:
        return
    if _training_errors(node) >= _leaf_errors(node) - 1e-3:
        node.make_leaf()
        return
    for c in node.children:
        collapse(c)


def pessimistic_prune(node, cf):
    """Bottom-up subtree replacement by estimated (pessimistic) error."""
    if node.is_leaf:
        return
    for c in node.children:
        pessimistic_prune(c, cf)
    if _estimated_leaf(node, cf) <= _estimated_subtree(node, cf) + 0.1:
        node.make_leaf()


# -- learners ------------------------------------------------------------------

def build_c45(spec, schema, X, y) -> TreeModel:
    g = _Grower(X, y, schema, spec["min_leaf"], choose_gain_ratio)
    root = g.grow(np.arange(len(y)))
    if spec["pruned"]:
        collapse(root)
        pessimistic_prune(root, spec["confidence"])
    return TreeModel(spec, schema, root)


def stratified_holdout(y, n_folds, rng):
    """Boolean mask of a stratified ``1/n_folds`` holdout."""
    hold = np.zeros(len(y), dtype=bool)
    pos = 0
    for c in np.unique(y):
        members = np.flatnonzero(y == c)
        members = members[rng.permutation(len(members))]
        for m in members:
            if pos % n_folds == 0:
                hold[m] = True
            pos += 1
    return hold


def _route_counts(node, X, y, idx, n_classes, store):
    store[id(node)] = class_counts(y[idx], n_classes)
    if node.is_leaf:
        return
    for part, child in zip(partition(X, idx, node.split, len(node.children)), node.children):
        _route_counts(child, X, y, part, n_classes, store)


def _rep_prune(node, held):
    """Reduced-error pruning; returns holdout errors of the (pruned) subtree."""
    h = held[id(node)]
    leaf_err = float(h.sum() - h[label_of_counts(node.counts)])
    if node.is_leaf:
        return leaf_err
    sub = sum(_rep_prune(c, held) for c in node.children)
    if leaf_err <= sub:
        node.make_leaf()
        return leaf_err
    return sub


def _backfit(node, held, parent=None):
    node.counts = node.train + held[id(node)]
    if node.counts.sum() == 0 and parent is not None:
        node.counts = parent.counts.copy()
    for c in node.children:
        _backfit(c, held, node)


def build_reptree(spec, schema, X, y) -> TreeModel:
    n_classes = len(schema.class_labels)
    rng = np.random.default_rng(spec.seed)
    folds = spec["prune_folds"]
    prune = spec["pruned"] and len(y) >= folds
    hold = stratified_holdout(y, folds, rng) if prune else np.zeros(len(y), dtype=bool)
    if prune and (hold.all() or not hold.any()):
        prune, hold = False, np.zeros(len(y), dtype=bool)
    grow_idx = np.flatnonzero(~hold)
    g = _Grower(X, y, schema, spec["min_leaf"], choose_info_gain)
    root = g.grow(grow_idx)
    if prune:
        held = {}
        _route_counts(root, X, y, np.flatnonzero(hold), n_classes, held)
        _rep_prune(root, held)
        _backfit(root, held)
    return TreeModel(spec, schema, root)


def build_random_tree(spec, schema, X, y) -> TreeModel:
    d = X.shape[1]
    k = spec["k"] or ((int(np.floor(np.log2(d))) + 1) if d > 0 else 0)
    rng = np.random.default_rng(spec.seed)

    def choose(grower, idx):
        order = rng.permutation(d)
        best = None
        seen = 0
        for j in order:
            if seen >= k and best is not None:
                break
            seen += 1
            s = grower.splits(idx, [j])
            if s and s[0].gain > 1e-12 and (best is None or s[0].gain > best.gain):
                best = s[0]
        return best

    g = _Grower(X, y, schema, spec["min_leaf"], choose)
    return TreeModel(spec, schema, g.grow(np.arange(len(y))))


def leaf_label(node) -> int:
    return argmax_label(counts_to_distribution(node.counts))
