"""RIPPER rule induction: IREP* growing/pruning, MDL stopping, optimization passes.

Classes are learned from the rarest to the most frequent; the most
frequent class becomes the default rule.
"""
from __future__ import annotations

from math import log2

import numpy as np

from .. import kernels
from .base import Condition, Rule, RuleListModel, class_counts
from .trees import stratified_holdout

_THEORY_WEIGHT = 0.5


def _subset_dl(t, k, p):
    p = min(max(p, 1e-9), 1 - 1e-9)
    bits = -k * log2(p) if k > 0 else 0.0
    if t - k > 0:
        bits -= (t - k) * log2(1 - p)
    return bits


class _ClassLearner:
    """Learns the rule set for one target class against everything else."""

    def __init__(self, X, pos, schema, rng, spec):
        self.X = X
        self.pos = pos
        self.numeric = schema.numeric_mask
        self.n_cats = [len(a.categories) for a in schema.attributes]
        self.rng = rng
        self.folds = spec["prune_folds"]
        self.slack = spec["dl_slack"]
        self.n_conditions = self._count_possible_conditions()

    def _count_possible_conditions(self):
        total = 0
        for j in range(self.X.shape[1]):
            if self.numeric[j]:
                total += 2 * max(len(np.unique(self.X[:, j])) - 1, 1)
            else:
                total += self.n_cats[j]
        return max(total, 1)

    # -- description length ---------------------------------------------------

    def theory_dl(self, conds) -> float:
        k = len(conds)
        if k == 0:
            return 0.0
        bits = log2(k)
        if k > 1:
            bits += 2.0 * log2(bits)
        bits += _subset_dl(self.n_conditions, k, k / self.n_conditions)
        return _THEORY_WEIGHT * bits

    def coverage(self, ruleset, idx):
        m = np.zeros(len(idx), dtype=bool)
        for conds in ruleset:
            m |= _mask(conds, self.X[idx])
        return m

    def total_dl(self, ruleset, idx) -> float:
        covered = self.coverage(ruleset, idx)
        pos = self.pos[idx]
        cover = float(covered.sum())
        uncover = float(len(idx) - cover)
        fp = float((covered & ~pos).sum())
        fn = float((~covered & pos).sum())
        ratio = fp / (fp + fn) if fp + fn > 0 else 0.5
        bits = log2(cover + uncover + 1.0)
        if cover > uncover:
            exp_err = ratio * (fp + fn)
            bits += _subset_dl(cover, fp, exp_err / cover)
            bits += _subset_dl(uncover, fn, fn / uncover) if uncover > 0 else 0.0
        else:
            exp_err = (1.0 - ratio) * (fp + fn)
            bits += _subset_dl(cover, fp, fp / cover) if cover > 0 else 0.0
            bits += _subset_dl(uncover, fn, exp_err / uncover)
        return bits + sum(self.theory_dl(c) for c in ruleset)

    # -- grow and prune ------------------------------------------------------

    def best_condition(self, idx):
        pos = self.pos[idx]
        p0 = int(pos.sum())
        n0 = len(idx) - p0
        if p0 == 0:
            return None, -1.0
        base = log2(p0 / (p0 + n0))
        best, best_gain = None, 0.0
        for j in range(self.X.shape[1]):
            col = self.X[idx, j]
            if self.numeric[j]:
                gain, t, le = kernels.foil_best(col, pos)
                if gain > best_gain:
                    best, best_gain = Condition(j, "<=" if le else ">", t), gain
            else:
                for v in range(self.n_cats[j]):
                    m = col == v
                    p1 = int((m & pos).sum())
                    if p1 == 0:
                        continue
                    n1 = int(m.sum()) - p1
                    gain = p1 * (log2(p1 / (p1 + n1)) - base)
                    if gain > best_gain:
                        best, best_gain = Condition(j, "=", v), gain
        return best, best_gain

    def grow(self, conds, idx):
        conds = list(conds)
        cov = idx[_mask(conds, self.X[idx])]
        while len(cov) and (~self.pos[cov]).any():
            cond, gain = self.best_condition(cov)
            if cond is None or gain <= 1e-12:
                break
            conds.append(cond)
            cov = cov[cond.mask(self.X[cov])]
        return conds

    def prune_irep(self, conds, idx):
        """Keep the prefix maximizing (p - n) / (p + n) on the prune rows."""
        if len(conds) <= 1 or len(idx) == 0:
            return conds
        best_k, best_v = len(conds), -np.inf
        m = np.ones(len(idx), dtype=bool)
        pos = self.pos[idx]
        for k, c in enumerate(conds, start=1):
            m &= c.mask(self.X[idx])
            p, n = int((m & pos).sum()), int((m & ~pos).sum())
            if p + n == 0:
                continue
            v = (p - n) / (p + n)
            if v > best_v:
                best_k, best_v = k, v
        return conds[:best_k]

    def prune_ruleset(self, ruleset, i, conds, idx):
        """Keep the prefix of ``conds`` (as rule ``i``) maximizing rule-set accuracy."""
        if len(conds) <= 1 or len(idx) == 0:
            return conds
        pos = self.pos[idx]
        others = np.zeros(len(idx), dtype=bool)
        for j, c in enumerate(ruleset):
            if j != i:
                others |= _mask(c, self.X[idx])
        best_k, best_acc = len(conds), -1.0
        m = np.ones(len(idx), dtype=bool)
        for k, c in enumerate(conds, start=1):
            m &= c.mask(self.X[idx])
            acc = float(((others | m) == pos).mean())
            if acc > best_acc:
                best_k, best_acc = k, acc
        return conds[:best_k]

    def split(self, idx):
        if len(idx) < self.folds:
            return idx, idx[:0]
        hold = stratified_holdout(self.pos[idx].astype(np.intp), self.folds, self.rng)
        return idx[~hold], idx[hold]

    # -- rule-set construction ---------------------------------------------------

    def cover_positives(self, ruleset, all_idx):
        """IREP* loop: add rules for uncovered positives until MDL or error stops it."""
        ruleset = list(ruleset)
        best_dl = self.total_dl(ruleset, all_idx)
        remaining = all_idx[~self.coverage(ruleset, all_idx)]
        while self.pos[remaining].any():
            grow_idx, prune_idx = self.split(remaining)
            if not self.pos[grow_idx].any():
                grow_idx, prune_idx = remaining, remaining[:0]
            conds = self.grow([], grow_idx)
            if not conds:
                break
            conds = self.prune_irep(conds, prune_idx)
            if len(prune_idx):
                m = _mask(conds, self.X[prune_idx])
                p = int((m & self.pos[prune_idx]).sum())
                n = int(m.sum()) - p
                if p + n > 0 and n / (p + n) > 0.5:
                    break
            cov = _mask(conds, self.X[remaining])
            if not (cov & self.pos[remaining]).any():
                break
            ruleset.append(conds)
            dl = self.total_dl(ruleset, all_idx)
            if dl > best_dl + self.slack:
                ruleset.pop()
                break
            best_dl = min(best_dl, dl)
            remaining = remaining[~cov]
        return ruleset

    def drop_costly(self, ruleset, all_idx):
        """Delete rules whose removal lowers the total description length."""
        ruleset = list(ruleset)
        for i in range(len(ruleset) - 1, -1, -1):
            without = ruleset[:i] + ruleset[i + 1:]
            if self.total_dl(without, all_idx) < self.total_dl(ruleset, all_idx):
                ruleset = without
        return ruleset

    def optimize(self, ruleset, all_idx):
        ruleset = list(ruleset)
        for i in range(len(ruleset)):
            before = np.zeros(len(all_idx), dtype=bool)
            for c in ruleset[:i]:
                before |= _mask(c, self.X[all_idx])
            local = all_idx[~before]
            grow_idx, prune_idx = self.split(local)
            if not self.pos[grow_idx].any():
                continue
            variants = [ruleset[i]]
            rep = self.grow([], grow_idx)
            if rep:
                variants.append(self.prune_ruleset(ruleset, i, rep, prune_idx))
            rev = self.grow(ruleset[i], grow_idx)
            if len(rev) > len(ruleset[i]):
                variants.append(self.prune_ruleset(ruleset, i, rev, prune_idx))
            best, best_dl = variants[0], None
            for v in variants:
                trial = ruleset[:i] + [v] + ruleset[i + 1:]
                dl = self.total_dl(trial, all_idx)
                if best_dl is None or dl < best_dl:
                    best, best_dl = v, dl
            ruleset[i] = best
        return ruleset

    def learn(self, idx, passes):
        ruleset = self.drop_costly(self.cover_positives([], idx), idx)
        for _ in range(passes):
            ruleset = self.optimize(ruleset, idx)
            ruleset = self.cover_positives(ruleset, idx)
            ruleset = self.drop_costly(ruleset, idx)
        return ruleset


def _mask(conds, X):
    m = np.ones(len(X), dtype=bool)
    for c in conds:
        m &= c.mask(X)
    return m


def build_ripper(spec, schema, X, y) -> RuleListModel:
    n_classes = len(schema.class_labels)
    rng = np.random.default_rng(spec.seed)
    freq = class_counts(y, n_classes)
    order = sorted(range(n_classes), key=lambda c: (freq[c], c))
    present = [c for c in order if freq[c] > 0]
    rules: list[Rule] = []
    idx = np.arange(len(y))
    for c in present[:-1]:
        learner = _ClassLearner(X, y == c, schema, rng, spec)
        ruleset = learner.learn(idx, spec["optimizations"])
        for conds in ruleset:
            rules.append(Rule(tuple(conds), np.zeros(n_classes), c))
        if ruleset:
            idx = idx[~learner.coverage(ruleset, idx)]
    default = present[-1] if present else 0
    rules.append(Rule((), np.zeros(n_classes), default))
    model = RuleListModel(spec, schema, rules)
    model.fire_counts(X, y, n_classes)
    return model
