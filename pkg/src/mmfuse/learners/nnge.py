"""Nearest-neighbour learning with non-nested generalized exemplars (hyperrectangles)."""
from __future__ import annotations

from math import sqrt

import numpy as np

from .base import Model, class_counts


def exemplar_distance(terms) -> float:
    """Distance from an instance to an exemplar.

    ``terms`` is a sequence, in attribute order, of either
    ``("num", value, lo, hi, scale)`` or ``("cat", value, allowed)``.
    Numeric gaps are divided by ``scale``; a categorical mismatch costs 1.
    """
    acc = 0.0
    for t in terms:
        if t[0] == "num":
            _, v, lo, hi, scale = t
            if v < lo:
                g = (lo - v) / scale
            elif v > hi:
                g = (v - hi) / scale
            else:
                g = 0.0
            acc += g * g
        else:
            acc += 0.0 if t[1] in t[2] else 1.0
    return sqrt(acc)


class Exemplar:
    __slots__ = ("lo", "hi", "cats", "target", "members")

    def __init__(self, lo, hi, cats, target, members):
        self.lo, self.hi, self.cats = lo, hi, cats
        self.target, self.members = target, members

    @classmethod
    def bounding(cls, X, rows, numeric, target):
        sub = X[rows]
        lo = np.where(numeric, sub.min(axis=0), np.nan)
        hi = np.where(numeric, sub.max(axis=0), np.nan)
        cats = [None if numeric[j] else frozenset(int(v) for v in sub[:, j]) for j in range(X.shape[1])]
        return cls(lo, hi, cats, target, list(rows))

    def contains(self, row, numeric) -> bool:
        for j, v in enumerate(row):
            if numeric[j]:
                if v < self.lo[j] or v > self.hi[j]:
                    return False
            elif int(v) not in self.cats[j]:
                return False
        return True

    def overlaps(self, other, numeric) -> bool:
        for j in range(len(numeric)):
            if numeric[j]:
                if self.lo[j] > other.hi[j] or other.lo[j] > self.hi[j]:
                    return False
            elif not (self.cats[j] & other.cats[j]):
                return False
        return True

    def terms(self, row, numeric, scales):
        out = []
        for j, v in enumerate(row):
            if numeric[j]:
                out.append(("num", float(v), float(self.lo[j]), float(self.hi[j]), scales[j]))
            else:
                out.append(("cat", int(v), self.cats[j]))
        return out

    def distance(self, row, numeric, scales) -> float:
        return exemplar_distance(self.terms(row, numeric, scales))


class ExemplarModel(Model):
    """Prediction = class of the nearest exemplar (first one on ties), one-hot."""

    def __init__(self, spec, schema, exemplars, scales, counts):
        self.spec, self.schema = spec, schema
        self.exemplars = exemplars
        self.scales = scales
        self.numeric = schema.numeric_mask
        self.counts = counts  # per-exemplar class counts of covered training rows

    def nearest(self, row) -> int:
        best, best_d = 0, None
        for k, e in enumerate(self.exemplars):
            d = e.distance(row, self.numeric, self.scales)
            if best_d is None or d < best_d:
                best, best_d = k, d
        return best

    def distribution(self, row):
        row = self.check_row(row)
        out = np.zeros(len(self.schema.class_labels))
        out[self.exemplars[self.nearest(row)].target] = 1.0
        return out


def _split(e, x, X, numeric):
    """Break exemplar ``e`` into pieces that no longer contain ``x``."""
    rows = np.asarray(e.members)
    vals = X[rows]
    for j in range(X.shape[1]):
        if not numeric[j]:
            continue
        left, right = vals[:, j] < x[j], vals[:, j] > x[j]
        if (left | right).all():
            return [Exemplar.bounding(X, rows[m], numeric, e.target) for m in (left, right) if m.any()]
    return [Exemplar.bounding(X, [r], numeric, e.target) for r in rows]


def build_nnge(spec, schema, X, y) -> ExemplarModel:
    numeric = schema.numeric_mask
    scales = []
    for j in range(X.shape[1]):
        if numeric[j]:
            rng = float(X[:, j].max() - X[:, j].min())
            scales.append(rng if rng > 0 else 1.0)
        else:
            scales.append(1.0)
    exemplars: list[Exemplar] = []
    for i in range(len(y)):
        x, c = X[i], int(y[i])
        k = 0
        while k < len(exemplars):
            e = exemplars[k]
            if e.target != c and e.contains(x, numeric):
                pieces = _split(e, x, X, numeric)
                if all(not p.contains(x, numeric) for p in pieces):
                    exemplars[k:k + 1] = pieces
                    k += len(pieces)
                    continue
            k += 1
        best, best_d = None, None
        for e in exemplars:
            d = e.distance(x, numeric, scales)
            if best_d is None or d < best_d:
                best, best_d = e, d
        if best is not None and best.target == c:
            grown = Exemplar.bounding(X, best.members + [i], numeric, c)
            if not any(o.target != c and grown.overlaps(o, numeric) for o in exemplars):
                best.lo, best.hi, best.cats, best.members = grown.lo, grown.hi, grown.cats, grown.members
                continue
        exemplars.append(Exemplar.bounding(X, [i], numeric, c))
    n_classes = len(schema.class_labels)
    counts = [class_counts(y[e.members], n_classes) for e in exemplars]
    return ExemplarModel(spec, schema, exemplars, scales, counts)
