"""Pure-Python versions of the hot loops in ``_kernels.pyx``.

Every function here mirrors its compiled twin operation for operation so
that both backends pick the same split on the same data.
"""
from math import log2

import numpy as np


def _info(counts, n):
    # n*log2(n) - sum c*log2(c); equals n * entropy(counts / n)
    if n <= 0:
        return 0.0
    s = n * log2(n)
    for c in counts:
        if c > 0:
            s -= c * log2(c)
    return s


def _cut(lo, hi):
    t = lo + (hi - lo) / 2.0
    if t >= hi:
        t = lo
    return t


def scan_sorted_splits(xs, ys, n_classes, min_leaf):
    n = len(xs)
    total = [0] * n_classes
    for i in range(n):
        total[ys[i]] += 1
    left = [0] * n_classes
    right = list(total)
    base = _info(total, n)
    best_gain = -1.0
    best_t = float("nan")
    best_si = 0.0
    for i in range(n - 1):
        c = ys[i]
        left[c] += 1
        right[c] -= 1
        nl = i + 1
        nr = n - nl
        if xs[i] >= xs[i + 1] or nl < min_leaf or nr < min_leaf:
            continue
        gain = (base - _info(left, nl) - _info(right, nr)) / n
        if gain > best_gain:
            best_gain = gain
            best_t = _cut(xs[i], xs[i + 1])
            best_si = _info((nl, nr), n) / n
    return best_gain, best_t, best_si


def foil_scan_sorted(xs, pos):
    n = len(xs)
    p0 = 0
    for i in range(n):
        p0 += pos[i]
    n0 = n - p0
    if p0 == 0:
        return -1.0, float("nan"), True
    base = log2(p0 / n)
    best_gain = -1.0
    best_t = float("nan")
    best_le = True
    pl = 0
    for i in range(n - 1):
        pl += pos[i]
        if xs[i] >= xs[i + 1]:
            continue
        nl = i + 1 - pl
        pr = p0 - pl
        nr = n0 - nl
        if pl > 0:
            g = pl * (log2(pl / (pl + nl)) - base)
            if g > best_gain:
                best_gain = g
                best_t = _cut(xs[i], xs[i + 1])
                best_le = True
        if pr > 0:
            g = pr * (log2(pr / (pr + nr)) - base)
            if g > best_gain:
                best_gain = g
                best_t = _cut(xs[i], xs[i + 1])
                best_le = False
    return best_gain, best_t, best_le


def midranks_sorted(xs):
    n = len(xs)
    out = np.empty(n, dtype=np.float64)
    i = 0
    while i < n:
        j = i
        while j + 1 < n and xs[j + 1] == xs[i]:
            j += 1
        r = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            out[k] = r
        i = j + 1
    return out


def contingency(a, b, na, nb):
    out = np.zeros((na, nb), dtype=np.int64)
    for i in range(len(a)):
        out[a[i], b[i]] += 1
    return out
