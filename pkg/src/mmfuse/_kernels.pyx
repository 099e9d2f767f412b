# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: threshold scans, midranks and contingency counts."""
import numpy as np
cimport numpy as cnp
from libc.math cimport log2, NAN
from libc.stdlib cimport calloc, free

cnp.import_array()


cdef inline double _info(long* counts, int k, long n) nogil:
    cdef double s
    cdef int j
    if n <= 0:
        return 0.0
    s = n * log2(<double>n)
    for j in range(k):
        if counts[j] > 0:
            s -= counts[j] * log2(<double>counts[j])
    return s


cdef inline double _cut(double lo, double hi) nogil:
    cdef double t = lo + (hi - lo) / 2.0
    if t >= hi:
        t = lo
    return t


def scan_sorted_splits(const double[:] xs, const cnp.intp_t[:] ys, int n_classes, int min_leaf):
    cdef Py_ssize_t n = xs.shape[0]
    cdef Py_ssize_t i
    cdef long nl, nr
    cdef long two[2]
    cdef double base, gain, best_gain = -1.0, best_t = NAN, best_si = 0.0
    cdef long* total = <long*>calloc(n_classes, sizeof(long))
    cdef long* left = <long*>calloc(n_classes, sizeof(long))
    cdef long* right = <long*>calloc(n_classes, sizeof(long))
    if total == NULL or left == NULL or right == NULL:
        free(total); free(left); free(right)
        raise MemoryError()
    try:
        for i in range(n):
            total[ys[i]] += 1
        for i in range(n_classes):
            right[i] = total[i]
        base = _info(total, n_classes, n)
        for i in range(n - 1):
            left[ys[i]] += 1
            right[ys[i]] -= 1
            nl = i + 1
            nr = n - nl
            if xs[i] >= xs[i + 1] or nl < min_leaf or nr < min_leaf:
                continue
            gain = (base - _info(left, n_classes, nl) - _info(right, n_classes, nr)) / n
            if gain > best_gain:
                best_gain = gain
                best_t = _cut(xs[i], xs[i + 1])
                two[0] = nl
                two[1] = nr
                best_si = _info(two, 2, n) / n
    finally:
        free(total); free(left); free(right)
    return best_gain, best_t, best_si


def foil_scan_sorted(const double[:] xs, const cnp.intp_t[:] pos):
    cdef Py_ssize_t n = xs.shape[0]
    cdef Py_ssize_t i
    cdef long p0 = 0, n0, pl = 0, nl, pr, nr
    cdef double base, g, best_gain = -1.0, best_t = NAN
    cdef bint best_le = True
    for i in range(n):
        p0 += pos[i]
    n0 = n - p0
    if p0 == 0:
        return -1.0, NAN, True
    base = log2(<double>p0 / <double>n)
    for i in range(n - 1):
        pl += pos[i]
        if xs[i] >= xs[i + 1]:
            continue
        nl = i + 1 - pl
        pr = p0 - pl
        nr = n0 - nl
        if pl > 0:
            g = pl * (log2(<double>pl / <double>(pl + nl)) - base)
            if g > best_gain:
                best_gain = g
                best_t = _cut(xs[i], xs[i + 1])
                best_le = True
        if pr > 0:
            g = pr * (log2(<double>pr / <double>(pr + nr)) - base)
            if g > best_gain:
                best_gain = g
                best_t = _cut(xs[i], xs[i + 1])
                best_le = False
    return best_gain, best_t, bool(best_le)


def midranks_sorted(const double[:] xs):
    cdef Py_ssize_t n = xs.shape[0]
    cdef Py_ssize_t i = 0, j, k
    cdef double r
    out = np.empty(n, dtype=np.float64)
    cdef double[:] o = out
    while i < n:
        j = i
        while j + 1 < n and xs[j + 1] == xs[i]:
            j += 1
        r = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            o[k] = r
        i = j + 1
    return out


def contingency(const cnp.intp_t[:] a, const cnp.intp_t[:] b, Py_ssize_t na, Py_ssize_t nb):
    out = np.zeros((na, nb), dtype=np.int64)
    cdef cnp.int64_t[:, :] o = out
    cdef Py_ssize_t i
    for i in range(a.shape[0]):
        o[a[i], b[i]] += 1
    return out
