"""Backend selection for the numeric hot loops.

The compiled extension ``mmfuse._kernels`` is used when it was built;
otherwise, or when ``MMFUSE_PURE_PYTHON=1`` is set, the pure-Python
twin in ``mmfuse._pykernels`` is used.  Both expose the same functions
and produce identical results.
"""
import os
from math import log2

import numpy as np

from . import _pykernels

if os.environ.get("MMFUSE_PURE_PYTHON", "") not in ("", "0"):
    _backend = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as _backend
        BACKEND = "cython"
    except ImportError:
        _backend = _pykernels
        BACKEND = "python"


def get_backend(name=None):
    """Return the kernel module by name ('cython' or 'python'); None = active."""
    if name is None:
        return _backend
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown kernel backend {name!r}")


def best_split(values, labels, n_classes, min_leaf=1, backend=None):
    """Best binary cut ``x <= t`` by information gain.

    Returns ``(gain, threshold, split_info)``; ``gain`` is -1 when no cut
    leaves at least ``min_leaf`` instances on both sides.
    """
    be = backend or _backend
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    return be.scan_sorted_splits(
        np.ascontiguousarray(values[order]),
        np.ascontiguousarray(np.asarray(labels, dtype=np.intp)[order]),
        int(n_classes), int(min_leaf))


def foil_best(values, positive, backend=None):
    """Best FOIL-gain condition ``x <= t`` or ``x > t``.

    Returns ``(gain, threshold, is_le)``; gain -1 when nothing covers a positive.
    """
    be = backend or _backend
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    return be.foil_scan_sorted(
        np.ascontiguousarray(values[order]),
        np.ascontiguousarray(np.asarray(positive, dtype=np.intp)[order]))


def midranks(scores, backend=None):
    """1-based ranks with ties given the mean of their rank span."""
    be = backend or _backend
    scores = np.asarray(scores, dtype=np.float64)
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(len(scores), dtype=np.float64)
    ranks[order] = be.midranks_sorted(np.ascontiguousarray(scores[order]))
    return ranks


def contingency(a, b, na, nb, backend=None):
    be = backend or _backend
    return be.contingency(np.ascontiguousarray(a, dtype=np.intp),
                          np.ascontiguousarray(b, dtype=np.intp), int(na), int(nb))


def entropy(counts):
    """Shannon entropy (bits) of a count vector."""
    counts = [float(c) for c in counts if c > 0]
    n = sum(counts)
    if n <= 0:
        return 0.0
    return (n * log2(n) - sum(c * log2(c) for c in counts)) / n
