from math import log2

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmfuse import _pykernels, kernels

try:
    from mmfuse import _kernels as cy
except ImportError:  # extension not built
    cy = None

needs_cy = pytest.mark.skipif(cy is None, reason="compiled kernels not built")


def brute_best_split(values, labels, n_classes, min_leaf):
    """Try every midpoint between distinct sorted values."""
    values = np.asarray(values, float)
    labels = np.asarray(labels)
    total = kernels.entropy(np.bincount(labels, minlength=n_classes))
    best = (-1.0, None)
    u = np.unique(values)
    for lo, hi in zip(u, u[1:]):
        t = lo + (hi - lo) / 2
        left = values <= t
        nl, nr = left.sum(), (~left).sum()
        if nl < min_leaf or nr < min_leaf:
            continue
        h = (nl * kernels.entropy(np.bincount(labels[left], minlength=n_classes))
             + nr * kernels.entropy(np.bincount(labels[~left], minlength=n_classes))) / len(values)
        if total - h > best[0] + 1e-12:
            best = (total - h, t)
    return best


def test_entropy_values():
    assert kernels.entropy([5, 5]) == pytest.approx(1.0)
    assert kernels.entropy([4, 0]) == 0.0
    assert kernels.entropy([]) == 0.0
    assert kernels.entropy([1, 1, 2]) == pytest.approx(1.5)


def test_best_split_simple_threshold():
    gain, t, si = kernels.best_split([1, 2, 3, 10, 11, 12], [0, 0, 0, 1, 1, 1], 2)
    assert gain == pytest.approx(1.0)
    assert t == 6.5
    assert si == pytest.approx(1.0)


def test_best_split_none_when_constant():
    gain, t, _ = kernels.best_split([3, 3, 3], [0, 1, 0], 2)
    assert gain == -1.0 and np.isnan(t)


def test_best_split_respects_min_leaf():
    gain, t, _ = kernels.best_split([1, 2, 3, 4], [0, 1, 1, 1], 2, min_leaf=2)
    assert t == 2.5


@settings(max_examples=80, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 2)), min_size=2, max_size=30),
       st.integers(1, 3))
def test_best_split_matches_brute_force(pairs, min_leaf):
    values = [p[0] for p in pairs]
    labels = [p[1] for p in pairs]
    gain, t, _ = kernels.best_split(values, labels, 3, min_leaf)
    bg, bt = brute_best_split(values, labels, 3, min_leaf)
    if bt is None:
        assert gain == -1.0
    else:
        assert gain == pytest.approx(bg, abs=1e-9)


def test_foil_gain_formula():
    # 2 positives of 4 overall; x <= 1.5 covers both positives only
    gain, t, le = kernels.foil_best([1, 1, 2, 3], [1, 1, 0, 0])
    assert le and t == 1.5
    assert gain == pytest.approx(2 * (log2(1.0) - log2(0.5)))


def test_foil_prefers_upper_side():
    gain, t, le = kernels.foil_best([1, 2, 3, 4], [0, 0, 1, 1])
    assert not le and t == 2.5


def test_midranks_ties():
    r = kernels.midranks([3.0, 1.0, 3.0, 2.0])
    assert list(r) == [3.5, 1.0, 3.5, 2.0]


def test_contingency_counts():
    t = kernels.contingency([0, 1, 1, 2], [1, 0, 0, 1], 3, 2)
    assert t.tolist() == [[0, 1], [2, 0], [0, 1]]
    assert t.dtype == np.int64


def test_get_backend_names():
    assert kernels.get_backend("python") is _pykernels
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


@needs_cy
@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(st.floats(-5, 5, allow_nan=False, width=32), st.integers(0, 2)),
                min_size=1, max_size=60),
       st.integers(1, 4))
def test_backends_agree_on_splits(pairs, min_leaf):
    values = [p[0] for p in pairs]
    labels = [p[1] for p in pairs]
    a = kernels.best_split(values, labels, 3, min_leaf, backend=_pykernels)
    b = kernels.best_split(values, labels, 3, min_leaf, backend=cy)
    assert a[0] == b[0]
    assert a[2] == b[2]
    assert (np.isnan(a[1]) and np.isnan(b[1])) or a[1] == b[1]


@needs_cy
@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(st.floats(-5, 5, allow_nan=False, width=32), st.booleans()),
                min_size=1, max_size=60))
def test_backends_agree_on_foil(pairs):
    values = [p[0] for p in pairs]
    pos = [int(p[1]) for p in pairs]
    a = kernels.foil_best(values, pos, backend=_pykernels)
    b = kernels.foil_best(values, pos, backend=cy)
    assert a[0] == b[0] and a[2] == b[2]
    assert (np.isnan(a[1]) and np.isnan(b[1])) or a[1] == b[1]


@needs_cy
@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=0, max_size=50))
def test_backends_agree_on_ranks_and_tables(xs):
    assert np.array_equal(kernels.midranks(xs, backend=_pykernels), kernels.midranks(xs, backend=cy))
    ys = [x % 2 for x in xs]
    assert np.array_equal(kernels.contingency(xs, ys, 6, 2, backend=_pykernels),
                          kernels.contingency(xs, ys, 6, 2, backend=cy))
