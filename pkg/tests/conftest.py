import numpy as np
import pytest

from mmfuse.dataset import CATEGORICAL, SOURCES, Attribute, AttributeSchema, Dataset

# filled by test_acceptance, printed once at the end of the session
ACCEPTANCE_LINES: list[str] = []


def make_dataset(X, y, kinds=None, n_cats=3, labels=("PASS", "FAIL"), names=None):
    """Small labelled dataset; ``kinds`` is a string of 'n'/'c' per column."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    d = X.shape[1]
    kinds = kinds or "n" * d
    names = names or [f"a{j}" for j in range(d)]
    attrs = []
    for j, k in enumerate(kinds):
        src = SOURCES[j % len(SOURCES)]
        if k == "c":
            attrs.append(Attribute(names[j], src, CATEGORICAL, tuple(f"v{i}" for i in range(n_cats))))
        else:
            attrs.append(Attribute(names[j], src))
    schema = AttributeSchema(tuple(attrs), labels)
    ids = tuple(f"r{i}" for i in range(len(X)))
    return Dataset(schema, ids, X, np.asarray(y, dtype=np.intp))


def random_dataset(seed, n=40, d=4, kinds=None, n_cats=3, signal=True):
    rng = np.random.default_rng(seed)
    kinds = kinds or "".join(rng.choice(["n", "c"], size=d))
    X = np.empty((n, d))
    for j, k in enumerate(kinds):
        if k == "c":
            X[:, j] = rng.integers(0, n_cats, n)
        else:
            X[:, j] = np.round(rng.normal(size=n), 2)
    if signal:
        score = X[:, 0] + 0.7 * rng.normal(size=n)
        y = (score < np.median(score)).astype(int)
    else:
        y = rng.integers(0, 2, n)
    if len(set(y)) < 2:
        y[0] = 1 - y[0]
    return make_dataset(X, y, kinds, n_cats)


@pytest.fixture
def tiny():
    X = [[0.1, 1], [0.2, 0], [0.4, 1], [0.6, 2], [0.8, 2], [0.9, 0]]
    return make_dataset(X, [1, 1, 1, 0, 0, 0], kinds="nc")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[1])):
            terminalreporter.write_line(line)
