"""Schema and dataset model, per-source CSV ingestion, joining and anonymizing."""
from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DataError

SOURCES = ("logs", "emotion", "gaze")
NUMERIC = "numeric"
CATEGORICAL = "categorical"
ID_COLUMN = "id"
SCORE_COLUMN = "score"
CLASS_COLUMN = "class"
SOURCE_FILES = {"logs": "logs.csv", "emotion": "emotion.csv", "gaze": "gaze.csv"}
SCORES_FILE = "scores.csv"

LOG_ATTRIBUTES = ("SummAll", "COIStotalFreq", "PKAtotalFreq")
EMOTION_ATTRIBUTES = ("anger", "contempt", "disgust", "fear", "happiness",
                      "neutral", "sadness", "surprise")
GAZE_ATTRIBUTES = ("AOI1FixCount", "AOI2FixCount", "AOI3FixCount")


@dataclass(frozen=True)
class Attribute:
    name: str
    source: str
    kind: str = NUMERIC
    categories: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.name or self.name != self.name.strip() or any(c.isspace() for c in self.name):
            raise DataError(f"invalid attribute name {self.name!r}")
        if self.source not in SOURCES:
            raise DataError(f"attribute {self.name!r}: unknown source {self.source!r}")
        if self.kind not in (NUMERIC, CATEGORICAL):
            raise DataError(f"attribute {self.name!r}: unknown kind {self.kind!r}")
        object.__setattr__(self, "categories", tuple(self.categories))
        if self.kind == CATEGORICAL:
            if not self.categories:
                raise DataError(f"categorical attribute {self.name!r} has no categories")
            if len(set(self.categories)) != len(self.categories):
                raise DataError(f"attribute {self.name!r}: duplicate categories")
        elif self.categories:
            raise DataError(f"numeric attribute {self.name!r} cannot list categories")

    @property
    def is_numeric(self) -> bool:
        return self.kind == NUMERIC


@dataclass(frozen=True)
class AttributeSchema:
    """Ordered attribute descriptors plus the ordered class labels.

    The order of ``class_labels`` is used for every tie-break in the
    package: an exact tie always goes to the earlier label.
    """

    attributes: tuple[Attribute, ...]
    class_labels: tuple[str, ...] = ("PASS", "FAIL")

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))
        object.__setattr__(self, "class_labels", tuple(self.class_labels))
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise DataError(f"duplicate attribute names: {', '.join(dup)}")
        if len(set(self.class_labels)) < 2 or len(set(self.class_labels)) != len(self.class_labels):
            raise DataError("class_labels needs at least two distinct entries")

    def __len__(self):
        return len(self.attributes)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes)

    @property
    def numeric_mask(self) -> np.ndarray:
        return np.array([a.is_numeric for a in self.attributes], dtype=bool)

    @property
    def sources(self) -> tuple[str, ...]:
        """Sources present, in canonical order."""
        present = {a.source for a in self.attributes}
        return tuple(s for s in SOURCES if s in present)

    def index(self, name: str) -> int:
        for i, a in enumerate(self.attributes):
            if a.name == name:
                return i
        raise KeyError(name)

    def indices_of(self, source: str) -> list[int]:
        return [i for i, a in enumerate(self.attributes) if a.source == source]

    def select(self, indices: Iterable[int]) -> AttributeSchema:
        return AttributeSchema(tuple(self.attributes[i] for i in indices), self.class_labels)

    def for_source(self, source: str) -> AttributeSchema:
        return self.select(self.indices_of(source))

    def format_value(self, j: int, value: float) -> str:
        a = self.attributes[j]
        if a.is_numeric:
            return repr(float(value))
        return a.categories[int(value)]


def default_schema() -> AttributeSchema:
    """The 14 named attributes: 3 log counts, 8 emotion confidences, 3 AOI counts."""
    attrs = [Attribute(n, "logs") for n in LOG_ATTRIBUTES]
    attrs += [Attribute(n, "emotion") for n in EMOTION_ATTRIBUTES]
    attrs += [Attribute(n, "gaze") for n in GAZE_ATTRIBUTES]
    return AttributeSchema(tuple(attrs))


def _frozen(a, dtype):
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable table of instances bound to a schema.

    ``X`` holds numeric values in source units and category indices for
    categorical attributes.  ``labels`` are indices into
    ``schema.class_labels``.
    """

    schema: AttributeSchema
    ids: tuple[str, ...]
    X: np.ndarray
    labels: np.ndarray | None = None
    score: np.ndarray | None = None

    def __post_init__(self):
        ids = tuple(str(i) for i in self.ids)
        object.__setattr__(self, "ids", ids)
        n, d = len(ids), len(self.schema)
        X = _frozen(self.X, np.float64)
        if X.size == 0:
            X = _frozen(np.zeros((n, d)), np.float64)
        if X.shape != (n, d):
            raise DataError(f"matrix shape {X.shape} does not match {n} ids x {d} attributes")
        object.__setattr__(self, "X", X)
        if len(set(ids)) != n:
            dup = sorted({i for i in ids if ids.count(i) > 1})
            raise DataError(f"duplicate ids: {', '.join(dup)}")
        for j, a in enumerate(self.schema.attributes):
            col = X[:, j]
            if a.is_numeric:
                if np.isinf(col).any():
                    raise DataError(f"attribute {a.name!r} has non-finite values")
            else:
                ok = np.isnan(col) | ((col == np.floor(col)) & (col >= 0) & (col < len(a.categories)))
                if not ok.all():
                    raise DataError(f"attribute {a.name!r} has invalid category indices")
        if self.labels is not None:
            labels = _frozen(self.labels, np.intp)
            if labels.shape != (n,):
                raise DataError("labels length does not match row count")
            if n and (labels.min() < 0 or labels.max() >= len(self.schema.class_labels)):
                raise DataError("label index out of range")
            object.__setattr__(self, "labels", labels)
        if self.score is not None:
            score = _frozen(self.score, np.float64)
            if score.shape != (n,):
                raise DataError("score length does not match row count")
            if n and (np.isnan(score).any() or score.min() < 0 or score.max() > 10):
                raise DataError("scores must lie in [0, 10]")
            object.__setattr__(self, "score", score)

    def __len__(self):
        return len(self.ids)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.schema == other.schema and self.ids == other.ids
                and np.array_equal(self.X, other.X, equal_nan=True)
                and _opt_equal(self.labels, other.labels)
                and _opt_equal(self.score, other.score))

    __hash__ = None

    @property
    def n_attributes(self) -> int:
        return len(self.schema)

    @property
    def has_missing(self) -> bool:
        return bool(np.isnan(self.X).any())

    def replace(self, **changes) -> Dataset:
        kw = dict(schema=self.schema, ids=self.ids, X=self.X, labels=self.labels, score=self.score)
        kw.update(changes)
        return Dataset(**kw)

    def take(self, rows: Sequence[int]) -> Dataset:
        rows = np.asarray(rows, dtype=np.intp)
        return Dataset(self.schema, tuple(self.ids[i] for i in rows), self.X[rows],
                       None if self.labels is None else self.labels[rows],
                       None if self.score is None else self.score[rows])

    def label_names(self) -> list[str]:
        if self.labels is None:
            return []
        return [self.schema.class_labels[i] for i in self.labels]

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=len(self.schema.class_labels))

    def instance(self, i: int) -> dict:
        """Row ``i`` as a name -> value mapping (categories by name)."""
        return row_to_mapping(self.schema, self.X[i])


def _opt_equal(a, b):
    if a is None or b is None:
        return a is None and b is None
    return np.array_equal(a, b)


def row_to_mapping(schema: AttributeSchema, row) -> dict:
    out = {}
    for a, v in zip(schema.attributes, row):
        out[a.name] = float(v) if a.is_numeric else a.categories[int(v)]
    return out


@dataclass(frozen=True)
class IdMap:
    """Bijection between original identifiers and anonymous tokens."""

    pairs: tuple[tuple[str, str], ...] = field(default_factory=tuple)

    def forward(self) -> dict[str, str]:
        return dict(self.pairs)

    def inverse(self) -> dict[str, str]:
        return {b: a for a, b in self.pairs}

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["original", "anonymous"])
            w.writerows(self.pairs)


# -- ingestion ---------------------------------------------------------------

def _parse_cell(attr: Attribute, text: str, row_no: int, allow_missing: bool) -> float:
    text = text.strip()
    if text == "" or text == "?":
        if allow_missing:
            return math.nan
        raise DataError(f"row {row_no}, column {attr.name!r}: missing value")
    if attr.is_numeric:
        try:
            v = float(text)
        except ValueError:
            raise DataError(f"row {row_no}, column {attr.name!r}: cannot parse {text!r} as a number") from None
        if not math.isfinite(v):
            raise DataError(f"row {row_no}, column {attr.name!r}: non-finite value {text!r}")
        return v
    try:
        return float(attr.categories.index(text))
    except ValueError:
        raise DataError(f"row {row_no}, column {attr.name!r}: unknown category {text!r}") from None


def _read_rows(path):
    path = Path(path)
    if not path.is_file():
        raise DataError(f"{path}: no such file")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and not (len(r) == 1 and not r[0].strip())]
    rows = [r for r in rows if not r[0].startswith("#")]
    if not rows:
        raise DataError(f"{path}: missing header row")
    header = [h.strip() for h in rows[0]]
    seen = set()
    for h in header:
        if not h:
            raise DataError(f"{path}: empty header name")
        if h in seen:
            raise DataError(f"{path}: duplicate header name {h!r}")
        seen.add(h)
    if ID_COLUMN not in header:
        raise DataError(f"{path}: header lacks an {ID_COLUMN!r} column")
    for k, r in enumerate(rows[1:], start=1):
        if len(r) != len(header):
            raise DataError(f"{path}: row {k} has {len(r)} cells, header has {len(header)}")
    return header, rows[1:]


def _build(schema, header, body, path, allow_missing, extra=()):
    allowed = {ID_COLUMN, *schema.names, *extra}
    unknown = [h for h in header if h not in allowed]
    if unknown:
        raise DataError(f"{path}: unknown columns: {', '.join(unknown)}")
    missing = [n for n in schema.names if n not in header]
    if missing:
        raise DataError(f"{path}: missing columns: {', '.join(missing)}")
    pos = {h: k for k, h in enumerate(header)}
    ids = []
    X = np.empty((len(body), len(schema)), dtype=np.float64)
    for r, row in enumerate(body):
        ident = row[pos[ID_COLUMN]].strip()
        if not ident:
            raise DataError(f"{path}: row {r + 1}: empty id")
        ids.append(ident)
        for j, a in enumerate(schema.attributes):
            X[r, j] = _parse_cell(a, row[pos[a.name]], r + 1, allow_missing)
    if len(set(ids)) != len(ids):
        dup = sorted({i for i in ids if ids.count(i) > 1})
        raise DataError(f"{path}: duplicate ids: {', '.join(dup)}")
    return ids, X, pos


def load_source_csv(path, source: str, schema: AttributeSchema | None = None,
                    allow_missing: bool = False) -> Dataset:
    """Load one source file (``id`` column plus that source's attributes).

    ``schema`` may be a full schema; only the attributes tagged with
    ``source`` are used.  Missing cells are an error unless
    ``allow_missing`` is set, in which case they load as NaN.
    """
    if source not in SOURCES:
        raise DataError(f"unknown source {source!r}")
    schema = (schema or default_schema()).for_source(source)
    if not len(schema):
        raise DataError(f"schema has no attributes for source {source!r}")
    header, body = _read_rows(path)
    ids, X, _ = _build(schema, header, body, path, allow_missing)
    return Dataset(schema, tuple(ids), X)


def load_scores_csv(path) -> dict[str, float]:
    header, body = _read_rows(path)
    if SCORE_COLUMN not in header:
        raise DataError(f"{path}: header lacks a {SCORE_COLUMN!r} column")
    unknown = [h for h in header if h not in (ID_COLUMN, SCORE_COLUMN)]
    if unknown:
        raise DataError(f"{path}: unknown columns: {', '.join(unknown)}")
    i_id, i_sc = header.index(ID_COLUMN), header.index(SCORE_COLUMN)
    out: dict[str, float] = {}
    for r, row in enumerate(body, start=1):
        ident = row[i_id].strip()
        if ident in out:
            raise DataError(f"{path}: duplicate id {ident!r}")
        try:
            v = float(row[i_sc])
        except ValueError:
            raise DataError(f"{path}: row {r}, column 'score': cannot parse {row[i_sc]!r}") from None
        if not 0.0 <= v <= 10.0:
            raise DataError(f"{path}: row {r}: score {v} outside [0, 10]")
        out[ident] = v
    return out


def load_sources_dir(directory, schema: AttributeSchema | None = None,
                     allow_missing: bool = False) -> tuple[list[Dataset], dict[str, float]]:
    """Load ``logs.csv``, ``emotion.csv``, ``gaze.csv`` and ``scores.csv`` from a directory."""
    directory = Path(directory)
    schema = schema or default_schema()
    parts = [load_source_csv(directory / SOURCE_FILES[s], s, schema, allow_missing)
             for s in schema.sources]
    return parts, load_scores_csv(directory / SCORES_FILE)


def join_sources(parts: Sequence[Dataset], scores: Mapping[str, float] | Iterable[tuple[str, float]],
                 cutoffs=None) -> Dataset:
    """Join single-source datasets on ``id`` and attach marks and PASS/FAIL labels.

    Columns follow canonical source order (logs, emotion, gaze) whatever
    the order of ``parts``; rows follow the id order of the first part in
    that order.
    """
    from .preprocess import ClassCutoffs, discretize_class

    if not parts:
        raise DataError("nothing to join")
    scores = dict(scores)

    def key(p):
        srcs = p.schema.sources
        return SOURCES.index(srcs[0]) if srcs else len(SOURCES)

    parts = sorted(parts, key=key)
    srcs = [s for p in parts for s in p.schema.sources]
    if len(set(srcs)) != len(srcs):
        raise DataError("two parts carry the same source")
    ref = parts[0].ids
    ref_set = set(ref)
    orphans = set()
    for p in parts[1:]:
        orphans |= ref_set.symmetric_difference(p.ids)
    orphans |= ref_set.symmetric_difference(scores)
    if orphans:
        raise DataError(f"ids not present in every source: {', '.join(sorted(orphans))}")
    attrs = tuple(a for p in parts for a in p.schema.attributes)
    schema = AttributeSchema(attrs, parts[0].schema.class_labels)
    blocks = []
    for p in parts:
        pos = {i: r for r, i in enumerate(p.ids)}
        blocks.append(p.X[[pos[i] for i in ref]] if len(ref) else np.zeros((0, len(p.schema))))
    X = np.hstack(blocks) if blocks else np.zeros((len(ref), 0))
    score = np.array([scores[i] for i in ref], dtype=np.float64)
    cutoffs = cutoffs or ClassCutoffs.default()
    names = discretize_class(score, cutoffs)
    if set(cutoffs.labels) != set(schema.class_labels):
        schema = AttributeSchema(attrs, tuple(cutoffs.class_order))
    labels = [schema.class_labels.index(n) for n in names]
    return Dataset(schema, ref, X, np.array(labels, dtype=np.intp), score)


def anonymize(dataset: Dataset, seed: int) -> tuple[Dataset, IdMap]:
    """Replace ids by seeded random numeric tokens; row order is kept."""
    rng = random.Random(seed)
    originals = dataset.ids
    n = len(originals)
    width = max(6, len(str(max(n, 1))) + 4)
    lo, hi = 10 ** (width - 1), 10 ** width - 1
    tokens: list[str] = []
    used: set[str] = set()
    for orig in originals:
        while True:
            tok = str(rng.randint(lo, hi))
            if tok in used or any(o in tok or tok in o for o in originals):
                continue
            break
        used.add(tok)
        tokens.append(tok)
    return dataset.replace(ids=tuple(tokens)), IdMap(tuple(zip(originals, tokens)))


# -- emission ----------------------------------------------------------------

def write_dataset_csv(dataset: Dataset, path, include_score: bool = True,
                      include_class: bool = True, header_lines: Sequence[str] = ()) -> None:
    """Write a dataset; numeric cells use ``repr`` so reloading is exact."""
    schema = dataset.schema
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        head = [ID_COLUMN, *schema.names]
        if include_score and dataset.score is not None:
            head.append(SCORE_COLUMN)
        if include_class and dataset.labels is not None:
            head.append(CLASS_COLUMN)
        w.writerow(head)
        for r, ident in enumerate(dataset.ids):
            row = [ident]
            for j, a in enumerate(schema.attributes):
                v = dataset.X[r, j]
                row.append("" if math.isnan(v) else schema.format_value(j, v))
            if include_score and dataset.score is not None:
                row.append(repr(float(dataset.score[r])))
            if include_class and dataset.labels is not None:
                row.append(schema.class_labels[dataset.labels[r]])
            w.writerow(row)


def read_dataset_csv(path, schema: AttributeSchema, allow_missing: bool = False) -> Dataset:
    """Inverse of :func:`write_dataset_csv` for the given schema."""
    header, body = _read_rows(path)
    ids, X, pos = _build(schema, header, body, path, allow_missing,
                         extra=(SCORE_COLUMN, CLASS_COLUMN))
    score = labels = None
    if SCORE_COLUMN in pos:
        score = np.array([float(r[pos[SCORE_COLUMN]]) for r in body], dtype=np.float64)
    if CLASS_COLUMN in pos:
        try:
            labels = np.array([schema.class_labels.index(r[pos[CLASS_COLUMN]].strip()) for r in body],
                              dtype=np.intp)
        except ValueError as exc:
            raise DataError(f"{path}: unknown class label ({exc})") from None
    return Dataset(schema, tuple(ids), X, labels, score)


def write_source_csv(dataset: Dataset, source: str, path) -> None:
    idx = dataset.schema.indices_of(source)
    sub = Dataset(dataset.schema.select(idx), dataset.ids, dataset.X[:, idx])
    write_dataset_csv(sub, path, include_score=False, include_class=False)


def write_scores_csv(ids: Sequence[str], scores: Sequence[float], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([ID_COLUMN, SCORE_COLUMN])
        for i, s in zip(ids, scores):
            w.writerow([i, repr(float(s))])
