import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmfuse.dataset import (CATEGORICAL, Attribute, AttributeSchema, Dataset, IdMap, anonymize,
                            default_schema, join_sources, load_scores_csv, load_source_csv,
                            load_sources_dir, read_dataset_csv, write_dataset_csv)
from mmfuse.errors import DataError
from mmfuse.harness.synthetic import generate_synthetic, synthesize


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_default_schema_inventory():
    s = default_schema()
    assert len(s) == 14
    assert s.sources == ("logs", "emotion", "gaze")
    assert s.names[:3] == ("SummAll", "COIStotalFreq", "PKAtotalFreq")
    assert len(s.indices_of("emotion")) == 8
    assert s.class_labels == ("PASS", "FAIL")


@pytest.mark.parametrize("bad", [
    lambda: Attribute("a b", "logs"),
    lambda: Attribute("x", "eeg"),
    lambda: Attribute("x", "logs", CATEGORICAL, ()),
    lambda: Attribute("x", "logs", "numeric", ("A",)),
    lambda: AttributeSchema((Attribute("x", "logs"), Attribute("x", "gaze"))),
    lambda: AttributeSchema((Attribute("x", "logs"),), ("PASS", "PASS")),
])
def test_schema_rejects_invalid(bad):
    with pytest.raises(DataError):
        bad()


def test_dataset_is_immutable_and_validated():
    s = default_schema().for_source("gaze")
    ds = Dataset(s, ("a", "b"), [[1, 2, 3], [4, 5, 6]], [0, 1], [5.0, 4.0])
    with pytest.raises(ValueError):
        ds.X[0, 0] = 9
    with pytest.raises(DataError):
        Dataset(s, ("a", "a"), [[1, 2, 3], [4, 5, 6]])
    with pytest.raises(DataError):
        Dataset(s, ("a", "b"), [[1, 2, 3], [4, 5, 6]], score=[5.0, 10.5])
    with pytest.raises(DataError):
        Dataset(s, ("a",), [[1, 2]])


def test_load_logs_40_rows(tmp_path):
    generate_synthetic(None, 1, tmp_path)
    ds = load_source_csv(tmp_path / "logs.csv", "logs")
    assert len(ds) == 40
    assert ds.schema.names == ("SummAll", "COIStotalFreq", "PKAtotalFreq")


def test_header_only_is_empty_dataset(tmp_path):
    p = write(tmp_path / "logs.csv", "id,SummAll,COIStotalFreq,PKAtotalFreq\n")
    ds = load_source_csv(p, "logs")
    assert len(ds) == 0 and ds.X.shape == (0, 3)


def test_parse_error_names_row_and_column(tmp_path):
    p = write(tmp_path / "logs.csv",
              "id,SummAll,COIStotalFreq,PKAtotalFreq\na,1,2,3\nb,1,2,3\nc,abc,2,3\n")
    with pytest.raises(DataError, match=r"row 3, column 'SummAll'"):
        load_source_csv(p, "logs")


@pytest.mark.parametrize("text,pattern", [
    ("id,SummAll,COIStotalFreq,PKAtotalFreq,extra\na,1,2,3,4\n", "unknown columns"),
    ("id,SummAll,COIStotalFreq\na,1,2\n", "missing columns"),
    ("id,SummAll,SummAll,PKAtotalFreq\na,1,2,3\n", "duplicate header"),
    ("id,SummAll,COIStotalFreq,PKAtotalFreq\na,1,2,3\na,1,2,3\n", "duplicate ids"),
    ("SummAll,COIStotalFreq,PKAtotalFreq\n1,2,3\n", "'id'"),
])
def test_load_errors(tmp_path, text, pattern):
    p = write(tmp_path / "logs.csv", text)
    with pytest.raises(DataError, match=pattern):
        load_source_csv(p, "logs")


def test_missing_cells_opt_in(tmp_path):
    p = write(tmp_path / "logs.csv", "id,SummAll,COIStotalFreq,PKAtotalFreq\na,1,,3\n")
    with pytest.raises(DataError, match="missing value"):
        load_source_csv(p, "logs")
    ds = load_source_csv(p, "logs", allow_missing=True)
    assert np.isnan(ds.X[0, 1])


def test_scores_validation(tmp_path):
    with pytest.raises(DataError, match="outside"):
        load_scores_csv(write(tmp_path / "s.csv", "id,score\na,11\n"))
    assert load_scores_csv(write(tmp_path / "t.csv", "id,score\na,5\n")) == {"a": 5.0}


def test_join_labels_and_order(tmp_path):
    generate_synthetic(None, 2, tmp_path)
    parts, scores = load_sources_dir(tmp_path)
    joined = join_sources(list(reversed(parts)), scores)
    assert joined.schema.names == default_schema().names
    assert joined.ids == parts[0].ids
    assert list(joined.class_counts()) == [21, 19]
    for i, s in zip(joined.label_names(), joined.score):
        assert i == ("PASS" if s >= 5 else "FAIL")


def test_join_reports_orphans():
    parts, scores = synthesize(None, 1)
    scores.pop("s07")
    with pytest.raises(DataError, match="s07"):
        join_sources(parts, scores)
    short = parts[2].take(range(39))
    with pytest.raises(DataError, match="s40"):
        join_sources([parts[0], parts[1], short], synthesize(None, 1)[1])


def test_anonymize_bijection_no_substrings():
    parts, scores = synthesize(None, 1)
    ds = join_sources(parts, scores)
    anon, idmap = anonymize(ds, seed=5)
    fwd = idmap.forward()
    assert len(set(fwd.values())) == len(ds)
    assert idmap.inverse() == {v: k for k, v in fwd.items()}
    for orig, tok in fwd.items():
        assert orig not in tok and tok not in orig
    assert anon.ids == tuple(fwd[i] for i in ds.ids)
    assert np.array_equal(anon.X, ds.X)
    again, _ = anonymize(ds, seed=5)
    assert again.ids == anon.ids
    assert anonymize(ds, seed=6)[0].ids != anon.ids


@settings(max_examples=30, deadline=None)
@given(st.lists(st.text("abc0123456789", min_size=1, max_size=8), min_size=1, max_size=30, unique=True),
       st.integers(0, 10 ** 6))
def test_anonymize_property(originals, seed):
    s = default_schema().for_source("gaze")
    ds = Dataset(s, tuple(originals), np.zeros((len(originals), 3)))
    anon, idmap = anonymize(ds, seed)
    assert isinstance(idmap, IdMap)
    assert len(set(anon.ids)) == len(originals)
    for o, t in idmap.pairs:
        assert o not in t and t not in o


def test_dataset_csv_round_trip(tmp_path):
    parts, scores = synthesize(None, 4)
    ds = join_sources(parts, scores)
    p = tmp_path / "all.csv"
    write_dataset_csv(ds, p, header_lines=["cv_seed: 1"])
    assert p.read_text().startswith("# cv_seed: 1\n")
    assert read_dataset_csv(p, ds.schema) == ds


def test_instance_mapping_uses_category_names():
    a = Attribute("band", "logs", CATEGORICAL, ("LOW", "HIGH"))
    ds = Dataset(AttributeSchema((a,)), ("x",), [[1]])
    assert ds.instance(0) == {"band": "HIGH"}
