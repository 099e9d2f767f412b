import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmfuse.dataset import join_sources, load_sources_dir
from mmfuse.errors import ConfigError, DataError
from mmfuse.evaluation import cross_validate
from mmfuse.harness import (GenParams, default_config, generate_synthetic,
                            load_config, parse_config, render_config, render_tables, run_pipeline,
                            selection_only, synthesize)
from mmfuse.harness.cli import main, parse_cell
from mmfuse.harness.report import read_bundle
from mmfuse.learners import LearnerSpec, train
from mmfuse.preprocess import min_max_normalize, project_names

SMALL = dict(algorithms=("C45Tree", "NNGE"), modes=("merge_all", "ensemble_per_source"))


# -- config -----------------------------------------------------------------------

def test_parse_config_values():
    cfg = parse_config("# comment\nk = 5\nalgorithms = j48, NNGE\nfit_in_fold = yes\n"
                       "cutoffs = 5.0\n", env={})
    assert cfg.k == 5 and cfg.fit_in_fold
    assert cfg.algorithms == ("C45Tree", "NNGE")
    assert cfg.seeds == {"cv_seed": 1, "gen_seed": 1, "learner_seed": 1, "anon_seed": 1}


@pytest.mark.parametrize("text,pattern", [
    ("bogus = 1\n", "line 1: unknown key"),
    ("k = 5\nk = 6\n", "line 2: key 'k' given twice"),
    ("k = five\n", "bad value"),
    ("just words\n", "expected 'key = value'"),
    ("modes = merge_all, everything\n", "unknown mode"),
    ("k = 1\n", "k must be"),
    ("gen_n = 5\n", "smaller than k"),
    ("gen_noise = 0.9\n", "noise"),
    ("cutoffs = 12\n", "cut"),
    ("algorithms = C45Tree, j48\n", "twice"),
])
def test_config_errors(text, pattern):
    with pytest.raises(ConfigError, match=pattern):
        parse_config(text, env={})


def test_fuse_seed_fills_unset_seeds():
    cfg = parse_config("cv_seed = 4\n", env={"FUSE_SEED": "9"})
    assert cfg.seeds == {"cv_seed": 4, "gen_seed": 9, "learner_seed": 9, "anon_seed": 9}
    assert default_config(env={"FUSE_SEED": "3"}).gen_seed == 3
    with pytest.raises(ConfigError):
        default_config(env={"FUSE_SEED": "x"})


def test_render_round_trip(tmp_path):
    cfg = default_config(env={}, k=5, algorithms=("Ripper",), gen_noise=0.1, output_dir=str(tmp_path))
    again = parse_config(render_config(cfg), env={"FUSE_SEED": "77"})
    assert again == cfg and again.hash() == cfg.hash()
    assert cfg.with_output("elsewhere").hash() == cfg.hash()
    assert default_config(env={}, cv_seed=2).hash() != cfg.hash()


def test_config_paths_relative_to_file(tmp_path):
    (tmp_path / "sub").mkdir()
    p = tmp_path / "sub" / "exp.cfg"
    p.write_text("input_dir = data\noutput_dir = out\n")
    cfg = load_config(p, env={})
    assert cfg.input_dir == str(tmp_path / "sub" / "data")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")


# -- generator ------------------------------------------------------------------------

@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(10, 60), st.floats(0, 0.5))
def test_generator_properties(seed, n, noise):
    params = GenParams(n, n // 2, noise)
    parts, scores = synthesize(params, seed)
    ds = join_sources(parts, scores)
    assert len(ds) == n and list(ds.class_counts()) == [n // 2, n - n // 2]
    emo = ds.X[:, list(ds.schema.indices_of("emotion"))]
    assert ((emo >= 0) & (emo <= 1)).all()
    counts = ds.X[:, [i for i in range(ds.n_attributes) if i not in ds.schema.indices_of("emotion")]]
    assert (counts >= 0).all() and np.array_equal(counts, np.round(counts))
    assert all(0 <= s <= 10 for s in scores.values())
    parts2, scores2 = synthesize(params, seed)
    assert join_sources(parts2, scores2) == ds


def test_generator_validation():
    with pytest.raises(ConfigError):
        GenParams(40, 41)
    with pytest.raises(ConfigError):
        GenParams(40, 21, -0.1)


def test_noiseless_planted_stump():
    parts, scores = synthesize(GenParams(noise=0.0), 3)
    ds, _ = min_max_normalize(join_sources(parts, scores))
    one = project_names(ds, ["SummAll"])
    m = train(LearnerSpec("C45Tree"), one)
    assert m.size == 3
    assert [m.label(r) for r in one.X] == list(one.labels)
    # held-out points may fall between the learned and the planted threshold
    assert cross_validate(LearnerSpec("C45Tree"), one, 10, 1).accuracy_pct >= 95.0


def test_generated_files_load(tmp_path):
    paths = generate_synthetic(None, 5, tmp_path)
    assert sorted(p.name for p in paths) == ["emotion.csv", "gaze.csv", "logs.csv", "scores.csv"]
    parts, scores = load_sources_dir(tmp_path)
    assert len(join_sources(parts, scores)) == 40


# -- pipeline ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def full_bundle():
    return run_pipeline(default_config(env={}))


def test_full_grid_shape(full_bundle):
    cells = {r.cell for r in full_bundle.reports}
    assert len(cells) == len(full_bundle.reports) == 36
    assert len(full_bundle.summary) == 6
    assert [d.mode for d in full_bundle.rules] == ["merge_all", "select_merged", "ensemble_per_source"]
    for r in full_bundle.reports:
        assert r.accuracy_pct % 2.5 == pytest.approx(0.0, abs=1e-9)


def test_best_cell_tie_break(full_bundle):
    for dump in full_bundle.rules:
        rs = [r for r in full_bundle.reports if r.mode == dump.mode]
        top = max(r.accuracy_pct for r in rs)
        best = full_bundle.report(dump.mode, dump.representation, dump.algorithm)
        assert best.accuracy_pct == top
        assert best.auc == max(r.auc for r in rs if r.accuracy_pct == top)


def test_selection_reports(full_bundle):
    tags = {(s.mode, s.dataset) for s in full_bundle.selections}
    assert ("select_merged", "merged") in tags
    assert {("ensemble_per_source", s) for s in ("logs", "emotion", "gaze")} <= tags
    assert selection_only(default_config(env={})) == [
        s for s in full_bundle.selections if s.representation == "numerical"] + [
        s for s in full_bundle.selections if s.representation == "discretized"]


def test_merge_all_only():
    b = run_pipeline(default_config(env={}, modes=("merge_all",)))
    assert {r.mode for r in b.reports} == {"merge_all"} and len(b.reports) == 12
    assert b.selections == []


def test_tables_and_round_trip(tmp_path, full_bundle):
    paths = render_tables(full_bundle, ("text", "csv", "json"), tmp_path)
    names = {p.name for p in paths}
    assert {"results_merge_all.txt", "summary.txt", "selection.txt", "rules_merge_all.txt",
            "reports.csv", "predictions.csv", "bundle.json"} <= names
    assert read_bundle(tmp_path / "bundle.json") == full_bundle
    for p in paths:
        text = p.read_text()
        assert "config_hash" in (json.loads(text)["provenance"] if p.suffix == ".json" else text.split("\n")[1])
    table = (tmp_path / "results_select_merged.txt").read_text().splitlines()
    avg = next(line.split() for line in table if line.startswith("Avg."))
    summ = {s.representation: s for s in full_bundle.summary if s.mode == "select_merged"}
    for j, rep in ((1, "numerical"), (3, "discretized")):
        rs = [r for r in full_bundle.reports if r.mode == "select_merged" and r.representation == rep]
        assert float(avg[j]) == pytest.approx(np.mean([r.accuracy_pct for r in rs]), abs=0.005)
        assert float(avg[j + 1]) == pytest.approx(np.mean([r.auc for r in rs]), abs=0.005)
        assert summ[rep].accuracy_pct == pytest.approx(float(avg[j]), abs=0.005)


def test_fit_in_fold_runs():
    cfg = default_config(env={}, fit_in_fold=True, **SMALL)
    b = run_pipeline(cfg)
    assert len(b.reports) == 8 and b.provenance["fit_in_fold"] is True
    assert b == run_pipeline(cfg)


def test_vote_across_algorithms_row():
    b = run_pipeline(default_config(env={}, vote_across_algorithms=True, **SMALL))
    votes = [r for r in b.reports if r.algorithm == "Vote"]
    assert [r.mode for r in votes] == ["ensemble_per_source"] * 2
    assert next(s for s in b.summary if s.mode == "ensemble_per_source").n_algorithms == 3


def test_missing_input_dir_is_data_error(tmp_path):
    with pytest.raises(DataError):
        run_pipeline(default_config(env={}, input_dir=str(tmp_path / "nope")))


# -- CLI -----------------------------------------------------------------------------------

def test_parse_cell():
    assert parse_cell("merge_all:numerical:j48") == ("merge_all", "numerical", "C45Tree")
    for bad in ("merge_all:numerical", "x:numerical:C45Tree", "merge_all:raw:C45Tree"):
        with pytest.raises(ConfigError):
            parse_cell(bad)


def test_cli_gen_select_rules(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("FUSE_SEED", "4")
    assert main(["gen", "--out", str(tmp_path / "d")]) == 0
    direct, _ = synthesize(None, 4)
    parts, _ = load_sources_dir(tmp_path / "d")
    assert parts[0].X.tolist() == direct[0].X.tolist()
    capsys.readouterr()
    assert main(["select", "--in", str(tmp_path / "d")]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# tool:") and "gen_seed: n/a" in out and "SummAll" in out
    assert main(["rules", "--cell", "select_merged:numerical:Ripper", "--in", str(tmp_path / "d"),
                 "--out", str(tmp_path / "r.txt")]) == 0
    text = (tmp_path / "r.txt").read_text()
    assert "# cell: select_merged:numerical:Ripper" in text and "Number of Rules:" in text


def test_cli_run_and_exit_codes(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("algorithms = C45Tree\nmodes = merge_all\noutput_dir = out\n")
    assert main(["run", "--config", str(cfg), "-q"]) == 0
    assert (tmp_path / "out" / "config.txt").read_text().startswith("# tool:")
    assert main(["rules", "--cell", "nope:numerical:C45Tree"]) == 2
    assert main(["run", "--config", str(tmp_path / "missing.cfg")]) == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("k = zero\n")
    assert main(["run", "--config", str(bad)]) == 2
    assert main(["select", "--in", str(tmp_path / "nowhere")]) == 3
    empty = tmp_path / "empty"
    empty.mkdir()
    assert main(["select", "--in", str(empty)]) == 3
    err = capsys.readouterr().err
    assert "config error" in err and "data error" in err
