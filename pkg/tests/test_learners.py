import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import make_dataset, random_dataset
from mmfuse.dataset import AttributeSchema, Attribute, row_to_mapping
from mmfuse.errors import ConfigError, DataError, RuleSyntaxError
from mmfuse.learners import (ALGORITHMS, ExemplarModel, LearnerSpec, Model, RuleListModel,
                             TreeModel, VoteMember, VoteModel, VoteSpec, export_rules,
                             interpret_rules, parse_rules, predict_distribution, predict_label,
                             train)
from mmfuse.learners.base import Rule, argmax_label, average_distributions, canonical_algorithm
from mmfuse.learners.trees import added_errors

UNPRUNED = {"C45Tree": {"pruned": False, "min_leaf": 1}, "RandomTree": {}, "NNGE": {}}


class Fixed(Model):
    """Stub model returning one fixed distribution."""

    def __init__(self, dist, names=("a0",)):
        self.schema = AttributeSchema(tuple(Attribute(n, "logs") for n in names))
        self.dist = np.asarray(dist, float)

    def distribution(self, row):
        return self.dist


def threshold_data(n=20):
    x = np.linspace(0, 1, n)
    return make_dataset(x, (x <= 0.5).astype(int))


def test_aliases_and_params():
    assert canonical_algorithm("j48") == "C45Tree"
    assert canonical_algorithm("JRip") == "Ripper"
    assert LearnerSpec("part")["confidence"] == 0.25
    with pytest.raises(ConfigError):
        LearnerSpec("C45Tree", {"depth": 3})
    with pytest.raises(ConfigError):
        LearnerSpec("C45Tree", {"confidence": 0.9})
    with pytest.raises(ConfigError):
        LearnerSpec("SVM")


@pytest.mark.parametrize("algo", ALGORITHMS)
def test_single_class_gives_constant_model(algo):
    ds = make_dataset(np.arange(10.0), [0] * 10)
    m = train(LearnerSpec(algo), ds)
    for x in (-5.0, 3.0, 50.0):
        assert predict_label(m, [x]) == "PASS"
        assert predict_distribution(m, [x]).tolist() == [1.0, 0.0]
    text = export_rules(m)
    assert "If true Then PASS" in text or algo == "NNGE"
    assert text.rstrip().endswith("Number of Rules: 1")


@pytest.mark.parametrize("algo", ALGORITHMS)
def test_training_input_errors(algo):
    ds = make_dataset(np.arange(4.0), [0, 1, 0, 1])
    with pytest.raises(DataError):
        train(LearnerSpec(algo), ds.take([]))
    with pytest.raises(DataError):
        train(LearnerSpec(algo), ds.replace(labels=None))
    with pytest.raises(DataError):
        train(LearnerSpec(algo), ds.replace(X=[[1.0], [np.nan], [2.0], [3.0]]))
    m = train(LearnerSpec(algo), ds)
    with pytest.raises(DataError):
        predict_label(m, [1.0, 2.0])


def test_c45_threshold_root():
    m = train(LearnerSpec("C45Tree"), threshold_data())
    s = m.root.split
    assert s.attr == 0 and 0.4 < s.threshold <= 0.5
    text = export_rules(m)
    assert text.splitlines()[1].startswith("If a0 > ") and text.splitlines()[1].endswith("PASS (PASS=10, FAIL=0)")
    assert "Size of the tree: 3" in text and "Number of Rules: 2" in text


@pytest.mark.parametrize("algo", ["C45Tree", "REPTree"])
def test_aligned_attribute_wins_root(algo):
    rng = np.random.default_rng(0)
    a = np.repeat([0.0, 1.0], 15) + rng.uniform(0, 0.4, 30)
    b = rng.uniform(0, 1, 30)
    m = train(LearnerSpec(algo), make_dataset(np.column_stack([a, b]), np.repeat([1, 0], 15)))
    assert m.root.split.attr == 0


def test_leaf_counts_to_distribution():
    r = Rule((), np.array([3.0, 1.0]), 0)
    assert r.distribution.tolist() == [0.75, 0.25]


def test_vote_average_and_identity():
    bases = [Fixed([0.8, 0.2]), Fixed([0.6, 0.4]), Fixed([0.4, 0.6])]
    v = VoteModel([(f"s{i}", b) for i, b in enumerate(bases)])
    assert predict_distribution(v, [0.0]) == pytest.approx([0.6, 0.4])
    one = VoteModel([("s", bases[2])])
    assert predict_distribution(one, [0.0]).tolist() == [0.4, 0.6]


def test_tie_goes_to_first_class():
    assert argmax_label([0.5, 0.5]) == 0
    assert predict_label(Fixed([0.5, 0.5]), [0.0]) == "PASS"
    assert predict_label(Fixed([0.6, 0.4]), [0.0]) == "PASS"
    assert predict_label(Fixed([0.0, 1.0]), [0.0]) == "FAIL"


def test_average_distributions_is_sequential_mean():
    assert average_distributions([np.array([1.0, 0.0]), np.array([0.0, 1.0])]).tolist() == [0.5, 0.5]
    with pytest.raises(ValueError):
        average_distributions([])


def test_pessimistic_added_errors_monotone():
    # more observed errors or fewer instances -> larger upper bound
    assert added_errors(10, 0, 0.25) > 0
    assert added_errors(10, 2, 0.25) > added_errors(10, 1, 0.25)
    assert added_errors(6, 0, 0.25) / 6 > added_errors(60, 0, 0.25) / 60


@pytest.mark.parametrize("algo,params", list(UNPRUNED.items()))
def test_capacity_on_consistent_data(algo, params):
    for seed in range(5):
        rng = np.random.default_rng(seed)
        X = rng.permutation(60).reshape(30, 2) / 10.0
        y = rng.integers(0, 2, 30)
        ds = make_dataset(X, y)
        m = train(LearnerSpec(algo, params, seed=seed), ds)
        pred = [m.label(r) for r in ds.X]
        assert pred == list(y)


@pytest.mark.parametrize("algo", ["C45Tree", "REPTree", "Ripper", "PartRules"])
def test_pruned_at_least_majority(algo):
    for seed in range(8):
        ds = random_dataset(seed, n=50, d=4)
        m = train(LearnerSpec(algo, seed=seed), ds)
        acc = np.mean([m.label(r) == y for r, y in zip(ds.X, ds.labels)])
        assert acc >= ds.class_counts().max() / len(ds)


def test_ripper_ends_with_default_and_targets_rarest():
    ds = random_dataset(3, n=60, d=3, kinds="nnn")
    m = train(LearnerSpec("Ripper"), ds)
    assert isinstance(m, RuleListModel)
    assert m.rules[-1].conditions == ()
    rare = int(np.argmin(ds.class_counts()))
    assert all(r.target == rare for r in m.rules[:-1])


def test_part_rules_partition_training_data():
    ds = random_dataset(4, n=60, d=4)
    m = train(LearnerSpec("PartRules"), ds)
    assert m.rules[-1].conditions == ()
    total = sum(r.counts.sum() for r in m.rules)
    assert total == len(ds)


def test_nnge_inside_rectangle_and_one_hot():
    X = [[0.0], [0.1], [0.2], [0.8], [0.9], [1.0]]
    m = train(LearnerSpec("NNGE"), make_dataset(X, [0, 0, 0, 1, 1, 1]))
    assert isinstance(m, ExemplarModel)
    assert len(m.exemplars) == 2
    assert predict_distribution(m, [0.15]).tolist() == [1.0, 0.0]
    assert predict_label(m, [0.6]) == "FAIL"
    assert m.exemplars[0].distance(np.array([0.15]), m.numeric, m.scales) == 0.0


def test_nnge_splits_conflicting_exemplar():
    X = [[0.0], [1.0], [0.5]]
    m = train(LearnerSpec("NNGE"), make_dataset(X, [0, 0, 1]))
    assert predict_label(m, [0.5]) == "FAIL"
    assert predict_label(m, [0.0]) == "PASS" and predict_label(m, [1.0]) == "PASS"


def test_categorical_inputs_by_name(tiny):
    for algo in ALGORITHMS:
        m = train(LearnerSpec(algo), tiny)
        label = predict_label(m, {"a0": 0.1, "a1": "v1"})
        assert label in ("PASS", "FAIL")
        with pytest.raises(DataError):
            predict_label(m, {"a0": 0.1, "a1": "zzz"})


@pytest.mark.parametrize("algo", ALGORITHMS)
def test_determinism(algo):
    ds = random_dataset(11, n=50, d=5)
    a, b = train(LearnerSpec(algo, seed=3), ds), train(LearnerSpec(algo, seed=3), ds)
    assert export_rules(a) == export_rules(b)
    assert np.array_equal(a.distributions(ds.X), b.distributions(ds.X))


def test_random_tree_depends_on_seed():
    ds = random_dataset(12, n=80, d=8, kinds="n" * 8, signal=False)
    texts = {export_rules(train(LearnerSpec("RandomTree", seed=s), ds)) for s in range(5)}
    assert len(texts) > 1


def check_fidelity(model, ds, n_probe, rng):
    lo, hi = ds.X.min(axis=0), ds.X.max(axis=0)
    text = export_rules(model)
    for _ in range(n_probe):
        row = np.empty(ds.n_attributes)
        for j, a in enumerate(ds.schema.attributes):
            if a.is_numeric:
                # mix fresh values with exact training values to hit thresholds
                row[j] = ds.X[rng.integers(len(ds)), j] if rng.random() < 0.3 else \
                    rng.uniform(lo[j] - 0.5, hi[j] + 0.5)
            else:
                row[j] = rng.integers(len(a.categories))
        inst = row_to_mapping(ds.schema, row)
        # mapping input: a vote's schema may order attributes differently
        assert interpret_rules(text, inst) == predict_label(model, inst)


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(0, 10 ** 6), st.sampled_from(ALGORITHMS), st.integers(5, 60), st.integers(1, 6))
def test_fidelity_property(seed, algo, n, d):
    ds = random_dataset(seed, n=n, d=d)
    m = train(LearnerSpec(algo, seed=seed), ds)
    check_fidelity(m, ds, 40, np.random.default_rng(seed))


@settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(0, 10 ** 6), st.sampled_from(ALGORITHMS))
def test_vote_fidelity_property(seed, algo):
    ds = random_dataset(seed, n=40, d=6)
    names = ds.schema.names
    spec = VoteSpec(tuple(VoteMember(src, LearnerSpec(algo, seed=seed),
                                     tuple(n for n, a in zip(names, ds.schema.attributes) if a.source == src))
                          for src in ds.schema.sources))
    m = train(spec, ds)
    assert export_rules(m).count("=== ") == len(ds.schema.sources)
    check_fidelity(m, ds, 40, np.random.default_rng(seed))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from(ALGORITHMS))
def test_distributions_valid(seed, algo):
    ds = random_dataset(seed, n=30, d=3)
    m = train(LearnerSpec(algo, seed=seed), ds)
    D = m.distributions(ds.X + 0.01)
    assert (D >= 0).all()
    assert np.allclose(D.sum(axis=1), 1.0, atol=1e-9)


def test_vote_linearity():
    ds = random_dataset(5, n=40, d=6)
    names = ds.schema.names
    members = (VoteMember("x", LearnerSpec("C45Tree"), names[:3]),
               VoteMember("y", LearnerSpec("NNGE"), names[3:]),
               VoteMember("z", LearnerSpec("Ripper"), names))
    v = train(VoteSpec(members), ds)
    for row in ds.X[:10]:
        parts = [m.distribution(row[cols]) for (_, m), cols in zip(v.bases, v.columns)]
        assert np.array_equal(v.distribution(row), average_distributions(parts))


def test_vote_of_three_stumps_layout():
    x = np.linspace(0, 1, 30)
    y = (x <= 0.5).astype(int)
    X = np.column_stack([x, x[::-1], x])
    ds = make_dataset(X, y, names=["s1", "s2", "s3"])
    members = tuple(VoteMember(src, LearnerSpec("REPTree"), (n,))
                    for src, n in zip(ds.schema.sources, ("s1", "s2", "s3")))
    text = export_rules(train(VoteSpec(members), ds))
    assert text.count("Size of the tree: 3") == 3
    assert text.rstrip().endswith("Number of Rules: 6")
    assert [line for line in text.splitlines() if line.startswith("===")] == \
        ["=== logs ===", "=== emotion ===", "=== gaze ==="]


def test_interpreter_on_hand_written_rules():
    text = ("If Metatutor.SummAll > 0.25 Then PASS\n"
            "If Metatutor.SummAll <=0.25 AND Emotions.surprise <=0.061227 Then FAIL\n"
            "If Emotions.surprise > 0.06 AND Interaction.AOI3FixCount<=0.04 Then PASS\n"
            "Else FAIL\n"
            "Number of Rules: 4\n")
    inst = {"Metatutor.SummAll": 0.3, "Emotions.surprise": 0.0, "Interaction.AOI3FixCount": 0.5}
    assert interpret_rules(text, inst) == "PASS"
    inst.update({"Metatutor.SummAll": 0.1, "Emotions.surprise": 0.07})
    assert interpret_rules(text, inst) == "FAIL"
    assert interpret_rules("If true Then FAIL\n", {}) == "FAIL"


@pytest.mark.parametrize("text", ["If a0 >> 1 Then PASS", "garbage", "=== x ===\n"])
def test_interpreter_rejects_malformed(text):
    with pytest.raises(RuleSyntaxError):
        parse_rules(text)


def test_tree_model_types():
    ds = random_dataset(1)
    assert isinstance(train(LearnerSpec("REPTree"), ds), TreeModel)
    assert isinstance(train(LearnerSpec("PartRules"), ds), RuleListModel)
