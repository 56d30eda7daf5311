import numpy as np
import pytest

from nodebench.evaluation import (AuditedLabels, ClassifierSpec, Split, evaluate, f1_scores,
                                  fraction_sweep, make_split, most_frequent_baseline,
                                  multilabel_predict)
from nodebench.graph import DataError, LabelStore

from oracles import brute_force_f1


def store(classes, task="multiclass"):
    k = max(classes) + 1
    return LabelStore(task, tuple(f"l{i}" for i in range(k)), tuple((int(c),) for c in classes))


def test_split_sizes_and_determinism():
    lab = store(np.random.default_rng(0).integers(0, 5, 1000))
    s = make_split(lab, seed=3)
    assert s.sizes() == (500, 250, 250)
    all_rows = np.concatenate([s.train, s.val, s.test])
    assert len(np.unique(all_rows)) == 1000
    t = make_split(lab, seed=3)
    assert all(np.array_equal(s.part(p), t.part(p)) for p in ("train", "val", "test"))


def test_stratified_imbalance():
    lab = store([0] * 900 + [1] * 100, "binary")
    s = make_split(lab, seed=1)
    for part, n in zip(("train", "val", "test"), s.sizes()):
        minority = np.sum(lab.class_vector(s.part(part)) == 1)
        assert abs(minority - 0.1 * n) <= 1


def test_stratified_bounds_random_stores():
    rng = np.random.default_rng(5)
    for trial in range(30):
        n = int(rng.integers(20, 400))
        lab = store(rng.integers(0, int(rng.integers(2, 8)), n))
        s = make_split(lab, seed=trial)
        sizes = np.bincount(lab.class_vector(lab.labeled_nodes()))
        for part, f in zip(("train", "val", "test"), s.fractions):
            got = np.bincount(lab.class_vector(s.part(part)), minlength=len(sizes))
            big = sizes >= 3
            assert np.all(np.abs(got[big] - f * sizes[big]) < 1 + 1e-9)


def test_unlabeled_nodes_excluded_and_bad_fractions():
    lab = LabelStore("multiclass", ("a",), ((0,), (), (0,), (0,), ()))
    s = make_split(lab)
    assert not set([1, 4]) & set(np.concatenate([s.train, s.val, s.test]).tolist())
    with pytest.raises(ValueError):
        make_split(lab, fractions=(0.5, 0.5, 0.1))


def test_f1_examples():
    r = f1_scores([0, 1, 2], [0, 1, 2])
    assert r.macro_f1 == r.micro_f1 == 1.0
    # binary: TP=1 FP=1 FN=1 TN=1 on the positive label
    t = np.array([[1], [1], [0], [0]], dtype=bool)
    p = np.array([[1], [0], [1], [0]], dtype=bool)
    assert f1_scores(t, p).micro_f1 == 0.5
    # per-class F1 (1, 0.5, 0): class0 perfect, class1 tp1 fp0 fn... see counts below
    y_true = [0, 0, 1, 1, 2]
    y_pred = [0, 0, 1, 2, 1]
    r = f1_scores(y_true, y_pred, 3)
    assert np.allclose(r.f1, [1.0, 0.5, 0.0])
    assert np.isclose(r.macro_f1, 0.5)
    assert np.isclose(r.micro_f1, 3 / 5)
    with pytest.raises(DataError):
        f1_scores([0, 3], [0, 1], 3)


def test_f1_matches_brute_force_on_random_sets():
    rng = np.random.default_rng(11)
    for _ in range(200):
        k = int(rng.integers(1, 7))
        n = int(rng.integers(1, 40))
        t = rng.random((n, k)) < rng.random()
        p = rng.random((n, k)) < rng.random()
        ts = [set(np.flatnonzero(r).tolist()) for r in t]
        ps = [set(np.flatnonzero(r).tolist()) for r in p]
        macro, micro = brute_force_f1(ts, ps, k)
        r = f1_scores(t, p)
        assert np.isclose(r.macro_f1, macro, atol=1e-12) and np.isclose(r.micro_f1, micro, atol=1e-12)


def test_micro_equals_accuracy_single_label():
    rng = np.random.default_rng(12)
    for _ in range(200):
        k = int(rng.integers(2, 8))
        n = int(rng.integers(1, 60))
        t, p = rng.integers(0, k, n), rng.integers(0, k, n)
        assert np.isclose(f1_scores(t, p, k).micro_f1, np.mean(t == p), atol=1e-12)


def test_multilabel_rules():
    assert np.flatnonzero(multilabel_predict([[0.9, 0.1, 0.8]], "top_k_true", [2])[0]).tolist() == [0, 2]
    assert np.flatnonzero(multilabel_predict([[0.4, 0.3]], 0.5)[0]).tolist() == [0]
    assert np.flatnonzero(multilabel_predict([[0.5, 0.5]], "top_k_true", [1])[0]).tolist() == [0]
    with pytest.raises(ValueError):
        multilabel_predict([[0.1]], "top_k_true")


def test_identity_embedding_overfits():
    rng = np.random.default_rng(2)
    n = 200
    lab = store(rng.integers(0, 4, n))
    s = make_split(lab, seed=0)
    x = np.eye(n)
    spec = ClassifierSpec("forest", {"n_trees": 25})
    train_eval = Split(s.train, s.train, s.test)
    assert evaluate(x, lab, train_eval, spec).micro_f1 >= 0.95
    val = evaluate(x, lab, s, spec)
    assert val.micro_f1 < 0.45


def test_evaluate_deterministic_and_shape_check():
    rng = np.random.default_rng(3)
    lab = store(rng.integers(0, 3, 90))
    x = rng.standard_normal((90, 4)) + np.eye(3)[lab.class_vector(np.arange(90))] @ rng.standard_normal((3, 4))
    s = make_split(lab)
    for kind in ("logreg", "forest"):
        spec = ClassifierSpec(kind, {"epochs": 20} if kind == "logreg" else {"n_trees": 10})
        assert evaluate(x, lab, s, spec, seed=1).same_scores(evaluate(x, lab, s, spec, seed=1))
    with pytest.raises(DataError):
        evaluate(x[:10], lab, s, ClassifierSpec())


def test_baseline():
    lab = store([0] * 10 + [1] * 30)
    s = make_split(lab, seed=0)
    assert np.isclose(most_frequent_baseline(lab, s).micro_f1, np.mean(lab.class_vector(s.test) == 1))
    same = store([2] * 12)
    assert most_frequent_baseline(same, make_split(same)).micro_f1 == 1.0


def test_audited_reads_only_requested_parts():
    rng = np.random.default_rng(4)
    lab = store(rng.integers(0, 2, 40), "binary")
    s = make_split(lab)
    audited = AuditedLabels(lab, s)
    evaluate(rng.standard_normal((40, 3)), audited, s, ClassifierSpec(params={"epochs": 5}))
    assert audited.reads["test"] == 0 and audited.reads["train"] >= 1 and audited.reads["val"] >= 1
    most_frequent_baseline(audited, s)
    assert audited.reads["test"] == 1


def test_fraction_sweep_identity_and_nesting():
    rng = np.random.default_rng(6)
    lab = store(rng.integers(0, 3, 120))
    x = rng.standard_normal((120, 5))
    s = make_split(lab)
    spec = ClassifierSpec(params={"epochs": 10})
    sweep = fraction_sweep(x, lab, s, spec, [0.1, 0.2, 0.5, 1.0], seed=2)
    assert [f for f, _ in sweep] == [0.1, 0.2, 0.5, 1.0]
    assert sweep[-1][1].same_scores(evaluate(x, lab, s, spec, eval_on="test", seed=2))
    order = np.random.default_rng([2, 0xF5]).permutation(s.train)
    subsets = [set(order[:int(np.ceil(f * len(order)))].tolist()) for f in (0.1, 0.2, 0.5)]
    assert subsets[0] < subsets[1] < subsets[2]
    with pytest.raises(ValueError):
        fraction_sweep(x, lab, s, spec, [0.0])
