import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (naive_kendall_tau_b, naive_mae, naive_pearson,
                     naive_ranks, naive_spearman)
from qiraa.errors import LengthMismatch
from qiraa.corpus import plain_fold_indices
from qiraa.evaluation import (ConfusionMatrix, average_ranks,
                              classification_report, confusion,
                              correlation_suite, cross_validate,
                              kendall_tau_b, macro_prf, mean_absolute_error,
                              pearson, spearman, transfer_eval, weighted_prf)
from qiraa.models import ModelSpec, train

# the published SVM-rbf confusion counts (rows = gold A/B/C)
TABLE5 = np.asarray([
    [7485, 1021, 156],
    [4506, 1112, 0],
    [0, 0, 8627],
])


class TestConfusion:
    def test_diagonal_when_perfect(self):
        cm = confusion(["A", "B", "C", "A"], ["A", "B", "C", "A"])
        assert np.array_equal(cm.counts, np.diag([2, 1, 1]))

    def test_anti_diagonal(self):
        cm = confusion(["A", "B"], ["B", "A"])
        assert np.array_equal(cm.counts, [[0, 1], [1, 0]])

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            confusion(["A"], ["A", "B"])

    def test_published_counts_row_sums(self):
        cm = ConfusionMatrix(["A", "B", "C"], TABLE5)
        assert cm.counts.sum(axis=1).tolist() == [8662, 5618, 8627]
        assert cm.total == 22907


class TestWeightedPrf:
    def test_perfect(self):
        cm = confusion(["A", "B"] * 3, ["A", "B"] * 3)
        assert weighted_prf(cm) == (1.0, 1.0, 1.0)

    def test_published_matrix_weighted_recall(self):
        cm = ConfusionMatrix(["A", "B", "C"], TABLE5)
        _, r, _ = weighted_prf(cm)
        # weighted recall equals trace/total for exhaustive classes
        assert r == pytest.approx((7485 + 1112 + 8627) / 22907, abs=1e-12)

    def test_published_matrix_weighted_precision(self):
        cm = ConfusionMatrix(["A", "B", "C"], TABLE5)
        p, _, _ = weighted_prf(cm)
        expected = (8662 * (7485 / 11991) + 5618 * (1112 / 2133)
                    + 8627 * (8627 / 8783)) / 22907
        assert p == pytest.approx(expected, abs=1e-12)

    def test_empty_predicted_class_precision_zero(self):
        cm = confusion(["A", "B", "B"], ["A", "A", "A"])
        rows = {r["class"]: r for r in classification_report(
            ["A", "B", "B"], ["A", "A", "A"]).per_class}
        assert rows["B"]["precision"] == 0.0
        assert rows["B"]["f1"] == 0.0

    def test_weighted_vs_macro_differ_on_imbalance(self):
        gold = ["A"] * 9 + ["B"]
        pred = ["A"] * 10
        cm = confusion(gold, pred)
        assert weighted_prf(cm)[2] > macro_prf(cm)[2]


class TestKendallTauB:
    def test_identity_is_one(self):
        assert kendall_tau_b([1, 2, 3, 4], [1, 2, 3, 4]) == pytest.approx(1.0)

    def test_worked_tie_example_exact(self):
        assert kendall_tau_b([1, 1, 2, 3], [1, 2, 2, 3]) == 0.8

    def test_constant_is_undefined(self):
        assert kendall_tau_b([2, 2, 2], [1, 2, 3]) is None

    def test_symmetry_and_sign_flip(self):
        rng = np.random.default_rng(1)
        x = rng.integers(0, 5, size=30).astype(float)
        y = rng.integers(0, 5, size=30).astype(float)
        assert kendall_tau_b(x, y) == pytest.approx(kendall_tau_b(y, x), abs=1e-15)
        assert kendall_tau_b(x, -y) == pytest.approx(-kendall_tau_b(x, y), abs=1e-15)

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=60, deadline=None)
    def test_matches_naive_pair_scan(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(5, 60))
        # force ties by sampling from a small value set
        x = rng.integers(0, 6, size=n).astype(float)
        y = rng.integers(0, 6, size=n).astype(float)
        got = kendall_tau_b(x, y)
        want = naive_kendall_tau_b(x.tolist(), y.tolist())
        if want is None:
            assert got is None
        else:
            assert got == pytest.approx(want, abs=1e-12)


class TestCorrelations:
    def test_ranks_with_ties(self):
        assert average_ranks([10, 20, 20, 30]).tolist() == [1.0, 2.5, 2.5, 4.0]
        assert average_ranks([5, 5, 5]).tolist() == naive_ranks([5, 5, 5])

    def test_suite_on_identical(self):
        got = correlation_suite([1, 2, 3], [1, 2, 3])
        assert got == (pytest.approx(1.0), pytest.approx(1.0), pytest.approx(1.0), 0.0)

    def test_anti_linear(self):
        p, s, k, _ = correlation_suite([1.0, 2.0, 3.0, 4.0], [-1.0, -2.0, -3.0, -4.0])
        assert p == pytest.approx(-1.0)
        assert s == pytest.approx(-1.0)
        assert k == pytest.approx(-1.0)

    def test_zero_variance_undefined_but_mae_runs(self):
        p, s, k, mae = correlation_suite([1, 1, 1], [1, 2, 3])
        assert p is None and s is None and k is None
        assert mae == pytest.approx(1.0)  # (|0| + |1| + |2|) / 3

    def test_mae_direct(self):
        assert mean_absolute_error([1, 2, 3], [2, 2, 2]) == pytest.approx(2 / 3)

    def test_spearman_tie_free_equals_pearson_of_ranks(self):
        rng = np.random.default_rng(2)
        x = rng.permutation(40).astype(float)
        y = rng.permutation(40).astype(float)
        assert spearman(x, y) == pearson(average_ranks(x), average_ranks(y))

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=40, deadline=None)
    def test_all_match_naive(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(5, 50))
        x = np.round(rng.normal(size=n), 1)
        y = np.round(rng.normal(size=n), 1)
        p, s, k, mae = correlation_suite(x, y)
        np_ = naive_pearson(x.tolist(), y.tolist())
        ns = naive_spearman(x.tolist(), y.tolist())
        nk = naive_kendall_tau_b(x.tolist(), y.tolist())
        for got, want in ((p, np_), (s, ns), (k, nk)):
            if want is None:
                assert got is None
            else:
                assert got == pytest.approx(want, abs=1e-9)
        assert mae == pytest.approx(naive_mae(x.tolist(), y.tolist()), abs=1e-12)


class TestCrossValidate:
    def test_separable_three_class_softmax(self):
        from test_models import blobs
        X, y = blobs(n_per_class=40, seed=30)
        report = cross_validate(ModelSpec("softmax", hyperparams={"epochs": 40}),
                                X, y, k=5, seed=0)
        assert report.macro_f1 >= 0.95
        assert report.extras["k"] == 5
        assert len(report.extras["fold_seeds"]) == 5

    def test_shuffled_labels_fall_in_chance_band(self):
        rng = np.random.default_rng(31)
        X = rng.normal(size=(300, 6))
        y = np.asarray(["a", "b", "c"] * 100, dtype=object)
        rng.shuffle(y)
        report = cross_validate(ModelSpec("softmax", hyperparams={"epochs": 30}),
                                X, y, k=10, seed=1)
        assert 0.2 <= report.f1 <= 0.45

    @pytest.mark.parametrize("k", [2, 10])
    def test_every_instance_predicted_once(self, k):
        from test_models import blobs
        X, y = blobs(n_per_class=30, seed=32)
        report = cross_validate(ModelSpec("knn"), X, y, k=k, seed=2)
        assert report.confusion.total == len(y)

    def test_regression_on_ordinals_stratifies(self):
        rng = np.random.default_rng(33)
        y = np.asarray([1.0, 2.0, 3.0] * 30)
        X = y[:, None] + rng.normal(scale=0.1, size=(90, 1))
        report = cross_validate(ModelSpec("softmax", task="regress"), X, y, k=5, seed=3)
        assert report.kendall_tau_b > 0.8
        assert report.mae < 0.5

    def test_report_json_round_trip(self):
        from test_models import blobs
        X, y = blobs(n_per_class=20, seed=34)
        report = cross_validate(ModelSpec("knn"), X, y, k=2, seed=4)
        doc = json.loads(report.to_json())
        assert doc["task"] == "classify"
        assert doc["confusion"]["classes"] == ["c0", "c1", "c2"]
        text = report.to_text()
        assert "weighted" in text


class TestTransferEval:
    def test_all_simple_predictor_f1(self):
        # balanced gold, constant 'Simple' predictions: recall 1 on Simple,
        # 0 on Complex; weighted F1 = 0.5 * (2*0.5*1/1.5) = 1/3
        gold = ["Simple"] * 10 + ["Complex"] * 10
        pred = ["Simple"] * 20
        report = classification_report(gold, pred)
        assert report.f1 == pytest.approx(1 / 3, abs=1e-12)

    def test_model_on_own_training_set_consistency(self, golden_dataset,
                                                   golden_lexicon, golden_connectors):
        import dataclasses

        from qiraa.corpus import Dataset
        from qiraa.features import FeaturePipeline

        rng = np.random.default_rng(35)
        sents = []
        for rep in range(6):
            for s in golden_dataset:
                sents.append(dataclasses.replace(s, id=f"{s.id}r{rep}"))
        d = Dataset(sents, label_scheme="binary")
        pipeline = FeaturePipeline(lexicon=golden_lexicon, connectors=golden_connectors)
        fm = pipeline.featurize(d)
        y = d.labels()
        m = train(ModelSpec("decision_tree", seed=1), fm, y)
        report = transfer_eval(m, d, pipeline)
        assert report.f1 >= 0.99  # training set, memorizable
        assert report.extras["label_scheme"] == "binary"

    def test_hand_worked_miniature(self):
        # 10 Simple + 10 Complex with hand-set predictions:
        # Simple: 8 right; Complex: 6 right
        gold = ["Simple"] * 10 + ["Complex"] * 10
        pred = (["Simple"] * 8 + ["Complex"] * 2) + (["Simple"] * 4 + ["Complex"] * 6)
        report = classification_report(gold, pred)
        p_simple = 8 / 12
        p_complex = 6 / 8
        r_simple = 8 / 10
        r_complex = 6 / 10
        f_simple = 2 * p_simple * r_simple / (p_simple + r_simple)
        f_complex = 2 * p_complex * r_complex / (p_complex + r_complex)
        assert report.precision == pytest.approx((p_simple + p_complex) / 2, abs=1e-12)
        assert report.recall == pytest.approx((r_simple + r_complex) / 2, abs=1e-12)
        assert report.f1 == pytest.approx((f_simple + f_complex) / 2, abs=1e-12)


def test_plain_folds_cover_everything():
    folds = plain_fold_indices(11, 3, seed=0)
    seen = sorted(i for _, te in folds for i in te)
    assert seen == list(range(11))


def test_transfer_eval_rejects_regressors(golden_dataset, golden_lexicon,
                                          golden_connectors):
    import dataclasses

    from qiraa.corpus import Dataset
    from qiraa.features import FeaturePipeline

    sents = [dataclasses.replace(s, id=f"{s.id}x{r}")
             for r in range(3) for s in golden_dataset]
    d = Dataset(sents, label_scheme="binary")
    pipeline = FeaturePipeline(lexicon=golden_lexicon, connectors=golden_connectors)
    fm = pipeline.featurize(d)
    y = [float(s.gold.ordinal()) for s in d]
    m = train(ModelSpec("decision_tree", task="regress"), fm, y)
    with pytest.raises(ValueError):
        transfer_eval(m, d, pipeline)
