import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import constant_fingerprint
from songprint.classifiers import Classifier, Technique, make_technique
from songprint.errors import DatasetTooSmall, ZeroClass
from songprint.evaluation import (EXTENDED, SIMPLE, ConfusionCounts, EvalReport, fold_seed,
                                  format_table, loocv, rates, run_experiment, write_table)
from songprint.features import MGB, OTHER
from songprint.sampling import LabeledDataset


class NearestNeighbour(Classifier):
    def __init__(self, X, y):
        self.X, self.y = X, y

    def predict(self, Z):
        d = np.abs(Z[:, None, :] - self.X[None, :, :]).sum(axis=2)
        return self.y[np.argmin(d, axis=1)]


class Constant(Classifier):
    def __init__(self, k):
        self.k = k

    def predict(self, Z):
        return np.full(Z.shape[0], self.k, dtype=np.int64)


def fit_1nn(data, seed):
    return NearestNeighbour(*data)


one_nn = Technique("1nn", fit_1nn, deterministic=True)
always_other = Technique("other", lambda data, seed: Constant(0), deterministic=True)
# declared stochastic but seed-independent: every repeat yields the same counts
fixed = Technique("fixed", lambda data, seed: Constant(0), deterministic=False)


def four_points():
    return LabeledDataset([constant_fingerprint(0, MGB), constant_fingerprint(1, MGB),
                           constant_fingerprint(3, OTHER), constant_fingerprint(10, OTHER)])


def test_loocv_nearest_neighbour_hand_counts():
    # folds: 0 -> 1 (MGB), 1 -> 0 (MGB), 3 -> 1 (MGB, wrong), 10 -> 3 (Other)
    c, preds = loocv(four_points(), one_nn, return_predictions=True)
    assert preds.tolist() == [1, 1, 1, 0]
    assert c == ConfusionCounts(tp=2, fn=0, tn=1, fp=1)


def test_loocv_constant_other(corpus_dataset):
    c = loocv(corpus_dataset, always_other)
    assert c == ConfusionCounts(tp=0, fn=7, tn=17, fp=0)


def test_loocv_too_small():
    with pytest.raises(DatasetTooSmall):
        loocv(LabeledDataset([constant_fingerprint(0, MGB)]), one_nn)


def test_fold_partition_is_exact(corpus_dataset):
    seen = []

    def fit(data, seed):
        X, _ = data
        seen.append(X.shape[0])
        return Constant(1)

    c = loocv(corpus_dataset, Technique("probe", fit))
    assert seen == [23] * 24
    assert c.tp + c.fn + c.tn + c.fp == 24


def test_fold_seeds_depend_on_seed_and_index():
    seeds = {fold_seed(s, i) for s in range(3) for i in range(24)}
    assert len(seeds) == 72
    assert fold_seed(5, 2) == fold_seed(5, 2)


def test_rates_examples():
    assert rates(ConfusionCounts(5, 2, 15, 2)) == pytest.approx(
        (100 * 5 / 7, 100 * 15 / 17, 100 * 20 / 24))
    assert rates(ConfusionCounts(5, 2, 15, 2), 7, 17)[2] == pytest.approx(83.33, abs=0.01)
    assert rates(ConfusionCounts(3, 0, 9, 0))[2] == 100.0
    assert rates(ConfusionCounts(4, 0, 0, 4)) == (100.0, 0.0, 50.0)


def test_rates_zero_class():
    with pytest.raises(ZeroClass):
        rates(ConfusionCounts(0, 0, 3, 1))


def test_rates_count_mismatch():
    with pytest.raises(ValueError):
        rates(ConfusionCounts(1, 1, 1, 1), 3, 2)


@given(st.integers(0, 30), st.integers(0, 30), st.integers(0, 30), st.integers(0, 30))
def test_rates_recompose(tp, fn, tn, fp):
    if tp + fn == 0 or tn + fp == 0:
        return
    tpr, tnr, w = rates(ConfusionCounts(tp, fn, tn, fp))
    assert 0 <= tpr <= 100 and 0 <= tnr <= 100
    n_pos, n_neg = tp + fn, tn + fp
    assert abs(w - (n_pos * tpr + n_neg * tnr) / (n_pos + n_neg)) < 1e-9
    assert abs(w - 100 * (tp + tn) / (n_pos + n_neg)) < 1e-9


def test_deterministic_simple_runs_once(corpus_dataset):
    rep = run_experiment(corpus_dataset, make_technique("nb"), SIMPLE, repeats=100)
    assert rep.runs == 1
    assert rep.tp_rate_std is None and rep.w_avg_std is None
    assert "tp_rate_std" not in rep.to_dict()["stats"]
    assert rep.csv_rows()[1][3:] == ["-", "-", "-"]


def test_constant_counts_give_zero_std(corpus_dataset):
    rep = run_experiment(corpus_dataset, fixed, SIMPLE, repeats=3)
    assert rep.runs == 3
    assert rep.tp_rate_std == 0.0 and rep.tn_rate_std == 0.0 and rep.w_avg_std == 0.0


def test_two_point_statistics():
    rep = EvalReport("x", SIMPLE, 2, [(80.0, 80.0, 80.0), (90.0, 90.0, 90.0)], [None, None])
    assert rep.w_avg_mean == 85.0
    assert rep.w_avg_std == pytest.approx(math.sqrt(50), abs=1e-12)
    assert f"{rep.w_avg_std:.3f}" == "7.071"


def test_per_run_identity(corpus_dataset):
    rep = run_experiment(corpus_dataset, make_technique("rf", n_trees=5), SIMPLE, repeats=3)
    for (tpr, tnr, w), c in zip(rep.per_run, rep.counts):
        assert abs(w - (c.n_pos * tpr + c.n_neg * tnr) / (c.n_pos + c.n_neg)) < 1e-9


def test_extended_kind_uses_replicates(corpus_dataset):
    rep = run_experiment(corpus_dataset, make_technique("nb"), EXTENDED, repeats=3)
    assert rep.runs == 3
    assert all(c.n_pos == 16 and c.n_neg == 17 for c in rep.counts)


def test_smote_inside_folds(corpus_dataset):
    rep = run_experiment(corpus_dataset, make_technique("nb"), EXTENDED, repeats=2,
                         smote_inside_folds=True)
    assert all(c.n_pos == 7 and c.n_neg == 17 for c in rep.counts)


def test_experiment_deterministic_and_parallel(corpus_dataset):
    tech = make_technique("rf", n_trees=5)
    a = run_experiment(corpus_dataset, tech, EXTENDED, repeats=3, base_seed=4)
    b = run_experiment(corpus_dataset, tech, EXTENDED, repeats=3, base_seed=4)
    c = run_experiment(corpus_dataset, tech, EXTENDED, repeats=3, base_seed=4, jobs=2)
    assert a.to_dict() == b.to_dict() == c.to_dict()


def test_bad_arguments(corpus_dataset):
    with pytest.raises(ValueError):
        run_experiment(corpus_dataset, one_nn, "mixed")
    with pytest.raises(ValueError):
        run_experiment(corpus_dataset, one_nn, SIMPLE, repeats=0)


def test_report_serialization(tmp_path, corpus_dataset):
    rep = run_experiment(corpus_dataset, fixed, SIMPLE, repeats=2, config={"k": 1})
    rep.to_json(tmp_path / "r.json")
    back = EvalReport.from_json(tmp_path / "r.json")
    assert back.to_dict() == rep.to_dict()
    write_table([rep], tmp_path / "t.csv")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "technique,kind,stat,TN,TP,WAvg"
    assert lines[1] == "fixed,simple,Avg,100.00,0.00,70.83"
    assert lines[2] == "fixed,simple,StdDev,0.00,0.00,0.00"
    assert "Simple_MFCC" in format_table([rep])
    json.loads((tmp_path / "r.json").read_text())


def test_two_cluster_loocv_perfect(two_clusters):
    for name in ("c45", "nb"):
        c = loocv(two_clusters, make_technique(name))
        assert c.fn == 0 and c.fp == 0
