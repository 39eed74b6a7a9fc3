import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import constant_fingerprint, dataset_from_arrays
from songprint.errors import BadK, SingleClassDataset, TooFewMinority
from songprint.features import MGB, OTHER
from songprint.sampling import (LabeledDataset, SmoteParams, balancing_count, k_nearest,
                                load_replicates, make_extended_datasets, minority_class,
                                save_replicates, smote)


def seven_and_seventeen(seed=0):
    rng = np.random.default_rng(seed)
    return dataset_from_arrays(rng.normal(0, 1, (7, 20)), rng.normal(3, 1, (17, 20)), "simple")


def check_synthetics(out, original, minority, k):
    """Collinearity oracle: recompute k-NN independently and find a witness segment."""
    base = np.vstack([fp.coeffs for fp in original if fp.label == minority])
    m = base.shape[0]
    neigh = []
    for i in range(m):
        d = [(float(np.linalg.norm(base[j] - base[i])), j) for j in range(m) if j != i]
        neigh.append([j for _, j in sorted(d)[:k]])
    synth = out.examples[len(original):]
    for n, fp in enumerate(synth):
        assert fp.label == minority and fp.source_id == f"synthetic:{n}"
        s = base[n % m]
        ok = False
        for j in neigh[n % m]:
            seg = base[j] - s
            if not np.any(seg):
                ok = ok or np.allclose(fp.coeffs, s, atol=1e-9)
                continue
            u = float(np.dot(fp.coeffs - s, seg) / np.dot(seg, seg))
            if 0 <= u < 1 and np.allclose(s + u * seg, fp.coeffs, atol=1e-9):
                ok = True
        assert ok, f"synthetic {n} is not on a segment to a {k}-nearest neighbour"


def test_zero_synthetic_is_identity():
    data = seven_and_seventeen()
    assert smote(data, MGB, SmoteParams(5, 0, 1)) == data


def test_identical_points():
    data = LabeledDataset([constant_fingerprint(2.5, MGB), constant_fingerprint(2.5, MGB),
                           constant_fingerprint(9, OTHER)])
    out = smote(data, MGB, SmoteParams(1, 4, 0))
    for fp in out.examples[3:]:
        assert np.array_equal(fp.coeffs, np.full(20, 2.5))


def test_two_point_segment():
    data = LabeledDataset([constant_fingerprint(0, MGB), constant_fingerprint(1, MGB),
                           constant_fingerprint(5, OTHER)])
    out = smote(data, MGB, SmoteParams(1, 5, 42))
    assert len(out) == 8 and out.count(MGB) == 7
    for fp in out.examples[3:]:
        u = fp.coeffs[0]
        assert np.all(fp.coeffs == u) and 0 <= u < 1


def test_draw_order_is_neighbour_then_gap():
    data = seven_and_seventeen(4)
    out = smote(data, MGB, SmoteParams(3, 9, 123))
    base = data.X[:7]
    rng = np.random.default_rng(123)
    for n, fp in enumerate(out.examples[24:]):
        s = n % 7
        nb = k_nearest(base, s, 3)[rng.integers(3)]
        u = rng.random()
        np.testing.assert_array_equal(fp.coeffs, base[s] + u * (base[nb] - base[s]))


def test_k_nearest_stable_ties():
    pts = np.array([[0.0], [1.0], [-1.0], [2.0]])
    assert k_nearest(pts, 0, 2).tolist() == [1, 2]


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 9), st.integers(0, 25), st.integers(0, 2**32), st.data())
def test_synthetics_lie_on_neighbour_segments(m, n_syn, seed, data):
    k = data.draw(st.integers(1, m - 1))
    rng = np.random.default_rng(seed)
    ds = dataset_from_arrays(rng.normal(0, 1, (m, 20)), rng.normal(0, 1, (3, 20)))
    out = smote(ds, MGB, SmoteParams(k, n_syn, seed))
    assert out.examples[:len(ds)] == ds.examples
    assert len(out) == len(ds) + n_syn
    check_synthetics(out, ds, MGB, k)


def test_too_few_minority():
    data = LabeledDataset([constant_fingerprint(0, MGB), constant_fingerprint(1, OTHER),
                           constant_fingerprint(2, OTHER)])
    with pytest.raises(TooFewMinority):
        smote(data, MGB, SmoteParams(1, 2, 0))


@pytest.mark.parametrize("k", [0, 7])
def test_bad_k(k):
    with pytest.raises(BadK):
        smote(seven_and_seventeen(), MGB, SmoteParams(k, 3, 0))


def test_extended_seven_and_seventeen():
    data = seven_and_seventeen()
    reps = make_extended_datasets(data, 100, base_seed=0)
    assert len(reps) == 100
    for r, ds in enumerate(reps):
        assert ds.counts() == {MGB: 16, OTHER: 17}
        assert ds.examples[:24] == data.examples
        assert ds.name == f"simple-extended-{r:03d}"
    # smoke: distinct seeds give distinct synthetics
    assert not np.array_equal(reps[0].X, reps[1].X)


def test_replicate_r_uses_seed_base_plus_r():
    data = seven_and_seventeen()
    reps = make_extended_datasets(data, 3, base_seed=10)
    direct = smote(data, MGB, SmoteParams(5, 9, 12))
    assert reps[2].examples == direct.examples


def test_balanced_input_clamps():
    data = dataset_from_arrays(np.zeros((4, 20)), np.ones((4, 20)))
    assert balancing_count(data) == 0
    reps = make_extended_datasets(data, 2)
    assert all(r.examples == data.examples for r in reps)


def test_minority_class():
    assert minority_class(seven_and_seventeen()) == MGB
    assert minority_class(dataset_from_arrays(np.zeros((5, 20)), np.ones((2, 20)))) == OTHER


def test_extended_deterministic():
    a = make_extended_datasets(seven_and_seventeen(), 5, base_seed=7)
    b = make_extended_datasets(seven_and_seventeen(), 5, base_seed=7)
    assert all(x.X.tobytes() == y.X.tobytes() for x, y in zip(a, b))


def test_extended_needs_both_classes():
    data = dataset_from_arrays(np.zeros((3, 20)), [])
    with pytest.raises(SingleClassDataset):
        make_extended_datasets(data, 1)


def test_dataset_counts_and_csv(tmp_path):
    data = seven_and_seventeen()
    assert sum(data.counts().values()) == len(data)
    data.to_csv(tmp_path / "d.csv")
    back = LabeledDataset.from_csv(tmp_path / "d.csv")
    assert back.counts() == data.counts()
    np.testing.assert_allclose(back.X, data.X, rtol=1e-8)


def test_replicates_round_trip(tmp_path):
    reps = make_extended_datasets(seven_and_seventeen(), 3, base_seed=5)
    manifest = save_replicates(reps, tmp_path, 5, 5, source="simple.csv")
    doc = json.loads((tmp_path / "manifest.json").read_text())
    assert doc == manifest
    assert [e["seed"] for e in doc["replicates"]] == [5, 6, 7]
    assert doc["replicates"][0]["counts"] == {MGB: 16, OTHER: 17}
    back = load_replicates(tmp_path)
    assert [b.counts() for b in back] == [r.counts() for r in reps]
