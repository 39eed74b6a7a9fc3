import numpy as np
import pytest

from songprint import kernels
from songprint.audio_io import decode_wav, encode_wav
from songprint.features import MGB, OTHER, Fingerprint, extract_fingerprint
from songprint.fixtures import SAMPLE_RATE, generate_corpus, two_cluster_fingerprints
from songprint.sampling import LabeledDataset


@pytest.fixture(scope="session")
def corpus_dataset():
    fps = [extract_fingerprint(decode_wav(encode_wav(s, SAMPLE_RATE), name), label=label)
           for name, label, s in generate_corpus(seed=0)]
    return LabeledDataset(fps, "fixtures")


def dataset_from_arrays(pos, neg, name="synthetic"):
    fps = [Fingerprint(r, MGB, f"mgb{i}") for i, r in enumerate(pos)]
    fps += [Fingerprint(r, OTHER, f"other{i}") for i, r in enumerate(neg)]
    return LabeledDataset(fps, name)


@pytest.fixture
def two_clusters():
    return dataset_from_arrays(*two_cluster_fingerprints(seed=3))


@pytest.fixture(params=["numba", "numpy"])
def backend(request, monkeypatch):
    """Rebind the public kernel names to one backend for the duration of a test."""
    suffix = "_nb" if request.param == "numba" else "_np"
    for name in ("dtw_cost", "dtw_to_reference", "grow_tree", "tree_predict", "mlp_train"):
        monkeypatch.setattr(kernels, name, getattr(kernels, name + suffix))
    return request.param


def constant_fingerprint(value, label=None, source_id=""):
    return Fingerprint(np.full(20, float(value)), label, source_id)


ACCEPTANCE = {}


@pytest.fixture
def record_criterion():
    """Record one acceptance criterion outcome; all are listed at the end of the run."""
    def record(number, ok, detail):
        ACCEPTANCE[number] = (bool(ok), detail)
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
