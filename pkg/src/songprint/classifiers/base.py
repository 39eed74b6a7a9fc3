import numpy as np

from ..features import COEFF_NAMES, MGB, OTHER
from ..errors import EmptyDataset, SingleClassDataset


def label_of(k):
    return MGB if k == 1 else OTHER


def as_xy(data):
    """``(X, y)`` from a LabeledDataset or an ``(X, y)`` pair; y is 1 for MGB."""
    if isinstance(data, tuple):
        X, y = data
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.ascontiguousarray(y, dtype=np.int64)
    else:
        X, y = np.ascontiguousarray(data.X), data.y
    if X.ndim != 2 or X.shape[0] == 0:
        raise EmptyDataset("cannot train on an empty dataset")
    return X, y


def require_both(y):
    if not np.any(y == 1):
        raise SingleClassDataset(MGB)
    if not np.any(y == 0):
        raise SingleClassDataset(OTHER)


def attribute_name(j):
    return COEFF_NAMES[j] if j < len(COEFF_NAMES) else f"x{j}"


class Classifier:
    """Prediction helpers shared by all trained models."""

    def predict(self, X):
        raise NotImplementedError

    def predict_one(self, x):
        return int(self.predict(np.asarray(x, dtype=np.float64)[None, :])[0])

    def predict_label(self, fp):
        coeffs = fp.coeffs if hasattr(fp, "coeffs") else fp
        return label_of(self.predict_one(coeffs))
