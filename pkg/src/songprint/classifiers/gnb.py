from dataclasses import dataclass

import numpy as np

from .base import Classifier, as_xy, require_both

VAR_FLOOR = 1e-9


@dataclass(frozen=True, eq=False)
class GaussianNB(Classifier):
    """Class-conditional independent Gaussians; row 0 is Other, row 1 is MGB."""

    priors: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    def log_posteriors(self, X):
        X = np.asarray(X, dtype=np.float64)
        out = np.empty((X.shape[0], 2))
        for c in range(2):
            var = self.variances[c]
            ll = -0.5 * np.log(2.0 * np.pi * var) - (X - self.means[c]) ** 2 / (2.0 * var)
            out[:, c] = np.log(self.priors[c]) + ll.sum(axis=1)
        return out

    def predict(self, X):
        lp = self.log_posteriors(X)
        return (lp[:, 1] > lp[:, 0]).astype(np.int64)

    def to_dict(self):
        return {"kind": "gnb", "priors": self.priors.tolist(), "means": self.means.tolist(),
                "variances": self.variances.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(np.array(d["priors"]), np.array(d["means"]), np.array(d["variances"]))


def train_gnb(data, var_floor=VAR_FLOOR):
    X, y = as_xy(data)
    require_both(y)
    priors = np.empty(2)
    means = np.empty((2, X.shape[1]))
    variances = np.empty((2, X.shape[1]))
    for c in range(2):
        Xc = X[y == c]
        priors[c] = Xc.shape[0] / X.shape[0]
        means[c] = Xc.mean(axis=0)
        variances[c] = np.maximum(Xc.var(axis=0), var_floor)
    return GaussianNB(priors, means, variances)
