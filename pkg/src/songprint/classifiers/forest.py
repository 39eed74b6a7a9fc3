"""Random forest of unpruned gain-ratio trees."""
from dataclasses import dataclass
import math

import numpy as np

from .base import Classifier, as_xy
from .tree import DecisionTree, grow


def default_mtry(n_features):
    return int(math.floor(math.log2(n_features) + 1))


@dataclass(frozen=True, eq=False)
class ForestModel(Classifier):
    trees: tuple
    mtry: int
    seed: int

    def votes(self, X):
        """Per-tree predictions, shape (n_trees, n_rows)."""
        X = np.ascontiguousarray(X, dtype=np.float64)
        return np.vstack([t.predict(X) for t in self.trees])

    def predict(self, X):
        v = self.votes(X)
        mgb = v.sum(axis=0)
        # ties go to Other
        return (2 * mgb > v.shape[0]).astype(np.int64)

    def to_dict(self):
        return {"kind": "forest", "mtry": self.mtry, "seed": self.seed,
                "trees": [t.to_dict() for t in self.trees]}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(DecisionTree.from_dict(t) for t in d["trees"]), d["mtry"], d["seed"])


def train_forest(data, n_trees=100, seed=0, mtry=None, min_leaf=1, force_full=False):
    """Bagged trees with a random attribute subset at every node.

    Each tree consumes, in order, ``n`` bootstrap indices and a block of
    uniform keys whose per-node argsort picks that node's attributes.
    ``force_full`` (a test hook) trains every tree on the full dataset with
    all attributes.
    """
    X, y = as_xy(data)
    if n_trees < 1:
        raise ValueError(f"n_trees must be >= 1, got {n_trees}")
    n, d = X.shape
    if mtry is None:
        mtry = default_mtry(d)
    mtry = min(mtry, d)
    rng = np.random.default_rng(seed)
    trees = []
    for _ in range(n_trees):
        if force_full:
            trees.append(grow(X, y, min_leaf))
            continue
        boot = rng.integers(0, n, n)
        keys = rng.random((2 * n + 1, d))
        trees.append(grow(np.ascontiguousarray(X[boot]), np.ascontiguousarray(y[boot]),
                          min_leaf, mtry, keys))
    return ForestModel(tuple(trees), d if force_full else mtry, seed)
