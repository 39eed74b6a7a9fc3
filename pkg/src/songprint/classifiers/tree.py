"""C4.5-style binary decision trees over continuous attributes."""
from dataclasses import dataclass

import numpy as np
from scipy.special import betaincinv

from .. import kernels
from ..kernels import LEAF
from .base import Classifier, as_xy, attribute_name, label_of


@dataclass(frozen=True, eq=False)
class DecisionTree(Classifier):
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray  # (n_nodes, 2): training (Other, MGB) counts
    label: np.ndarray

    @property
    def n_nodes(self):
        return self.feature.shape[0]

    @property
    def n_leaves(self):
        return int(np.sum(self.feature == LEAF))

    def is_leaf(self, k):
        return self.feature[k] == LEAF

    def depth(self, k=0):
        if self.is_leaf(k):
            return 0
        return 1 + max(self.depth(self.left[k]), self.depth(self.right[k]))

    def predict(self, X):
        X = np.ascontiguousarray(X, dtype=np.float64)
        return kernels.tree_predict(self.feature, self.threshold, self.left,
                                    self.right, self.label, X)

    def internal_nodes(self):
        return [k for k in range(self.n_nodes) if not self.is_leaf(k)]

    def render(self, digits=2):
        """Indented text in the J48 style, e.g. ``C02 <= -52.33:``."""
        if self.is_leaf(0):
            return f": {self._leaf_text(0)}\n"
        lines = []
        self._render(0, 0, digits, lines)
        return "\n".join(lines) + "\n"

    def _leaf_text(self, k):
        n = int(self.counts[k].sum())
        err = n - int(self.counts[k, self.label[k]])
        tail = f"{n:.1f}" if err == 0 else f"{n:.1f}/{err:.1f}"
        return f"{label_of(self.label[k])} ({tail})"

    def _render(self, k, level, digits, lines):
        name = attribute_name(int(self.feature[k]))
        thr = f"{self.threshold[k]:.{digits}f}"
        for op, child in (("<=", self.left[k]), (">", self.right[k])):
            head = "|   " * level + f"{name} {op} {thr}:"
            if self.is_leaf(child):
                lines.append(f"{head} {self._leaf_text(child)}")
            else:
                lines.append(head)
                self._render(child, level + 1, digits, lines)

    def to_dict(self):
        return {
            "kind": "tree",
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "counts": self.counts.tolist(),
            "label": self.label.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(np.array(d["feature"], dtype=np.int64), np.array(d["threshold"], dtype=np.float64),
                   np.array(d["left"], dtype=np.int64), np.array(d["right"], dtype=np.int64),
                   np.array(d["counts"], dtype=np.int64).reshape(-1, 2),
                   np.array(d["label"], dtype=np.int64))


def grow(X, y, min_leaf=2, mtry=None, feature_keys=None):
    d = X.shape[1]
    if mtry is None or mtry >= d:
        mtry = d
        feature_keys = np.zeros((1, d))
    arrays = kernels.grow_tree(X, y, int(min_leaf), int(mtry), feature_keys)
    return DecisionTree(*arrays)


def error_upper_bound(errors, n, cf):
    """Upper ``cf`` confidence limit of the binomial error rate given ``errors`` of ``n``."""
    if errors >= n:
        return 1.0
    return float(betaincinv(errors + 1, n - errors, 1.0 - cf))


def estimated_errors(errors, n, cf):
    return n * error_upper_bound(errors, n, cf)


def prune(tree, cf=0.25):
    """Pessimistic error pruning: collapse a subtree when its leaf estimate is no worse."""
    feature = tree.feature.copy()

    def leaf_estimate(k):
        n = int(tree.counts[k].sum())
        return estimated_errors(n - int(tree.counts[k, tree.label[k]]), n, cf)

    def visit(k):
        if feature[k] == LEAF:
            return leaf_estimate(k)
        subtree = visit(tree.left[k]) + visit(tree.right[k])
        as_leaf = leaf_estimate(k)
        if as_leaf <= subtree + 1e-12:
            feature[k] = LEAF
            return as_leaf
        return subtree

    visit(0)
    return _compact(tree, feature)


def _compact(tree, feature):
    order = []
    stack = [0]
    while stack:
        k = stack.pop()
        order.append(k)
        if feature[k] != LEAF:
            stack.append(tree.right[k])
            stack.append(tree.left[k])
    new_id = {old: new for new, old in enumerate(order)}
    idx = np.array(order, dtype=np.int64)
    f = feature[idx]
    left = np.array([new_id[tree.left[k]] if feature[k] != LEAF else -1 for k in order], dtype=np.int64)
    right = np.array([new_id[tree.right[k]] if feature[k] != LEAF else -1 for k in order], dtype=np.int64)
    thr = np.where(f == LEAF, 0.0, tree.threshold[idx])
    return DecisionTree(f, thr, left, right, tree.counts[idx].copy(), tree.label[idx].copy())


def train_c45(data, min_leaf=2, prune_cf=0.25):
    """Gain-ratio tree with C4.5's mean-gain guard, then error-based pruning.

    ``prune_cf=None`` skips pruning.
    """
    X, y = as_xy(data)
    tree = grow(X, y, min_leaf)
    if prune_cf is not None:
        tree = prune(tree, prune_cf)
    return tree
