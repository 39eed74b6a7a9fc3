"""DTW distance to a species reference fingerprint and the threshold sweep.

The coefficient axis of a fingerprint plays the role of time: two 20-point
fingerprints are aligned exactly like two short series.
"""
from dataclasses import dataclass, field
import json

import numpy as np

from . import kernels
from .errors import EmptyInput, SingleClassDataset
from .features import MGB, OTHER, Fingerprint, format_real


@dataclass(frozen=True)
class DtwResult:
    distance: float
    path: tuple


def _backtrack(D):
    # Prefer the diagonal, then the step that leaves i unchanged.
    i, j = D.shape[0] - 1, D.shape[1] - 1
    path = [(i, j)]
    while i > 0 or j > 0:
        if i == 0:
            j -= 1
        elif j == 0:
            i -= 1
        else:
            diag, left, up = D[i - 1, j - 1], D[i, j - 1], D[i - 1, j]
            if diag <= left and diag <= up:
                i, j = i - 1, j - 1
            elif left <= up:
                j -= 1
            else:
                i -= 1
        path.append((i, j))
    return tuple(reversed(path))


def dtw_distance(a, b):
    """Unconstrained DTW with absolute-difference cost and steps (1,0), (0,1), (1,1)."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise EmptyInput("dtw_distance needs two non-empty sequences")
    D = kernels.dtw_cost(a, b)
    return DtwResult(float(D[-1, -1]), _backtrack(D))


def reference_fingerprint(positives):
    positives = list(positives)
    if not positives:
        raise EmptyInput("reference fingerprint needs at least one positive example")
    coeffs = np.vstack([fp.coeffs for fp in positives]).mean(axis=0)
    return Fingerprint(coeffs, MGB, "reference")


def classify_by_threshold(f, ref, beta):
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    return MGB if dtw_distance(f.coeffs, ref.coeffs).distance < beta else OTHER


def distances_to_reference(data, ref):
    return kernels.dtw_to_reference(np.ascontiguousarray(data.X), np.ascontiguousarray(ref.coeffs))


def holdout_distances(data):
    """Distances where each MGB example is compared to a reference built without it."""
    X = data.X
    pos = np.flatnonzero(data.y == 1)
    if pos.size == 0:
        raise SingleClassDataset(MGB)
    if pos.size < 2:
        raise EmptyInput("holdout reference needs at least two MGB examples")
    full = X[pos].mean(axis=0)
    out = kernels.dtw_to_reference(np.ascontiguousarray(X), full)
    for i in pos:
        others = pos[pos != i]
        ref = X[others].mean(axis=0)
        out[i] = kernels.dtw_cost(np.ascontiguousarray(X[i]), ref)[-1, -1]
    return out


def weighted_average(n_pos, tp, n_neg, tn):
    return (n_pos * tp + n_neg * tn) / (n_pos + n_neg)


@dataclass
class SweepReport:
    thresholds: np.ndarray
    tp_rate: np.ndarray
    tn_rate: np.ndarray
    w_avg: np.ndarray
    n_pos: int
    n_neg: int
    optimal_band: tuple = None
    distances: np.ndarray = field(default=None, repr=False)

    def rows(self):
        return zip(self.thresholds, self.tp_rate, self.tn_rate, self.w_avg)

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("beta,tp,tn,wavg\n")
            for b, tp, tn, w in self.rows():
                fh.write(",".join(format_real(v) for v in (b, tp, tn, w)) + "\n")

    def summary(self):
        band = None if self.optimal_band is None else [float(v) for v in self.optimal_band]
        best = int(np.argmax(self.w_avg))
        return {
            "n_thresholds": int(self.thresholds.shape[0]),
            "beta_min": float(self.thresholds[0]),
            "beta_max": float(self.thresholds[-1]),
            "n_mgb": self.n_pos,
            "n_other": self.n_neg,
            "optimal_band": band,
            "best_beta": float(self.thresholds[best]),
            "best_w_avg": float(self.w_avg[best]),
        }

    def to_json(self, path, config=None):
        doc = {"format": "songprint-sweep", "version": 1, "summary": self.summary()}
        if config is not None:
            doc["config"] = config
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")


def default_grid(distances, size=200):
    top = 1.1 * float(np.max(distances))
    return np.linspace(0.0, top if top > 0 else 1.0, size)


def _optimal_band(thresholds, w_avg):
    # Longest run of grid points with W.Avg == 1 (first one on ties).
    best, start = None, None
    for k, ok in enumerate(np.append(w_avg == 1.0, False)):
        if ok and start is None:
            start = k
        elif not ok and start is not None:
            if best is None or k - start > best[1] - best[0] + 1:
                best = (start, k - 1)
            start = None
    if best is None:
        return None
    return float(thresholds[best[0]]), float(thresholds[best[1]])


def threshold_sweep(data, ref=None, betas=None, holdout_reference=False, grid_size=200):
    """TP, TN and weighted-average detection rates over a grid of thresholds.

    Rates are fractions in [0, 1].  With ``holdout_reference`` each MGB
    example is scored against a reference averaged over the other MGB
    examples; otherwise ``ref`` (default: mean of all MGB) is used for all.
    """
    data.require_both_classes()
    if holdout_reference:
        dist = holdout_distances(data)
    else:
        if ref is None:
            ref = reference_fingerprint(data.of_class(MGB))
        dist = distances_to_reference(data, ref)
    if betas is None:
        betas = default_grid(dist, grid_size)
    betas = np.asarray(betas, dtype=np.float64)
    if betas.size == 0:
        raise ValueError("threshold grid is empty")
    if np.any(np.diff(betas) < 0):
        raise ValueError("thresholds must be ascending")

    y = data.y
    n_pos = int(y.sum())
    n_neg = int(y.shape[0] - n_pos)
    accepted = dist[None, :] < betas[:, None]
    tp = (accepted & (y == 1)).sum(axis=1) / n_pos
    tn = (~accepted & (y == 0)).sum(axis=1) / n_neg
    w = weighted_average(n_pos, tp, n_neg, tn)
    return SweepReport(betas, tp, tn, w, n_pos, n_neg, _optimal_band(betas, w), dist)
