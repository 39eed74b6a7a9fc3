"""Leave-one-out evaluation, repeated experiments and summary tables.

Rates here are percentages (0-100), unlike the detector sweep which works
in fractions.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import json

import numpy as np

from .errors import DatasetTooSmall, ZeroClass
from .sampling import SmoteParams, balancing_count, make_extended_datasets, minority_class, smote

SIMPLE = "simple"
EXTENDED = "extended"
KINDS = (SIMPLE, EXTENDED)
KIND_TITLES = {SIMPLE: "Simple_MFCC", EXTENDED: "Extended_MFCC"}


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fn: int
    tn: int
    fp: int

    @property
    def n_pos(self):
        return self.tp + self.fn

    @property
    def n_neg(self):
        return self.tn + self.fp

    def __add__(self, other):
        return ConfusionCounts(self.tp + other.tp, self.fn + other.fn,
                               self.tn + other.tn, self.fp + other.fp)


def weighted_average(tp_rate, tn_rate, n_pos, n_neg):
    return (n_pos * tp_rate + n_neg * tn_rate) / (n_pos + n_neg)


def rates(c, n_pos=None, n_neg=None):
    """``(tp_rate, tn_rate, w_avg)`` in percent."""
    n_pos = c.n_pos if n_pos is None else n_pos
    n_neg = c.n_neg if n_neg is None else n_neg
    if n_pos != c.tp + c.fn or n_neg != c.tn + c.fp:
        raise ValueError(f"class counts ({n_pos}, {n_neg}) disagree with {c}")
    if n_pos == 0 or n_neg == 0:
        raise ZeroClass(f"rates need both classes, got n_pos={n_pos}, n_neg={n_neg}")
    tp_rate = 100.0 * c.tp / n_pos
    tn_rate = 100.0 * c.tn / n_neg
    return tp_rate, tn_rate, weighted_average(tp_rate, tn_rate, n_pos, n_neg)


def fold_seed(seed, i):
    return int(np.random.SeedSequence([seed, i]).generate_state(1, np.uint64)[0])


def loocv(data, technique, seed=0, smote_k=None, return_predictions=False):
    """Hold out each example once, train on the rest, count the outcomes.

    With ``smote_k`` set, every fold's training split is first rebalanced
    by SMOTE (minority grown to majority - 1) using that fold's seed, so
    held-out examples never leak into synthetic ones.
    """
    n = len(data)
    if n < 2:
        raise DatasetTooSmall(f"LOOCV needs at least 2 examples, got {n}")
    X = np.ascontiguousarray(data.X)
    y = data.y
    preds = np.empty(n, dtype=np.int64)
    keep = np.ones(n, dtype=bool)
    for i in range(n):
        s = fold_seed(seed, i)
        if smote_k is None:
            keep[i] = False
            train = (np.ascontiguousarray(X[keep]), y[keep])
            keep[i] = True
        else:
            split = data.without(i)
            split = smote(split, minority_class(split),
                          SmoteParams(smote_k, balancing_count(split), s))
            train = (np.ascontiguousarray(split.X), split.y)
        model = technique.fit(train, s)
        preds[i] = model.predict_one(X[i])
    pos = y == 1
    c = ConfusionCounts(int(np.sum(preds[pos] == 1)), int(np.sum(preds[pos] == 0)),
                        int(np.sum(preds[~pos] == 0)), int(np.sum(preds[~pos] == 1)))
    return (c, preds) if return_predictions else c


@dataclass
class EvalReport:
    technique: str
    kind: str
    runs: int
    per_run: list  # [(tp_rate, tn_rate, w_avg)] in repeat order
    counts: list  # ConfusionCounts per run
    config: dict = field(default=None)

    def _column(self, k):
        return np.array([r[k] for r in self.per_run], dtype=np.float64)

    def _mean(self, k):
        return float(np.mean(self._column(k)))

    def _std(self, k):
        if self.runs < 2:
            return None
        col = self._column(k)
        if np.all(col == col[0]):
            return 0.0
        return float(np.std(col, ddof=1))

    tp_rate_mean = property(lambda self: self._mean(0))
    tn_rate_mean = property(lambda self: self._mean(1))
    w_avg_mean = property(lambda self: self._mean(2))
    tp_rate_std = property(lambda self: self._std(0))
    tn_rate_std = property(lambda self: self._std(1))
    w_avg_std = property(lambda self: self._std(2))

    @property
    def has_std(self):
        return self.runs > 1

    def csv_rows(self):
        def fmt(v):
            return "-" if v is None else f"{v:.2f}"

        return [
            [self.technique, self.kind, "Avg",
             fmt(self.tn_rate_mean), fmt(self.tp_rate_mean), fmt(self.w_avg_mean)],
            [self.technique, self.kind, "StdDev",
             fmt(self.tn_rate_std), fmt(self.tp_rate_std), fmt(self.w_avg_std)],
        ]

    def to_dict(self):
        stats = {"runs": self.runs}
        for name in ("tp_rate", "tn_rate", "w_avg"):
            stats[f"{name}_mean"] = getattr(self, f"{name}_mean")
            if self.has_std:
                stats[f"{name}_std"] = getattr(self, f"{name}_std")
        doc = {
            "format": "songprint-eval-report",
            "version": 1,
            "technique": self.technique,
            "kind": self.kind,
            "stats": stats,
            "per_run": [{"tp_rate": r[0], "tn_rate": r[1], "w_avg": r[2],
                         "tp": c.tp, "fn": c.fn, "tn": c.tn, "fp": c.fp}
                        for r, c in zip(self.per_run, self.counts)],
        }
        if self.config is not None:
            doc["config"] = self.config
        return doc

    @classmethod
    def from_dict(cls, d):
        per_run = [(r["tp_rate"], r["tn_rate"], r["w_avg"]) for r in d["per_run"]]
        counts = [ConfusionCounts(r["tp"], r["fn"], r["tn"], r["fp"]) for r in d["per_run"]]
        return cls(d["technique"], d["kind"], d["stats"]["runs"], per_run, counts, d.get("config"))

    def to_json(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def from_json(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


TABLE_HEADER = ("technique", "kind", "stat", "TN", "TP", "WAvg")


def write_table(reports, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(TABLE_HEADER) + "\n")
        for rep in reports:
            for row in rep.csv_rows():
                fh.write(",".join(row) + "\n")


def format_table(reports):
    """Human-readable table: one Avg and one StdDev row per report."""
    lines = [f"{'Technique':<10}{'':<9}{'TN':>8}{'TP':>8}{'W.Avg':>8}   dataset"]
    for rep in reports:
        for row in rep.csv_rows():
            tech, kind, stat, tn, tp, w = row
            lines.append(f"{tech:<10}{stat:<9}{tn:>8}{tp:>8}{w:>8}   {KIND_TITLES.get(kind, kind)}")
    return "\n".join(lines)


def _run_once(job):
    data, technique, seed, smote_k = job
    c = loocv(data, technique, seed, smote_k)
    return c, rates(c)


def run_experiment(base, technique, kind=SIMPLE, repeats=100, base_seed=0, k_neighbors=5,
                   smote_inside_folds=False, jobs=1, config=None):
    """Repeat LOOCV and aggregate the three rates.

    Simple kind: repeat ``r`` runs LOOCV on ``base`` with seed
    ``base_seed + r``; deterministic techniques run once.  Extended kind:
    repeat ``r`` evaluates SMOTE replicate ``r`` (or, with
    ``smote_inside_folds``, rebalances every fold's training split instead).
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    base.require_both_classes()
    if kind == SIMPLE:
        runs = 1 if technique.deterministic else repeats
        jobs_list = [(base, technique, base_seed + r, None) for r in range(runs)]
    elif smote_inside_folds:
        jobs_list = [(base, technique, base_seed + r, k_neighbors) for r in range(repeats)]
    else:
        replicates = make_extended_datasets(base, repeats, base_seed, k_neighbors)
        jobs_list = [(ds, technique, base_seed + r, None) for r, ds in enumerate(replicates)]

    if jobs > 1 and len(jobs_list) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_once, jobs_list))
    else:
        results = [_run_once(j) for j in jobs_list]
    counts = [c for c, _ in results]
    per_run = [r for _, r in results]
    return EvalReport(technique.name, kind, len(results), per_run, counts, config)
