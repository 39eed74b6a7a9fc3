"""Labeled datasets, SMOTE over-sampling and the extended replicate sets."""
from dataclasses import dataclass
import json
from pathlib import Path

import numpy as np

from .errors import BadK, SingleClassDataset, TooFewMinority
from .features import LABELS, MGB, OTHER, Fingerprint, read_fingerprints, write_fingerprints


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    examples: tuple
    name: str = ""

    def __post_init__(self):
        examples = tuple(self.examples)
        for fp in examples:
            if fp.label not in LABELS:
                raise ValueError(f"example {fp.source_id!r} is unlabeled")
        object.__setattr__(self, "examples", examples)

    def __len__(self):
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)

    def __getitem__(self, i):
        return self.examples[i]

    def count(self, label):
        return sum(fp.label == label for fp in self.examples)

    def counts(self):
        return {label: self.count(label) for label in LABELS}

    @property
    def X(self):
        if not self.examples:
            return np.empty((0, 20))
        return np.vstack([fp.coeffs for fp in self.examples])

    @property
    def y(self):
        """Integer labels, 1 = MGB (positive), 0 = Other."""
        return np.array([fp.label == MGB for fp in self.examples], dtype=np.int64)

    def of_class(self, label):
        return [fp for fp in self.examples if fp.label == label]

    def without(self, i):
        return LabeledDataset(self.examples[:i] + self.examples[i + 1:], self.name)

    def require_both_classes(self):
        for label in LABELS:
            if self.count(label) == 0:
                raise SingleClassDataset(label)

    def __eq__(self, other):
        if not isinstance(other, LabeledDataset):
            return NotImplemented
        return self.name == other.name and self.examples == other.examples

    __hash__ = None

    @classmethod
    def from_csv(cls, path, name=None):
        return cls(read_fingerprints(path), name if name is not None else Path(path).stem)

    def to_csv(self, path):
        write_fingerprints(self.examples, path)


@dataclass(frozen=True)
class SmoteParams:
    k_neighbors: int = 5
    n_synthetic: int = 0
    seed: int = 0


def k_nearest(points, i, k):
    """Indices of the ``k`` nearest other rows to row ``i`` (ties by index)."""
    d = np.sqrt(((points - points[i]) ** 2).sum(axis=1))
    d[i] = np.inf
    return np.argsort(d, kind="stable")[:k]


def smote(data, minority, p):
    """Append ``p.n_synthetic`` interpolated minority examples to ``data``.

    Seed samples are taken from the minority class in dataset order,
    cycling.  For each synthetic example two uniforms are drawn: first the
    neighbour index among the ``k`` nearest minority points, then the gap
    ``u`` in [0, 1).  The example is ``s + u * (neighbour - s)``.
    """
    base = [fp for fp in data if fp.label == minority]
    m = len(base)
    if m < 2:
        raise TooFewMinority(f"class {minority!r} has {m} examples, SMOTE needs at least 2")
    if not 1 <= p.k_neighbors <= m - 1:
        raise BadK(f"k_neighbors={p.k_neighbors} must lie in [1, {m - 1}] for {m} minority examples")
    if p.n_synthetic < 0:
        raise ValueError(f"n_synthetic must be >= 0, got {p.n_synthetic}")
    if p.n_synthetic == 0:
        return LabeledDataset(data.examples, data.name)

    points = np.vstack([fp.coeffs for fp in base])
    neighbours = [k_nearest(points, i, p.k_neighbors) for i in range(m)]
    rng = np.random.default_rng(p.seed)
    synthetic = []
    for n in range(p.n_synthetic):
        s = n % m
        nb = neighbours[s][rng.integers(p.k_neighbors)]
        u = rng.random()
        coeffs = points[s] + u * (points[nb] - points[s])
        synthetic.append(Fingerprint(coeffs, minority, f"synthetic:{n}"))
    return LabeledDataset(data.examples + tuple(synthetic), data.name)


def minority_class(data):
    c = data.counts()
    return MGB if c[MGB] <= c[OTHER] else OTHER


def balancing_count(data):
    """Synthetic examples needed to bring the minority to majority - 1."""
    c = data.counts()
    return max(0, max(c.values()) - 1 - min(c.values()))


def make_extended_datasets(data, replicates, base_seed=0, k_neighbors=5):
    """Replicate ``r`` is ``data`` plus SMOTE examples drawn with seed ``base_seed + r``."""
    data.require_both_classes()
    if replicates < 1:
        raise ValueError(f"replicates must be >= 1, got {replicates}")
    minority = minority_class(data)
    n_syn = balancing_count(data)
    out = []
    for r in range(replicates):
        if n_syn == 0:
            # already balanced: nothing to draw, so k need not fit the minority size
            ext = data
        else:
            ext = smote(data, minority, SmoteParams(k_neighbors, n_syn, base_seed + r))
        out.append(LabeledDataset(ext.examples, f"{data.name}-extended-{r:03d}"))
    return out


def save_replicates(replicates, out_dir, base_seed, k_neighbors, source=""):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for r, ds in enumerate(replicates):
        fname = f"extended_{r:03d}.csv"
        ds.to_csv(out_dir / fname)
        entries.append({"replicate": r, "seed": base_seed + r, "file": fname,
                        "counts": ds.counts(), "n_examples": len(ds)})
    manifest = {"format": "songprint-extended-manifest", "version": 1, "source": source,
                "base_seed": base_seed, "k_neighbors": k_neighbors,
                "replicates": entries}
    with open(out_dir / "manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def load_replicates(out_dir):
    out_dir = Path(out_dir)
    with open(out_dir / "manifest.json", encoding="utf-8") as fh:
        manifest = json.load(fh)
    return [LabeledDataset.from_csv(out_dir / e["file"]) for e in manifest["replicates"]]
