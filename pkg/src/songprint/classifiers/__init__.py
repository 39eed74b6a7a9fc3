"""The four learners and a small registry used by the evaluation harness."""
from dataclasses import dataclass
from functools import partial
import json
from typing import Callable

from .base import Classifier, label_of
from .forest import ForestModel, default_mtry, train_forest
from .gnb import GaussianNB, train_gnb
from .mlp import MlpModel, train_mlp
from .tree import DecisionTree, prune, train_c45

MODEL_FORMAT = "songprint-model"
MODEL_VERSION = 1

_MODEL_KINDS = {"tree": DecisionTree, "forest": ForestModel, "gnb": GaussianNB, "mlp": MlpModel}


@dataclass(frozen=True)
class Technique:
    """A named trainer: ``fit(data, seed) -> model``.

    ``deterministic`` techniques ignore the seed entirely.
    """

    name: str
    fit: Callable
    deterministic: bool = False


def _fit_c45(data, seed, min_leaf=2, prune_cf=0.25):
    return train_c45(data, min_leaf, prune_cf)


def _fit_rf(data, seed, n_trees=100, mtry=5):
    return train_forest(data, n_trees, seed, mtry)


def _fit_nb(data, seed):
    return train_gnb(data)


def _fit_mlp(data, seed, hidden=11, lr=0.3, momentum=0.2, epochs=500, cross_entropy=False):
    return train_mlp(data, hidden, lr, momentum, epochs, seed, cross_entropy)


_FACTORIES = {
    "c45": (_fit_c45, True),
    "rf": (_fit_rf, False),
    "nb": (_fit_nb, True),
    "mlp": (_fit_mlp, False),
}
TECHNIQUES = tuple(_FACTORIES)


def make_technique(name, **params):
    if name not in _FACTORIES:
        raise KeyError(f"unknown technique {name!r}; valid names: {', '.join(TECHNIQUES)}")
    fit, deterministic = _FACTORIES[name]
    return Technique(name, partial(fit, **params), deterministic)


def model_to_json(model):
    doc = {"format": MODEL_FORMAT, "version": MODEL_VERSION, "model": model.to_dict()}
    return json.dumps(doc, sort_keys=True)


def model_from_json(text):
    doc = json.loads(text)
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError("not a songprint model document")
    if doc.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model version {doc.get('version')!r}")
    body = doc["model"]
    return _MODEL_KINDS[body["kind"]].from_dict(body)


def save_model(model, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(model_to_json(model) + "\n")


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return model_from_json(fh.read())


__all__ = [
    "Classifier", "DecisionTree", "ForestModel", "GaussianNB", "MlpModel", "Technique",
    "TECHNIQUES", "default_mtry", "label_of", "load_model", "make_technique",
    "model_from_json", "model_to_json", "prune", "save_model", "train_c45",
    "train_forest", "train_gnb", "train_mlp",
]
