"""One-hidden-layer sigmoid perceptron trained by per-example backpropagation."""
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import NonFiniteLoss
from .base import Classifier, as_xy

# output unit 0 is MGB, unit 1 is Other


def one_hot(y):
    y = np.asarray(y)
    return np.column_stack([y == 1, y == 0]).astype(np.float64)


@dataclass(frozen=True, eq=False)
class MlpModel(Classifier):
    W1: np.ndarray  # (d, H)
    b1: np.ndarray
    W2: np.ndarray  # (H, 2)
    b2: np.ndarray
    x_min: np.ndarray
    x_scale: np.ndarray
    losses: np.ndarray = None

    @property
    def hidden(self):
        return self.W1.shape[1]

    def normalize(self, X):
        return (np.asarray(X, dtype=np.float64) - self.x_min) * self.x_scale

    def outputs(self, X):
        h = sigmoid(self.normalize(X) @ self.W1 + self.b1)
        return sigmoid(h @ self.W2 + self.b2)

    def predict(self, X):
        o = self.outputs(X)
        return (o[:, 0] > o[:, 1]).astype(np.int64)

    def to_dict(self):
        return {"kind": "mlp", "W1": self.W1.tolist(), "b1": self.b1.tolist(),
                "W2": self.W2.tolist(), "b2": self.b2.tolist(),
                "x_min": self.x_min.tolist(), "x_scale": self.x_scale.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(*(np.array(d[k], dtype=np.float64)
                     for k in ("W1", "b1", "W2", "b2", "x_min", "x_scale")))


def sigmoid(z):
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(-z))


def min_max_stats(X):
    lo = X.min(axis=0)
    span = X.max(axis=0) - lo
    scale = np.divide(1.0, span, out=np.zeros_like(span), where=span > 0)
    return lo, scale


def init_weights(d, hidden, seed, n_out=2):
    rng = np.random.default_rng(seed)
    W1 = rng.uniform(-0.5, 0.5, (d, hidden))
    b1 = rng.uniform(-0.5, 0.5, hidden)
    W2 = rng.uniform(-0.5, 0.5, (hidden, n_out))
    b2 = rng.uniform(-0.5, 0.5, n_out)
    return W1, b1, W2, b2


def loss_and_gradients(params, X, T, cross_entropy=False):
    """Summed loss over ``X`` and its gradient for each of (W1, b1, W2, b2)."""
    W1, b1, W2, b2 = params
    h = sigmoid(X @ W1 + b1)
    o = sigmoid(h @ W2 + b2)
    diff = o - T
    if cross_entropy:
        loss = -float(np.sum(T * np.log(o) + (1 - T) * np.log(1 - o)))
        do = diff
    else:
        loss = 0.5 * float(np.sum(diff ** 2))
        do = diff * o * (1 - o)
    dh = (do @ W2.T) * h * (1 - h)
    return loss, (X.T @ dh, dh.sum(axis=0), h.T @ do, do.sum(axis=0))


def train_mlp(data, hidden=11, lr=0.3, momentum=0.2, epochs=500, seed=0, cross_entropy=False):
    """Stochastic backpropagation in dataset order, fixed learning rate and momentum.

    Attributes are min-max scaled with training statistics; weights start
    uniform in [-0.5, 0.5].  Raises NonFiniteLoss if training diverges.
    """
    X, y = as_xy(data)
    if hidden < 1:
        raise ValueError(f"hidden must be >= 1, got {hidden}")
    if lr <= 0:
        raise ValueError(f"lr must be positive, got {lr}")
    if epochs < 1:
        raise ValueError(f"epochs must be >= 1, got {epochs}")
    x_min, x_scale = min_max_stats(X)
    Xn = np.ascontiguousarray((X - x_min) * x_scale)
    W1, b1, W2, b2 = init_weights(X.shape[1], hidden, seed)
    W1, b1, W2, b2, losses = kernels.mlp_train(Xn, one_hot(y), W1, b1, W2, b2,
                                               float(lr), float(momentum), int(epochs),
                                               bool(cross_entropy))
    if not np.all(np.isfinite(losses)) or not np.all(np.isfinite(W1)) or not np.all(np.isfinite(W2)):
        bad = int(np.argmax(~np.isfinite(losses))) if not np.all(np.isfinite(losses)) else epochs - 1
        raise NonFiniteLoss(f"training loss became non-finite at epoch {bad} (lr={lr})")
    return MlpModel(W1, b1, W2, b2, x_min, x_scale, losses)
