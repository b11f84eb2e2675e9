"""Classical contrast case: a dense softmax layer whose gradients leak the input.

With batch size 1 the shared gradients satisfy dW[i, j] / db[j] = x_i for any
class j with nonzero bias gradient, so the input is recovered in closed form.
This is the quantitative foil for the circuit-model attack experiments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class DenseLayer:
    """Weights [n, num_classes] and biases [num_classes] of one linear layer."""

    weights: np.ndarray
    biases: np.ndarray

    def __post_init__(self):
        if self.weights.ndim != 2 or self.biases.ndim != 1:
            raise ConfigurationError("weights must be 2-D and biases 1-D")
        if self.weights.shape[1] != self.biases.shape[0]:
            raise ConfigurationError(
                f"weights {self.weights.shape} and biases {self.biases.shape} disagree"
            )
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.biases))):
            raise ConfigurationError("layer entries must be finite")


def forward(layer: DenseLayer, x: np.ndarray, y: np.ndarray) -> dict:
    """Logits, softmax probabilities, and cross-entropy cost for a one-hot label."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    logits = x @ layer.weights + layer.biases
    shifted = logits - np.max(logits)  # stabilized softmax
    exp = np.exp(shifted)
    probs = exp / np.sum(exp)
    cost = float(-np.sum(y * np.log(probs)))
    return {"logits": logits, "probs": probs, "cost": cost}


def gradients(layer: DenseLayer, x: np.ndarray, y: np.ndarray) -> dict:
    """Closed-form cross-entropy gradients: dW[i, j] = (p_j - y_j) x_i, db = p - y."""
    x = np.asarray(x, dtype=float)
    out = forward(layer, x, y)
    delta = out["probs"] - np.asarray(y, dtype=float)
    return {"dW": np.outer(x, delta), "db": delta}


def invert_from_gradients(dw: np.ndarray, db: np.ndarray) -> np.ndarray:
    """Recover x from batch-size-1 gradients via the weight/bias ratio.

    Uses the class with the largest |db| for numerical stability; any class
    with nonzero bias gradient works in exact arithmetic.
    """
    db = np.asarray(db, dtype=float)
    j = int(np.argmax(np.abs(db)))
    if abs(db[j]) <= 1e-12:
        raise ConfigurationError(
            "all bias gradients vanish (perfect-fit degenerate case); "
            "ratio inversion impossible"
        )
    return np.asarray(dw, dtype=float)[:, j] / db[j]


def batch_counting_report(n: int, num_classes: int, batch_size: int) -> dict:
    """Equations vs unknowns for averaged gradients; no recovery attempted for B > 1."""
    return {
        "equations": n * num_classes + num_classes,
        "unknowns": batch_size * (n + num_classes),
        "uniquely_determined": n * num_classes + num_classes
        >= batch_size * (n + num_classes)
        and batch_size == 1,
    }
