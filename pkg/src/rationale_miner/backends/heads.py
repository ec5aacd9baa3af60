"""Small trained heads: binary logistic and ternary softmax classifiers.

Training is deterministic full-batch gradient descent from zero weights, so
the same data always yields byte-identical saved models.  Saved heads carry a
fingerprint of the feature order they were trained on and refuse to load
against a different layout.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import expit

from ..errors import DegenerateData, FingerprintMismatch, ModelMissing

DEFAULT_LR = 0.1
DEFAULT_EPOCHS = 500
DEFAULT_L2 = 1e-4


def feature_fingerprint(names: tuple[str, ...] | list[str]) -> str:
    """Short stable digest of an ordered feature-name list."""
    joined = ";".join(names)
    return hashlib.sha256(joined.encode("utf-8")).hexdigest()[:16]


@dataclass
class LogisticHead:
    weights: np.ndarray
    bias: float
    fingerprint: str = ""
    meta: dict = field(default_factory=dict)

    def decision(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.weights + self.bias

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return expit(self.decision(X))

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int64)


def _softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


@dataclass
class SoftmaxHead:
    weights: np.ndarray  # (num_classes, dim)
    bias: np.ndarray  # (num_classes,)
    fingerprint: str = ""
    meta: dict = field(default_factory=dict)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        z = np.asarray(X, dtype=np.float64) @ self.weights.T + self.bias
        return _softmax(z)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.predict_proba(X).argmax(axis=1)


def train_head(X: np.ndarray, y: np.ndarray, num_classes: int = 2,
               lr: float = DEFAULT_LR, epochs: int = DEFAULT_EPOCHS,
               l2: float = DEFAULT_L2,
               fingerprint: str = "") -> LogisticHead | SoftmaxHead:
    """Fit a head on integer labels; raises DegenerateData on a single class."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or len(X) != len(y):
        raise ValueError(f"bad training shapes: X {X.shape}, y {y.shape}")
    if len(np.unique(y)) < 2:
        raise DegenerateData("training data contains a single class")
    n, dim = X.shape
    meta = {"lr": lr, "epochs": epochs, "l2": l2, "num_classes": num_classes}

    if num_classes == 2:
        w = np.zeros(dim)
        b = 0.0
        target = y.astype(np.float64)
        for _ in range(epochs):
            p = expit(X @ w + b)
            delta = p - target
            w -= lr * (X.T @ delta / n + l2 * w)
            b -= lr * float(delta.mean())
        return LogisticHead(weights=w, bias=b, fingerprint=fingerprint, meta=meta)

    W = np.zeros((num_classes, dim))
    b = np.zeros(num_classes)
    onehot = np.eye(num_classes)[y]
    for _ in range(epochs):
        P = _softmax(X @ W.T + b)
        delta = P - onehot
        W -= lr * (delta.T @ X / n + l2 * W)
        b -= lr * delta.mean(axis=0)
    return SoftmaxHead(weights=W, bias=b, fingerprint=fingerprint, meta=meta)


def save_head(head: LogisticHead | SoftmaxHead, path: str | Path) -> None:
    if isinstance(head, LogisticHead):
        payload = {
            "kind": "logistic",
            "weights": head.weights.tolist(),
            "bias": float(head.bias),
            "fingerprint": head.fingerprint,
            "meta": head.meta,
        }
    else:
        payload = {
            "kind": "softmax",
            "weights": head.weights.tolist(),
            "bias": head.bias.tolist(),
            "fingerprint": head.fingerprint,
            "meta": head.meta,
        }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def load_head(path: str | Path,
              expected_fingerprint: str | None = None) -> LogisticHead | SoftmaxHead:
    """Load a saved head, checking its feature-order fingerprint if given."""
    file = Path(path)
    if not file.exists():
        raise ModelMissing(f"no head model at {file}")
    payload = json.loads(file.read_text(encoding="utf-8"))
    fingerprint = payload.get("fingerprint", "")
    if expected_fingerprint is not None and fingerprint != expected_fingerprint:
        raise FingerprintMismatch(
            f"head at {file} was trained on feature order {fingerprint!r}, "
            f"expected {expected_fingerprint!r}"
        )
    meta = payload.get("meta", {})
    if payload.get("kind") == "logistic":
        return LogisticHead(weights=np.asarray(payload["weights"], dtype=np.float64),
                            bias=float(payload["bias"]), fingerprint=fingerprint,
                            meta=meta)
    if payload.get("kind") == "softmax":
        return SoftmaxHead(weights=np.asarray(payload["weights"], dtype=np.float64),
                           bias=np.asarray(payload["bias"], dtype=np.float64),
                           fingerprint=fingerprint, meta=meta)
    raise ModelMissing(f"head at {file} has unknown kind {payload.get('kind')!r}")
