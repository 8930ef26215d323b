"""Multinomial logistic regression over histogram features.

The model is the pluggable default, not a deep network: it keeps the same
input/output contract (image features in, one of five categories plus a
probability vector out), so an external heavyweight model can replace it
behind the same interface.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ..policy import ContentCategory
from .features import ExtractorConfig, DEFAULT_EXTRACTOR

N_CATEGORIES = 5


class TrainingDivergedError(Exception):
    """Raised when the training loss becomes non-finite."""

    def __init__(self, epoch: int):
        super().__init__(f"training loss became non-finite at epoch {epoch}")
        self.epoch = epoch


@dataclass(frozen=True)
class LabeledSample:
    features: np.ndarray
    label: ContentCategory


class Split:
    TRAIN = "train"
    TEST = "test"


@dataclass
class Dataset:
    samples: list[LabeledSample]
    split: str = Split.TRAIN

    def __len__(self) -> int:
        return len(self.samples)

    def matrices(self) -> tuple[np.ndarray, np.ndarray]:
        """Stack samples into (X, y) with y as 0-based class indices."""
        if not self.samples:
            raise ValueError("dataset is empty")
        x = np.stack([s.features for s in self.samples])
        y = np.array([s.label.value - 1 for s in self.samples], dtype=np.intp)
        return x, y


@dataclass
class ModelMetadata:
    """Mirror of the size/accuracy trade-off card an external model ships with."""

    name: str = "histogram-softmax"
    size_bytes: int = 0
    reported_accuracy: float | None = None


@dataclass
class SoftmaxModel:
    weights: np.ndarray  # (5, D)
    bias: np.ndarray  # (5,)
    extractor: ExtractorConfig = DEFAULT_EXTRACTOR
    metadata: ModelMetadata = field(default_factory=ModelMetadata)

    @property
    def dimension(self) -> int:
        return self.weights.shape[1]

    @classmethod
    def zeros(cls, dimension: int, extractor: ExtractorConfig = DEFAULT_EXTRACTOR) -> "SoftmaxModel":
        return cls(
            weights=np.zeros((N_CATEGORIES, dimension)),
            bias=np.zeros(N_CATEGORIES),
            extractor=extractor,
        )

    def save(self, path: str | Path) -> None:
        payload = {
            "format": "photoguard-model",
            "version": 1,
            "weights": self.weights.tolist(),
            "bias": self.bias.tolist(),
            "bins_per_channel": self.extractor.bins_per_channel,
            "metadata": {
                "name": self.metadata.name,
                "size_bytes": self.metadata.size_bytes,
                "reported_accuracy": self.metadata.reported_accuracy,
            },
        }
        Path(path).write_text(json.dumps(payload))

    @classmethod
    def load(cls, path: str | Path) -> "SoftmaxModel":
        payload = json.loads(Path(path).read_text())
        if payload.get("format") != "photoguard-model":
            raise ValueError(f"{path}: not a photoguard model file")
        meta = payload.get("metadata", {})
        return cls(
            weights=np.asarray(payload["weights"], dtype=np.float64),
            bias=np.asarray(payload["bias"], dtype=np.float64),
            extractor=ExtractorConfig(bins_per_channel=payload["bins_per_channel"]),
            metadata=ModelMetadata(
                name=meta.get("name", "histogram-softmax"),
                size_bytes=meta.get("size_bytes", 0),
                reported_accuracy=meta.get("reported_accuracy"),
            ),
        )


def _logits(model: SoftmaxModel, x: np.ndarray) -> np.ndarray:
    return x @ model.weights.T + model.bias


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def predict(model: SoftmaxModel, x: np.ndarray) -> tuple[ContentCategory, np.ndarray]:
    """Return (category, probability vector) for one feature vector.

    Ties in the argmax break toward the lowest category code.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.dimension,):
        raise ValueError(f"feature dimension {x.shape} does not match model ({model.dimension},)")
    probs = _softmax(_logits(model, x))
    # np.argmax returns the first maximal index; categories are stored in
    # ascending code order, so ties already resolve to the lowest code.
    category = ContentCategory(int(np.argmax(probs)) + 1)
    return category, probs


def predict_batch(model: SoftmaxModel, x: np.ndarray) -> np.ndarray:
    """0-based predicted class indices for a (n, D) feature matrix."""
    probs = _softmax(_logits(model, x))
    return probs.argmax(axis=1)


def cross_entropy_loss(model: SoftmaxModel, data: Dataset) -> float:
    """Empirical mean of -log(probability of the true label)."""
    x, y = data.matrices()
    z = _logits(model, x)
    z = z - z.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(z).sum(axis=1))
    return float(np.mean(log_norm - z[np.arange(len(y)), y]))


@dataclass
class Gradient:
    weights: np.ndarray
    bias: np.ndarray

    def norm(self) -> float:
        return float(np.sqrt((self.weights**2).sum() + (self.bias**2).sum()))


def loss_gradient(model: SoftmaxModel, data: Dataset) -> Gradient:
    """Analytic gradient of the mean cross-entropy at the model's parameters."""
    x, y = data.matrices()
    probs = _softmax(_logits(model, x))
    probs[np.arange(len(y)), y] -= 1.0
    probs /= len(y)
    return Gradient(weights=probs.T @ x, bias=probs.sum(axis=0))


@dataclass(frozen=True)
class TrainingParams:
    learning_rate: float = 0.5
    max_epochs: int = 500
    tolerance: float = 1e-6
    seed: int = 0

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.max_epochs < 0:
            raise ValueError("max_epochs must be non-negative")


@dataclass
class TrainingResult:
    model: SoftmaxModel
    loss_history: list[float]

    @property
    def final_loss(self) -> float:
        return self.loss_history[-1]


def train(
    train_data: Dataset,
    params: TrainingParams = TrainingParams(),
    extractor: ExtractorConfig = DEFAULT_EXTRACTOR,
) -> TrainingResult:
    """Full-batch gradient descent from zero initialization.

    Stops when the loss improvement falls below `tolerance` or `max_epochs`
    is reached. The objective is convex, so zero init plus a small enough
    step yields a non-increasing loss history and a reproducible model
    (the seed is part of the contract for pluggable trainers but the
    built-in procedure is already deterministic).
    """
    if not train_data.samples:
        raise ValueError("training data is empty")
    dimension = train_data.samples[0].features.shape[0]
    model = SoftmaxModel.zeros(dimension, extractor=extractor)
    history = [cross_entropy_loss(model, train_data)]
    for epoch in range(params.max_epochs):
        with np.errstate(over="ignore", invalid="ignore"):
            # overflow here is not a numerics bug: it is divergence, and the
            # finiteness check below is its handler
            grad = loss_gradient(model, train_data)
            model.weights -= params.learning_rate * grad.weights
            model.bias -= params.learning_rate * grad.bias
            loss = cross_entropy_loss(model, train_data)
        if not np.isfinite(loss):
            raise TrainingDivergedError(epoch)
        improvement = history[-1] - loss
        history.append(loss)
        if abs(improvement) < params.tolerance:
            break
    return TrainingResult(model=model, loss_history=history)


def accuracy(model: SoftmaxModel, data: Dataset) -> float:
    """Fraction of samples whose predicted category equals the label."""
    x, y = data.matrices()
    return float(np.mean(predict_batch(model, x) == y))


def split_dataset(samples: Sequence[LabeledSample], test_fraction: float = 0.2, seed: int = 0) -> tuple[Dataset, Dataset]:
    """Shuffle and split samples into train/test datasets."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(samples))
    n_test = int(round(len(samples) * test_fraction))
    test_idx = set(order[:n_test].tolist())
    train = [samples[i] for i in range(len(samples)) if i not in test_idx]
    test = [samples[i] for i in range(len(samples)) if i in test_idx]
    return Dataset(train, Split.TRAIN), Dataset(test, Split.TEST)
