"""Confusion-matrix evaluation: per-class accuracy and the public-leak rate."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..policy import ContentCategory
from .model import Dataset, SoftmaxModel, predict

CATEGORIES = tuple(ContentCategory)


@dataclass
class ConfusionMatrix:
    """5x5 counts; rows are actual categories, columns predictions, in code order."""

    counts: np.ndarray

    def __post_init__(self) -> None:
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.shape != (5, 5):
            raise ValueError(f"confusion matrix must be 5x5, got {self.counts.shape}")
        if (self.counts < 0).any():
            raise ValueError("confusion matrix entries must be non-negative")

    def total(self) -> int:
        return int(self.counts.sum())

    def row_sum(self, category: ContentCategory) -> int:
        return int(self.counts[category.value - 1].sum())

    def at(self, actual: ContentCategory, predicted: ContentCategory) -> int:
        return int(self.counts[actual.value - 1, predicted.value - 1])

    def trace(self) -> int:
        return int(np.trace(self.counts))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ConfusionMatrix) and bool((self.counts == other.counts).all())


def _predict_category(model, features: np.ndarray) -> ContentCategory:
    # SoftmaxModel natively; anything else (scripted stubs, external
    # adapters) must expose predict_category(features).
    if isinstance(model, SoftmaxModel):
        return predict(model, features)[0]
    return model.predict_category(features)


def confusion_matrix(model, data: Dataset) -> ConfusionMatrix:
    """Count (actual, predicted) pairs over a dataset."""
    if not data.samples:
        raise ValueError("dataset is empty")
    counts = np.zeros((5, 5), dtype=np.int64)
    for sample in data.samples:
        predicted = _predict_category(model, sample.features)
        counts[sample.label.value - 1, predicted.value - 1] += 1
    return ConfusionMatrix(counts)


def per_class_accuracy(cm: ConfusionMatrix) -> dict[ContentCategory, float | None]:
    """Diagonal count over row sum, per class; None for classes with no samples."""
    result: dict[ContentCategory, float | None] = {}
    for cat in CATEGORIES:
        row_sum = cm.row_sum(cat)
        result[cat] = None if row_sum == 0 else cm.at(cat, cat) / row_sum
    return result


def private_to_public_leak_rate(cm: ConfusionMatrix) -> float | None:
    """Fraction of actually-private samples predicted as public.

    This is the dangerous misclassification direction: a leaked-private
    photo is shown without a prompt. Returns None (undefined) when the
    matrix holds no private samples.
    """
    private = [c for c in CATEGORIES if c.is_private]
    total_private = sum(cm.row_sum(c) for c in private)
    if total_private == 0:
        return None
    leaked = sum(cm.at(c, ContentCategory.PUBLIC) for c in private)
    return leaked / total_private


def accuracy_from_matrix(cm: ConfusionMatrix) -> float:
    """Overall accuracy: trace over total."""
    total = cm.total()
    if total == 0:
        raise ValueError("confusion matrix is empty")
    return cm.trace() / total
