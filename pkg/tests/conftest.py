import hashlib
from pathlib import Path

import numpy as np
import pytest

from photoguard.policy import ContentCategory
from photoguard.classifier import ConfusionMatrix, TrainingParams, train
from photoguard.classifier.synthetic import make_feature_dataset, write_image


class ContentHashClassifier:
    """Deterministic category from file bytes; the coherence oracle in tests.

    Independent of the store's own bookkeeping: the expected category for a
    file is always re-derivable from its current content.
    """

    def __init__(self):
        self.calls = 0

    def category_for_bytes(self, data: bytes) -> ContentCategory:
        return ContentCategory((hashlib.sha256(data).digest()[0] % 5) + 1)

    def classify_file(self, path) -> ContentCategory:
        self.calls += 1
        return self.category_for_bytes(Path(path).read_bytes())


@pytest.fixture
def content_hash_classifier():
    return ContentHashClassifier()


@pytest.fixture
def photo_tree(tmp_path):
    """Five category-typical photos plus one non-photo file."""
    root = tmp_path / "library"
    root.mkdir()
    paths = {}
    rng = np.random.default_rng(7)
    for category in ContentCategory:
        paths[category] = write_image(root / f"{category.label}.png", category, rng)
    (root / "notes.txt").write_text("not a photo")
    return root, paths


@pytest.fixture(scope="session")
def trained_model():
    """Small model trained on the synthetic feature suite; reused across tests."""
    dataset = make_feature_dataset(per_class=40, seed=3)
    return train(dataset, TrainingParams(learning_rate=0.5, max_epochs=300)).model


# The published confusion matrix for the private classes, mapped into
# code order (public, photo_id, legal_document, family, nude); the public
# actual row is not part of the published table and stays zero.
TABLE_CONFUSION = ConfusionMatrix(
    np.array(
        [
            [0, 0, 0, 0, 0],
            [0, 265, 4, 2, 0],
            [0, 2, 92, 0, 0],
            [0, 4, 0, 130, 2],
            [0, 5, 0, 10, 94],
        ]
    )
)


@pytest.fixture
def published_confusion():
    return TABLE_CONFUSION
