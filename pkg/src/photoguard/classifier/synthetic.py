"""Synthetic photo corpus with known labels.

Each category gets its own color signature, so the generating class is the
ground truth an evaluation can be checked against. Used by the test suite
and by the bench/evaluate CLI paths when no real corpus is around.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np
from PIL import Image

from ..policy import ContentCategory
from .features import ExtractorConfig, DEFAULT_EXTRACTOR, extract_features
from .model import Dataset, LabeledSample, Split

# Per-category base color (R, G, B). Chosen far apart so the per-channel
# histograms of noisy samples stay linearly separable.
CATEGORY_COLORS: dict[ContentCategory, tuple[int, int, int]] = {
    ContentCategory.PUBLIC: (128, 128, 128),
    ContentCategory.PHOTO_ID: (220, 60, 60),
    ContentCategory.LEGAL_DOCUMENT: (240, 240, 225),
    ContentCategory.FAMILY: (60, 190, 70),
    ContentCategory.NUDE: (210, 160, 120),
}


def make_image_bytes(
    category: ContentCategory,
    rng: np.random.Generator | None = None,
    size: tuple[int, int] = (32, 32),
    noise: float = 12.0,
) -> bytes:
    """A small PNG whose pixel distribution is typical for the category."""
    rng = rng or np.random.default_rng(0)
    base = np.array(CATEGORY_COLORS[category], dtype=np.float64)
    pixels = base + rng.normal(0.0, noise, size=(size[1], size[0], 3))
    pixels = np.clip(pixels, 0, 255).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(pixels, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def write_image(path: str | Path, category: ContentCategory, rng: np.random.Generator | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(make_image_bytes(category, rng))
    return path


def write_image_tree(root: str | Path, per_class: int, seed: int = 0) -> Path:
    """Write the dataset fixture layout: one sub-directory per category label."""
    root = Path(root)
    rng = np.random.default_rng(seed)
    for category in ContentCategory:
        sub = root / category.label
        sub.mkdir(parents=True, exist_ok=True)
        for i in range(per_class):
            (sub / f"{category.label}_{i:04d}.png").write_bytes(make_image_bytes(category, rng))
    return root


def load_image_tree(root: str | Path, config: ExtractorConfig = DEFAULT_EXTRACTOR) -> list[LabeledSample]:
    """Load a fixture directory tree into labeled feature samples."""
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"dataset directory not found: {root}")
    samples = []
    for category in ContentCategory:
        sub = root / category.label
        if not sub.is_dir():
            continue
        for file in sorted(sub.iterdir()):
            if file.is_file():
                samples.append(LabeledSample(extract_features(file.read_bytes(), config), category))
    if not samples:
        raise ValueError(f"no samples found under {root} (expected one sub-directory per label)")
    return samples


def make_feature_dataset(
    per_class: int,
    seed: int = 0,
    noise: float = 0.02,
    config: ExtractorConfig = DEFAULT_EXTRACTOR,
) -> Dataset:
    """Labeled feature vectors straight from the histogram prototypes.

    Faster than rendering images when only the learning problem matters;
    every block stays non-negative and sums to 1 like real extractions.
    """
    rng = np.random.default_rng(seed)
    bins = config.bins_per_channel
    samples = []
    for category in ContentCategory:
        prototype = _prototype_histogram(category, bins)
        for _ in range(per_class):
            noisy = prototype + rng.uniform(0.0, noise, size=prototype.shape)
            for block in range(3):
                sl = slice(block * bins, (block + 1) * bins)
                noisy[sl] /= noisy[sl].sum()
            samples.append(LabeledSample(noisy, category))
    return Dataset(samples, Split.TRAIN)


def _prototype_histogram(category: ContentCategory, bins: int) -> np.ndarray:
    width = 256 // bins
    blocks = []
    for value in CATEGORY_COLORS[category]:
        hist = np.zeros(bins)
        center = min(value // width, bins - 1)
        hist[center] = 0.6
        hist[max(center - 1, 0)] += 0.2
        hist[min(center + 1, bins - 1)] += 0.2
        blocks.append(hist)
    return np.concatenate(blocks)
