"""Feature extraction: per-channel intensity histograms from image bytes."""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError


class FeatureExtractionError(Exception):
    """Raised when image bytes cannot be decoded into features."""


@dataclass(frozen=True)
class ExtractorConfig:
    """Histogram feature extractor parameters.

    The default produces three 64-bin per-channel intensity histograms
    (R, G, B), each block normalized to sum 1, for a 192-dimensional vector.
    """

    bins_per_channel: int = 64

    @property
    def dimension(self) -> int:
        return 3 * self.bins_per_channel


DEFAULT_EXTRACTOR = ExtractorConfig()


def extract_features(data: bytes, config: ExtractorConfig = DEFAULT_EXTRACTOR) -> np.ndarray:
    """Decode image bytes and return the histogram feature vector.

    Deterministic: identical bytes produce identical vectors. Raises
    FeatureExtractionError when the bytes are not a decodable image.
    """
    try:
        with Image.open(io.BytesIO(data)) as img:
            rgb = img.convert("RGB")
            pixels = np.asarray(rgb, dtype=np.uint8)
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise FeatureExtractionError(f"cannot decode image: {exc}") from exc

    bins = config.bins_per_channel
    blocks = []
    for channel in range(3):
        values = pixels[:, :, channel].ravel()
        hist = np.bincount(values >> _bin_shift(bins), minlength=bins).astype(np.float64)
        total = hist.sum()
        if total > 0:
            hist /= total
        blocks.append(hist)
    return np.concatenate(blocks)


def _bin_shift(bins: int) -> int:
    # 256 intensity values folded into `bins` equal buckets via a right shift;
    # bins must be a power of two no larger than 256.
    if bins <= 0 or bins > 256 or (bins & (bins - 1)) != 0:
        raise ValueError(f"bins_per_channel must be a power of two in 1..256, got {bins}")
    shift = 0
    width = 256 // bins
    while (1 << shift) < width:
        shift += 1
    return shift
