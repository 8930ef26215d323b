"""The pluggable classifier boundary.

A classifier handle is anything with ``classify_file(path) -> ContentCategory``.
Three kinds ship here: the built-in trained model, a scripted stub for tests
and fixtures, and (in ``remote``) an adapter speaking the wire protocol.
Failures raise ClassifierError; they are never silently mapped to public.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from ..policy import ContentCategory
from .features import extract_features, FeatureExtractionError
from .model import SoftmaxModel, predict


class ClassifierError(Exception):
    """A classification could not be produced. Callers decide the fallback."""


class ModelClassifier:
    """Built-in handle: feature extraction plus the trained softmax model."""

    def __init__(self, model: SoftmaxModel):
        self.model = model

    def classify_file(self, path: str | Path) -> ContentCategory:
        return self.classify_bytes(_read_bytes(path))

    def classify_bytes(self, data: bytes) -> ContentCategory:
        try:
            features = extract_features(data, self.model.extractor)
        except FeatureExtractionError as exc:
            raise ClassifierError(str(exc)) from exc
        return predict(self.model, features)[0]

    @classmethod
    def from_file(cls, model_path: str | Path) -> "ModelClassifier":
        return cls(SoftmaxModel.load(model_path))


@dataclass
class StubClassifier:
    """Fixture handle: an exact filename-to-category table.

    Lookup falls back from the full path to the basename, so fixtures can
    declare either. Instrumented: every classification attempt is counted,
    which tests use to prove the cache short-circuits re-classification.
    """

    table: dict[str, ContentCategory] = field(default_factory=dict)
    default: ContentCategory | None = None
    calls: int = 0

    def classify_file(self, path: str | Path) -> ContentCategory:
        self.calls += 1
        p = str(path)
        if p in self.table:
            return self.table[p]
        name = Path(p).name
        if name in self.table:
            return self.table[name]
        if self.default is not None:
            return self.default
        raise ClassifierError(f"stub has no category for {p}")

    @classmethod
    def from_file(cls, table_path: str | Path) -> "StubClassifier":
        """Load a table file: one `<path> <category-label>` pair per line."""
        table = {}
        for lineno, raw in enumerate(Path(table_path).read_text().splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                path, label = line.rsplit(None, 1)
                table[path] = ContentCategory.from_label(label)
            except ValueError as exc:
                raise ValueError(f"{table_path}:{lineno}: bad stub entry {raw!r}") from exc
        return cls(table)


def classify_file(handle, path: str | Path) -> ContentCategory:
    """Classify one file through any handle; always a valid category or an error."""
    category = handle.classify_file(path)
    if not isinstance(category, ContentCategory):
        category = ContentCategory.from_code(int(category))
    return category


def _read_bytes(path: str | Path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise ClassifierError(f"cannot read {path}: {exc}") from exc
