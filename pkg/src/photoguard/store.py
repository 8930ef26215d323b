"""Cached photo_id -> content category mapping.

The cache is what keeps access-time decisions fast: a lookup replaces a
synchronous classification. Records carry a digest of the file bytes so a
changed file forces reclassification instead of serving a stale category.

Persistence is a line-delimited text file with a version header; one JSON
record per line with fields (photo_id, fingerprint hex, category code,
classified_at). Writes go through a temp file and an atomic rename, so an
interrupted persist leaves the previous file intact.

Concurrency: single writer, many readers. Mutations take the store lock;
lookups read a dict that is never left in a half-written state.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .policy import ContentCategory, DEFAULT_PHOTO_EXTENSIONS, requires_control
from .classifier.handles import ClassifierError, classify_file

STORE_HEADER = "photoguard-store 1"
FINGERPRINT_LEN = 32


class StoreLoadError(Exception):
    """The persistence file could not be parsed. Names the byte offset."""

    def __init__(self, path: str | Path, byte_offset: int, detail: str):
        super().__init__(f"{path}: byte {byte_offset}: {detail}")
        self.path = str(path)
        self.byte_offset = byte_offset
        self.detail = detail


def canonical_photo_id(path: str | Path) -> str:
    """Stable photo identifier: the canonicalized absolute path."""
    return str(Path(path).resolve())


def fingerprint_bytes(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def now_ms() -> int:
    return time.time_ns() // 1_000_000


@dataclass(frozen=True)
class ContentRecord:
    photo_id: str
    content_fingerprint: bytes
    category: ContentCategory
    classified_at: int  # milliseconds since epoch

    def __post_init__(self) -> None:
        if len(self.content_fingerprint) != FINGERPRINT_LEN:
            raise ValueError(
                f"fingerprint must be {FINGERPRINT_LEN} bytes, got {len(self.content_fingerprint)}"
            )


@dataclass
class PhotoLibrary:
    """A directory of photos; scan() lists the files the policy controls."""

    root: Path
    extensions: frozenset[str] = DEFAULT_PHOTO_EXTENSIONS

    def __init__(self, root: str | Path, extensions: Iterable[str] = DEFAULT_PHOTO_EXTENSIONS):
        self.root = Path(root)
        self.extensions = frozenset(e.lower().lstrip(".") for e in extensions)

    def scan(self) -> list[Path]:
        if not self.root.is_dir():
            raise FileNotFoundError(f"library root is not a readable directory: {self.root}")
        photos = [
            p
            for p in sorted(self.root.rglob("*"))
            if p.is_file() and requires_control(str(p), self.extensions)
        ]
        return photos


@dataclass
class ScanReport:
    scanned: int = 0
    classified: int = 0
    skipped: list[tuple[str, str]] = field(default_factory=list)  # (path, error)
    removed: list[str] = field(default_factory=list)  # photo_ids GC'd on rescan


class ContentStore:
    def __init__(self, records: Iterable[ContentRecord] = ()):
        self._records: dict[str, ContentRecord] = {}
        self._lock = threading.RLock()
        for record in records:
            self._records[record.photo_id] = record

    # -- queries ------------------------------------------------------------

    def lookup(self, photo_id: str) -> ContentRecord | None:
        """The stored record, or None; absence is a normal outcome."""
        return self._records.get(photo_id)

    def lookup_path(self, path: str | Path) -> ContentRecord | None:
        return self.lookup(canonical_photo_id(path))

    def records(self) -> list[ContentRecord]:
        with self._lock:
            return sorted(self._records.values(), key=lambda r: r.photo_id)

    def __len__(self) -> int:
        return len(self._records)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ContentStore) and self.records() == other.records()

    # -- mutation -----------------------------------------------------------

    @classmethod
    def initialize_scan(cls, library: PhotoLibrary, classifier) -> tuple["ContentStore", ScanReport]:
        """Build a fresh store by classifying every controlled photo in the library."""
        store = cls()
        report = store.rescan(library, classifier)
        return store, report

    def rescan(self, library: PhotoLibrary, classifier) -> ScanReport:
        """Reconcile the store with the library.

        New or changed files are (re)classified; records whose files
        vanished are garbage-collected. Unreadable files are skipped and
        itemized in the report rather than failing the whole scan.
        """
        report = ScanReport()
        photos = library.scan()
        seen = set()
        for path in photos:
            pid = canonical_photo_id(path)
            seen.add(pid)
            report.scanned += 1
            try:
                before = self.lookup(pid)
                record = self.on_photo_added(path, classifier)
                if before is None or before.content_fingerprint != record.content_fingerprint:
                    report.classified += 1
            except (OSError, ClassifierError) as exc:
                report.skipped.append((str(path), str(exc)))
        with self._lock:
            vanished = [pid for pid in self._records if pid not in seen]
            for pid in vanished:
                del self._records[pid]
            report.removed.extend(sorted(vanished))
        return report

    def on_photo_added(self, path: str | Path, classifier) -> ContentRecord:
        """Upsert the record for one photo, classifying only when bytes changed."""
        pid = canonical_photo_id(path)
        data = Path(path).read_bytes()  # OSError propagates: no record for unreadable files
        fp = fingerprint_bytes(data)
        with self._lock:
            existing = self._records.get(pid)
            if existing is not None and existing.content_fingerprint == fp:
                return existing
        category = classify_file(classifier, path)
        record = ContentRecord(pid, fp, category, now_ms())
        with self._lock:
            self._records[pid] = record
        return record

    def upsert_record(self, record: ContentRecord) -> None:
        """Insert a pre-built record, e.g. a fixture with a declared category."""
        with self._lock:
            self._records[record.photo_id] = record

    def remove(self, photo_id: str) -> bool:
        with self._lock:
            return self._records.pop(photo_id, None) is not None

    def category_for(self, path: str | Path, classifier) -> ContentCategory:
        """Category from the cache, classifying and caching on a miss.

        A record whose fingerprint no longer matches the file is treated as
        a miss (reclassified) so decisions never ride on stale bytes.
        """
        record = self.on_photo_added(path, classifier)
        return record.category

    # -- persistence ----------------------------------------------------------

    def persist(self, path: str | Path) -> None:
        """Write the store; the destination is replaced atomically."""
        path = Path(path)
        lines = [STORE_HEADER]
        for record in self.records():
            lines.append(
                json.dumps(
                    {
                        "photo_id": record.photo_id,
                        "fingerprint": record.content_fingerprint.hex(),
                        "category": record.category.value,
                        "classified_at": record.classified_at,
                    },
                    ensure_ascii=False,
                )
            )
        payload = ("\n".join(lines) + "\n").encode("utf-8")
        tmp = path.with_name(path.name + ".tmp")
        with open(tmp, "wb") as fh:
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: str | Path) -> "ContentStore":
        """Parse a persisted store; any defect fails the whole load (no partial store)."""
        raw = Path(path).read_bytes()
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise StoreLoadError(path, exc.start, "invalid UTF-8") from exc
        lines = text.split("\n")
        if not lines or lines[0] != STORE_HEADER:
            raise StoreLoadError(path, 0, f"missing header {STORE_HEADER!r}")
        offset = len(lines[0].encode("utf-8")) + 1
        records: dict[str, ContentRecord] = {}
        for line in lines[1:]:
            if line == "":
                offset += 1
                continue
            try:
                record = _parse_record_line(line)
            except ValueError as exc:
                raise StoreLoadError(path, offset, str(exc)) from exc
            if record.photo_id in records:
                raise StoreLoadError(path, offset, f"duplicate photo_id {record.photo_id!r}")
            records[record.photo_id] = record
            offset += len(line.encode("utf-8")) + 1
        store = cls()
        store._records = records
        return store


def _parse_record_line(line: str) -> ContentRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ValueError(f"bad record JSON: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ValueError("record line is not an object")
    try:
        fingerprint = bytes.fromhex(obj["fingerprint"])
        return ContentRecord(
            photo_id=obj["photo_id"],
            content_fingerprint=fingerprint,
            category=ContentCategory.from_code(obj["category"]),
            classified_at=int(obj["classified_at"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"bad record fields: {exc}") from exc
