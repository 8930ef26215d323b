"""Append-only audit log: one line-delimited record per handled request."""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, asdict
from pathlib import Path

from ..policy import AppRunState, ContentCategory, PolicyDecision, Reason, SystemStatus, Verdict
from ..store import now_ms


@dataclass(frozen=True)
class AuditEntry:
    timestamp: int  # ms since epoch, non-decreasing within one log
    app_id: str
    photo_path: str
    system: str
    app_state: str
    category: str | None  # label; None when classification failed or was bypassed
    verdict: str
    reason: str
    prompt_latency_ms: int | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> "AuditEntry":
        return cls(**json.loads(line))


class AuditLog:
    """Synchronized writer keeping timestamps monotone and the file crash-tolerant."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path else None
        self._entries: list[AuditEntry] = []
        self._lock = threading.Lock()
        self._last_ts = 0
        self._fh = None
        if self.path:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._fh = open(self.path, "a", encoding="utf-8")

    def record(
        self,
        app_id: str,
        photo_path: str,
        system: SystemStatus,
        app_state: AppRunState,
        category: ContentCategory | None,
        decision: PolicyDecision,
        prompt_latency_ms: int | None = None,
    ) -> AuditEntry:
        with self._lock:
            ts = max(now_ms(), self._last_ts)
            self._last_ts = ts
            entry = AuditEntry(
                timestamp=ts,
                app_id=app_id,
                photo_path=photo_path,
                system=system.value,
                app_state=app_state.value,
                category=category.label if category else None,
                verdict=decision.verdict.value,
                reason=decision.reason.value,
                prompt_latency_ms=prompt_latency_ms,
            )
            self._entries.append(entry)
            if self._fh:
                self._fh.write(entry.to_json() + "\n")
                self._fh.flush()
            return entry

    def note(self, text: str) -> None:
        """Free-form marker line (e.g. a late prompt answer); audited, not an entry."""
        with self._lock:
            if self._fh:
                self._fh.write(json.dumps({"note": text, "timestamp": now_ms()}) + "\n")
                self._fh.flush()

    def entries(self, since: int = 0) -> list[AuditEntry]:
        with self._lock:
            return [e for e in self._entries if e.timestamp >= since]

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)

    def close(self) -> None:
        with self._lock:
            if self._fh:
                self._fh.close()
                self._fh = None

    @staticmethod
    def read_file(path: str | Path) -> list[AuditEntry]:
        entries = []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            obj = json.loads(line)
            if "note" in obj:
                continue
            entries.append(AuditEntry(**obj))
        return entries


def decision_allows_private_leak(entry: AuditEntry) -> bool:
    """True when an entry would represent a fail-open disclosure.

    Private (or unclassifiable) content may be allowed only via the
    whitelist or an explicit user decision.
    """
    if entry.verdict != Verdict.ALLOW.value:
        return False
    if entry.category == ContentCategory.PUBLIC.label:
        return False
    if entry.reason in (Reason.WHITELISTED.value, Reason.USER_ALLOWED.value, Reason.NOT_A_PHOTO.value):
        return False
    return True
