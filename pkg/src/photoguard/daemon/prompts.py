"""The human-in-the-loop queue: pending prompts, answers, and timeouts."""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field

from ..policy import AccessRequest, ContentCategory, PromptChoice
from ..store import now_ms

ALERT_TEMPLATE = "This photo contains: {label}"
ALERT_UNCLASSIFIED = "This photo could not be classified; treating it as private"


def alert_text_for(category: ContentCategory | None) -> str:
    if category is None:
        return ALERT_UNCLASSIFIED
    return ALERT_TEMPLATE.format(label=category.label)


@dataclass
class PendingPrompt:
    prompt_id: str
    request: AccessRequest
    category: ContentCategory | None  # None: classification failed, fail-closed private
    alert_text: str
    created_at: int  # ms since epoch
    timeout_ms: int

    def __post_init__(self) -> None:
        if self.category is not None and not self.category.is_private:
            raise ValueError("prompts exist only for private (or unclassifiable) content")


class PromptConflictError(Exception):
    """The prompt is unknown or was already resolved (possibly by timeout)."""

    def __init__(self, prompt_id: str, resolution: str | None):
        detail = f"already resolved ({resolution})" if resolution else "unknown prompt"
        super().__init__(f"prompt {prompt_id}: {detail}")
        self.prompt_id = prompt_id
        self.resolution = resolution


@dataclass
class _Slot:
    prompt: PendingPrompt
    event: threading.Event = field(default_factory=threading.Event)
    choice: PromptChoice | None = None


class PromptBroker:
    """First answer wins; a timed-out prompt never changes its decision.

    Late answers are rejected with a conflict carrying the original
    resolution so callers can surface (and audit) them.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._active: dict[str, _Slot] = {}
        self._resolved: dict[str, str] = {}  # prompt_id -> final choice value

    def create(self, request: AccessRequest, category: ContentCategory | None, timeout_s: float) -> PendingPrompt:
        prompt = PendingPrompt(
            prompt_id=uuid.uuid4().hex,
            request=request,
            category=category,
            alert_text=alert_text_for(category),
            created_at=now_ms(),
            timeout_ms=int(timeout_s * 1000),
        )
        with self._lock:
            self._active[prompt.prompt_id] = _Slot(prompt)
        return prompt

    def pending(self) -> list[PendingPrompt]:
        with self._lock:
            return [slot.prompt for slot in self._active.values()]

    def get(self, prompt_id: str) -> PendingPrompt | None:
        with self._lock:
            slot = self._active.get(prompt_id)
            return slot.prompt if slot else None

    def resolve(self, prompt_id: str, choice: PromptChoice) -> PendingPrompt:
        """Answer a pending prompt; raises PromptConflictError when too late."""
        if choice is PromptChoice.TIMEOUT:
            raise ValueError("timeout is not an answer; it happens by itself")
        with self._lock:
            slot = self._active.get(prompt_id)
            if slot is None or slot.choice is not None:
                raise PromptConflictError(prompt_id, self._resolved.get(prompt_id))
            slot.choice = choice
            slot.event.set()
            return slot.prompt

    def wait(self, prompt: PendingPrompt) -> tuple[PromptChoice, int]:
        """Block until the prompt is answered or times out; returns (choice, latency ms)."""
        slot = self._active.get(prompt.prompt_id)
        if slot is None:
            raise PromptConflictError(prompt.prompt_id, self._resolved.get(prompt.prompt_id))
        slot.event.wait(timeout=prompt.timeout_ms / 1000)
        with self._lock:
            choice = slot.choice if slot.choice is not None else PromptChoice.TIMEOUT
            slot.choice = choice
            self._resolved[prompt.prompt_id] = choice.value
            self._active.pop(prompt.prompt_id, None)
        return choice, now_ms() - prompt.created_at
