"""Access decision workflow: lock state, run state, content category, whitelist.

Everything in this module is pure and deterministic. State (who is locked,
what runs in the foreground) is injected by the caller; nothing here touches
the OS.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable

#: File extensions (lower-case, no dot) that are treated as photos and
#: therefore gated. Anything else bypasses the policy entirely.
DEFAULT_PHOTO_EXTENSIONS = frozenset(
    {"jpg", "jpeg", "png", "gif", "bmp", "webp", "heic"}
)


class SystemStatus(enum.Enum):
    LOCKED = "locked"
    UNLOCKED = "unlocked"


class AppRunState(enum.Enum):
    FOREGROUND = "foreground"
    BACKGROUND = "background"


class ContentCategory(enum.IntEnum):
    """The five content categories. Code 1 is public; 2..5 are private."""

    PUBLIC = 1
    PHOTO_ID = 2
    LEGAL_DOCUMENT = 3
    FAMILY = 4
    NUDE = 5

    @property
    def label(self) -> str:
        return _CATEGORY_LABELS[self]

    @property
    def is_private(self) -> bool:
        return self is not ContentCategory.PUBLIC

    @classmethod
    def from_code(cls, code: int) -> "ContentCategory":
        try:
            return cls(code)
        except ValueError:
            raise ValueError(f"unknown content category code: {code!r}") from None

    @classmethod
    def from_label(cls, label: str) -> "ContentCategory":
        try:
            return _LABEL_TO_CATEGORY[label.strip().lower()]
        except KeyError:
            raise ValueError(f"unknown content category label: {label!r}") from None


_CATEGORY_LABELS = {
    ContentCategory.PUBLIC: "public",
    ContentCategory.PHOTO_ID: "photo_id",
    ContentCategory.LEGAL_DOCUMENT: "legal_document",
    ContentCategory.FAMILY: "family",
    ContentCategory.NUDE: "nude",
}
_LABEL_TO_CATEGORY = {label: cat for cat, label in _CATEGORY_LABELS.items()}


class Verdict(enum.Enum):
    ALLOW = "allow"
    DENY = "deny"
    PROMPT_REQUIRED = "prompt"


class Reason(enum.Enum):
    WHITELISTED = "whitelisted"
    PUBLIC_CONTENT = "public_content"
    SCREEN_LOCKED = "screen_locked"
    APP_IN_BACKGROUND = "app_in_background"
    PRIVATE_CONTENT = "private_content"
    USER_ALLOWED = "user_allowed"
    USER_DENIED = "user_denied"
    PROMPT_TIMEOUT = "prompt_timeout"
    NOT_A_PHOTO = "not_a_photo"


_ALLOW_REASONS = frozenset(
    {Reason.WHITELISTED, Reason.PUBLIC_CONTENT, Reason.USER_ALLOWED, Reason.NOT_A_PHOTO}
)
_DENY_REASONS = frozenset(
    {
        Reason.SCREEN_LOCKED,
        Reason.APP_IN_BACKGROUND,
        Reason.USER_DENIED,
        Reason.PROMPT_TIMEOUT,
    }
)


@dataclass(frozen=True)
class PolicyDecision:
    verdict: Verdict
    reason: Reason

    def __post_init__(self) -> None:
        if self.verdict is Verdict.PROMPT_REQUIRED and self.reason is not Reason.PRIVATE_CONTENT:
            raise ValueError(f"prompt verdict cannot carry reason {self.reason}")
        if self.verdict is Verdict.ALLOW and self.reason not in _ALLOW_REASONS:
            raise ValueError(f"allow verdict cannot carry reason {self.reason}")
        if self.verdict is Verdict.DENY and self.reason not in _DENY_REASONS:
            raise ValueError(f"deny verdict cannot carry reason {self.reason}")


@dataclass(frozen=True)
class AccessRequest:
    """One app's attempt to read one photo file at one instant."""

    app_id: str
    photo_path: str
    timestamp: int = 0  # milliseconds since epoch

    def __post_init__(self) -> None:
        if not self.app_id:
            raise ValueError("app_id must be non-empty")
        if not self.photo_path:
            raise ValueError("photo_path must be non-empty")


@dataclass
class Whitelist:
    """Apps granted access to all photos, bypassing every other check."""

    entries: set[str] = field(default_factory=set)

    def __contains__(self, app_id: str) -> bool:
        return app_id in self.entries

    def add(self, app_id: str) -> None:
        self.entries.add(app_id)

    def remove(self, app_id: str) -> None:
        self.entries.discard(app_id)

    @classmethod
    def of(cls, *app_ids: str) -> "Whitelist":
        return cls(set(app_ids))


class PromptChoice(enum.Enum):
    ALLOW = "allow"
    DENY = "deny"
    TIMEOUT = "timeout"


def requires_control(photo_path: str, extensions: Iterable[str] = DEFAULT_PHOTO_EXTENSIONS) -> bool:
    """True iff the path's final extension (case-insensitive) marks it as a photo.

    Files returning False bypass the policy: the access resolves to
    Allow / NOT_A_PHOTO without classification or prompting.
    """
    if not photo_path:
        raise ValueError("photo_path must be non-empty")
    name = photo_path.replace("\\", "/").rsplit("/", 1)[-1]
    dot = name.rfind(".")
    if dot <= 0:  # no extension, or dotfile like ".jpg"
        return False
    ext = name[dot + 1 :].lower()
    exts = {e.lower().lstrip(".") for e in extensions}
    return ext in exts


def decide(
    req: AccessRequest,
    sys: SystemStatus,
    app: AppRunState,
    category: ContentCategory,
    wl: Whitelist,
) -> PolicyDecision:
    """Map one access request onto an access decision.

    Evaluation order is fixed: whitelist, then lock state, then run state,
    then content category. Whitelisted apps bypass every check, including
    the lock screen (so background backup keeps working while the user
    is away).
    """
    if req.app_id in wl:
        return PolicyDecision(Verdict.ALLOW, Reason.WHITELISTED)
    if sys is SystemStatus.LOCKED:
        return PolicyDecision(Verdict.DENY, Reason.SCREEN_LOCKED)
    if app is AppRunState.BACKGROUND:
        return PolicyDecision(Verdict.DENY, Reason.APP_IN_BACKGROUND)
    if not category.is_private:
        return PolicyDecision(Verdict.ALLOW, Reason.PUBLIC_CONTENT)
    return PolicyDecision(Verdict.PROMPT_REQUIRED, Reason.PRIVATE_CONTENT)


def decide_unclassified(
    req: AccessRequest,
    sys: SystemStatus,
    app: AppRunState,
    wl: Whitelist,
) -> PolicyDecision:
    """Decision for a photo whose category could not be determined.

    Fail-closed: unknown content is handled exactly like private content,
    so the outcome matches ``decide`` with any private category.
    """
    if req.app_id in wl:
        return PolicyDecision(Verdict.ALLOW, Reason.WHITELISTED)
    if sys is SystemStatus.LOCKED:
        return PolicyDecision(Verdict.DENY, Reason.SCREEN_LOCKED)
    if app is AppRunState.BACKGROUND:
        return PolicyDecision(Verdict.DENY, Reason.APP_IN_BACKGROUND)
    return PolicyDecision(Verdict.PROMPT_REQUIRED, Reason.PRIVATE_CONTENT)


def resolve_prompt(pending: PolicyDecision, choice: PromptChoice) -> PolicyDecision:
    """Turn a pending prompt into a final decision.

    Timeout resolves to deny: absence of an answer must never disclose
    a private photo.
    """
    if pending.verdict is not Verdict.PROMPT_REQUIRED:
        raise ValueError(f"resolve_prompt requires a prompt decision, got {pending.verdict}")
    if choice is PromptChoice.ALLOW:
        return PolicyDecision(Verdict.ALLOW, Reason.USER_ALLOWED)
    if choice is PromptChoice.DENY:
        return PolicyDecision(Verdict.DENY, Reason.USER_DENIED)
    return PolicyDecision(Verdict.DENY, Reason.PROMPT_TIMEOUT)


@dataclass(frozen=True)
class DecisionTableRow:
    whitelisted: bool
    system: SystemStatus
    app_state: AppRunState
    category: ContentCategory
    decision: PolicyDecision


def decision_table() -> list[DecisionTableRow]:
    """Enumerate all 2 x 2 x 5 x 2 = 40 input combinations with their decisions."""
    rows = []
    wl = Whitelist.of("listed")
    for whitelisted, sys, app, cat in product(
        (False, True),
        (SystemStatus.LOCKED, SystemStatus.UNLOCKED),
        (AppRunState.FOREGROUND, AppRunState.BACKGROUND),
        tuple(ContentCategory),
    ):
        req = AccessRequest(app_id="listed" if whitelisted else "unlisted", photo_path="p.jpg")
        rows.append(
            DecisionTableRow(
                whitelisted=whitelisted,
                system=sys,
                app_state=app,
                category=cat,
                decision=decide(req, sys, app, cat, wl),
            )
        )
    return rows
