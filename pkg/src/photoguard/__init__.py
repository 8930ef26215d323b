"""photoguard: content-based, context-aware access control for photo files.

Photos are classified into five content categories, results are cached in a
fingerprinted store, and every access is gated on lock state, app run state,
content category, and (for private content in the foreground) a live human
allow/deny decision. Everything ambiguous fails closed.
"""

from .policy import (
    AccessRequest,
    AppRunState,
    ContentCategory,
    PolicyDecision,
    PromptChoice,
    Reason,
    SystemStatus,
    Verdict,
    Whitelist,
    decide,
    decision_table,
    requires_control,
    resolve_prompt,
)
from .store import ContentRecord, ContentStore, PhotoLibrary, ScanReport, StoreLoadError

__version__ = "0.1.0"

__all__ = [
    "AccessRequest",
    "AppRunState",
    "ContentCategory",
    "ContentRecord",
    "ContentStore",
    "PhotoLibrary",
    "PolicyDecision",
    "PromptChoice",
    "Reason",
    "ScanReport",
    "StoreLoadError",
    "SystemStatus",
    "Verdict",
    "Whitelist",
    "decide",
    "decision_table",
    "requires_control",
    "resolve_prompt",
    "__version__",
]
