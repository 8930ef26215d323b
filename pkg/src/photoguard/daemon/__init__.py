"""Guard daemon: watcher, request handling, prompts, audit, API, benchmark."""

from .audit import AuditEntry, AuditLog, decision_allows_private_leak
from .bench import TimingReport, run_bench
from .config import ClassifierSelection, DaemonConfig
from .prompts import PendingPrompt, PromptBroker, PromptConflictError, alert_text_for
from .service import GuardDaemon
from .api import GuardApiServer

__all__ = [
    "AuditEntry",
    "AuditLog",
    "ClassifierSelection",
    "DaemonConfig",
    "GuardApiServer",
    "GuardDaemon",
    "PendingPrompt",
    "PromptBroker",
    "PromptConflictError",
    "TimingReport",
    "alert_text_for",
    "decision_allows_private_leak",
    "run_bench",
]
