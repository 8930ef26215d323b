"""The long-running guard: watches the library, gates access, audits everything."""

from __future__ import annotations

import logging
import threading

from ..policy import (
    AccessRequest,
    AppRunState,
    PolicyDecision,
    PromptChoice,
    Reason,
    SystemStatus,
    Verdict,
    decide,
    decide_unclassified,
    requires_control,
    resolve_prompt,
)
from ..store import ContentStore, PhotoLibrary, ScanReport, now_ms
from ..classifier.handles import ClassifierError
from .audit import AuditEntry, AuditLog
from .bench import TimingReport, run_bench
from .config import DaemonConfig
from .prompts import PendingPrompt, PromptBroker, PromptConflictError

log = logging.getLogger("photoguard.daemon")


class GuardDaemon:
    def __init__(self, config: DaemonConfig, classifier=None):
        self.config = config
        self.classifier = classifier if classifier is not None else config.classifier.build()
        self.library = PhotoLibrary(config.library_root, config.extensions)
        self.whitelist = config.whitelist
        self.prompts = PromptBroker()
        self.store: ContentStore | None = None
        self.audit: AuditLog | None = None
        self.started_at: int | None = None
        self._watch_thread: threading.Thread | None = None
        self._stop = threading.Event()
        self._store_dirty = threading.Event()

    # -- lifecycle ----------------------------------------------------------

    def startup(self) -> ScanReport:
        """Load or build the store, reconcile it with the library, start watching.

        A restart over an unchanged library costs zero classifier calls:
        reconciliation only reclassifies new or changed fingerprints.
        """
        if self.config.store_path.exists():
            self.store = ContentStore.load(self.config.store_path)
        else:
            self.store = ContentStore()
        report = self.store.rescan(self.library, self.classifier)
        self.store.persist(self.config.store_path)
        self.audit = AuditLog(self.config.audit_path)
        self.started_at = now_ms()
        self._stop.clear()
        self._watch_thread = threading.Thread(target=self._watch_loop, daemon=True, name="photoguard-watch")
        self._watch_thread.start()
        log.info(
            "startup: %d records (%d classified, %d skipped, %d removed)",
            len(self.store), report.classified, len(report.skipped), len(report.removed),
        )
        return report

    def shutdown(self) -> None:
        self._stop.set()
        if self._watch_thread:
            self._watch_thread.join(timeout=5)
            self._watch_thread = None
        if self.store is not None:
            self.store.persist(self.config.store_path)
        if self.audit is not None:
            self.audit.close()

    def _watch_loop(self) -> None:
        while not self._stop.wait(self.config.watch_interval):
            try:
                report = self.store.rescan(self.library, self.classifier)
                if report.classified or report.removed:
                    self.store.persist(self.config.store_path)
            except OSError as exc:
                log.warning("watch pass failed: %s", exc)

    # -- the request path -----------------------------------------------------

    def handle_access(
        self,
        app_id: str,
        photo_path: str,
        system: SystemStatus,
        app_state: AppRunState,
    ) -> tuple[PolicyDecision, AuditEntry]:
        """Gate one access request; always produces exactly one audit entry.

        Non-photo paths skip the store entirely. A missing cache entry is
        classified synchronously and cached. Classifier failures fail
        closed: the content is handled as private, so the worst outcome of
        a broken classifier is a prompt, never silent disclosure.
        """
        if self.store is None or self.audit is None:
            raise RuntimeError("daemon is not started")
        request = AccessRequest(app_id=app_id, photo_path=photo_path, timestamp=now_ms())

        if not requires_control(photo_path, self.config.extensions):
            decision = PolicyDecision(Verdict.ALLOW, Reason.NOT_A_PHOTO)
            entry = self.audit.record(app_id, photo_path, system, app_state, None, decision)
            return decision, entry

        category = None
        try:
            category = self.store.category_for(photo_path, self.classifier)
        except (OSError, ClassifierError) as exc:
            log.warning("classification failed for %s: %s (failing closed)", photo_path, exc)

        if category is not None:
            decision = decide(request, system, app_state, category, self.whitelist)
        else:
            decision = decide_unclassified(request, system, app_state, self.whitelist)

        prompt_latency_ms = None
        if decision.verdict is Verdict.PROMPT_REQUIRED:
            prompt = self.prompts.create(request, category, self.config.prompt_timeout)
            choice, prompt_latency_ms = self.prompts.wait(prompt)
            decision = resolve_prompt(decision, choice)

        entry = self.audit.record(
            app_id, photo_path, system, app_state, category, decision, prompt_latency_ms
        )
        return decision, entry

    def resolve_prompt(self, prompt_id: str, choice: PromptChoice) -> PendingPrompt:
        """Answer a pending prompt on behalf of the operator UI."""
        try:
            return self.prompts.resolve(prompt_id, choice)
        except PromptConflictError as exc:
            if self.audit is not None:
                self.audit.note(f"late answer {choice.value} for prompt {prompt_id}: {exc}")
            raise

    # -- benchmark ------------------------------------------------------------

    def bench(self, n_photos: int, trials: int, seed: int | None = None) -> TimingReport:
        if self.store is None:
            raise RuntimeError("daemon is not started")
        return run_bench(self.store, self.classifier, n_photos, trials, seed=seed)
