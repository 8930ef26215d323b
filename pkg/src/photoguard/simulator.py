"""Deterministic replay of scripted access scenarios.

Stands in for the kernel-level interception layer: system-state changes,
app-state changes, photo additions, and access attempts are replayed from a
script against the real policy engine and content store, producing a trace
that golden tests can compare byte for byte. Time in traces is a logical
event counter, never the wall clock.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path

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
    decide_unclassified,
    decision_table,
    requires_control,
    resolve_prompt,
)
from .store import ContentStore, ContentRecord, canonical_photo_id, fingerprint_bytes
from .classifier.handles import ClassifierError


class ScenarioError(Exception):
    def __init__(self, line_no: int, detail: str):
        super().__init__(f"line {line_no}: {detail}")
        self.line_no = line_no
        self.detail = detail


class EventKind(enum.Enum):
    SET_SYSTEM = "SET_SYSTEM"
    SET_APP = "SET_APP"
    WHITELIST = "WHITELIST"
    ADD_PHOTO = "ADD_PHOTO"
    ACCESS = "ACCESS"
    USER_DECISION = "USER_DECISION"
    EXPECT = "EXPECT"


@dataclass(frozen=True)
class ScenarioEvent:
    kind: EventKind
    line_no: int
    args: tuple[str, ...]


@dataclass
class ScenarioScript:
    events: list[ScenarioEvent]
    source: str = "<memory>"


@dataclass
class TraceEntry:
    step: int  # logical timestamp
    line_no: int
    event: ScenarioEvent
    outcome: str
    ok: bool = True


@dataclass
class SimTrace:
    entries: list[TraceEntry] = field(default_factory=list)
    failed_at: int | None = None  # line number of the first EXPECT mismatch

    @property
    def passed(self) -> bool:
        return self.failed_at is None

    def render(self) -> str:
        lines = []
        for e in self.entries:
            status = "ok" if e.ok else "MISMATCH"
            lines.append(f"{e.step:04d} L{e.line_no:03d} {e.event.kind.value:13s} {status:8s} {e.outcome}")
        lines.append(f"result {'PASS' if self.passed else f'FAIL at line {self.failed_at}'}")
        return "\n".join(lines) + "\n"


def parse_scenario(text: str, source: str = "<memory>") -> ScenarioScript:
    """One directive per line; `#` comments and blank lines are ignored."""
    events = []
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        directive, args = parts[0].upper(), tuple(parts[1:])
        try:
            kind = EventKind(directive)
        except ValueError:
            raise ScenarioError(line_no, f"unknown directive {parts[0]!r}") from None
        _validate_args(kind, args, line_no)
        events.append(ScenarioEvent(kind=kind, line_no=line_no, args=args))
    return ScenarioScript(events=events, source=source)


def _validate_args(kind: EventKind, args: tuple[str, ...], line_no: int) -> None:
    def fail(expect: str):
        raise ScenarioError(line_no, f"{kind.value} expects {expect}, got {' '.join(args) or '(nothing)'}")

    if kind is EventKind.SET_SYSTEM:
        if len(args) != 1 or args[0].lower() not in ("locked", "unlocked"):
            fail("locked|unlocked")
    elif kind is EventKind.SET_APP:
        if len(args) != 2 or args[1].lower() not in ("foreground", "background"):
            fail("<app-id> foreground|background")
    elif kind is EventKind.WHITELIST:
        if len(args) != 1:
            fail("<app-id>")
    elif kind is EventKind.ADD_PHOTO:
        if len(args) not in (1, 2):
            fail("<path> [<category-label>]")
        if len(args) == 2:
            try:
                ContentCategory.from_label(args[1])
            except ValueError:
                fail("<path> [<category-label>] with a known label")
    elif kind is EventKind.ACCESS:
        if len(args) != 2:
            fail("<app-id> <path>")
    elif kind is EventKind.USER_DECISION:
        if len(args) != 1 or args[0].lower() not in ("allow", "deny"):
            fail("allow|deny")
    elif kind is EventKind.EXPECT:
        if len(args) != 2 or args[0].lower() not in ("allow", "deny", "prompt"):
            fail("allow|deny|prompt <reason>")
        try:
            Reason(args[1].lower())
        except ValueError:
            fail("allow|deny|prompt <reason> with a known reason")


def run_scenario(
    script: ScenarioScript,
    store: ContentStore | None = None,
    classifier=None,
) -> SimTrace:
    """Apply events in order; every EXPECT checks the latest access outcome.

    App run states default to background until a SET_APP declares otherwise
    (fail-closed, like every other ambiguity here); the system starts locked.
    """
    store = store if store is not None else ContentStore()
    system = SystemStatus.LOCKED
    app_states: dict[str, AppRunState] = {}
    whitelist = Whitelist()
    trace = SimTrace()
    last_decision: PolicyDecision | None = None
    prompt_open = False

    for step, event in enumerate(script.events):
        outcome = ""
        ok = True
        if event.kind is EventKind.SET_SYSTEM:
            system = SystemStatus.LOCKED if event.args[0].lower() == "locked" else SystemStatus.UNLOCKED
            outcome = system.value
        elif event.kind is EventKind.SET_APP:
            state = AppRunState.FOREGROUND if event.args[1].lower() == "foreground" else AppRunState.BACKGROUND
            app_states[event.args[0]] = state
            outcome = f"{event.args[0]} {state.value}"
        elif event.kind is EventKind.WHITELIST:
            whitelist.add(event.args[0])
            outcome = f"whitelisted {event.args[0]}"
        elif event.kind is EventKind.ADD_PHOTO:
            outcome = _add_photo(store, classifier, event)
        elif event.kind is EventKind.ACCESS:
            app_id, path = event.args
            last_decision = _evaluate_access(
                store, classifier, app_id, path, system,
                app_states.get(app_id, AppRunState.BACKGROUND), whitelist, step,
            )
            prompt_open = last_decision.verdict is Verdict.PROMPT_REQUIRED
            outcome = f"{app_id} {path} -> {last_decision.verdict.value}/{last_decision.reason.value}"
        elif event.kind is EventKind.USER_DECISION:
            if last_decision is None or not prompt_open:
                raise ScenarioError(event.line_no, "USER_DECISION without a pending prompt")
            choice = PromptChoice.ALLOW if event.args[0].lower() == "allow" else PromptChoice.DENY
            last_decision = resolve_prompt(last_decision, choice)
            prompt_open = False
            outcome = f"{last_decision.verdict.value}/{last_decision.reason.value}"
        elif event.kind is EventKind.EXPECT:
            if last_decision is None:
                raise ScenarioError(event.line_no, "EXPECT before any ACCESS")
            want_verdict, want_reason = event.args[0].lower(), Reason(event.args[1].lower())
            got = f"{last_decision.verdict.value}/{last_decision.reason.value}"
            want = f"{want_verdict}/{want_reason.value}"
            ok = got == want
            outcome = f"want {want} got {got}"
            if not ok and trace.failed_at is None:
                trace.failed_at = event.line_no
        trace.entries.append(TraceEntry(step=step, line_no=event.line_no, event=event, outcome=outcome, ok=ok))
    return trace


def _add_photo(store: ContentStore, classifier, event: ScenarioEvent) -> str:
    path = event.args[0]
    if len(event.args) == 2:
        # Declared category: bypass classification, keep the fingerprint real.
        try:
            data = Path(path).read_bytes()
        except OSError as exc:
            raise ScenarioError(event.line_no, f"ADD_PHOTO fixture missing: {exc}") from exc
        category = ContentCategory.from_label(event.args[1])
        store.upsert_record(ContentRecord(canonical_photo_id(path), fingerprint_bytes(data), category, 0))
        return f"{path} = {category.label} (declared)"
    if classifier is None:
        raise ScenarioError(event.line_no, "ADD_PHOTO without category needs a classifier")
    try:
        record = store.on_photo_added(path, classifier)
    except (OSError, ClassifierError) as exc:
        raise ScenarioError(event.line_no, f"ADD_PHOTO failed: {exc}") from exc
    return f"{path} = {record.category.label} (classified)"


def _evaluate_access(
    store: ContentStore,
    classifier,
    app_id: str,
    path: str,
    system: SystemStatus,
    app_state: AppRunState,
    whitelist: Whitelist,
    step: int,
) -> PolicyDecision:
    request = AccessRequest(app_id=app_id, photo_path=path, timestamp=step)
    if not requires_control(path):
        return PolicyDecision(Verdict.ALLOW, Reason.NOT_A_PHOTO)
    record = store.lookup_path(path)
    if record is not None:
        return decide(request, system, app_state, record.category, whitelist)
    if classifier is not None:
        try:
            category = store.category_for(path, classifier)
            return decide(request, system, app_state, category, whitelist)
        except (OSError, ClassifierError):
            pass
    # No cached category and no way to classify: fail closed.
    return decide_unclassified(request, system, app_state, whitelist)


def generate_decision_table_scenario(fixture_dir: str | Path) -> str:
    """Script exercising all 40 policy combinations against stub photo files.

    Writes one tiny fixture file per category under fixture_dir and returns
    the scenario text; running it must produce zero EXPECT mismatches.
    """
    fixture_dir = Path(fixture_dir)
    fixture_dir.mkdir(parents=True, exist_ok=True)
    paths = {}
    for category in ContentCategory:
        p = fixture_dir / f"{category.label}.jpg"
        p.write_bytes(f"fixture:{category.label}".encode())
        paths[category] = p

    lines = ["# all 40 lock x run-state x category x whitelist combinations", "WHITELIST listed.app"]
    for category, p in paths.items():
        lines.append(f"ADD_PHOTO {p} {category.label}")
    for row in decision_table():
        app = "listed.app" if row.whitelisted else "plain.app"
        lines.append(f"SET_SYSTEM {row.system.value}")
        lines.append(f"SET_APP {app} {row.app_state.value}")
        lines.append(f"ACCESS {app} {paths[row.category]}")
        lines.append(f"EXPECT {row.decision.verdict.value} {row.decision.reason.value}")
    return "\n".join(lines) + "\n"
