"""Daemon configuration and classifier selection."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..policy import DEFAULT_PHOTO_EXTENSIONS, Whitelist
from ..classifier.handles import ModelClassifier, StubClassifier
from ..classifier.remote import RemoteClassifier

DEFAULT_PROMPT_TIMEOUT = 30.0


@dataclass
class ClassifierSelection:
    """Exactly one of: built-in model file, stub table file, remote endpoint."""

    model_path: str | None = None
    stub_path: str | None = None
    remote_endpoint: str | None = None

    def __post_init__(self) -> None:
        chosen = [x for x in (self.model_path, self.stub_path, self.remote_endpoint) if x]
        if len(chosen) != 1:
            raise ValueError("select exactly one classifier: model, stub, or remote")

    def build(self):
        if self.model_path:
            return ModelClassifier.from_file(self.model_path)
        if self.stub_path:
            return StubClassifier.from_file(self.stub_path)
        return RemoteClassifier.from_endpoint(self.remote_endpoint)


@dataclass
class DaemonConfig:
    library_root: Path
    store_path: Path
    classifier: ClassifierSelection
    extensions: frozenset[str] = DEFAULT_PHOTO_EXTENSIONS
    prompt_timeout: float = DEFAULT_PROMPT_TIMEOUT  # seconds
    whitelist: Whitelist = field(default_factory=Whitelist)
    listen_host: str = "127.0.0.1"
    listen_port: int = 8750
    audit_path: Path | None = None  # default: store_path sibling audit.log
    watch_interval: float = 1.0  # seconds between library polls
    ui_dir: Path | None = None  # static files served at /, if set

    def __post_init__(self) -> None:
        self.library_root = Path(self.library_root)
        self.store_path = Path(self.store_path)
        if self.prompt_timeout <= 0:
            raise ValueError("prompt_timeout must be positive")
        if not self.library_root.is_dir():
            raise FileNotFoundError(f"library root does not exist: {self.library_root}")
        if self.audit_path is None:
            self.audit_path = self.store_path.with_name("audit.log")
        else:
            self.audit_path = Path(self.audit_path)

    @classmethod
    def from_file(cls, path: str | Path) -> "DaemonConfig":
        """Load a JSON config file; see README for the field reference."""
        raw = json.loads(Path(path).read_text())
        classifier = ClassifierSelection(
            model_path=raw.get("model"),
            stub_path=raw.get("stub"),
            remote_endpoint=raw.get("remote"),
        )
        host, port = "127.0.0.1", 8750
        if "listen" in raw:
            host, _, port_text = str(raw["listen"]).rpartition(":")
            port = int(port_text)
        kwargs = dict(
            library_root=raw["library_root"],
            store_path=raw["store_path"],
            classifier=classifier,
            prompt_timeout=raw.get("prompt_timeout", DEFAULT_PROMPT_TIMEOUT),
            whitelist=Whitelist(set(raw.get("whitelist", []))),
            listen_host=host,
            listen_port=port,
            watch_interval=raw.get("watch_interval", 1.0),
        )
        if raw.get("extensions"):
            kwargs["extensions"] = frozenset(e.lower().lstrip(".") for e in raw["extensions"])
        if raw.get("audit_path"):
            kwargs["audit_path"] = Path(raw["audit_path"])
        if raw.get("ui_dir"):
            kwargs["ui_dir"] = Path(raw["ui_dir"])
        return cls(**kwargs)
