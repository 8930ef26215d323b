"""Local HTTP API: the surface the operator UI and the test harness consume.

Bodies are JSON (field-named records) over a loopback socket. `POST /access`
blocks until the decision is final, which is why the server is threading.
"""

from __future__ import annotations

import json
import mimetypes
import threading
from dataclasses import asdict
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from ..policy import AppRunState, PromptChoice, SystemStatus
from .prompts import PromptConflictError
from .service import GuardDaemon


class GuardApiServer(ThreadingHTTPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, guard: GuardDaemon):
        self.guard = guard
        super().__init__((guard.config.listen_host, guard.config.listen_port), _Handler)

    def serve_in_background(self) -> threading.Thread:
        thread = threading.Thread(target=self.serve_forever, daemon=True, name="photoguard-api")
        thread.start()
        return thread


class _Handler(BaseHTTPRequestHandler):
    server: GuardApiServer

    def log_message(self, fmt, *args):  # route through logging, not stderr
        pass

    # -- plumbing -------------------------------------------------------------

    def _send_json(self, payload, status: int = 200) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self._cors()
        self.end_headers()
        self.wfile.write(body)

    def _cors(self) -> None:
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")

    def _read_body(self):
        length = int(self.headers.get("Content-Length", 0))
        if length == 0:
            return {}
        try:
            return json.loads(self.rfile.read(length))
        except json.JSONDecodeError:
            return None

    def do_OPTIONS(self) -> None:
        self.send_response(204)
        self._cors()
        self.end_headers()

    # -- GET ----------------------------------------------------------------

    def do_GET(self) -> None:
        guard = self.server.guard
        url = urlparse(self.path)
        if url.path == "/status":
            self._send_json(
                {
                    "status": "ok",
                    "records": len(guard.store) if guard.store else 0,
                    "pending": len(guard.prompts.pending()),
                    "started_at": guard.started_at,
                    "library_root": str(guard.config.library_root),
                    "prompt_timeout_s": guard.config.prompt_timeout,
                }
            )
        elif url.path == "/pending":
            prompts = [
                {
                    "prompt_id": p.prompt_id,
                    "app_id": p.request.app_id,
                    "photo_path": p.request.photo_path,
                    "category": p.category.label if p.category else None,
                    "alert_text": p.alert_text,
                    "created_at": p.created_at,
                    "timeout_ms": p.timeout_ms,
                }
                for p in guard.prompts.pending()
            ]
            self._send_json({"prompts": prompts})
        elif url.path == "/audit":
            params = parse_qs(url.query)
            since = int(params.get("since", ["0"])[0])
            self._send_json({"entries": [asdict(e) for e in guard.audit.entries(since=since)]})
        elif url.path == "/whitelist":
            self._send_json({"entries": sorted(guard.whitelist.entries)})
        elif url.path == "/thumbnail":
            self._serve_thumbnail(parse_qs(url.query))
        else:
            self._serve_static(url.path)

    def _serve_thumbnail(self, params) -> None:
        # Photo bytes leave the daemon only while their prompt is pending.
        guard = self.server.guard
        prompt_id = params.get("prompt_id", [""])[0]
        prompt = guard.prompts.get(prompt_id)
        if prompt is None:
            self._send_json({"error": "no such pending prompt"}, status=404)
            return
        path = Path(prompt.request.photo_path)
        try:
            data = path.read_bytes()
        except OSError:
            self._send_json({"error": "photo unreadable"}, status=404)
            return
        ctype = mimetypes.guess_type(path.name)[0] or "application/octet-stream"
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Cache-Control", "no-store")
        self._cors()
        self.end_headers()
        self.wfile.write(data)

    def _serve_static(self, path: str) -> None:
        ui_dir = self.server.guard.config.ui_dir
        if ui_dir is None:
            if path == "/":
                self._send_json({"service": "photoguard", "ui": "not configured"})
            else:
                self._send_json({"error": "not found"}, status=404)
            return
        rel = "index.html" if path == "/" else path.lstrip("/")
        target = (Path(ui_dir) / rel).resolve()
        if not str(target).startswith(str(Path(ui_dir).resolve())) or not target.is_file():
            self._send_json({"error": "not found"}, status=404)
            return
        data = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", mimetypes.guess_type(target.name)[0] or "text/plain")
        self.send_header("Content-Length", str(len(data)))
        self._cors()
        self.end_headers()
        self.wfile.write(data)

    # -- POST ---------------------------------------------------------------

    def do_POST(self) -> None:
        guard = self.server.guard
        url = urlparse(self.path)
        body = self._read_body()
        if body is None:
            self._send_json({"error": "request body is not valid JSON"}, status=400)
            return

        if url.path == "/access":
            self._handle_access(guard, body)
        elif url.path == "/decision":
            self._handle_decision(guard, body)
        elif url.path == "/whitelist":
            added = body.get("add", [])
            removed = body.get("remove", [])
            if "entries" in body:
                guard.whitelist.entries = set(body["entries"])
            for app_id in added:
                guard.whitelist.add(app_id)
            for app_id in removed:
                guard.whitelist.remove(app_id)
            self._send_json({"entries": sorted(guard.whitelist.entries)})
        else:
            self._send_json({"error": "not found"}, status=404)

    def _handle_access(self, guard: GuardDaemon, body) -> None:
        try:
            app_id = body["app_id"]
            path = body["path"]
            system = SystemStatus(body.get("system", "unlocked"))
            app_state = AppRunState(body.get("app_state", "foreground"))
        except (KeyError, ValueError) as exc:
            self._send_json({"error": f"bad access request: {exc}"}, status=400)
            return
        try:
            decision, entry = guard.handle_access(app_id, path, system, app_state)
        except (RuntimeError, ValueError) as exc:
            self._send_json({"error": str(exc)}, status=400)
            return
        self._send_json(
            {
                "verdict": decision.verdict.value,
                "reason": decision.reason.value,
                "category": entry.category,
                "prompt_latency_ms": entry.prompt_latency_ms,
                "timestamp": entry.timestamp,
            }
        )

    def _handle_decision(self, guard: GuardDaemon, body) -> None:
        prompt_id = body.get("prompt_id", "")
        choice_text = body.get("choice", "")
        if choice_text not in ("allow", "deny"):
            self._send_json({"error": "choice must be allow or deny"}, status=400)
            return
        try:
            guard.resolve_prompt(prompt_id, PromptChoice(choice_text))
        except PromptConflictError as exc:
            self._send_json(
                {"error": str(exc), "resolution": exc.resolution}, status=409
            )
            return
        self._send_json({"prompt_id": prompt_id, "resolved": choice_text})
