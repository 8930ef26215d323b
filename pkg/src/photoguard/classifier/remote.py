"""Remote classifier wire protocol over a local TCP socket.

One request per classification:

    client -> `CLASSIFY <byte-count>\\n` followed by the raw image bytes
    server -> `CATEGORY <code> <p1> <p2> <p3> <p4> <p5>\\n`

Probabilities are in category-code order. Either side closing early, a
malformed line, or the 5-second timeout raises ClassifierError on the
client; the caller decides the fallback (the daemon fails closed).
"""

from __future__ import annotations

import socket
import socketserver
import threading
from pathlib import Path

from ..policy import ContentCategory
from .handles import ClassifierError, _read_bytes

DEFAULT_TIMEOUT = 5.0
_MAX_LINE = 256


class RemoteClassifier:
    """Client adapter; a drop-in classifier handle backed by a remote model."""

    def __init__(self, host: str, port: int, timeout: float = DEFAULT_TIMEOUT):
        self.host = host
        self.port = port
        self.timeout = timeout

    def classify_file(self, path: str | Path) -> ContentCategory:
        return self.classify_bytes(_read_bytes(path))

    def classify_bytes(self, data: bytes) -> ContentCategory:
        try:
            with socket.create_connection((self.host, self.port), timeout=self.timeout) as conn:
                conn.settimeout(self.timeout)
                conn.sendall(f"CLASSIFY {len(data)}\n".encode("ascii"))
                conn.sendall(data)
                line = _read_line(conn)
        except OSError as exc:
            raise ClassifierError(f"remote classifier unreachable: {exc}") from exc
        return _parse_response(line)

    @classmethod
    def from_endpoint(cls, endpoint: str, timeout: float = DEFAULT_TIMEOUT) -> "RemoteClassifier":
        host, _, port = endpoint.rpartition(":")
        if not host or not port.isdigit():
            raise ValueError(f"remote endpoint must be host:port, got {endpoint!r}")
        return cls(host, int(port), timeout)


def _read_line(conn: socket.socket) -> str:
    buf = bytearray()
    while len(buf) < _MAX_LINE:
        chunk = conn.recv(1)
        if not chunk:
            raise ClassifierError("remote classifier closed the connection mid-response")
        if chunk == b"\n":
            return buf.decode("ascii", errors="replace")
        buf += chunk
    raise ClassifierError("remote classifier response line too long")


def _parse_response(line: str) -> ContentCategory:
    parts = line.split()
    if len(parts) != 7 or parts[0] != "CATEGORY":
        raise ClassifierError(f"malformed remote response: {line!r}")
    try:
        code = int(parts[1])
        probs = [float(p) for p in parts[2:]]
    except ValueError as exc:
        raise ClassifierError(f"malformed remote response: {line!r}") from exc
    if any(p < 0 for p in probs):
        raise ClassifierError(f"remote response carries negative probability: {line!r}")
    return ContentCategory.from_code(code)


class _ClassifyHandler(socketserver.StreamRequestHandler):
    timeout = DEFAULT_TIMEOUT

    def handle(self) -> None:
        try:
            header = self.rfile.readline(_MAX_LINE).decode("ascii", errors="replace").strip()
            parts = header.split()
            if len(parts) != 2 or parts[0] != "CLASSIFY" or not parts[1].isdigit():
                self.wfile.write(b"ERROR malformed request\n")
                return
            size = int(parts[1])
            data = self.rfile.read(size)
            if len(data) != size:
                self.wfile.write(b"ERROR short payload\n")
                return
            category, probs = self.server.classify(data)  # type: ignore[attr-defined]
            probs_text = " ".join(f"{p:.6f}" for p in probs)
            self.wfile.write(f"CATEGORY {category.value} {probs_text}\n".encode("ascii"))
        except Exception as exc:  # the protocol has no richer error channel
            try:
                self.wfile.write(f"ERROR {exc}\n".encode("ascii", errors="replace"))
            except OSError:
                pass


class ClassifierServer(socketserver.ThreadingTCPServer):
    """Serve any byte-level classifier over the wire protocol.

    `classify_fn(data) -> (ContentCategory, probabilities)` is typically the
    built-in model, but this is the hook where an external heavyweight model
    plugs in without touching the rest of the system.
    """

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address: tuple[str, int], classify_fn):
        super().__init__(address, _ClassifyHandler)
        self._classify_fn = classify_fn

    def classify(self, data: bytes):
        return self._classify_fn(data)

    def serve_in_background(self) -> threading.Thread:
        thread = threading.Thread(target=self.serve_forever, daemon=True)
        thread.start()
        return thread
