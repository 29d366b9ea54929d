"""Hermetic HLS-style origin: static files, request log, fault injection.

Serves a prep output directory under ``/video/<id>/...``. Every request is
logged; a fault plan can force status codes per path pattern (consumed in
order), which tests use to exercise client retry behavior.
"""

from __future__ import annotations

import fnmatch
import json
import threading
import time
from dataclasses import dataclass, asdict
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .errors import LtcgifError

__all__ = ["RequestLogEntry", "FaultPlan", "OriginServer", "serve"]

_CONTENT_TYPES = {
    ".m3u8": "application/vnd.apple.mpegurl",
    ".json": "application/json",
    ".jpg": "image/jpeg",
    ".ts": "video/mp2t",
    ".gif": "image/gif",
}


@dataclass(frozen=True)
class RequestLogEntry:
    path: str
    status: int
    bytes_sent: int
    timestamp: float


class FaultPlan:
    """Path pattern -> ordered status codes to force, consumed one per hit."""

    def __init__(self, plan: dict[str, list[int]] | None = None):
        self._plan = {pattern: list(codes) for pattern, codes in (plan or {}).items()}
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path: str | Path) -> "FaultPlan":
        return cls(json.loads(Path(path).read_text()))

    def next_fault(self, path: str) -> int | None:
        with self._lock:
            for pattern, codes in self._plan.items():
                if codes and fnmatch.fnmatch(path, pattern):
                    return codes.pop(0)
        return None


class _Handler(BaseHTTPRequestHandler):
    server: "_Server"
    protocol_version = "HTTP/1.1"

    def log_message(self, *args) -> None:  # quiet; we keep our own log
        pass

    def _respond(self, status: int, body: bytes = b"", content_type: str = "text/plain") -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        if body:
            self.wfile.write(body)
        self.server.record(self.path, status, len(body))

    def do_GET(self) -> None:
        forced = self.server.fault_plan.next_fault(self.path)
        if forced is not None and forced != 200:
            self._respond(forced, b"injected fault")
            return
        # URL scheme: /video/<id>/<resource> maps onto <root>/<id>/<resource>
        if not self.path.startswith("/video/"):
            self._respond(404, b"not found")
            return
        rel = self.path[len("/video/"):].lstrip("/")
        target = (self.server.root / rel).resolve()
        if not str(target).startswith(str(self.server.root.resolve()) + "/") or not target.is_file():
            self._respond(404, b"not found")
            return
        body = target.read_bytes()
        self._respond(200, body, _CONTENT_TYPES.get(target.suffix, "application/octet-stream"))


class _Server(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, addr, root: Path, fault_plan: FaultPlan):
        super().__init__(addr, _Handler)
        self.root = root
        self.fault_plan = fault_plan
        self._log: list[RequestLogEntry] = []
        self._log_lock = threading.Lock()

    def record(self, path: str, status: int, nbytes: int) -> None:
        entry = RequestLogEntry(path, status, nbytes, time.time())
        with self._log_lock:
            self._log.append(entry)

    def snapshot(self) -> list[RequestLogEntry]:
        with self._log_lock:
            return list(self._log)


class OriginServer:
    """Running origin bound to 127.0.0.1; use as a context manager in tests."""

    def __init__(self, root_dir: str | Path, port: int = 0,
                 fault_plan: FaultPlan | None = None):
        root = Path(root_dir)
        if not root.is_dir():
            raise LtcgifError(f"origin root {root} is not a directory")
        try:
            self._server = _Server(("127.0.0.1", port), root, fault_plan or FaultPlan())
        except OSError as exc:
            raise LtcgifError(f"cannot bind origin server: {exc}") from exc
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    @property
    def base_url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    def snapshot_log(self) -> list[RequestLogEntry]:
        return self._server.snapshot()

    def dump_log_jsonl(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            for entry in self.snapshot_log():
                fh.write(json.dumps(asdict(entry)) + "\n")

    def close(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5)

    def __enter__(self) -> "OriginServer":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def serve(root_dir: str | Path, port: int = 0,
          fault_plan: FaultPlan | None = None) -> OriginServer:
    """Start an origin serving ``root_dir``; returns the running handle."""
    return OriginServer(root_dir, port=port, fault_plan=fault_plan)
