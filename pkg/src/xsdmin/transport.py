"""Loopback sensor-to-collector path: an HTTP ingest service and a burst sender."""

from __future__ import annotations

import hashlib
import http.client
import json
import statistics
import threading
import time
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import urlsplit

from . import codec
from .binding import BindingManifest
from .errors import ConnectionFailure, XsdMinError

CONTENT_TYPES = {"xml": "application/xml", "min_xml": "application/xml",
                 "json": "application/json", "min_json": "application/json"}
MIN_HEADER = "X-Min-Encoding"
DIGEST_HEADER = "X-Content-Digest"


def tree_digest(tree: codec.InstanceTree) -> str:
    """Content digest of a decoded message, independent of wire encoding."""
    return hashlib.sha256(codec.compact_xml(tree).encode("utf-8")).hexdigest()


def wire_headers(message: codec.WireMessage) -> dict[str, str]:
    headers = {"Content-Type": CONTENT_TYPES[message.encoding]}
    if message.encoding.startswith("min_"):
        headers[MIN_HEADER] = message.encoding
    if message.compression == "gzip":
        headers["Content-Encoding"] = "gzip"
    return headers


def encoding_from_headers(content_type: str | None, min_encoding: str | None,
                          content_encoding: str | None) -> tuple[str, str] | None:
    """``(encoding, compression)`` or ``None`` when the headers name nothing we decode."""
    ctype = (content_type or "").split(";")[0].strip().lower()
    base = {"application/xml": "xml", "text/xml": "xml", "application/json": "json"}.get(ctype)
    if base is None:
        return None
    if min_encoding:
        min_encoding = min_encoding.strip().lower()
        if min_encoding not in ("min_xml", "min_json") or not min_encoding.endswith(base):
            return None
        base = min_encoding
    compression = (content_encoding or "identity").strip().lower()
    if compression in ("", "identity"):
        compression = "none"
    if compression not in ("none", "gzip"):
        return None
    return base, compression


@dataclass
class EncodingStats:
    received: int = 0
    failures: int = 0
    payload_bytes: int = 0


class IngestStats:
    """Per-encoding counters, updated under a lock."""

    def __init__(self):
        self._lock = threading.Lock()
        self._by_encoding: dict[str, EncodingStats] = {}
        self.rejected = 0

    def record(self, encoding: str, size: int, ok: bool):
        with self._lock:
            s = self._by_encoding.setdefault(encoding, EncodingStats())
            s.payload_bytes += size
            if ok:
                s.received += 1
            else:
                s.failures += 1

    def reject(self):
        with self._lock:
            self.rejected += 1

    def snapshot(self) -> dict:
        with self._lock:
            return {
                "encodings": {
                    k: {"received": v.received, "failures": v.failures, "payload_bytes": v.payload_bytes}
                    for k, v in sorted(self._by_encoding.items())
                },
                "rejected": self.rejected,
            }


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    # headers and body go out in separate writes; avoid the delayed-ACK stall
    disable_nagle_algorithm = True
    server: _IngestServer

    def log_message(self, format, *args):  # noqa: A002 - signature fixed by base class
        pass

    def _reply(self, status: int, body: bytes, ctype="application/json", extra=None):
        self.send_response(status)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        for k, v in (extra or {}).items():
            self.send_header(k, v)
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        if self.path != "/stats":
            self._reply(404, b'{"error":"not found"}')
            return
        self._reply(200, json.dumps(self.server.stats.snapshot()).encode("utf-8"))

    def do_POST(self):
        length = int(self.headers.get("Content-Length") or 0)
        body = self.rfile.read(length)
        if self.path != "/ingest":
            self._reply(404, b'{"error":"not found"}')
            return
        selected = encoding_from_headers(
            self.headers.get("Content-Type"), self.headers.get(MIN_HEADER), self.headers.get("Content-Encoding")
        )
        if selected is None:
            self.server.stats.reject()
            self._reply(415, b'{"error":"unsupported encoding"}')
            return
        encoding, compression = selected
        try:
            tree = codec.decode(codec.WireMessage(body, encoding, compression), self.server.manifest,
                                self.server.schemas)
        except (XsdMinError, ValueError) as exc:
            self.server.stats.record(encoding, len(body), ok=False)
            self._reply(400, json.dumps({"error": str(exc)}).encode("utf-8"))
            return
        self.server.stats.record(encoding, len(body), ok=True)
        digest = tree_digest(tree)
        self._reply(200, json.dumps({"digest": digest}).encode("utf-8"), extra={DIGEST_HEADER: digest})


class _IngestServer(ThreadingHTTPServer):
    daemon_threads = False
    block_on_close = True

    def __init__(self, address, manifest, schemas):
        super().__init__(address, _Handler)
        self.manifest = manifest
        self.schemas = codec.as_schema_set(schemas)
        self.stats = IngestStats()


class ServiceHandle:
    """A running receiver; ``close()`` stops accepting and joins in-flight requests."""

    def __init__(self, server: _IngestServer):
        self._server = server
        self._thread = threading.Thread(target=server.serve_forever, name="xsdmin-ingest", daemon=True)
        self._thread.start()

    @property
    def address(self) -> tuple[str, int]:
        return self._server.server_address[:2]

    @property
    def url(self) -> str:
        host, port = self.address
        return f"http://{host}:{port}"

    @property
    def stats(self) -> IngestStats:
        return self._server.stats

    def close(self):
        self._server.shutdown()
        self._server.server_close()
        self._thread.join()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def serve(bind_address: tuple[str, int], schemas, manifest: BindingManifest) -> ServiceHandle:
    """Start the ingest service on ``bind_address`` (port 0 picks a free port)."""
    return ServiceHandle(_IngestServer(bind_address, manifest, schemas))


@dataclass
class BurstResult:
    samples_us: list[float] = field(default_factory=list)
    sent: int = 0
    failures: int = 0
    digest_mismatches: int = 0
    partial: bool = False

    @property
    def mean_us(self) -> float:
        return statistics.fmean(self.samples_us) if self.samples_us else 0.0


def send_burst(endpoint: str, corpus, encoding: str, compression: str = "none", n: int = 1,
               manifest: BindingManifest | None = None, timeout: float = 10.0) -> BurstResult:
    """Send ``n`` copies of every message in ``corpus`` sequentially.

    ``corpus`` holds InstanceTrees (or raw XML bytes, parsed here). Each
    round trip covers encoding, the HTTP exchange and digest checking.
    """
    parts = urlsplit(endpoint)
    host, port = parts.hostname or "127.0.0.1", parts.port or 80
    path = (parts.path.rstrip("/") or "") + "/ingest"
    trees = [codec.parse_instance(m) if isinstance(m, (bytes, bytearray)) else m for m in corpus]
    result = BurstResult()
    try:
        conn = http.client.HTTPConnection(host, port, timeout=timeout)
        conn.connect()
    except OSError as exc:
        raise ConnectionFailure(f"cannot reach {endpoint}: {exc}", result) from None
    clock = time.perf_counter_ns
    try:
        for tree in trees:
            expected = tree_digest(tree)
            for _ in range(n):
                t0 = clock()
                msg = codec.encode(tree, encoding, manifest, compression)
                try:
                    conn.request("POST", path, body=msg.payload, headers=wire_headers(msg))
                    resp = conn.getresponse()
                    resp.read()
                except (OSError, http.client.HTTPException) as exc:
                    result.partial = True
                    raise ConnectionFailure(f"burst to {endpoint} aborted: {exc}", result) from None
                dt = clock() - t0
                result.sent += 1
                result.samples_us.append(dt / 1000.0)
                if resp.status != 200:
                    result.failures += 1
                elif resp.getheader(DIGEST_HEADER) != expected:
                    result.digest_mismatches += 1
    finally:
        conn.close()
    return result


def fetch_stats(endpoint: str, timeout: float = 10.0) -> dict:
    parts = urlsplit(endpoint)
    try:
        conn = http.client.HTTPConnection(parts.hostname or "127.0.0.1", parts.port or 80, timeout=timeout)
        conn.request("GET", (parts.path.rstrip("/") or "") + "/stats")
        resp = conn.getresponse()
        data = resp.read()
        conn.close()
    except OSError as exc:
        raise ConnectionFailure(f"cannot reach {endpoint}: {exc}") from None
    return json.loads(data)
