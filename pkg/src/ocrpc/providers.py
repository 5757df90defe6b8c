"""Suggestion providers: local engine, remote HTTP client, scripted fixture.

Every provider answers ``suggest(block_text)`` with a
:class:`ProviderResponse`.  The wire protocol (version 1) is JSON over
HTTP: ``POST /v1/suggest`` with body ``{"q": "<block text>"}`` answers
``{"suggestion": "<text>"}`` or ``{"suggestion": null}``; malformed
requests get status 400 with ``{"error": "<message>"}``; ``GET
/v1/health`` answers ``{"status": "ok", "model_order": N}``.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from collections import OrderedDict
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Literal, Mapping, Protocol
from urllib.parse import urlparse

import requests

from .ngram import NGramModel
from .suggest import Suggester, SuggestionConfig

logger = logging.getLogger(__name__)

Provenance = Literal["local", "remote", "fixture", "cache"]

DEFAULT_TIMEOUT = 5.0
DEFAULT_CACHE_CAPACITY = 10_000
DEFAULT_RATE_LIMIT = 10.0


@dataclass(frozen=True, slots=True)
class ProviderResponse:
    """One provider answer: a replacement block text, or None to keep it."""

    suggestion: str | None
    provenance: Provenance
    latency_seconds: float = 0.0

    def __post_init__(self) -> None:
        if self.suggestion is not None:
            if not self.suggestion or self.suggestion != self.suggestion.strip():
                raise ValueError(
                    f"suggestion must be non-empty with no surrounding whitespace: {self.suggestion!r}"
                )
        if self.provenance not in ("local", "remote", "fixture", "cache"):
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if self.latency_seconds < 0:
            raise ValueError("latency cannot be negative")


class Provider(Protocol):
    def suggest(self, block_text: str) -> ProviderResponse: ...


class ProviderError(Exception):
    """Base class for suggestion transport failures."""

    transient = False


class ProviderTimeout(ProviderError):
    transient = True


class ProviderConnectionError(ProviderError):
    transient = True


class ProviderStatusError(ProviderError):
    def __init__(self, status: int, detail: str = "") -> None:
        super().__init__(f"suggestion endpoint answered status {status}" + (f": {detail}" if detail else ""))
        self.status = status
        self.transient = status >= 500


class ProviderProtocolError(ProviderError):
    """The endpoint answered, but not with a valid protocol body."""


class LocalProvider:
    """In-process provider backed by the n-gram suggestion engine."""

    def __init__(self, model: NGramModel, config: SuggestionConfig | None = None) -> None:
        self._suggester = Suggester(model, config)

    def suggest(self, block_text: str) -> ProviderResponse:
        start = time.perf_counter()
        if not block_text.strip():
            # a block with no queryable words has nothing to correct
            return ProviderResponse(None, "local", time.perf_counter() - start)
        words = self._suggester.did_you_mean(block_text.split(" "))
        suggestion = " ".join(words) if words is not None else None
        return ProviderResponse(suggestion, "local", time.perf_counter() - start)


class FixtureProvider:
    """Scripted provider for tests: answers from a block-text mapping."""

    def __init__(self, mapping: Mapping[str, str | None]) -> None:
        for key, value in mapping.items():
            if value is not None and (not value or value != value.strip()):
                raise ValueError(f"fixture suggestion for {key!r} must be non-empty and stripped")
        self._mapping = dict(mapping)

    def suggest(self, block_text: str) -> ProviderResponse:
        return ProviderResponse(self._mapping.get(block_text), "fixture", 0.0)


class _RatePacer:
    """Spaces acquisitions at least 1/rate seconds apart, across threads."""

    def __init__(self, rate: float) -> None:
        if rate <= 0:
            raise ValueError(f"rate limit must be > 0 requests/second, got {rate}")
        self._interval = 1.0 / rate
        self._lock = threading.Lock()
        self._next = 0.0

    def acquire(self) -> None:
        with self._lock:
            now = time.monotonic()
            wait = self._next - now
            self._next = max(now, self._next) + self._interval
        if wait > 0:
            time.sleep(wait)


class _LRUCache:
    def __init__(self, capacity: int) -> None:
        if capacity < 0:
            raise ValueError(f"cache capacity must be >= 0, got {capacity}")
        self.capacity = capacity
        self._data: OrderedDict[str, str | None] = OrderedDict()
        self._lock = threading.Lock()

    def get(self, key: str) -> tuple[bool, str | None]:
        with self._lock:
            if key not in self._data:
                return False, None
            self._data.move_to_end(key)
            return True, self._data[key]

    def put(self, key: str, value: str | None) -> None:
        if self.capacity == 0:
            return
        with self._lock:
            self._data[key] = value
            self._data.move_to_end(key)
            while len(self._data) > self.capacity:
                self._data.popitem(last=False)


class RemoteProvider:
    """HTTP client for a version-1 suggestion endpoint.

    Responses are cached by exact block text (LRU, bounded), cache hits are
    answered without any network traffic, and outbound requests are paced
    to the configured rate limit.  Transport failures surface as distinct
    :class:`ProviderError` subclasses.
    """

    def __init__(
        self,
        endpoint: str,
        *,
        timeout: float = DEFAULT_TIMEOUT,
        cache_capacity: int = DEFAULT_CACHE_CAPACITY,
        rate_limit: float = DEFAULT_RATE_LIMIT,
        session: requests.Session | None = None,
    ) -> None:
        parsed = urlparse(endpoint)
        if parsed.scheme not in ("http", "https") or not parsed.netloc:
            raise ValueError(f"endpoint must be an http(s) URL, got {endpoint!r}")
        if timeout <= 0:
            raise ValueError(f"timeout must be > 0 seconds, got {timeout}")
        self._url = endpoint.rstrip("/") + "/v1/suggest"
        self._timeout = timeout
        self._cache = _LRUCache(cache_capacity)
        self._pacer = _RatePacer(rate_limit)
        self._session = session or requests.Session()

    def suggest(self, block_text: str) -> ProviderResponse:
        start = time.perf_counter()
        if not block_text.strip():
            return ProviderResponse(None, "remote", time.perf_counter() - start)
        hit, cached = self._cache.get(block_text)
        if hit:
            return ProviderResponse(cached, "cache", time.perf_counter() - start)
        self._pacer.acquire()
        try:
            response = self._session.post(self._url, json={"q": block_text}, timeout=self._timeout)
        except requests.exceptions.Timeout as exc:
            raise ProviderTimeout(f"suggestion request timed out after {self._timeout}s") from exc
        except requests.exceptions.RequestException as exc:
            raise ProviderConnectionError(f"cannot reach suggestion endpoint: {exc}") from exc
        if response.status_code != 200:
            detail = ""
            try:
                detail = response.json().get("error", "")
            except ValueError:
                pass
            raise ProviderStatusError(response.status_code, detail)
        try:
            body = response.json()
        except ValueError as exc:
            raise ProviderProtocolError(f"endpoint answered non-JSON body: {response.text[:200]!r}") from exc
        if not isinstance(body, dict) or "suggestion" not in body:
            raise ProviderProtocolError(f"endpoint answer missing 'suggestion' field: {body!r}")
        suggestion = body["suggestion"]
        if suggestion is not None:
            if not isinstance(suggestion, str) or not suggestion or suggestion != suggestion.strip():
                raise ProviderProtocolError(f"endpoint answered invalid suggestion {suggestion!r}")
        self._cache.put(block_text, suggestion)
        return ProviderResponse(suggestion, "remote", time.perf_counter() - start)


def _make_handler(provider: LocalProvider, model_order: int) -> type[BaseHTTPRequestHandler]:
    class SuggestHandler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def _send_json(self, status: int, payload: dict) -> None:
            body = json.dumps(payload).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def do_GET(self) -> None:  # noqa: N802 (http.server API)
            if self.path == "/v1/health":
                self._send_json(200, {"status": "ok", "model_order": model_order})
            else:
                self._send_json(404, {"error": f"unknown path {self.path}"})

        def do_POST(self) -> None:  # noqa: N802
            if self.path != "/v1/suggest":
                self._send_json(404, {"error": f"unknown path {self.path}"})
                return
            try:
                length = int(self.headers.get("Content-Length", "0"))
                raw = self.rfile.read(length)
                payload = json.loads(raw.decode("utf-8"))
            except (ValueError, UnicodeDecodeError):
                self._send_json(400, {"error": "request body is not valid JSON"})
                return
            if not isinstance(payload, dict) or "q" not in payload:
                self._send_json(400, {"error": "request must carry a 'q' field"})
                return
            query = payload["q"]
            if not isinstance(query, str) or not query.strip():
                self._send_json(400, {"error": "'q' must be a non-empty string"})
                return
            try:
                answer = provider.suggest(query)
            except ValueError as exc:
                self._send_json(400, {"error": str(exc)})
                return
            self._send_json(200, {"suggestion": answer.suggestion})

        def log_message(self, format: str, *args) -> None:  # noqa: A002
            logger.debug("serve: " + format, *args)

    return SuggestHandler


class SuggestService:
    """A running suggestion endpoint bound to a local address."""

    def __init__(self, model: NGramModel, config: SuggestionConfig | None, bind_address: tuple[str, int]) -> None:
        provider = LocalProvider(model, config)
        handler = _make_handler(provider, model.order)
        self._server = ThreadingHTTPServer(bind_address, handler)
        self._server.daemon_threads = True
        self._thread = threading.Thread(target=self._server.serve_forever, name="ocrpc-serve", daemon=True)
        self._thread.start()

    @property
    def address(self) -> tuple[str, int]:
        host, port = self._server.server_address[:2]
        return str(host), int(port)

    @property
    def url(self) -> str:
        host, port = self.address
        return f"http://{host}:{port}"

    def close(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5.0)

    def __enter__(self) -> SuggestService:
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def serve(
    model: NGramModel,
    config: SuggestionConfig | None = None,
    bind_address: tuple[str, int] = ("127.0.0.1", 0),
) -> SuggestService:
    """Start serving the model over HTTP; returns a closable handle.

    Binding failures (occupied port, bad host) raise ``OSError``.
    """
    return SuggestService(model, config, bind_address)
