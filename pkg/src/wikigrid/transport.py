"""HTTP fetch layer: canonical GET requests with record/replay fixtures.

This is the only module that touches the network. Every request is a
canonicalized GET (query keys sorted, values percent-encoded), which makes
the request string itself the identity of an on-disk fixture:

    key  = sha256("GET <canonical url>")
    file = <archive root>/<key>.json
    body = {"key", "method", "url", "status", "content_type", "body"}

The body is stored verbatim, never re-serialized, so replays are
byte-identical. Three modes:

- ``replay``: archive only; a missing fixture is an error, never a live call.
- ``record``: live fetch, persist the fixture, return it.
- ``passthrough``: live fetch only.

Live fetches go through a token-bucket rate limiter and a per-host
concurrency cap, with a single retry (exponential backoff) on 429/503.
An in-memory per-run cache sits above the archive so repeated identical
requests (common during grid fill-down) resolve at most once.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, NamedTuple
from urllib.parse import parse_qsl, quote, urlencode, urlsplit

import httpx

from wikigrid.core import ErrorKind, ToolkitError, not_found

DEFAULT_USER_AGENT = "wikigrid/0.1 (replayable Wikipedia toolkit)"
DEFAULT_TIMEOUT = 30.0
RETRY_BASE_SECONDS = 0.5


class LiveResponse(NamedTuple):
    status: int
    body: str
    content_type: str


class FetchResult(NamedTuple):
    status: int
    body: str


LiveFetch = Callable[["HttpRequestSpec", Mapping[str, str], float], LiveResponse]


def _httpx_fetch(spec: HttpRequestSpec, headers: Mapping[str, str], timeout: float) -> LiveResponse:
    response = httpx.get(spec.url, headers=dict(headers), timeout=timeout, follow_redirects=True)
    return LiveResponse(response.status_code, response.text, response.headers.get("content-type", ""))


def canonical_url(base: str, params: Mapping[str, str] | None = None) -> str:
    """Append query parameters in sorted key order, strictly percent-encoded."""
    if not params:
        return base
    query = urlencode(sorted(params.items()), quote_via=quote, safe="")
    return f"{base}?{query}"


def _is_loopback(host: str | None) -> bool:
    return host in ("localhost", "127.0.0.1", "::1")


@dataclass(frozen=True)
class HttpRequestSpec:
    """A canonicalized GET request. Build the url via canonical_url()."""

    url: str
    method: str = "GET"
    accept: str = "json"

    def __post_init__(self):
        parts = urlsplit(self.url)
        # https only; plain http is tolerated for loopback stub servers.
        if parts.scheme != "https" and not (parts.scheme == "http" and _is_loopback(parts.hostname)):
            raise ToolkitError(ErrorKind.BAD_INPUT, f"non-https url: {self.url}")
        keys = [k for k, _ in parse_qsl(parts.query, keep_blank_values=True)]
        if keys != sorted(keys):
            raise ToolkitError(ErrorKind.BAD_INPUT, f"query keys not canonically sorted: {self.url}")

    @property
    def host(self) -> str:
        return urlsplit(self.url).hostname or ""


def canonical_key(spec: HttpRequestSpec) -> str:
    """Stable fixture key: hex digest of the canonical request line."""
    return hashlib.sha256(f"{spec.method} {spec.url}".encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class Fixture:
    key: str
    method: str
    url: str
    status: int
    content_type: str
    body: str


class FixtureArchive:
    """Directory of one-JSON-file-per-request recordings."""

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def path_for(self, key: str) -> Path:
        return self.root / f"{key}.json"

    def load(self, key: str) -> Fixture | None:
        path = self.path_for(key)
        if not path.exists():
            return None
        data = json.loads(path.read_text(encoding="utf-8"))
        return Fixture(
            key=data["key"],
            method=data["method"],
            url=data["url"],
            status=data["status"],
            content_type=data.get("content_type", ""),
            body=data["body"],
        )

    def store(self, fixture: Fixture) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        envelope = {
            "key": fixture.key,
            "method": fixture.method,
            "url": fixture.url,
            "status": fixture.status,
            "content_type": fixture.content_type,
            "body": fixture.body,
        }
        path = self.path_for(fixture.key)
        path.write_text(json.dumps(envelope, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class RateLimitPolicy:
    max_requests_per_second: float = 5.0
    max_concurrent_per_host: int = 2

    def __post_init__(self):
        if self.max_requests_per_second <= 0:
            raise ToolkitError(ErrorKind.BAD_INPUT, "max_requests_per_second must be positive")
        if self.max_concurrent_per_host < 1:
            raise ToolkitError(ErrorKind.BAD_INPUT, "max_concurrent_per_host must be >= 1")


class TokenBucket:
    """Classic token bucket; acquire() blocks until a token is available."""

    def __init__(
        self,
        rate: float,
        capacity: float | None = None,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.rate = rate
        self.capacity = capacity if capacity is not None else max(1.0, rate)
        self._clock = clock
        self._sleep = sleep
        self._tokens = self.capacity
        self._last = clock()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        # Sleeping under the lock is intentional: the bucket is global, so
        # waiting callers must queue behind it.
        with self._lock:
            now = self._clock()
            self._tokens = min(self.capacity, self._tokens + (now - self._last) * self.rate)
            self._last = now
            if self._tokens < 1.0:
                wait = (1.0 - self._tokens) / self.rate
                self._sleep(wait)
                self._last = self._clock()
                self._tokens = min(self.capacity, 1.0)
            self._tokens -= 1.0


class Transport:
    """Mode-aware fetcher shared by every client; safe for concurrent use.

    Counters (``calls``, ``cache_hits``, ``archive_hits``, ``live_calls``)
    exist so tests can assert how a request was satisfied.
    """

    def __init__(
        self,
        mode: str = "replay",
        archive: FixtureArchive | None = None,
        user_agent: str = DEFAULT_USER_AGENT,
        policy: RateLimitPolicy = RateLimitPolicy(),
        live_fetch: LiveFetch | None = None,
        timeout: float = DEFAULT_TIMEOUT,
        sleep: Callable[[float], None] = time.sleep,
        clock: Callable[[], float] = time.monotonic,
    ):
        if mode not in ("replay", "record", "passthrough"):
            raise ToolkitError(ErrorKind.BAD_INPUT, f"unknown transport mode {mode!r}")
        if mode in ("replay", "record") and archive is None:
            raise ToolkitError(ErrorKind.BAD_INPUT, f"mode {mode!r} requires a fixture archive")
        self.mode = mode
        self.archive = archive
        self.user_agent = user_agent
        self.policy = policy
        self.timeout = timeout
        self._live = live_fetch
        self._sleep = sleep
        self._bucket = TokenBucket(policy.max_requests_per_second, clock=clock, sleep=sleep)
        self._host_slots: dict[str, threading.BoundedSemaphore] = {}
        self._cache: dict[str, FetchResult] = {}
        self._lock = threading.Lock()
        self.calls = 0
        self.cache_hits = 0
        self.archive_hits = 0
        self.live_calls = 0

    def fetch(self, spec: HttpRequestSpec) -> FetchResult:
        key = canonical_key(spec)
        with self._lock:
            self.calls += 1
            cached = self._cache.get(key)
        if cached is not None:
            with self._lock:
                self.cache_hits += 1
            return cached
        if self.mode == "replay":
            result = self._from_archive(spec, key)
        else:
            result = self._from_live(spec, key)
        with self._lock:
            self._cache[key] = result
        return result

    def _from_archive(self, spec: HttpRequestSpec, key: str) -> FetchResult:
        fixture = self.archive.load(key) if self.archive else None
        if fixture is None:
            raise not_found(f"no fixture recorded for key {key}", url=spec.url)
        with self._lock:
            self.archive_hits += 1
        self._raise_for_status(fixture.status, spec.url)
        return FetchResult(fixture.status, fixture.body)

    def _from_live(self, spec: HttpRequestSpec, key: str) -> FetchResult:
        response = self._live_once(spec)
        if response.status in (429, 503):
            self._sleep(RETRY_BASE_SECONDS)
            response = self._live_once(spec)
        if response.status == 429:
            raise ToolkitError(
                ErrorKind.RATE_LIMITED, "upstream returned 429 twice", url=spec.url, status=429
            )
        # Persist replayable outcomes only: 2xx plus client-side statuses
        # like 404 (a page with no data is a real, stable answer). Server
        # errors and 429 are transient and must not poison the archive.
        if self.mode == "record" and self.archive is not None and response.status < 500 and response.status != 429:
            self.archive.store(
                Fixture(key, spec.method, spec.url, response.status, response.content_type, response.body)
            )
        self._raise_for_status(response.status, spec.url)
        return FetchResult(response.status, response.body)

    def _live_once(self, spec: HttpRequestSpec) -> LiveResponse:
        headers = {
            "User-Agent": self.user_agent,
            "Accept": "application/json" if spec.accept == "json" else "application/xml",
        }
        self._bucket.acquire()
        slot = self._host_slot(spec.host)
        with slot:
            with self._lock:
                self.live_calls += 1
            fetch = self._live or _httpx_fetch
            try:
                return fetch(spec, headers, self.timeout)
            except httpx.HTTPError as exc:
                raise ToolkitError(ErrorKind.NETWORK, str(exc), url=spec.url) from exc
            except OSError as exc:
                raise ToolkitError(ErrorKind.NETWORK, str(exc), url=spec.url) from exc

    def _host_slot(self, host: str) -> threading.BoundedSemaphore:
        with self._lock:
            slot = self._host_slots.get(host)
            if slot is None:
                slot = threading.BoundedSemaphore(self.policy.max_concurrent_per_host)
                self._host_slots[host] = slot
            return slot

    @staticmethod
    def _raise_for_status(status: int, url: str) -> None:
        if 200 <= status < 300:
            return
        kind = ErrorKind.RATE_LIMITED if status == 429 else ErrorKind.UPSTREAM_STATUS
        raise ToolkitError(kind, f"HTTP {status} from {url}", url=url, status=status)
