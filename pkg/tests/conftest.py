"""Shared test plumbing.

Every test runs with the live HTTP path disabled: the default fetcher is
replaced by a tripwire that fails the test if anything tries to leave the
process. Tests that need a live path either inject a stub fetcher or talk
to a loopback stub server via REAL_HTTPX_FETCH.
"""

from __future__ import annotations

import json
import threading
from contextlib import contextmanager
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

import wikigrid.transport as transport_module
from wikigrid.config import ToolkitConfig, build_toolkit, build_transport
from wikigrid.transport import Fixture, FixtureArchive, HttpRequestSpec, canonical_key

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES_DIR = REPO_ROOT / "fixtures"

REAL_HTTPX_FETCH = transport_module._httpx_fetch


def forbid_live_fetch(spec, headers, timeout):
    raise AssertionError(f"live fetch attempted in a hermetic test: {spec.url}")


@pytest.fixture(autouse=True)
def no_network(monkeypatch):
    """Disable networking at the transport layer for the whole suite."""
    monkeypatch.setattr(transport_module, "_httpx_fetch", forbid_live_fetch)


@pytest.fixture(autouse=True)
def no_wikigrid_env(monkeypatch):
    import os

    for key in list(os.environ):
        if key.startswith("WIKIGRID_"):
            monkeypatch.delenv(key)


def write_fixture(root: Path, url: str, payload, status: int = 200) -> str:
    """Record one synthetic request/response pair; returns the fixture key."""
    body = payload if isinstance(payload, str) else json.dumps(payload, ensure_ascii=False)
    spec = HttpRequestSpec(url)
    key = canonical_key(spec)
    FixtureArchive(root).store(Fixture(key, "GET", url, status, "application/json", body))
    return key


def replay_config(archive_dir: Path) -> ToolkitConfig:
    return ToolkitConfig(fixtures=str(archive_dir), mode="replay")


def replay_toolkit(archive_dir: Path, **transport_overrides):
    config = replay_config(archive_dir)
    overrides = {"live_fetch": forbid_live_fetch, **transport_overrides}
    transport = build_transport(config, **overrides)
    return build_toolkit(config, transport), transport


@pytest.fixture
def corpus_toolkit():
    toolkit, _transport = replay_toolkit(FIXTURES_DIR)
    return toolkit


@pytest.fixture
def corpus_config():
    return replay_config(FIXTURES_DIR)


class _StubHandler(BaseHTTPRequestHandler):
    def do_GET(self):
        status, body = self.server.respond(self)  # type: ignore[attr-defined]
        payload = body.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *_args):
        pass


@contextmanager
def stub_server(respond):
    """Loopback HTTP server; respond(handler) -> (status, body_text)."""
    server = ThreadingHTTPServer(("127.0.0.1", 0), _StubHandler)
    server.respond = respond  # type: ignore[attr-defined]
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield f"http://127.0.0.1:{server.server_port}"
    finally:
        server.shutdown()
        thread.join()
