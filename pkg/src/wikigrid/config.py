"""Runtime configuration and the factory wiring transport and clients.

Sources, weakest to strongest: built-in defaults, an optional key=value
config file, WIKIGRID_* environment variables, command-line flags.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

from wikigrid.core import bad_input
from wikigrid.functions import Toolkit
from wikigrid.mediawiki import DEFAULT_ENDPOINT_TEMPLATE, MediaWikiClient
from wikigrid.pageviews import DEFAULT_ENDPOINT as PAGEVIEWS_ENDPOINT, PageviewsClient
from wikigrid.transport import DEFAULT_USER_AGENT, FixtureArchive, RateLimitPolicy, Transport
from wikigrid.wikidata import DEFAULT_ENDPOINT as WIKIDATA_ENDPOINT, WikidataClient

ENV_PREFIX = "WIKIGRID_"


@dataclass(frozen=True)
class ToolkitConfig:
    fixtures: str | None = None
    mode: str = "replay"
    user_agent: str = DEFAULT_USER_AGENT
    rate_limit: float = 5.0
    max_concurrent: int = 2
    wikipedia_endpoint: str = DEFAULT_ENDPOINT_TEMPLATE
    wikidata_endpoint: str = WIKIDATA_ENDPOINT
    pageviews_endpoint: str = PAGEVIEWS_ENDPOINT
    pageviews_access: str = "all-access"
    pageviews_agent: str = "user"
    max_continuation_pages: int = 50
    category_prefixes: str = ""


_FIELD_TYPES = {f.name: f.type for f in fields(ToolkitConfig)}


def _coerce(name: str, raw: str):
    if name == "rate_limit":
        return float(raw)
    if name in ("max_concurrent", "max_continuation_pages"):
        return int(raw)
    return raw


def apply_settings(config: ToolkitConfig, settings: dict[str, str], source: str) -> ToolkitConfig:
    updates = {}
    for name, raw in settings.items():
        if name not in _FIELD_TYPES:
            raise bad_input(f"unknown setting {name!r} in {source}")
        try:
            updates[name] = _coerce(name, raw)
        except ValueError as exc:
            raise bad_input(f"bad value for {name!r} in {source}: {raw!r}") from exc
    return replace(config, **updates)


def load_config_file(config: ToolkitConfig, path: str | Path) -> ToolkitConfig:
    """Apply a simple key=value file ('#' starts a comment)."""
    settings: dict[str, str] = {}
    for line_number, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        if not sep:
            raise bad_input(f"{path}:{line_number}: expected key=value, got {stripped!r}")
        settings[key.strip()] = value.strip()
    return apply_settings(config, settings, str(path))


def load_env(config: ToolkitConfig, environ=os.environ) -> ToolkitConfig:
    settings = {
        name: environ[ENV_PREFIX + name.upper()]
        for name in _FIELD_TYPES
        if ENV_PREFIX + name.upper() in environ
    }
    return apply_settings(config, settings, "environment")


def build_transport(config: ToolkitConfig, **overrides) -> Transport:
    archive = FixtureArchive(config.fixtures) if config.fixtures else None
    policy = RateLimitPolicy(config.rate_limit, config.max_concurrent)
    return Transport(
        mode=config.mode,
        archive=archive,
        user_agent=config.user_agent,
        policy=policy,
        **overrides,
    )


def build_toolkit(config: ToolkitConfig, transport: Transport | None = None) -> Toolkit:
    if transport is None:
        transport = build_transport(config)
    prefixes = tuple(p.strip() for p in config.category_prefixes.split(",") if p.strip())
    return Toolkit(
        mediawiki=MediaWikiClient(
            transport, config.wikipedia_endpoint, config.max_continuation_pages
        ),
        wikidata=WikidataClient(transport, config.wikidata_endpoint),
        pageviews=PageviewsClient(
            transport,
            config.pageviews_endpoint,
            access=config.pageviews_access,
            agent=config.pageviews_agent,
        ),
        category_prefixes=prefixes,
    )
