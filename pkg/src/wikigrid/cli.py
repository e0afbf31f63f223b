"""Command line client: one subcommand per function, grid eval, scenarios.

The CLI never runs toolkit code directly; it builds the HTTP service
in-process (or targets a remote one via --server) and renders the returned
rows. Exit codes: 0 success, 1 toolkit failure (message on stderr), 2 usage
error.
"""

from __future__ import annotations

import argparse
import sys
from datetime import date
from pathlib import Path

import httpx

from wikigrid import __version__
from wikigrid.config import ToolkitConfig, apply_settings, load_config_file, load_env
from wikigrid.core import ToolkitError, parse_qualified
from wikigrid.grid import render_rows
from wikigrid.service import create_app

USAGE_EXIT = 2
FAILURE_EXIT = 1

FUNCTION_COMMANDS = {
    # subcommand -> (service name, takes --langs, takes --start/--end)
    "translate": ("translate", True, False),
    "synonyms": ("synonyms", False, False),
    "expand": ("expand", True, False),
    "category-members": ("category-members", False, False),
    "subcategories": ("subcategories", False, False),
    "inbound": ("inbound", False, False),
    "outbound": ("outbound", False, False),
    "mutual": ("mutual", False, False),
    "geo": ("geo", False, False),
    "facts": ("facts", False, False),
    "pageviews": ("pageviews", False, True),
    "pageedits": ("pageedits", False, True),
}


def qualified_title(value: str) -> str:
    try:
        parse_qualified(value)
    except ToolkitError as exc:
        raise argparse.ArgumentTypeError(exc.detail)
    return value


def iso_date(value: str) -> date:
    try:
        return date.fromisoformat(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected YYYY-MM-DD, got {value!r}")


def language_list(value: str) -> list[str]:
    from wikigrid.functions import parse_language_list

    try:
        return parse_language_list(value)
    except ToolkitError as exc:
        raise argparse.ArgumentTypeError(exc.detail)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    output = common.add_argument_group("output and transport")
    output.add_argument("--format", choices=("tsv", "csv", "json"), default="tsv")
    output.add_argument("--fixtures", help="fixture archive directory")
    output.add_argument("--mode", choices=("replay", "record", "passthrough"))
    output.add_argument("--config", help="key=value config file")
    output.add_argument("--server", help="base URL of a running wikigrid service")
    output.add_argument("--user-agent", dest="user_agent")
    output.add_argument("--rate-limit", dest="rate_limit", type=float)
    output.add_argument("--max-concurrent", dest="max_concurrent", type=int)
    output.add_argument("--endpoint-wikipedia", dest="wikipedia_endpoint")
    output.add_argument("--endpoint-wikidata", dest="wikidata_endpoint")
    output.add_argument("--endpoint-pageviews", dest="pageviews_endpoint")
    output.add_argument("--pageviews-access", dest="pageviews_access")
    output.add_argument("--pageviews-agent", dest="pageviews_agent")

    parser = argparse.ArgumentParser(
        prog="wikigrid",
        description="Wikipedia, Wikidata and pageviews lookups as tables.",
    )
    parser.add_argument("--version", action="version", version=f"wikigrid {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    for name, (_service, takes_langs, takes_dates) in FUNCTION_COMMANDS.items():
        sub = commands.add_parser(name, parents=[common])
        sub.add_argument("title", type=qualified_title, help="qualified title, e.g. en:Berlin")
        if takes_langs:
            sub.add_argument("--langs", type=language_list, help="comma-separated language codes")
        if takes_dates:
            sub.add_argument("--start", type=iso_date)
            sub.add_argument("--end", type=iso_date)

    grid = commands.add_parser("grid", help="evaluate a TSV grid of formulas")
    grid_commands = grid.add_subparsers(dest="grid_command", required=True)
    grid_eval = grid_commands.add_parser("eval", parents=[common])
    grid_eval.add_argument("file", help="TSV grid; fields starting with '=' are formulas")
    grid_eval.add_argument("--max-cells", dest="max_cells", type=int, default=100_000)
    grid_eval.add_argument("--workers", type=int, default=1)

    scenario = commands.add_parser("scenario", help="multi-step recipes")
    scenario_commands = scenario.add_subparsers(dest="scenario_command", required=True)

    panel = scenario_commands.add_parser("category-panel", parents=[common])
    panel.add_argument("category", type=qualified_title)
    panel.add_argument("--start", type=iso_date, required=True)
    panel.add_argument("--end", type=iso_date, required=True)
    panel.add_argument("--top-n", dest="top_n", type=int, default=10)
    panel.add_argument("--fail-fast", action="store_true")

    ads = scenario_commands.add_parser("search-ads", parents=[common])
    ads.add_argument("category", type=qualified_title)
    ads.add_argument("--fact", required=True, help="predicate label, e.g. height")
    ads.add_argument("--suffix", required=True, help="keyword suffix, e.g. hotel")
    ads.add_argument("--headline", help="template with {title}/{fact}")
    ads.add_argument("--description", help="template with {title}/{fact}")
    ads.add_argument("--fail-fast", action="store_true")

    camp = scenario_commands.add_parser("campaign", parents=[common])
    camp.add_argument("article", type=qualified_title)
    camp.add_argument("--start", type=iso_date, required=True)
    camp.add_argument("--end", type=iso_date, required=True)
    camp.add_argument("--event", type=iso_date, required=True)
    camp.add_argument("--fail-fast", action="store_true")

    serve = commands.add_parser("serve", parents=[common], help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8337)

    return parser


def config_from_args(args: argparse.Namespace) -> ToolkitConfig:
    config = ToolkitConfig()
    if getattr(args, "config", None):
        config = load_config_file(config, args.config)
    config = load_env(config)
    flag_settings = {
        name: str(value)
        for name in (
            "fixtures",
            "mode",
            "user_agent",
            "rate_limit",
            "max_concurrent",
            "wikipedia_endpoint",
            "wikidata_endpoint",
            "pageviews_endpoint",
            "pageviews_access",
            "pageviews_agent",
        )
        if (value := getattr(args, name, None)) is not None
    }
    return apply_settings(config, flag_settings, "command line")


def make_client(args: argparse.Namespace) -> httpx.Client:
    if getattr(args, "server", None):
        return httpx.Client(base_url=args.server, timeout=60.0)
    import warnings

    with warnings.catch_warnings():
        # starlette 1.3 suggests the not-yet-published httpx2 package for
        # in-process clients; silence that hint, it is not actionable here.
        warnings.filterwarnings("ignore", message=r".*httpx2.*")
        from fastapi.testclient import TestClient

    return TestClient(create_app(config_from_args(args)))


def _post(client: httpx.Client, path: str, payload: dict) -> httpx.Response:
    body = {key: value for key, value in payload.items() if value is not None}
    return client.post(path, json=body)


def _emit(response: httpx.Response, fmt: str) -> int:
    if response.status_code == 200:
        try:
            rows = response.json()["rows"]
        except (ValueError, KeyError):
            sys.stderr.write("wikigrid: server returned an unexpected response body\n")
            return FAILURE_EXIT
        sys.stdout.write(render_rows(rows, fmt))
        return 0
    if response.status_code == 422:
        sys.stderr.write(f"wikigrid: invalid request: {response.text}\n")
        return USAGE_EXIT
    try:
        error = response.json()["error"]
        message = f"wikigrid: {error['kind']}: {error['detail']}"
        if error.get("url"):
            message += f" ({error['url']})"
    except (ValueError, KeyError):
        message = f"wikigrid: HTTP {response.status_code}: {response.text}"
    sys.stderr.write(message + "\n")
    return FAILURE_EXIT


def _isoformat(value: date | None) -> str | None:
    return value.isoformat() if value is not None else None


def dispatch(args: argparse.Namespace) -> int:
    if args.command == "serve":
        import uvicorn

        uvicorn.run(create_app(config_from_args(args)), host=args.host, port=args.port)
        return 0

    with make_client(args) as client:
        if args.command in FUNCTION_COMMANDS:
            service_name = FUNCTION_COMMANDS[args.command][0]
            payload = {
                "title": args.title,
                "langs": getattr(args, "langs", None),
                "start": _isoformat(getattr(args, "start", None)),
                "end": _isoformat(getattr(args, "end", None)),
            }
            return _emit(_post(client, f"/v1/functions/{service_name}", payload), args.format)
        if args.command == "grid":
            try:
                text = Path(args.file).read_text(encoding="utf-8")
            except OSError as exc:
                sys.stderr.write(f"wikigrid: cannot read grid: {exc}\n")
                return USAGE_EXIT
            payload = {"tsv": text, "max_cells": args.max_cells, "workers": args.workers}
            return _emit(_post(client, "/v1/grid/eval", payload), args.format)
        if args.command == "scenario":
            if args.scenario_command == "category-panel":
                payload = {
                    "category": args.category,
                    "start": args.start.isoformat(),
                    "end": args.end.isoformat(),
                    "top_n": args.top_n,
                    "fail_fast": args.fail_fast,
                }
                return _emit(_post(client, "/v1/scenarios/category-panel", payload), args.format)
            if args.scenario_command == "search-ads":
                payload = {
                    "category": args.category,
                    "fact": args.fact,
                    "suffix": args.suffix,
                    "headline": args.headline,
                    "description": args.description,
                    "fail_fast": args.fail_fast,
                }
                return _emit(_post(client, "/v1/scenarios/search-ads", payload), args.format)
            payload = {
                "article": args.article,
                "start": args.start.isoformat(),
                "end": args.end.isoformat(),
                "event": args.event.isoformat(),
                "fail_fast": args.fail_fast,
            }
            return _emit(_post(client, "/v1/scenarios/campaign", payload), args.format)
    raise AssertionError(f"unhandled command {args.command!r}")


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return dispatch(args)
    except ToolkitError as exc:
        # Raised before any request is made: configuration problems.
        sys.stderr.write(f"wikigrid: {exc.kind.value}: {exc.detail}\n")
        return USAGE_EXIT
    except httpx.HTTPError as exc:
        sys.stderr.write(f"wikigrid: cannot reach server: {exc}\n")
        return FAILURE_EXIT


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
