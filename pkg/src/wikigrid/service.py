"""HTTP service exposing the functions, the grid evaluator and the scenarios.

One app owns one transport, so the in-run response cache and the rate
limiter are shared across requests and clients. Toolkit failures map to an
error envelope ``{"error": {"kind", "detail", "url"}}`` with a status code
per kind; tables come back as ``{"rows": [[...]], "n_cols": N}``.
"""

from __future__ import annotations

from datetime import date

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from wikigrid import __version__, scenarios
from wikigrid.config import ToolkitConfig, build_toolkit, load_env
from wikigrid.core import ErrorKind, ToolkitError
from wikigrid.functions import ValueTable, builtin_registry
from wikigrid.grid import DEFAULT_MAX_CELLS, evaluate_grid, parse_grid_tsv, table_rows

STATUS_FOR_KIND = {
    ErrorKind.BAD_INPUT: 400,
    ErrorKind.NOT_FOUND: 404,
    ErrorKind.RATE_LIMITED: 429,
    ErrorKind.NETWORK: 502,
    ErrorKind.UPSTREAM_STATUS: 502,
    ErrorKind.PARSE_FAILURE: 502,
}

FUNCTION_NAMES = (
    "translate",
    "synonyms",
    "expand",
    "category-members",
    "subcategories",
    "inbound",
    "outbound",
    "mutual",
    "geo",
    "facts",
    "pageviews",
    "pageedits",
)


class TableResponse(BaseModel):
    rows: list[list[str]]
    n_cols: int

    @classmethod
    def from_table(cls, table: ValueTable) -> "TableResponse":
        return cls(rows=table.to_lists(), n_cols=table.n_cols)


class FunctionRequest(BaseModel):
    title: str = Field(description="Qualified title, e.g. en:Berlin")
    langs: list[str] | None = None
    start: date | None = None
    end: date | None = None


class GridRequest(BaseModel):
    tsv: str
    max_cells: int = DEFAULT_MAX_CELLS
    workers: int = 1


class PanelRequest(BaseModel):
    category: str
    start: date
    end: date
    top_n: int = 10
    fail_fast: bool = False


class AdsRequest(BaseModel):
    category: str
    fact: str
    suffix: str
    headline: str = "{title}: {fact} of pure wonder"
    description: str = "Visit {title}. Famous for its {fact}."
    fail_fast: bool = False


class CampaignRequest(BaseModel):
    article: str
    start: date
    end: date
    event: date
    fail_fast: bool = False


def create_app(config: ToolkitConfig | None = None) -> FastAPI:
    if config is None:
        config = load_env(ToolkitConfig())
    toolkit = build_toolkit(config)
    builtins = builtin_registry(toolkit)
    app = FastAPI(title="wikigrid", version=__version__)

    @app.exception_handler(ToolkitError)
    async def toolkit_error(_request: Request, exc: ToolkitError) -> JSONResponse:
        body = {"error": {"kind": exc.kind.value, "detail": exc.detail, "url": exc.url}}
        return JSONResponse(status_code=STATUS_FOR_KIND[exc.kind], content=body)

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok", "mode": config.mode, "version": __version__}

    @app.get("/v1/functions")
    def list_functions() -> dict:
        return {"functions": list(FUNCTION_NAMES)}

    @app.post("/v1/functions/{name}", response_model=TableResponse)
    def run_function(name: str, request: FunctionRequest) -> TableResponse:
        table = _dispatch(toolkit, name, request)
        return TableResponse.from_table(table)

    @app.post("/v1/grid/eval", response_model=TableResponse)
    def eval_grid(request: GridRequest) -> TableResponse:
        grid = parse_grid_tsv(request.tsv)
        evaluated = evaluate_grid(
            grid, builtins, max_cells=request.max_cells, workers=request.workers
        )
        rows = table_rows(evaluated)
        return TableResponse(rows=rows, n_cols=len(rows[0]) if rows else 1)

    @app.post("/v1/scenarios/category-panel", response_model=TableResponse)
    def run_panel(request: PanelRequest) -> TableResponse:
        table = scenarios.category_panel(
            toolkit, request.category, request.start, request.end, request.top_n, request.fail_fast
        )
        return TableResponse.from_table(table)

    @app.post("/v1/scenarios/search-ads", response_model=TableResponse)
    def run_ads(request: AdsRequest) -> TableResponse:
        table = scenarios.search_ads(
            toolkit,
            request.category,
            request.fact,
            request.suffix,
            request.headline,
            request.description,
            request.fail_fast,
        )
        return TableResponse.from_table(table)

    @app.post("/v1/scenarios/campaign", response_model=TableResponse)
    def run_campaign(request: CampaignRequest) -> TableResponse:
        table = scenarios.campaign(
            toolkit, request.article, request.start, request.end, request.event, request.fail_fast
        )
        return TableResponse.from_table(table)

    return app


def _dispatch(toolkit, name: str, request: FunctionRequest) -> ValueTable:
    if name == "translate":
        return toolkit.wiki_translate(request.title, request.langs)
    if name == "synonyms":
        return toolkit.wiki_synonyms(request.title)
    if name == "expand":
        return toolkit.wiki_expand(request.title, request.langs)
    if name == "category-members":
        return toolkit.wiki_category_members(request.title)
    if name == "subcategories":
        return toolkit.wiki_subcategories(request.title)
    if name == "inbound":
        return toolkit.wiki_inbound_links(request.title)
    if name == "outbound":
        return toolkit.wiki_outbound_links(request.title)
    if name == "mutual":
        return toolkit.wiki_mutual_links(request.title)
    if name == "geo":
        return toolkit.wiki_geocoordinates(request.title)
    if name == "facts":
        return toolkit.wiki_data_facts(request.title)
    if name == "pageviews":
        return toolkit.wiki_pageviews(request.title, request.start, request.end)
    if name == "pageedits":
        return toolkit.wiki_page_edits(request.title, request.start, request.end)
    raise ToolkitError(ErrorKind.NOT_FOUND, f"unknown function {name!r}")
