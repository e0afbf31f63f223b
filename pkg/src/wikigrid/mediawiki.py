"""Client for the MediaWiki action API (``https://{language}.wikipedia.org/w/api.php``).

All queries use ``action=query`` with ``format=json`` / ``formatversion=2``
and follow the ``continue`` envelope until it disappears, merging every
continuation token into the next request. List results are deduplicated
preserving first occurrence so golden outputs are deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import Callable, Iterator

from wikigrid.core import (
    QualifiedTitle,
    bad_input,
    make_qualified,
    not_found,
    parse_failure,
    to_request_title,
)
from wikigrid.transport import HttpRequestSpec, Transport, canonical_url

DEFAULT_ENDPOINT_TEMPLATE = "https://{language}.wikipedia.org/w/api.php"
DEFAULT_MAX_PAGES = 50

ARTICLE_NAMESPACE = "0"
CATEGORY_NAMESPACE = "14"


@dataclass(frozen=True)
class ActionQuery:
    """One action-API query: a language edition plus its parameters."""

    language: str
    params: dict[str, str] = field(default_factory=dict)

    def merged(self) -> dict[str, str]:
        merged = {"action": "query", "format": "json", "formatversion": "2"}
        merged.update(self.params)
        if merged.get("format") != "json":
            raise bad_input("only format=json is supported")
        return merged

    def spec(self, endpoint_template: str) -> HttpRequestSpec:
        base = endpoint_template.format(language=self.language)
        return HttpRequestSpec(canonical_url(base, self.merged()))


@dataclass(frozen=True)
class GeoCoordinate:
    latitude: float
    longitude: float


def day_range(start: date, end: date) -> list[date]:
    """Every day from start to end, inclusive."""
    return [start + timedelta(days=offset) for offset in range((end - start).days + 1)]


def first_page(response: dict, url: str | None = None) -> dict:
    """The single page object of a prop query; NotFound for missing pages."""
    try:
        page = response["query"]["pages"][0]
    except (KeyError, IndexError, TypeError) as exc:
        raise parse_failure(f"no pages in response: {exc}", url=url) from exc
    if page.get("missing"):
        raise not_found(f"page does not exist: {page.get('title', '?')}", url=url)
    return page


class MediaWikiClient:
    def __init__(
        self,
        transport: Transport,
        endpoint_template: str = DEFAULT_ENDPOINT_TEMPLATE,
        max_pages: int = DEFAULT_MAX_PAGES,
    ):
        self.transport = transport
        self.endpoint_template = endpoint_template
        self.max_pages = max_pages

    # -- plumbing ----------------------------------------------------------

    def _get_json(self, spec: HttpRequestSpec) -> dict:
        result = self.transport.fetch(spec)
        try:
            data = json.loads(result.body)
        except ValueError as exc:
            raise parse_failure(f"invalid JSON: {exc}", url=spec.url) from exc
        if not isinstance(data, dict):
            raise parse_failure("expected a JSON object", url=spec.url)
        if "error" in data:
            code = data["error"].get("code", "unknown")
            raise bad_input(f"API error: {code}", url=spec.url)
        return data

    def query_pages(self, query: ActionQuery) -> Iterator[dict]:
        """Yield each response of a continued query, oldest page first."""
        params = dict(query.params)
        for _page in range(self.max_pages):
            spec = ActionQuery(query.language, params).spec(self.endpoint_template)
            data = self._get_json(spec)
            yield data
            cont = data.get("continue")
            if not cont:
                return
            params.update({key: str(value) for key, value in cont.items()})
        raise bad_input(
            f"query exceeded {self.max_pages} continuation pages; raise max_pages to allow more"
        )

    def query_all(self, query: ActionQuery, extract: Callable[[dict], list]) -> list:
        """Run a continued query and concatenate extract(response) per page."""
        records: list = []
        for response in self.query_pages(query):
            records.extend(extract(response))
        return records

    def _titles(self, language: str, records: list[dict]) -> list[QualifiedTitle]:
        seen: set[str] = set()
        titles: list[QualifiedTitle] = []
        for record in records:
            title = record.get("title")
            if not title or title in seen:
                continue
            seen.add(title)
            titles.append(make_qualified(language, title))
        return titles

    # -- operations --------------------------------------------------------

    def backlinks(self, article: QualifiedTitle, redirects_only: bool) -> list[QualifiedTitle]:
        """Pages linking to the article: redirects (synonyms) or true links."""
        if article.is_category:
            raise bad_input(f"expected an article, got category {article.qualified()!r}")
        query = ActionQuery(
            article.language,
            {
                "list": "backlinks",
                "bltitle": to_request_title(article),
                "blnamespace": ARTICLE_NAMESPACE,
                "blfilterredir": "redirects" if redirects_only else "nonredirects",
                "bllimit": "max",
            },
        )

        def extract(response: dict) -> list:
            try:
                return response["query"]["backlinks"]
            except KeyError as exc:
                raise parse_failure("response lacks query.backlinks") from exc

        return self._titles(article.language, self.query_all(query, extract))

    def langlinks(self, article: QualifiedTitle) -> list[QualifiedTitle]:
        """The article's counterparts on other language editions."""
        query = ActionQuery(
            article.language,
            {
                "prop": "langlinks",
                "titles": to_request_title(article),
                "lllimit": "max",
            },
        )
        links: list[QualifiedTitle] = []
        seen: set[str] = set()
        for response in self.query_pages(query):
            page = first_page(response)
            for link in page.get("langlinks", []):
                qualified = make_qualified(link["lang"], link["title"])
                if qualified.qualified() in seen:
                    continue
                seen.add(qualified.qualified())
                links.append(qualified)
        return links

    def category_members(self, category: QualifiedTitle, kind: str) -> list[QualifiedTitle]:
        """Members of a category: kind is 'pages' (ns 0) or 'subcategories' (ns 14)."""
        if not category.is_category:
            raise bad_input(f"expected a category, got {category.qualified()!r}")
        if kind not in ("pages", "subcategories"):
            raise bad_input(f"unknown category member kind {kind!r}")
        namespace = ARTICLE_NAMESPACE if kind == "pages" else CATEGORY_NAMESPACE
        query = ActionQuery(
            category.language,
            {
                "list": "categorymembers",
                "cmtitle": to_request_title(category),
                "cmnamespace": namespace,
                "cmlimit": "max",
            },
        )

        def extract(response: dict) -> list:
            try:
                return response["query"]["categorymembers"]
            except KeyError as exc:
                raise parse_failure("response lacks query.categorymembers") from exc

        return self._titles(category.language, self.query_all(query, extract))

    def outbound_links(self, article: QualifiedTitle) -> list[QualifiedTitle]:
        """Article-namespace pages the article links to."""
        query = ActionQuery(
            article.language,
            {
                "prop": "links",
                "titles": to_request_title(article),
                "plnamespace": ARTICLE_NAMESPACE,
                "pllimit": "max",
            },
        )
        records: list[dict] = []
        for response in self.query_pages(query):
            page = first_page(response)
            # The API omits the links key entirely for dead-end pages.
            records.extend(page.get("links", []))
        return self._titles(article.language, records)

    def geocoordinates(self, article: QualifiedTitle) -> GeoCoordinate:
        """The article's primary coordinate pair; NotFound when untagged."""
        query = ActionQuery(
            article.language,
            {"prop": "coordinates", "titles": to_request_title(article)},
        )
        spec = query.spec(self.endpoint_template)
        page = first_page(self._get_json(spec), url=spec.url)
        coordinates = page.get("coordinates")
        if not coordinates:
            raise not_found(f"no coordinates for {article.qualified()!r}", url=spec.url)
        primary = next((c for c in coordinates if c.get("primary")), coordinates[0])
        latitude, longitude = primary.get("lat"), primary.get("lon")
        if not isinstance(latitude, (int, float)) or not isinstance(longitude, (int, float)):
            raise parse_failure("coordinate pair is not numeric", url=spec.url)
        if not (-90 <= latitude <= 90 and -180 <= longitude <= 180):
            raise parse_failure(
                f"coordinates out of range: {latitude},{longitude}", url=spec.url
            )
        return GeoCoordinate(float(latitude), float(longitude))

    def daily_edit_counts(
        self, article: QualifiedTitle, start: date, end: date
    ) -> list[tuple[date, int]]:
        """Revisions per UTC day over [start, end]; dense, zero-filled."""
        if start > end:
            raise bad_input(f"start {start} is after end {end}")
        query = ActionQuery(
            article.language,
            {
                "prop": "revisions",
                "titles": to_request_title(article),
                "rvprop": "timestamp",
                "rvlimit": "max",
                "rvdir": "newer",
                "rvstart": f"{start.isoformat()}T00:00:00Z",
                "rvend": f"{end.isoformat()}T23:59:59Z",
            },
        )
        counts: dict[date, int] = {}
        for response in self.query_pages(query):
            page = first_page(response)
            for revision in page.get("revisions", []):
                stamp = revision.get("timestamp", "")
                try:
                    day = date.fromisoformat(stamp[:10])
                except ValueError as exc:
                    raise parse_failure(f"bad revision timestamp {stamp!r}") from exc
                if start <= day <= end:
                    counts[day] = counts.get(day, 0) + 1
        return [(day, counts.get(day, 0)) for day in day_range(start, end)]
