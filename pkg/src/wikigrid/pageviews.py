"""Client for the Wikimedia pageviews REST API (per-article, daily).

Bot and spider traffic is excluded by default (``agent=user``); an advanced
caller can widen that via the agent/access knobs. Days the API omits are
returned as explicit zeros so series are dense over the requested window.
"""

from __future__ import annotations

import json
from datetime import date, datetime, timedelta, timezone
from urllib.parse import quote

from wikigrid.core import ErrorKind, QualifiedTitle, ToolkitError, bad_input, not_found, parse_failure, to_request_title
from wikigrid.mediawiki import day_range
from wikigrid.transport import HttpRequestSpec, Transport

DEFAULT_ENDPOINT = "https://wikimedia.org/api/rest_v1"
EARLIEST_DATA = date(2015, 7, 1)
DEFAULT_WINDOW_DAYS = 30


def default_window(today: date | None = None) -> tuple[date, date]:
    """The 30 days ending yesterday (UTC), used when a caller gives no dates."""
    if today is None:
        today = datetime.now(timezone.utc).date()
    end = today - timedelta(days=1)
    return end - timedelta(days=DEFAULT_WINDOW_DAYS - 1), end


class PageviewsClient:
    def __init__(
        self,
        transport: Transport,
        endpoint: str = DEFAULT_ENDPOINT,
        access: str = "all-access",
        agent: str = "user",
    ):
        self.transport = transport
        self.endpoint = endpoint
        self.access = access
        self.agent = agent

    def _spec(self, article: QualifiedTitle, start: date, end: date) -> HttpRequestSpec:
        # Title goes into a path segment, so "/" and "?" must be encoded too.
        title = quote(to_request_title(article), safe="")
        url = (
            f"{self.endpoint}/metrics/pageviews/per-article/"
            f"{article.language}.wikipedia/{self.access}/{self.agent}/{title}/daily/"
            f"{start.strftime('%Y%m%d')}/{end.strftime('%Y%m%d')}"
        )
        return HttpRequestSpec(url)

    def daily_views(self, article: QualifiedTitle, start: date, end: date) -> list[tuple[date, int]]:
        """Daily view counts over [start, end], dense with zero-filled gaps."""
        if start > end:
            raise bad_input(f"start {start} is after end {end}")
        if start < EARLIEST_DATA:
            raise bad_input(f"pageviews data begins {EARLIEST_DATA}; requested {start}")
        spec = self._spec(article, start, end)
        try:
            result = self.transport.fetch(spec)
        except ToolkitError as exc:
            if exc.kind is ErrorKind.UPSTREAM_STATUS and exc.status == 404:
                raise not_found(f"no pageview data for {article.qualified()!r}", url=spec.url) from exc
            raise
        try:
            items = json.loads(result.body)["items"]
        except (ValueError, KeyError, TypeError) as exc:
            raise parse_failure(f"malformed pageviews response: {exc}", url=spec.url) from exc
        by_day: dict[date, int] = {}
        for item in items:
            stamp = str(item.get("timestamp", ""))
            views = item.get("views")
            try:
                day = datetime.strptime(stamp[:8], "%Y%m%d").date()
            except ValueError as exc:
                raise parse_failure(f"bad timestamp {stamp!r}", url=spec.url) from exc
            if not isinstance(views, int) or views < 0:
                raise parse_failure(f"bad view count {views!r}", url=spec.url)
            if start <= day <= end:
                by_day[day] = views
        return [(day, by_day.get(day, 0)) for day in day_range(start, end)]

    def total_views(self, article: QualifiedTitle, start: date, end: date) -> int:
        """Accumulated views over the window: the sum of the daily series."""
        return sum(count for _, count in self.daily_views(article, start, end))
