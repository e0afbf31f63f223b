"""The twelve WIKI* table functions, composed from the three API clients.

Every function takes qualified-title strings (``en:Berlin``) and returns a
rectangular ValueTable of strings — the shape a spreadsheet range spills
into. List functions emit one qualified title per row so outputs can be fed
straight back into other functions (chaining). Errors are raised as
ToolkitError here; only the grid evaluator converts them into in-cell error
tokens.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from typing import Callable, Sequence

from wikigrid.core import (
    ErrorKind,
    QualifiedTitle,
    ToolkitError,
    bad_input,
    parse_qualified,
    valid_language,
)
from wikigrid.mediawiki import MediaWikiClient
from wikigrid.pageviews import PageviewsClient, default_window
from wikigrid.wikidata import WikidataClient


@dataclass(frozen=True)
class ValueTable:
    """A rectangular table of strings; n_cols matters when rows is empty."""

    rows: tuple[tuple[str, ...], ...]
    n_cols: int = 1

    def __post_init__(self):
        if self.n_cols < 1:
            raise bad_input("a table needs at least one column")
        for row in self.rows:
            if len(row) != self.n_cols:
                raise bad_input(
                    f"ragged table: row of width {len(row)} in a {self.n_cols}-column table"
                )

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), self.n_cols

    def column(self, index: int = 0) -> list[str]:
        return [row[index] for row in self.rows]

    def to_lists(self) -> list[list[str]]:
        return [list(row) for row in self.rows]


def single_column(values: Sequence[str]) -> ValueTable:
    return ValueTable(tuple((value,) for value in values), 1)


def titles_table(titles: Sequence[QualifiedTitle]) -> ValueTable:
    return single_column([title.qualified() for title in titles])


def _dated_rows(series: Sequence[tuple[date, int]]) -> ValueTable:
    return ValueTable(tuple((day.isoformat(), str(count)) for day, count in series), 2)


def parse_language_list(raw: str) -> list[str]:
    """Comma-separated language codes; empty input means an empty filter."""
    codes = [token.strip() for token in raw.split(",")]
    codes = [code for code in codes if code]
    for code in codes:
        if not valid_language(code):
            raise bad_input(f"invalid language code {code!r}")
    return codes


class Toolkit:
    """The twelve functions over one shared transport/clients triple."""

    def __init__(
        self,
        mediawiki: MediaWikiClient,
        wikidata: WikidataClient,
        pageviews: PageviewsClient,
        today: date | None = None,
        category_prefixes: tuple[str, ...] = (),
    ):
        self.mediawiki = mediawiki
        self.wikidata = wikidata
        self.pageviews = pageviews
        self._today = today
        self.category_prefixes = tuple(category_prefixes)

    def parse(self, text: str) -> QualifiedTitle:
        """parse_qualified with this toolkit's extra category prefixes."""
        return parse_qualified(text, self.category_prefixes)

    def _window(self, start: date | None, end: date | None) -> tuple[date, date]:
        if start is None and end is None:
            return default_window(self._today)
        if start is None or end is None:
            raise bad_input("give both start and end dates, or neither")
        return start, end

    # -- the twelve ---------------------------------------------------------

    def wiki_translate(self, article: str, target_languages: list[str] | None = None) -> ValueTable:
        """Language links, optionally filtered to the given language codes."""
        links = self.mediawiki.langlinks(self.parse(article))
        if target_languages is not None:
            admitted = set(target_languages)
            links = [link for link in links if link.language in admitted]
        return titles_table(links)

    def wiki_synonyms(self, article: str) -> ValueTable:
        """Redirects pointing at the article."""
        return titles_table(self.mediawiki.backlinks(self.parse(article), redirects_only=True))

    def wiki_expand(self, article: str, target_languages: list[str] | None = None) -> ValueTable:
        """Synonyms plus translations plus each translation's own synonyms."""
        source = self.parse(article)
        out: list[str] = [t.qualified() for t in self.mediawiki.backlinks(source, redirects_only=True)]
        translations = self.mediawiki.langlinks(source)
        if target_languages is not None:
            admitted = set(target_languages)
            translations = [t for t in translations if t.language in admitted]
        for translation in translations:
            out.append(translation.qualified())
            out.extend(t.qualified() for t in self.mediawiki.backlinks(translation, redirects_only=True))
        seen: set[str] = set()
        unique = [title for title in out if not (title in seen or seen.add(title))]
        return single_column(unique)

    def wiki_category_members(self, category: str) -> ValueTable:
        """Article-namespace members of a category, in API (alphabetical) order."""
        return titles_table(self.mediawiki.category_members(self.parse(category), "pages"))

    def wiki_subcategories(self, category: str) -> ValueTable:
        return titles_table(
            self.mediawiki.category_members(self.parse(category), "subcategories")
        )

    def wiki_inbound_links(self, article: str) -> ValueTable:
        """Pages linking to the article, redirects excluded."""
        return titles_table(self.mediawiki.backlinks(self.parse(article), redirects_only=False))

    def wiki_outbound_links(self, article: str) -> ValueTable:
        return titles_table(self.mediawiki.outbound_links(self.parse(article)))

    def wiki_mutual_links(self, article: str) -> ValueTable:
        """Intersection of inbound and outbound links, in outbound order."""
        inbound = set(self.wiki_inbound_links(article).column())
        outbound = self.wiki_outbound_links(article).column()
        return single_column([title for title in outbound if title in inbound])

    def wiki_geocoordinates(self, article: str) -> ValueTable:
        """One latitude/longitude row; empty 2-column table when untagged."""
        try:
            coordinate = self.mediawiki.geocoordinates(self.parse(article))
        except ToolkitError as exc:
            if exc.kind is ErrorKind.NOT_FOUND:
                return ValueTable((), 2)
            raise
        return ValueTable(((str(coordinate.latitude), str(coordinate.longitude)),), 2)

    def wiki_data_facts(self, article: str) -> ValueTable:
        """Two columns: predicate label, object label/value."""
        pairs = self.wikidata.facts(self.parse(article))
        return ValueTable(tuple((pair.predicate, pair.value) for pair in pairs), 2)

    def wiki_pageviews(
        self, article: str, start: date | None = None, end: date | None = None
    ) -> ValueTable:
        """Two columns: ISO day, view count."""
        start, end = self._window(start, end)
        return _dated_rows(self.pageviews.daily_views(self.parse(article), start, end))

    def wiki_page_edits(
        self, article: str, start: date | None = None, end: date | None = None
    ) -> ValueTable:
        """Two columns: ISO day, revision count (dense, zero-filled)."""
        start, end = self._window(start, end)
        return _dated_rows(self.mediawiki.daily_edit_counts(self.parse(article), start, end))


# -- spreadsheet builtin registry -------------------------------------------

def _parse_date_arg(raw: str, role: str) -> date:
    try:
        return date.fromisoformat(raw)
    except ValueError as exc:
        raise bad_input(f"{role} must be an ISO date (YYYY-MM-DD), got {raw!r}") from exc


def _arity(name: str, args: Sequence[str], low: int, high: int) -> None:
    if not (low <= len(args) <= high):
        expected = str(low) if low == high else f"{low}..{high}"
        raise bad_input(f"{name} takes {expected} arguments, got {len(args)}")


def builtin_registry(toolkit: Toolkit) -> dict[str, Callable[[Sequence[str]], ValueTable]]:
    """The WIKI* names as positional-string builtins for the grid evaluator."""

    def translate(args: Sequence[str]) -> ValueTable:
        _arity("WIKITRANSLATE", args, 1, 2)
        langs = parse_language_list(args[1]) if len(args) == 2 else None
        return toolkit.wiki_translate(args[0], langs)

    def expand(args: Sequence[str]) -> ValueTable:
        _arity("WIKIEXPAND", args, 1, 2)
        langs = parse_language_list(args[1]) if len(args) == 2 else None
        return toolkit.wiki_expand(args[0], langs)

    def unary(name: str, fn: Callable[[str], ValueTable]) -> Callable[[Sequence[str]], ValueTable]:
        def call(args: Sequence[str]) -> ValueTable:
            _arity(name, args, 1, 1)
            return fn(args[0])

        return call

    def dated(name: str, fn) -> Callable[[Sequence[str]], ValueTable]:
        def call(args: Sequence[str]) -> ValueTable:
            _arity(name, args, 1, 3)
            if len(args) == 2:
                raise bad_input(f"{name} takes an article plus optional start AND end dates")
            if len(args) == 3:
                return fn(args[0], _parse_date_arg(args[1], "start"), _parse_date_arg(args[2], "end"))
            return fn(args[0])

        return call

    return {
        "WIKITRANSLATE": translate,
        "WIKISYNONYMS": unary("WIKISYNONYMS", toolkit.wiki_synonyms),
        "WIKIEXPAND": expand,
        "WIKICATEGORYMEMBERS": unary("WIKICATEGORYMEMBERS", toolkit.wiki_category_members),
        "WIKISUBCATEGORIES": unary("WIKISUBCATEGORIES", toolkit.wiki_subcategories),
        "WIKIINBOUNDLINKS": unary("WIKIINBOUNDLINKS", toolkit.wiki_inbound_links),
        "WIKIOUTBOUNDLINKS": unary("WIKIOUTBOUNDLINKS", toolkit.wiki_outbound_links),
        "WIKIMUTUALLINKS": unary("WIKIMUTUALLINKS", toolkit.wiki_mutual_links),
        "WIKIGEOCOORDINATES": unary("WIKIGEOCOORDINATES", toolkit.wiki_geocoordinates),
        "WIKIDATAFACTS": unary("WIKIDATAFACTS", toolkit.wiki_data_facts),
        "WIKIPAGEVIEWS": dated("WIKIPAGEVIEWS", toolkit.wiki_pageviews),
        "WIKIPAGEEDITS": dated("WIKIPAGEEDITS", toolkit.wiki_page_edits),
    }
