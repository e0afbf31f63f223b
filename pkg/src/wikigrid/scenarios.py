"""Multi-step recipes combining several functions into one table.

- category_panel: category members ranked by accumulated pageviews, with
  each member's "image" fact.
- search_ads: ad copy per category member from one fact, with synonym-based
  keywords ("Burj Dubai hotel, ...").
- campaign: per-language mean daily pageviews before and after an event.

All three default to skip-and-continue on per-article failures (a missing
item or a 404 becomes an empty field or a zero); fail_fast raises instead.
"""

from __future__ import annotations

from datetime import date

from wikigrid.core import ErrorKind, ToolkitError, bad_input
from wikigrid.functions import Toolkit, ValueTable


def _facts_map(toolkit: Toolkit, article: str, fail_fast: bool) -> dict[str, str]:
    try:
        table = toolkit.wiki_data_facts(article)
    except ToolkitError as exc:
        if fail_fast or exc.kind not in (ErrorKind.NOT_FOUND,):
            raise
        return {}
    return {predicate: value for predicate, value in table.rows}


def category_panel(
    toolkit: Toolkit,
    category: str,
    start: date,
    end: date,
    top_n: int = 10,
    fail_fast: bool = False,
) -> ValueTable:
    """Rank, title, accumulated views, image — top_n members by views.

    Ties break alphabetically; members without pageview data count as zero.
    """
    if top_n < 1:
        raise bad_input(f"top_n must be >= 1, got {top_n}")
    members = toolkit.wiki_category_members(category).column()
    ranked: list[tuple[int, str]] = []
    for member in members:
        try:
            views = toolkit.pageviews.total_views(toolkit.parse(member), start, end)
        except ToolkitError as exc:
            if fail_fast or exc.kind is not ErrorKind.NOT_FOUND:
                raise
            views = 0
        ranked.append((views, member))
    ranked.sort(key=lambda pair: (-pair[0], pair[1]))
    rows = []
    for rank, (views, member) in enumerate(ranked[:top_n], start=1):
        image = _facts_map(toolkit, member, fail_fast).get("image", "")
        rows.append((str(rank), member, str(views), image))
    return ValueTable(tuple(rows), 4)


def search_ads(
    toolkit: Toolkit,
    category: str,
    fact_predicate: str,
    keyword_suffix: str,
    headline_template: str,
    description_template: str,
    fail_fast: bool = False,
) -> ValueTable:
    """Title, headline, description, keywords — one row per member with the fact.

    Templates substitute {title} (the bare article title) and {fact};
    members lacking the fact are omitted. Keywords are each synonym's bare
    title plus the suffix, comma-joined.
    """
    combined = headline_template + description_template
    if "{title}" not in combined or "{fact}" not in combined:
        raise bad_input("templates must use both {title} and {fact} placeholders")
    rows = []
    for member in toolkit.wiki_category_members(category).column():
        fact = _facts_map(toolkit, member, fail_fast).get(fact_predicate)
        if fact is None:
            continue
        title = toolkit.parse(member).title
        try:
            synonyms = toolkit.wiki_synonyms(member).column()
        except ToolkitError:
            if fail_fast:
                raise
            synonyms = []
        keywords = ", ".join(
            f"{toolkit.parse(synonym).title} {keyword_suffix}" for synonym in synonyms
        )
        rows.append(
            (
                member,
                headline_template.replace("{title}", title).replace("{fact}", fact),
                description_template.replace("{title}", title).replace("{fact}", fact),
                keywords,
            )
        )
    return ValueTable(tuple(rows), 4)


def campaign(
    toolkit: Toolkit,
    article: str,
    start: date,
    end: date,
    event: date,
    fail_fast: bool = False,
) -> ValueTable:
    """Language, pre-event mean daily views, post-event mean, post/pre ratio.

    The pre window is [start, event) and the post window [event, end]. An
    empty pre window or a zero pre mean leaves the dependent cells empty;
    languages whose pageview data 404s get empty means.
    """
    if not (start <= event <= end):
        raise bad_input(f"need start <= event <= end, got {start}, {event}, {end}")
    source = toolkit.parse(article)
    articles = [source.qualified()] + toolkit.wiki_translate(article).column()
    pre_days = (event - start).days
    post_days = (end - event).days + 1
    rows = []
    for qualified in articles:
        language = toolkit.parse(qualified).language
        try:
            series = toolkit.pageviews.daily_views(toolkit.parse(qualified), start, end)
        except ToolkitError as exc:
            if fail_fast or exc.kind is not ErrorKind.NOT_FOUND:
                raise
            rows.append((language, "", "", ""))
            continue
        pre_total = sum(count for day, count in series if day < event)
        post_total = sum(count for day, count in series if day >= event)
        pre_mean = pre_total / pre_days if pre_days else None
        post_mean = post_total / post_days
        ratio = post_mean / pre_mean if pre_mean else None
        rows.append(
            (
                language,
                "" if pre_mean is None else str(pre_mean),
                str(post_mean),
                "" if ratio is None else str(ratio),
            )
        )
    return ValueTable(tuple(rows), 4)
