from datetime import date

import pytest

from tests.conftest import FIXTURES_DIR, replay_toolkit, write_fixture
from wikigrid.core import ErrorKind, ToolkitError
from wikigrid.functions import ValueTable, builtin_registry, parse_language_list
from wikigrid.mediawiki import DEFAULT_ENDPOINT_TEMPLATE, ActionQuery

JAN = (date(2016, 1, 1), date(2016, 1, 31))
WEEK = (date(2016, 1, 1), date(2016, 1, 7))

BERLIN_SYNONYMS = [
    "en:Berlin, Germany",
    "en:Berlin (Germany)",
    "en:Berlin Germany",
    "en:Land Berlin",
    "en:German capital",
]

BERLIN_TRANSLATIONS = ["de:Berlin", "es:Berlín", "fr:Berlin", "it:Berlino", "ru:Берлин"]

BERLIN_EXPANSION = [
    "en:Berlin, Germany",
    "en:Berlin (Germany)",
    "en:Berlin Germany",
    "en:Land Berlin",
    "en:German capital",
    "de:Berlin",
    "de:Berlin (Deutschland)",
    "de:Bundeshauptstadt",
    "de:Berlin, Deutschland",
    "es:Berlín",
    "fr:Berlin",
    "fr:Berlin (Allemagne)",
    "it:Berlino",
    "it:Berlino (Germania)",
    "ru:Берлин",
]

BERLIN_INBOUND = [
    "en:Germany",
    "en:Brandenburg",
    "en:Cold War",
    "en:East Germany",
    "en:West Berlin",
    "en:Potsdam",
    "en:Hamburg",
    "en:Munich",
    "en:Angela Merkel",
    "en:Bundestag",
]

BERLIN_OUTBOUND = [
    "en:Germany",
    "en:Brandenburg",
    "en:East Germany",
    "en:West Berlin",
    "en:Potsdam",
    "en:Spree",
    "en:Reichstag building",
    "en:Brandenburg Gate",
    "en:Museum Island",
    "en:Bundestag",
]

BERLIN_MUTUAL = [
    "en:Germany",
    "en:Brandenburg",
    "en:East Germany",
    "en:West Berlin",
    "en:Potsdam",
    "en:Bundestag",
]

MONTREAL_MEMBERS = [
    "en:Biosphère",
    "en:Gibeau Orange Julep",
    "en:La Ronde (amusement park)",
    "en:McCord Museum",
    "en:Montreal Biodome",
    "en:Montreal Botanical Garden",
    "en:Montreal Science Centre",
    "en:Mount Royal",
    "en:Notre-Dame Basilica (Montreal)",
    "en:Old Port of Montreal",
    "en:Place des Arts",
    "en:Saint Joseph's Oratory",
]

BERLIN_SUBCATEGORIES = [
    "en:Category:Buildings and structures in Berlin",
    "en:Category:Culture in Berlin",
    "en:Category:Districts of Berlin",
    "en:Category:History of Berlin",
    "en:Category:People from Berlin",
    "en:Category:Transport in Berlin",
]

BERLIN_WEEK_VIEWS = [
    ("2016-01-01", "5020"),
    ("2016-01-02", "4890"),
    ("2016-01-03", "5100"),
    ("2016-01-04", "5230"),
    ("2016-01-05", "4990"),
    ("2016-01-06", "5600"),
    ("2016-01-07", "5410"),
]

BERLIN_WEEK_EDITS = [
    ("2016-01-01", "0"),
    ("2016-01-02", "3"),
    ("2016-01-03", "0"),
    ("2016-01-04", "0"),
    ("2016-01-05", "1"),
    ("2016-01-06", "0"),
    ("2016-01-07", "0"),
]


@pytest.fixture(scope="module")
def toolkit():
    tk, _transport = replay_toolkit(FIXTURES_DIR)
    return tk


def test_value_table_enforces_rectangularity():
    with pytest.raises(ToolkitError):
        ValueTable((("a", "b"), ("c",)), 2)
    with pytest.raises(ToolkitError):
        ValueTable((), 0)
    assert ValueTable((), 2).shape == (0, 2)


def test_synonyms_golden(toolkit):
    assert toolkit.wiki_synonyms("en:Berlin").column() == BERLIN_SYNONYMS


def test_translate_golden(toolkit):
    assert toolkit.wiki_translate("en:Berlin").column() == BERLIN_TRANSLATIONS


def test_translate_filter(toolkit):
    assert toolkit.wiki_translate("en:Berlin", ["de"]).to_lists() == [["de:Berlin"]]


def test_translate_empty_filter_admits_nothing(toolkit):
    assert toolkit.wiki_translate("en:Berlin", []).shape == (0, 1)


def test_translate_filter_is_intersection_preserving_order(toolkit):
    unfiltered = toolkit.wiki_translate("en:Berlin").column()
    for admitted in (["de", "ru"], ["ru", "de"], ["fr"], ["xх".replace("х", "x")]):
        filtered = toolkit.wiki_translate("en:Berlin", admitted).column()
        expected = [t for t in unfiltered if t.split(":", 1)[0] in set(admitted)]
        assert filtered == expected


def test_expand_golden_order(toolkit):
    assert toolkit.wiki_expand("en:Berlin").column() == BERLIN_EXPANSION


def test_expand_supersets(toolkit):
    for article in ("en:Berlin", "en:Miniatur Wunderland"):
        expanded = set(toolkit.wiki_expand(article).column())
        assert set(toolkit.wiki_translate(article).column()) <= expanded
        assert set(toolkit.wiki_synonyms(article).column()) <= expanded


def test_expand_filtered(toolkit):
    expanded = toolkit.wiki_expand("en:Berlin", ["de"]).column()
    assert expanded == BERLIN_SYNONYMS + ["de:Berlin", "de:Berlin (Deutschland)", "de:Bundeshauptstadt", "de:Berlin, Deutschland"]


def test_category_members_golden(toolkit):
    assert toolkit.wiki_category_members("en:Category:Visitor attractions in Montreal").column() == MONTREAL_MEMBERS


def test_category_members_rejects_articles(toolkit):
    with pytest.raises(ToolkitError) as err:
        toolkit.wiki_category_members("en:Berlin")
    assert err.value.kind is ErrorKind.BAD_INPUT


def test_subcategories_golden_and_all_parse_as_categories(toolkit):
    from wikigrid.core import parse_qualified

    subs = toolkit.wiki_subcategories("en:Category:Berlin").column()
    assert subs == BERLIN_SUBCATEGORIES
    assert all(parse_qualified(s).is_category for s in subs)


def test_inbound_outbound_golden(toolkit):
    assert toolkit.wiki_inbound_links("en:Berlin").column() == BERLIN_INBOUND
    assert toolkit.wiki_outbound_links("en:Berlin").column() == BERLIN_OUTBOUND


def test_mutual_links_golden_and_matches_intersection(toolkit):
    mutual = toolkit.wiki_mutual_links("en:Berlin").column()
    assert mutual == BERLIN_MUTUAL
    inbound = set(toolkit.wiki_inbound_links("en:Berlin").column())
    outbound = toolkit.wiki_outbound_links("en:Berlin").column()
    assert mutual == [t for t in outbound if t in inbound]
    assert set(mutual) == inbound & set(outbound)


def test_synonyms_and_inbound_are_disjoint(toolkit):
    synonyms = set(toolkit.wiki_synonyms("en:Berlin").column())
    inbound = set(toolkit.wiki_inbound_links("en:Berlin").column())
    assert synonyms.isdisjoint(inbound)


def test_geocoordinates_golden(toolkit):
    table = toolkit.wiki_geocoordinates("en:Berlin")
    assert table.shape == (1, 2)
    latitude, longitude = float(table.rows[0][0]), float(table.rows[0][1])
    assert 52 < latitude < 53 and 13 < longitude < 14


def test_geocoordinates_without_data_is_empty_table(tmp_path):
    params = {"prop": "coordinates", "titles": "Nowhere_Place"}
    url = ActionQuery("en", params).spec(DEFAULT_ENDPOINT_TEMPLATE).url
    write_fixture(tmp_path, url, {"query": {"pages": [{"pageid": 1, "ns": 0, "title": "Nowhere Place"}]}})
    toolkit, _ = replay_toolkit(tmp_path)
    table = toolkit.wiki_geocoordinates("en:Nowhere Place")
    assert table.shape == (0, 2)


def test_data_facts_golden_rows(toolkit):
    rows = toolkit.wiki_data_facts("en:Berlin").to_lists()
    assert ["ISO 3166-2 code", "DE-BE"] in rows
    assert all(row[0] != "head of government" for row in rows)
    assert rows[0] == ["country", "Germany"]


def test_pageviews_golden(toolkit):
    table = toolkit.wiki_pageviews("en:Berlin", *WEEK)
    assert [tuple(row) for row in table.rows] == BERLIN_WEEK_VIEWS


def test_pageviews_sum_matches_total(toolkit):
    table = toolkit.wiki_pageviews("en:Miniatur Wunderland", *JAN)
    from wikigrid.core import parse_qualified

    total = toolkit.pageviews.total_views(parse_qualified("en:Miniatur Wunderland"), *JAN)
    assert sum(int(count) for _, count in table.rows) == total


def test_miniatur_uplift_after_event(toolkit):
    table = toolkit.wiki_pageviews("en:Miniatur Wunderland", *JAN)
    pre = [int(count) for day, count in table.rows if day < "2016-01-13"]
    post = [int(count) for day, count in table.rows if day >= "2016-01-13"]
    assert sum(post) / len(post) > sum(pre) / len(pre)


def test_page_edits_golden(toolkit):
    table = toolkit.wiki_page_edits("en:Berlin", *WEEK)
    assert [tuple(row) for row in table.rows] == BERLIN_WEEK_EDITS


def test_all_functions_are_pure_over_the_archive(toolkit):
    calls = [
        lambda: toolkit.wiki_synonyms("en:Berlin"),
        lambda: toolkit.wiki_translate("en:Berlin"),
        lambda: toolkit.wiki_expand("en:Berlin"),
        lambda: toolkit.wiki_category_members("en:Category:Visitor attractions in Montreal"),
        lambda: toolkit.wiki_subcategories("en:Category:Berlin"),
        lambda: toolkit.wiki_inbound_links("en:Berlin"),
        lambda: toolkit.wiki_outbound_links("en:Berlin"),
        lambda: toolkit.wiki_mutual_links("en:Berlin"),
        lambda: toolkit.wiki_geocoordinates("en:Berlin"),
        lambda: toolkit.wiki_data_facts("en:Berlin"),
        lambda: toolkit.wiki_pageviews("en:Berlin", *WEEK),
        lambda: toolkit.wiki_page_edits("en:Berlin", *WEEK),
    ]
    for call in calls:
        first, second = call(), call()
        assert first == second
        assert all(len(row) == first.n_cols for row in first.rows)


def test_unqualified_input_is_bad_input(toolkit):
    with pytest.raises(ToolkitError) as err:
        toolkit.wiki_synonyms("Berlin")
    assert err.value.kind is ErrorKind.BAD_INPUT
    with pytest.raises(ToolkitError):
        toolkit.wiki_synonyms("en:")


def test_empty_category_yields_empty_tables(tmp_path):
    base = {"list": "categorymembers", "cmtitle": "Category:Hollow", "cmlimit": "max"}
    for namespace in ("0", "14"):
        url = ActionQuery("en", {**base, "cmnamespace": namespace}).spec(DEFAULT_ENDPOINT_TEMPLATE).url
        write_fixture(tmp_path, url, {"query": {"categorymembers": []}})
    toolkit, _ = replay_toolkit(tmp_path)
    assert toolkit.wiki_category_members("en:Category:Hollow").shape == (0, 1)
    assert toolkit.wiki_subcategories("en:Category:Hollow").shape == (0, 1)


def test_expand_with_no_translations_and_no_redirects_is_empty(tmp_path):
    backlinks_url = ActionQuery(
        "en",
        {
            "list": "backlinks",
            "bltitle": "Hermit",
            "blnamespace": "0",
            "blfilterredir": "redirects",
            "bllimit": "max",
        },
    ).spec(DEFAULT_ENDPOINT_TEMPLATE).url
    write_fixture(tmp_path, backlinks_url, {"query": {"backlinks": []}})
    langlinks_url = ActionQuery(
        "en", {"prop": "langlinks", "titles": "Hermit", "lllimit": "max"}
    ).spec(DEFAULT_ENDPOINT_TEMPLATE).url
    write_fixture(tmp_path, langlinks_url, {"query": {"pages": [{"pageid": 1, "ns": 0, "title": "Hermit"}]}})
    toolkit, _ = replay_toolkit(tmp_path)
    assert toolkit.wiki_expand("en:Hermit").shape == (0, 1)


def test_facts_of_item_with_only_multi_value_claims_is_empty(tmp_path):
    from wikigrid.transport import canonical_url
    from wikigrid.wikidata import DEFAULT_ENDPOINT as WIKIDATA_ENDPOINT

    def wd(params, payload):
        merged = {"action": "wbgetentities", "format": "json"}
        merged.update(params)
        write_fixture(tmp_path, canonical_url(WIKIDATA_ENDPOINT, merged), payload)

    wd(
        {"sites": "enwiki", "titles": "All_Multi", "props": "info"},
        {"entities": {"Q777": {"type": "item", "id": "Q777"}}, "success": 1},
    )
    claim = {
        "mainsnak": {
            "snaktype": "value",
            "property": "P6",
            "datavalue": {"type": "string", "value": "x"},
        },
        "type": "statement",
    }
    wd(
        {"ids": "Q777", "props": "claims"},
        {"entities": {"Q777": {"type": "item", "id": "Q777", "claims": {"P6": [claim, claim]}}}, "success": 1},
    )
    toolkit, _ = replay_toolkit(tmp_path)
    assert toolkit.wiki_data_facts("en:All Multi").shape == (0, 2)


def test_default_window_used_when_dates_absent(tmp_path):
    from wikigrid.config import ToolkitConfig, build_toolkit, build_transport
    from wikigrid.core import parse_qualified
    from tests.conftest import forbid_live_fetch

    config = ToolkitConfig(fixtures=str(tmp_path), mode="replay")
    transport = build_transport(config, live_fetch=forbid_live_fetch)
    toolkit = build_toolkit(config, transport)
    toolkit._today = date(2016, 2, 1)
    start, end = date(2016, 1, 2), date(2016, 1, 31)
    url = toolkit.pageviews._spec(parse_qualified("en:Windowed"), start, end).url
    write_fixture(tmp_path, url, {"items": []})
    table = toolkit.wiki_pageviews("en:Windowed")
    assert table.shape == (30, 2)
    assert table.rows[0][0] == "2016-01-02" and table.rows[-1][0] == "2016-01-31"
    with pytest.raises(ToolkitError):
        toolkit.wiki_pageviews("en:Windowed", start=date(2016, 1, 2))


def test_parse_language_list():
    assert parse_language_list("de,fr") == ["de", "fr"]
    assert parse_language_list(" de , fr ") == ["de", "fr"]
    assert parse_language_list("") == []
    assert parse_language_list("de,") == ["de"]
    with pytest.raises(ToolkitError):
        parse_language_list("DE")


def test_builtin_registry_arity_and_dates(toolkit):
    registry = builtin_registry(toolkit)
    assert set(registry) == {
        "WIKITRANSLATE",
        "WIKISYNONYMS",
        "WIKIEXPAND",
        "WIKICATEGORYMEMBERS",
        "WIKISUBCATEGORIES",
        "WIKIINBOUNDLINKS",
        "WIKIOUTBOUNDLINKS",
        "WIKIMUTUALLINKS",
        "WIKIGEOCOORDINATES",
        "WIKIDATAFACTS",
        "WIKIPAGEVIEWS",
        "WIKIPAGEEDITS",
    }
    assert registry["WIKISYNONYMS"](["en:Berlin"]).column() == BERLIN_SYNONYMS
    assert registry["WIKITRANSLATE"](["en:Berlin", "de"]).to_lists() == [["de:Berlin"]]
    views = registry["WIKIPAGEVIEWS"](["en:Berlin", "2016-01-01", "2016-01-07"])
    assert [tuple(r) for r in views.rows] == BERLIN_WEEK_VIEWS
    with pytest.raises(ToolkitError):
        registry["WIKISYNONYMS"]([])
    with pytest.raises(ToolkitError):
        registry["WIKIPAGEVIEWS"](["en:Berlin", "2016-01-01"])
    with pytest.raises(ToolkitError):
        registry["WIKIPAGEVIEWS"](["en:Berlin", "January 1", "2016-01-07"])
