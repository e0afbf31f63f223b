#!/usr/bin/env python3
"""Regenerate the committed fixture archive under fixtures/.

Drives every operation the tests and the README rely on through a
record-mode Transport whose live side is an in-process stand-in for the
three upstream APIs (response shapes match the real services; the content
is a curated snapshot). Running the real pipeline guarantees each fixture
lands under the exact canonical key the clients will ask for at replay
time.

Usage: python3 scripts/build_fixtures.py [archive-dir]
"""

from __future__ import annotations

import json
import shutil
import sys
import zlib
from datetime import date, timedelta
from pathlib import Path
from urllib.parse import parse_qs, unquote, urlsplit

from wikigrid import scenarios
from wikigrid.config import ToolkitConfig, build_toolkit, build_transport
from wikigrid.transport import LiveResponse

REPO_ROOT = Path(__file__).resolve().parent.parent

JAN_START = date(2016, 1, 1)
JAN_END = date(2016, 1, 31)
EVENT_DAY = date(2016, 1, 13)
WEEK_START = date(2016, 1, 1)
WEEK_END = date(2016, 1, 7)

MONTREAL_CATEGORY = "en:Category:Visitor attractions in Montreal"
SKYSCRAPER_CATEGORY = "en:Category:Skyscrapers over 350 meters"

# --- curated content tables -------------------------------------------------

REDIRECTS = {
    ("en", "Berlin"): [
        "Berlin, Germany",
        "Berlin (Germany)",
        "Berlin Germany",
        "Land Berlin",
        "German capital",
    ],
    ("de", "Berlin"): ["Berlin (Deutschland)", "Bundeshauptstadt", "Berlin, Deutschland"],
    ("es", "Berlín"): [],
    ("fr", "Berlin"): ["Berlin (Allemagne)"],
    ("it", "Berlino"): ["Berlino (Germania)"],
    ("ru", "Берлин"): [],
    ("en", "Miniatur Wunderland"): ["Miniatur Wunderland Hamburg", "Miniature Wonderland"],
    ("de", "Miniatur Wunderland"): ["Miniaturwunderland"],
    ("fr", "Miniatur Wunderland"): [],
    ("ru", "Миниатюр Вундерланд"): [],
    ("en", "Burj Khalifa"): ["Burj Dubai"],
    ("en", "CITIC Tower"): ["China Zun"],
    ("en", "Guangzhou CTF Finance Centre"): ["CTF Finance Centre"],
    ("en", "International Commerce Centre"): ["Union Square Phase 7"],
    ("en", "Lotte World Tower"): ["Lotte Jamsil Super Tower"],
    ("en", "One World Trade Center"): ["Freedom Tower", "1 World Trade Center"],
    ("en", "Ping An Finance Centre"): ["Ping An IFC"],
    ("en", "Shanghai Tower"): [],
    ("en", "Shanghai World Financial Center"): ["Shanghai WFC"],
    ("en", "Taipei 101"): ["Taipei Financial Center"],
    ("en", "Willis Tower"): ["Sears Tower"],
}

INBOUND = {
    ("en", "Berlin"): [
        "Germany",
        "Brandenburg",
        "Cold War",
        "East Germany",
        "West Berlin",
        "Potsdam",
        "Hamburg",
        "Munich",
        "Angela Merkel",
        "Bundestag",
    ],
}

OUTBOUND = {
    ("en", "Berlin"): [
        "Germany",
        "Brandenburg",
        "East Germany",
        "West Berlin",
        "Potsdam",
        "Spree",
        "Reichstag building",
        "Brandenburg Gate",
        "Museum Island",
        "Bundestag",
    ],
}

LANGLINKS = {
    ("en", "Berlin"): [
        ("de", "Berlin"),
        ("es", "Berlín"),
        ("fr", "Berlin"),
        ("it", "Berlino"),
        ("ru", "Берлин"),
    ],
    ("en", "Miniatur Wunderland"): [
        ("de", "Miniatur Wunderland"),
        ("fr", "Miniatur Wunderland"),
        ("ru", "Миниатюр Вундерланд"),
    ],
}

# (title, item id, image file or None, base daily views for January 2016)
MONTREAL_MEMBERS = [
    ("Biosphère", "Q810394", "Biosphère Montréal.jpg", 500),
    ("Gibeau Orange Julep", "Q3107748", None, 610),
    ("La Ronde (amusement park)", "Q1172122", "La Ronde amusement park.jpg", 860),
    ("McCord Museum", "Q4043", "McCord Museum.jpg", 420),
    ("Montreal Biodome", "Q1146217", "Montreal Biodome.jpg", 980),
    ("Montreal Botanical Garden", "Q729399", "Jardin botanique de Montréal.jpg", 1450),
    ("Montreal Science Centre", "Q3951946", "Montreal Science Centre.jpg", 740),
    ("Mount Royal", "Q392422", "Mount Royal from Parc Jean-Drapeau.jpg", 1600),
    ("Notre-Dame Basilica (Montreal)", "Q731731", "Notre-Dame Basilica Montreal.jpg", 1320),
    ("Old Port of Montreal", "Q2094073", "Old Port of Montreal at night.jpg", 1200),
    ("Place des Arts", "Q2019379", "Place des Arts.jpg", 350),
    ("Saint Joseph's Oratory", "Q1324203", "Saint Joseph's Oratory of Mount Royal.jpg", 1090),
]

# (title, item id, heights — two values means discarded as multi-value)
SKYSCRAPERS = [
    ("Abraj Al Bait", "Q402138", ["601", "530"]),
    ("Burj Khalifa", "Q12495", ["828"]),
    ("CITIC Tower", "Q1204602", ["528"]),
    ("Guangzhou CTF Finance Centre", "Q15175989", ["530"]),
    ("International Commerce Centre", "Q1064891", ["484"]),
    ("Lotte World Tower", "Q489896", ["554.5"]),
    ("One World Trade Center", "Q11245", ["541.3"]),
    ("Ping An Finance Centre", "Q14679433", ["599.1"]),
    ("Shanghai Tower", "Q208160", ["632"]),
    ("Shanghai World Financial Center", "Q199067", ["492"]),
    ("Taipei 101", "Q83125", ["508"]),
    ("Willis Tower", "Q48435", ["442.1"]),
]

CATEGORY_MEMBERS = {
    ("en", "Category:Visitor attractions in Montreal"): [t for t, _, _, _ in MONTREAL_MEMBERS],
    ("en", "Category:Skyscrapers over 350 meters"): [t for t, _, _ in SKYSCRAPERS],
}

SUBCATEGORIES = {
    ("en", "Category:Berlin"): [
        "Category:Buildings and structures in Berlin",
        "Category:Culture in Berlin",
        "Category:Districts of Berlin",
        "Category:History of Berlin",
        "Category:People from Berlin",
        "Category:Transport in Berlin",
    ],
}

COORDINATES = {("en", "Berlin"): (52.52, 13.405)}

REVISIONS = {
    ("en", "Berlin"): [
        "2016-01-02T08:00:00Z",
        "2016-01-02T12:30:00Z",
        "2016-01-02T22:15:00Z",
        "2016-01-05T16:45:00Z",
    ],
}

ITEMS = {("enwiki", "Berlin"): "Q64"}
ITEMS.update({("enwiki", title): qid for title, qid, _, _ in MONTREAL_MEMBERS})
ITEMS.update({("enwiki", title): qid for title, qid, _ in SKYSCRAPERS})

METRE = "http://www.wikidata.org/entity/Q11573"


def _statement(property_id: str, datatype: str, value_type: str, value) -> dict:
    return {
        "mainsnak": {
            "snaktype": "value",
            "property": property_id,
            "datatype": datatype,
            "datavalue": {"value": value, "type": value_type},
        },
        "type": "statement",
        "rank": "normal",
    }


def _item_value(qid: str) -> dict:
    return {"entity-type": "item", "numeric-id": int(qid[1:]), "id": qid}


BERLIN_CLAIMS = {
    "P6": [
        _statement("P6", "wikibase-item", "wikibase-entityid", _item_value("Q23744")),
        _statement("P6", "wikibase-item", "wikibase-entityid", _item_value("Q17547")),
    ],
    "P17": [_statement("P17", "wikibase-item", "wikibase-entityid", _item_value("Q183"))],
    "P18": [_statement("P18", "commonsMedia", "string", "Brandenburger Tor abends.jpg")],
    "P300": [_statement("P300", "external-id", "string", "DE-BE")],
    "P373": [_statement("P373", "string", "string", "Berlin")],
    "P571": [
        _statement(
            "P571",
            "time",
            "time",
            {
                "time": "+1237-01-01T00:00:00Z",
                "timezone": 0,
                "before": 0,
                "after": 0,
                "precision": 9,
                "calendarmodel": "http://www.wikidata.org/entity/Q1985727",
            },
        )
    ],
    "P625": [
        _statement(
            "P625",
            "globe-coordinate",
            "globecoordinate",
            {
                "latitude": 52.516666666667,
                "longitude": 13.383333333333,
                "altitude": None,
                "precision": 0.00027777777777778,
                "globe": "http://www.wikidata.org/entity/Q2",
            },
        )
    ],
    "P856": [_statement("P856", "url", "url", "https://www.berlin.de/")],
    "P1036": [
        {
            "mainsnak": {"snaktype": "somevalue", "property": "P1036", "datatype": "string"},
            "type": "statement",
            "rank": "normal",
        }
    ],
    "P1082": [_statement("P1082", "quantity", "quantity", {"amount": "+3520031", "unit": "1"})],
    "P1448": [
        _statement("P1448", "monolingualtext", "monolingualtext", {"text": "Berlin", "language": "de"})
    ],
}

CLAIMS = {"Q64": BERLIN_CLAIMS}
for title, qid, image, _base in MONTREAL_MEMBERS:
    if image is None:
        CLAIMS[qid] = {"P17": [_statement("P17", "wikibase-item", "wikibase-entityid", _item_value("Q16"))]}
    else:
        CLAIMS[qid] = {"P18": [_statement("P18", "commonsMedia", "string", image)]}
for title, qid, heights in SKYSCRAPERS:
    CLAIMS[qid] = {
        "P2048": [
            _statement("P2048", "quantity", "quantity", {"amount": f"+{h}", "unit": METRE})
            for h in heights
        ]
    }

LABELS = {
    "P17": {"en": "country"},
    "P18": {"en": "image"},
    "P300": {"en": "ISO 3166-2 code"},
    "P373": {"en": "Commons category"},
    "P571": {"en": "inception"},
    "P625": {"en": "coordinate location"},
    "P856": {"en": "official website"},
    "P1082": {"en": "population"},
    "P1448": {"en": "official name"},
    "P2048": {"en": "height"},
    "Q16": {"en": "Canada"},
    "Q183": {"en": "Germany"},
}


def _january_series(start_base: int, lift_base: int, pre_mod, post_mod) -> dict[date, int]:
    series = {}
    for day in range(1, 32):
        if day < 13:
            series[date(2016, 1, day)] = start_base + pre_mod(day)
        else:
            series[date(2016, 1, day)] = lift_base + post_mod(day)
    return series


VIEWS: dict[tuple[str, str], dict[date, int]] = {
    ("en", "Miniatur Wunderland"): _january_series(
        70, 380, lambda d: (d * 3) % 11, lambda d: (d * 17) % 61
    ),
    ("fr", "Miniatur Wunderland"): _january_series(
        40, 95, lambda d: d % 9, lambda d: (d * 13) % 29
    ),
    ("ru", "Миниатюр Вундерланд"): _january_series(
        25, 60, lambda d: d % 6, lambda d: (d * 7) % 17
    ),
}
# The German article peaked on January 8 (a long weekend), before the event.
VIEWS[("de", "Miniatur Wunderland")] = {
    date(2016, 1, day): (
        4200 if day == 8 else (800 + (day * 5) % 13 if day < 8 else (820 + (day * 3) % 7 if day < 13 else 1400 + (day * 11) % 37))
    )
    for day in range(1, 32)
}
VIEWS[("en", "Berlin")] = {
    date(2016, 1, day): views
    for day, views in zip(range(1, 8), [5020, 4890, 5100, 5230, 4990, 5600, 5410])
}
for index, (title, _qid, _image, base) in enumerate(MONTREAL_MEMBERS):
    VIEWS[("en", title)] = {
        date(2016, 1, day): base + ((day * 7 + index * 13) % 23) for day in range(1, 32)
    }


# --- emulated upstream ------------------------------------------------------

def _json_response(payload, status: int = 200) -> LiveResponse:
    return LiveResponse(status, json.dumps(payload, ensure_ascii=False), "application/json")


def _page_envelope(title: str, extra: dict) -> dict:
    # Stable across runs, unlike hash() under PYTHONHASHSEED randomization.
    page_id = zlib.crc32(title.encode("utf-8")) % 10_000_000
    page = {"pageid": page_id, "ns": 0, "title": title}
    page.update(extra)
    return {"batchcomplete": True, "query": {"pages": [page]}}


def _backlink_rows(titles: list[str], redirect: bool) -> list[dict]:
    rows = []
    for index, title in enumerate(titles):
        row = {"pageid": 100 + index, "ns": 0, "title": title}
        if redirect:
            row["redirect"] = ""
        rows.append(row)
    return rows


def _action_api(language: str, params: dict) -> LiveResponse:
    if params.get("list") == "backlinks":
        title = params["bltitle"].replace("_", " ")
        table = REDIRECTS if params.get("blfilterredir") == "redirects" else INBOUND
        titles = table.get((language, title))
        if titles is None:
            titles = []
        redirect = params.get("blfilterredir") == "redirects"
        return _json_response(
            {"batchcomplete": True, "query": {"backlinks": _backlink_rows(titles, redirect)}}
        )
    if params.get("list") == "categorymembers":
        title = params["cmtitle"].replace("_", " ")
        table = CATEGORY_MEMBERS if params.get("cmnamespace") == "0" else SUBCATEGORIES
        namespace = 0 if params.get("cmnamespace") == "0" else 14
        members = table.get((language, title), [])
        return _json_response(
            {
                "batchcomplete": True,
                "query": {
                    "categorymembers": [
                        {"pageid": 7000 + i, "ns": namespace, "title": member}
                        for i, member in enumerate(members)
                    ]
                },
            }
        )
    title = params.get("titles", "").replace("_", " ")
    if params.get("prop") == "langlinks":
        links = LANGLINKS.get((language, title), [])
        extra = {"langlinks": [{"lang": lang, "title": t} for lang, t in links]} if links else {}
        return _json_response(_page_envelope(title, extra))
    if params.get("prop") == "links":
        links = OUTBOUND.get((language, title), [])
        extra = {"links": [{"ns": 0, "title": t} for t in links]} if links else {}
        return _json_response(_page_envelope(title, extra))
    if params.get("prop") == "coordinates":
        coordinate = COORDINATES.get((language, title))
        extra = (
            {
                "coordinates": [
                    {
                        "lat": coordinate[0],
                        "lon": coordinate[1],
                        "primary": True,
                        "globe": "earth",
                    }
                ]
            }
            if coordinate
            else {}
        )
        return _json_response(_page_envelope(title, extra))
    if params.get("prop") == "revisions":
        start = params.get("rvstart", "")
        end = params.get("rvend", "9999")
        stamps = [s for s in REVISIONS.get((language, title), []) if start <= s <= end]
        extra = {"revisions": [{"timestamp": s} for s in stamps]} if stamps else {}
        return _json_response(_page_envelope(title, extra))
    raise AssertionError(f"emulator cannot answer action query {params!r}")


def _wikidata_api(params: dict) -> LiveResponse:
    if "sites" in params:
        title = params["titles"].replace("_", " ")
        qid = ITEMS.get((params["sites"], title))
        if qid is None:
            return _json_response(
                {"entities": {"-1": {"site": params["sites"], "title": title, "missing": ""}}, "success": 1}
            )
        return _json_response({"entities": {qid: {"type": "item", "id": qid}}, "success": 1})
    ids = params["ids"].split("|")
    if params.get("props") == "claims":
        entities = {
            entity_id: {"type": "item", "id": entity_id, "claims": CLAIMS.get(entity_id, {})}
            for entity_id in ids
        }
        return _json_response({"entities": entities, "success": 1})
    if params.get("props") == "labels":
        languages = params.get("languages", "en").split("|")
        entities = {}
        for entity_id in ids:
            available = LABELS.get(entity_id, {})
            labels = {
                lang: {"language": lang, "value": available[lang]}
                for lang in languages
                if lang in available
            }
            entities[entity_id] = {
                "type": "property" if entity_id.startswith("P") else "item",
                "id": entity_id,
                "labels": labels,
            }
        return _json_response({"entities": entities, "success": 1})
    raise AssertionError(f"emulator cannot answer wikidata query {params!r}")


def _pageviews_api(path: str) -> LiveResponse:
    segments = path.split("/")
    offset = segments.index("per-article")
    project, access, agent, raw_title, _daily, start_raw, end_raw = segments[offset + 1 : offset + 8]
    language = project.split(".")[0]
    title = unquote(raw_title).replace("_", " ")
    series = VIEWS.get((language, title))
    if series is None:
        return _json_response(
            {"type": "about:blank", "title": "Not found.", "method": "get", "status": 404},
            status=404,
        )
    start = date(int(start_raw[:4]), int(start_raw[4:6]), int(start_raw[6:8]))
    end = date(int(end_raw[:4]), int(end_raw[4:6]), int(end_raw[6:8]))
    items = []
    day = start
    while day <= end:
        if day in series:
            items.append(
                {
                    "project": project,
                    "article": unquote(raw_title),
                    "granularity": "daily",
                    "timestamp": day.strftime("%Y%m%d") + "00",
                    "access": access,
                    "agent": agent,
                    "views": series[day],
                }
            )
        day += timedelta(days=1)
    return _json_response({"items": items})


def emulated_fetch(spec, headers, timeout) -> LiveResponse:
    parts = urlsplit(spec.url)
    params = {key: values[0] for key, values in parse_qs(parts.query).items()}
    host = parts.hostname or ""
    if host.endswith(".wikipedia.org"):
        return _action_api(host.split(".")[0], params)
    if host == "www.wikidata.org":
        return _wikidata_api(params)
    if host == "wikimedia.org":
        return _pageviews_api(parts.path)
    raise AssertionError(f"emulator cannot answer {spec.url}")


# --- recording run ----------------------------------------------------------

def main() -> int:
    archive_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else REPO_ROOT / "fixtures"
    if archive_dir.exists():
        shutil.rmtree(archive_dir)
    config = ToolkitConfig(fixtures=str(archive_dir), mode="record", rate_limit=100_000)
    transport = build_transport(config, live_fetch=emulated_fetch, sleep=lambda _s: None)
    toolkit = build_toolkit(config, transport)

    tables = {
        "synonyms en:Berlin": toolkit.wiki_synonyms("en:Berlin"),
        "translate en:Berlin": toolkit.wiki_translate("en:Berlin"),
        "expand en:Berlin": toolkit.wiki_expand("en:Berlin"),
        "inbound en:Berlin": toolkit.wiki_inbound_links("en:Berlin"),
        "outbound en:Berlin": toolkit.wiki_outbound_links("en:Berlin"),
        "mutual en:Berlin": toolkit.wiki_mutual_links("en:Berlin"),
        "geo en:Berlin": toolkit.wiki_geocoordinates("en:Berlin"),
        "facts en:Berlin": toolkit.wiki_data_facts("en:Berlin"),
        "subcategories en:Category:Berlin": toolkit.wiki_subcategories("en:Category:Berlin"),
        "members montreal": toolkit.wiki_category_members(MONTREAL_CATEGORY),
        "pageviews en:Berlin week": toolkit.wiki_pageviews("en:Berlin", WEEK_START, WEEK_END),
        "pageedits en:Berlin week": toolkit.wiki_page_edits("en:Berlin", WEEK_START, WEEK_END),
        "translate en:Miniatur Wunderland": toolkit.wiki_translate("en:Miniatur Wunderland"),
        "expand en:Miniatur Wunderland": toolkit.wiki_expand("en:Miniatur Wunderland"),
        "pageviews miniatur january": toolkit.wiki_pageviews(
            "en:Miniatur Wunderland", JAN_START, JAN_END
        ),
        "panel montreal": scenarios.category_panel(
            toolkit, MONTREAL_CATEGORY, JAN_START, JAN_END, 10
        ),
        "ads skyscrapers": scenarios.search_ads(
            toolkit,
            SKYSCRAPER_CATEGORY,
            "height",
            "hotel",
            "{title}: {fact} of pure wonder",
            "Visit {title}. Famous for its {fact}.",
        ),
        "campaign miniatur": scenarios.campaign(
            toolkit, "en:Miniatur Wunderland", JAN_START, JAN_END, EVENT_DAY
        ),
    }

    for label, table in tables.items():
        print(f"== {label} ({table.shape[0]}x{table.n_cols})")
        for row in table.rows:
            print("   " + " | ".join(row))
    count = len(list(archive_dir.glob("*.json")))
    print(f"\nwrote {count} fixtures under {archive_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
