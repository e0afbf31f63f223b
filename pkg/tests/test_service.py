import pytest
from fastapi.testclient import TestClient

from tests.conftest import FIXTURES_DIR, replay_config
from wikigrid.service import create_app

BERLIN_SYNONYM_ROWS = [
    ["en:Berlin, Germany"],
    ["en:Berlin (Germany)"],
    ["en:Berlin Germany"],
    ["en:Land Berlin"],
    ["en:German capital"],
]


@pytest.fixture(scope="module")
def client():
    app = create_app(replay_config(FIXTURES_DIR))
    with TestClient(app) as test_client:
        yield test_client


def test_healthz(client):
    body = client.get("/healthz").json()
    assert body["status"] == "ok"
    assert body["mode"] == "replay"


def test_function_listing(client):
    names = client.get("/v1/functions").json()["functions"]
    assert "synonyms" in names and "pageedits" in names and len(names) == 12


def test_synonyms_endpoint(client):
    response = client.post("/v1/functions/synonyms", json={"title": "en:Berlin"})
    assert response.status_code == 200
    body = response.json()
    assert body["rows"] == BERLIN_SYNONYM_ROWS
    assert body["n_cols"] == 1


def test_translate_with_language_filter(client):
    response = client.post("/v1/functions/translate", json={"title": "en:Berlin", "langs": ["de"]})
    assert response.json()["rows"] == [["de:Berlin"]]


def test_facts_endpoint_contains_worked_example(client):
    rows = client.post("/v1/functions/facts", json={"title": "en:Berlin"}).json()["rows"]
    assert ["ISO 3166-2 code", "DE-BE"] in rows


def test_pageviews_endpoint_with_dates(client):
    response = client.post(
        "/v1/functions/pageviews",
        json={"title": "en:Berlin", "start": "2016-01-01", "end": "2016-01-07"},
    )
    rows = response.json()["rows"]
    assert len(rows) == 7 and rows[0] == ["2016-01-01", "5020"]


def test_unknown_function_is_404(client):
    response = client.post("/v1/functions/nonsense", json={"title": "en:Berlin"})
    assert response.status_code == 404
    assert response.json()["error"]["kind"] == "NotFound"


def test_bad_input_maps_to_400(client):
    response = client.post("/v1/functions/synonyms", json={"title": "Berlin"})
    assert response.status_code == 400
    body = response.json()["error"]
    assert body["kind"] == "BadInput" and "language:Title" in body["detail"]


def test_replay_miss_maps_to_404(client):
    response = client.post("/v1/functions/synonyms", json={"title": "en:No Such Fixture"})
    assert response.status_code == 404
    assert response.json()["error"]["kind"] == "NotFound"


def test_validation_error_is_422(client):
    response = client.post("/v1/functions/synonyms", json={})
    assert response.status_code == 422


def test_grid_eval_endpoint(client):
    tsv = "en:Berlin\t=WIKIGEOCOORDINATES(A1)\n"
    response = client.post("/v1/grid/eval", json={"tsv": tsv})
    assert response.status_code == 200
    rows = response.json()["rows"]
    assert rows == [["en:Berlin", "52.52", "13.405"]]


def test_grid_eval_respects_max_cells(client):
    tsv = "en:Berlin\t=WIKISYNONYMS(A1)\n"
    response = client.post("/v1/grid/eval", json={"tsv": tsv, "max_cells": 3})
    assert response.status_code == 400


def test_panel_endpoint(client):
    response = client.post(
        "/v1/scenarios/category-panel",
        json={
            "category": "en:Category:Visitor attractions in Montreal",
            "start": "2016-01-01",
            "end": "2016-01-31",
            "top_n": 10,
        },
    )
    rows = response.json()["rows"]
    assert len(rows) == 10
    assert rows[0][1] == "en:Mount Royal"


def test_ads_endpoint_with_default_templates(client):
    response = client.post(
        "/v1/scenarios/search-ads",
        json={
            "category": "en:Category:Skyscrapers over 350 meters",
            "fact": "height",
            "suffix": "hotel",
        },
    )
    rows = response.json()["rows"]
    assert len(rows) == 11
    assert rows[0][0] == "en:Burj Khalifa"


def test_campaign_endpoint(client):
    response = client.post(
        "/v1/scenarios/campaign",
        json={
            "article": "en:Miniatur Wunderland",
            "start": "2016-01-01",
            "end": "2016-01-31",
            "event": "2016-01-13",
        },
    )
    rows = response.json()["rows"]
    assert [row[0] for row in rows] == ["en", "de", "fr", "ru"]


def test_responses_are_byte_deterministic(client):
    payload = {"title": "en:Berlin"}
    first = client.post("/v1/functions/expand", json=payload).content
    second = client.post("/v1/functions/expand", json=payload).content
    assert first == second
