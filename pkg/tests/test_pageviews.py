from datetime import date

import pytest

from tests.conftest import forbid_live_fetch, write_fixture
from wikigrid.core import ErrorKind, ToolkitError, parse_qualified
from wikigrid.pageviews import PageviewsClient, default_window
from wikigrid.transport import FixtureArchive, Transport


def client_for(root, **kwargs):
    transport = Transport(mode="replay", archive=FixtureArchive(root), live_fetch=forbid_live_fetch)
    return PageviewsClient(transport, **kwargs), transport


def pv_fixture(root, client, article, start, end, items, status=200):
    url = client._spec(parse_qualified(article), start, end).url
    payload = {"items": items} if status == 200 else {"status": status, "title": "Not found."}
    return write_fixture(root, url, payload, status)


def item(day, views, title="Synthetic_Article", project="en.wikipedia"):
    return {
        "project": project,
        "article": title,
        "granularity": "daily",
        "timestamp": day.strftime("%Y%m%d") + "00",
        "access": "all-access",
        "agent": "user",
        "views": views,
    }


WINDOW = (date(2016, 1, 1), date(2016, 1, 3))


def test_gaps_are_zero_filled(tmp_path):
    client, _ = client_for(tmp_path)
    items = [item(date(2016, 1, 1), 5), item(date(2016, 1, 3), 7)]
    pv_fixture(tmp_path, client, "en:Synthetic Article", *WINDOW, items)
    series = client.daily_views(parse_qualified("en:Synthetic Article"), *WINDOW)
    assert series == [(date(2016, 1, 1), 5), (date(2016, 1, 2), 0), (date(2016, 1, 3), 7)]


def test_total_views_is_the_sum(tmp_path):
    client, _ = client_for(tmp_path)
    items = [item(date(2016, 1, 1), 5), item(date(2016, 1, 3), 7)]
    pv_fixture(tmp_path, client, "en:Synthetic Article", *WINDOW, items)
    assert client.total_views(parse_qualified("en:Synthetic Article"), *WINDOW) == 12


def test_single_day_window(tmp_path):
    client, _ = client_for(tmp_path)
    day = date(2016, 1, 5)
    pv_fixture(tmp_path, client, "en:Synthetic Article", day, day, [item(day, 9)])
    series = client.daily_views(parse_qualified("en:Synthetic Article"), day, day)
    assert series == [(day, 9)]


def test_reversed_window_rejected(tmp_path):
    client, _ = client_for(tmp_path)
    with pytest.raises(ToolkitError) as err:
        client.daily_views(parse_qualified("en:X"), date(2016, 1, 2), date(2016, 1, 1))
    assert err.value.kind is ErrorKind.BAD_INPUT


def test_window_before_dataset_rejected(tmp_path):
    client, _ = client_for(tmp_path)
    with pytest.raises(ToolkitError) as err:
        client.daily_views(parse_qualified("en:X"), date(2015, 6, 1), date(2015, 7, 5))
    assert "2015-07-01" in err.value.detail


def test_upstream_404_becomes_not_found(tmp_path):
    client, _ = client_for(tmp_path)
    pv_fixture(tmp_path, client, "en:Unseen Article", *WINDOW, [], status=404)
    with pytest.raises(ToolkitError) as err:
        client.daily_views(parse_qualified("en:Unseen Article"), *WINDOW)
    assert err.value.kind is ErrorKind.NOT_FOUND


def test_negative_counts_are_parse_failures(tmp_path):
    client, _ = client_for(tmp_path)
    pv_fixture(tmp_path, client, "en:Synthetic Article", *WINDOW, [item(date(2016, 1, 1), -3)])
    with pytest.raises(ToolkitError) as err:
        client.daily_views(parse_qualified("en:Synthetic Article"), *WINDOW)
    assert err.value.kind is ErrorKind.PARSE_FAILURE


def test_bot_traffic_excluded_by_default(tmp_path):
    client, _ = client_for(tmp_path)
    url = client._spec(parse_qualified("en:Berlin"), *WINDOW).url
    assert "/all-access/user/" in url


def test_agent_and_access_are_overridable(tmp_path):
    client, _ = client_for(tmp_path, access="desktop", agent="all-agents")
    url = client._spec(parse_qualified("en:Berlin"), *WINDOW).url
    assert "/desktop/all-agents/" in url


def test_title_is_path_encoded(tmp_path):
    client, _ = client_for(tmp_path)
    url = client._spec(parse_qualified("en:GNU/Linux"), *WINDOW).url
    assert "GNU%2FLinux" in url
    cyrillic = client._spec(parse_qualified("ru:Миниатюр Вундерланд"), *WINDOW).url
    assert "%D0%9C" in cyrillic and " " not in cyrillic


def test_series_is_dense_over_any_window(tmp_path):
    client, _ = client_for(tmp_path)
    start, end = date(2016, 2, 1), date(2016, 2, 29)
    pv_fixture(tmp_path, client, "en:Synthetic Article", start, end, [item(date(2016, 2, 14), 3)])
    series = client.daily_views(parse_qualified("en:Synthetic Article"), start, end)
    assert len(series) == 29
    assert [day for day, _ in series] == sorted(day for day, _ in series)
    assert all(count >= 0 for _, count in series)


def test_default_window_is_thirty_days_ending_yesterday():
    start, end = default_window(today=date(2016, 2, 1))
    assert end == date(2016, 1, 31)
    assert start == date(2016, 1, 2)
    assert (end - start).days + 1 == 30
