from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from membuoy import generate_scenario
from membuoy.service import create_app


@pytest.fixture()
def client() -> TestClient:
    return TestClient(create_app())


@pytest.fixture()
def solo_doc() -> dict:
    return generate_scenario("solo-task", 1, {}).to_obj()


def make_session(client, doc, name="s1") -> str:
    response = client.post("/sessions", json={"scenario": doc, "name": name})
    assert response.status_code == 200, response.text
    return response.json()["name"]


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"


def test_session_lifecycle(client, solo_doc):
    name = make_session(client, solo_doc)
    info = client.get(f"/sessions/{name}").json()
    assert info["events_total"] == 10
    assert info["events_applied"] == 0
    assert client.get("/sessions").json()["sessions"] == [name]
    assert client.delete(f"/sessions/{name}").json() == {"deleted": name}
    assert client.get(f"/sessions/{name}").status_code == 404


def test_duplicate_session_conflict(client, solo_doc):
    make_session(client, solo_doc)
    response = client.post("/sessions", json={"scenario": solo_doc, "name": "s1"})
    assert response.status_code == 409


def test_run_produces_table_pairs(client, solo_doc):
    name = make_session(client, solo_doc)
    body = client.post(f"/sessions/{name}/run", json={"watch": ["task1"]}).json()
    assert body["applied"] == 10
    assert body["complete"] is True
    assert len(body["rows"]) == 10
    for row in body["rows"]:
        assert set(row["before"]) == {"task1"}
        assert set(row["after"]) == {"task1"}
    first = body["rows"][0]
    assert first["before"]["task1"]["global"]["user1"] == 0.0
    assert first["after"]["task1"]["global"]["user1"] == pytest.approx(0.45)
    assert body["final"]["things"]["task1"]["group"] == pytest.approx(0.9418428989701548)


def test_run_in_two_stages(client, solo_doc):
    name = make_session(client, solo_doc)
    part = client.post(f"/sessions/{name}/run", json={"upto": 4}).json()
    assert part["applied"] == 4 and part["complete"] is False and part["final"] is None
    rest = client.post(f"/sessions/{name}/run", json={}).json()
    assert rest["applied"] == 10 and rest["complete"] is True
    assert [r["index"] for r in rest["rows"]] == list(range(4, 10))


def test_run_with_stale_upto_is_a_noop(client, solo_doc):
    name = make_session(client, solo_doc)
    client.post(f"/sessions/{name}/run", json={"upto": 6})
    again = client.post(f"/sessions/{name}/run", json={"upto": 3}).json()
    assert again["applied"] == 6
    assert again["rows"] == []
    info = client.get(f"/sessions/{name}").json()
    assert info["events_applied"] == 6


def test_read_at_explicit_time(client, solo_doc):
    name = make_session(client, solo_doc)
    client.post(f"/sessions/{name}/run", json={})
    at_horizon = client.get(
        f"/sessions/{name}/mb/global", params={"resource": "task1", "user": "user1"}
    ).json()
    later = client.get(
        f"/sessions/{name}/mb/global",
        params={"resource": "task1", "user": "user1", "at": "2018-07-20T09:00:00Z"},
    ).json()
    assert later["at"] == "2018-07-20T09:00:00Z"
    assert later["value"] < at_horizon["value"]  # more decay at the later instant


def test_mb_reads_and_report(client, solo_doc):
    name = make_session(client, solo_doc)
    client.post(f"/sessions/{name}/run", json={})
    value = client.get(
        f"/sessions/{name}/mb/global", params={"resource": "task1", "user": "user1"}
    ).json()
    assert value["value"] == pytest.approx(0.9418428989701548)
    group = client.get(f"/sessions/{name}/mb/group", params={"resource": "task1"}).json()
    assert group["value"] == pytest.approx(value["value"])
    report = client.get(f"/sessions/{name}/report/task1").json()
    assert report["values"]["global"]["user1"] == pytest.approx(value["value"])
    missing = client.get(
        f"/sessions/{name}/mb/global", params={"resource": "ghost", "user": "user1"}
    )
    assert missing.status_code == 404


def test_local_read_and_listing(client):
    doc = generate_scenario("rome-trip", 1, {}).to_obj()
    name = make_session(client, doc, "rome")
    client.post(f"/sessions/{name}/run", json={})
    value = client.get(
        f"/sessions/{name}/mb/local",
        params={"resource": "hotel-roma", "user": "user1", "context": "ctx-rome"},
    ).json()
    assert 0.0 < value["value"] <= 1.0
    listing = client.get(
        f"/sessions/{name}/contexts/ctx-rome/listing", params={"user": "user1"}
    ).json()
    assert len(listing["entries"]) == 8
    mbs = [e["mb"] for e in listing["entries"]]
    assert mbs == sorted(mbs, reverse=True)


def test_search_json_and_csv(client, solo_doc):
    name = make_session(client, solo_doc)
    client.post(f"/sessions/{name}/run", json={})
    hits = client.get(
        f"/sessions/{name}/search",
        params={"keyword": "report", "user": "user1", "threshold": 0.5},
    ).json()
    assert hits["hits"][0]["id"] == "task1"
    assert hits["coverage"] == 1.0
    csv_text = client.get(
        f"/sessions/{name}/search",
        params={"keyword": "report", "user": "user1", "threshold": 0.99, "format": "csv"},
    ).text
    assert csv_text.startswith("rank,id,mb\n")
    assert "# coverage=0.000000 hidden=1" in csv_text
    bad = client.get(
        f"/sessions/{name}/search",
        params={"keyword": "report", "user": "user1", "threshold": 2.0},
    )
    assert bad.status_code == 422


def test_snapshot_round_trip_endpoint(client, solo_doc):
    name = make_session(client, solo_doc)
    client.post(f"/sessions/{name}/run", json={"upto": 5})
    snap = client.get(f"/sessions/{name}/snapshot").json()
    assert snap["applied_events"] == 5
    restored = client.put("/sessions/copy/snapshot", json=snap)
    assert restored.status_code == 200
    copy_snap = client.get("/sessions/copy/snapshot").json()
    original = {k: v for k, v in snap.items() if k != "scenario_name"}
    duplicate = {k: v for k, v in copy_snap.items() if k != "scenario_name"}
    assert duplicate == original


def test_snapshot_missing_section_rejected(client, solo_doc):
    name = make_session(client, solo_doc)
    snap = client.get(f"/sessions/{name}/snapshot").json()
    del snap["group"]
    response = client.put("/sessions/other/snapshot", json=snap)
    assert response.status_code == 422
    assert "group" in response.json()["detail"]["message"]


def test_timeline_endpoint(client, solo_doc):
    body = {"scenario": solo_doc, "resource": "task1", "user": "user1", "step": "1d"}
    series = client.post("/timeline", json=body).json()["series"]
    assert len(series) == 11
    assert series[0][1] == pytest.approx(0.45)
    csv_text = client.post("/timeline", params={"format": "csv"}, json=body).text
    assert csv_text.startswith("timestamp,mb\n")
    assert len(csv_text.strip().split("\n")) == 12


def test_generate_and_validate_endpoints(client):
    doc = client.post(
        "/scenarios/generate", json={"template": "group-task", "seed": 4, "params": {"days": 3}}
    ).json()
    assert doc["name"] == "group-task"
    verdict = client.post("/scenarios/validate", json={"scenario": doc}).json()
    assert verdict == {"ok": True, "violations": []}
    bad = client.post("/scenarios/validate", json={"scenario": {"name": "x"}})
    assert bad.status_code == 422


def test_scenario_parse_errors_are_structured(client):
    bad = dict(generate_scenario("solo-task", 1, {}).to_obj())
    bad["events"] = [
        {"t": "2018-07-02T09:00:00Z", "actor": "user1", "kind": "view", "target": "ghost"}
    ]
    response = client.post("/sessions", json={"scenario": bad})
    assert response.status_code == 422
    detail = response.json()["detail"]
    assert detail["code"] == "UnknownReference"
    assert "ghost" in detail["message"]
