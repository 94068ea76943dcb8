import json
import threading

import pytest
from fastapi.testclient import TestClient

from sparcs import canon
from sparcs.hmm import DiscreteHmm, forward_loglik
from sparcs.scenario import load_scenario
from sparcs.service import create_app, seed_store
from sparcs.store import DocumentStore
from sparcs.workflow import parse_workflow, serialize_workflow


@pytest.fixture()
def client(tmp_path):
    app = create_app(tmp_path / "store")
    seed_store(DocumentStore(tmp_path / "store"), ids=["natalia_tv_feeding"])
    with TestClient(app) as c:
        yield c


def workflow_doc():
    return canon.loads(serialize_workflow(load_scenario("jose_feeding").workflow_robot))


def test_put_get_roundtrip_byte_identical(client):
    doc = workflow_doc()
    r = client.put("/v1/workflows/jose", json=doc)
    assert r.status_code == 201
    assert r.headers["etag"] == "1"
    got = client.get("/v1/workflows/jose")
    assert got.status_code == 200
    # oracle: local canonical serialization of the same document
    local = serialize_workflow(parse_workflow(doc)).encode("utf-8")
    assert got.content == local
    assert got.headers["content-type"] == "application/json; charset=utf-8"


def test_put_invalid_workflow_gives_diagnostics(client):
    bad = {
        "target": "robot",
        "root": {
            "id": "a", "name": "A", "level": "Activity",
            "children": [{"id": "t", "name": "T", "level": "Task"}],
        },
    }
    r = client.put("/v1/workflows/bad", json=bad)
    assert r.status_code == 400
    rules = [d["rule"] for d in r.json()["diagnostics"]]
    assert "LevelChain" in rules
    assert not client.get("/v1/workflows/bad").status_code == 200


def test_version_conflict_sequential(client):
    doc = workflow_doc()
    client.put("/v1/workflows/w", json=doc)
    ok = client.put("/v1/workflows/w", json=doc, headers={"If-Match": "1"})
    stale = client.put("/v1/workflows/w", json=doc, headers={"If-Match": "1"})
    assert ok.status_code == 200
    assert stale.status_code == 409


def test_version_conflict_concurrent(client):
    doc = workflow_doc()
    client.put("/v1/workflows/race", json=doc)
    results = []

    def attempt():
        r = client.put("/v1/workflows/race", json=doc, headers={"If-Match": "1"})
        results.append(r.status_code)

    threads = [threading.Thread(target=attempt) for _ in range(2)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert sorted(results) == [200, 409]


def test_update_without_if_match_conflicts(client):
    doc = workflow_doc()
    client.put("/v1/workflows/w2", json=doc)
    r = client.put("/v1/workflows/w2", json=doc)
    assert r.status_code == 409


def test_delete_with_version(client):
    doc = workflow_doc()
    client.put("/v1/workflows/gone", json=doc)
    assert client.delete("/v1/workflows/gone", headers={"If-Match": "2"}).status_code == 409
    assert client.delete("/v1/workflows/gone", headers={"If-Match": "1"}).status_code == 204
    assert client.get("/v1/workflows/gone").status_code == 404


def test_list_collection(client):
    assert client.get("/v1/scenarios").json() == [{"id": "natalia_tv_feeding", "version": 1}]
    assert client.get("/v1/nonsense").status_code == 404


def test_blocks_validation(client):
    scenario = load_scenario("natalia_tv_feeding")
    from sparcs.blocks import serialize_building_blocks

    doc = canon.loads(serialize_building_blocks(scenario.blocks))
    assert client.put("/v1/blocks/nat", json=doc).status_code == 201
    doc["blocks"][0]["entries"]["Active ROM Neck Flexion"] = {"value": 999, "unit": "deg"}
    r = client.put("/v1/blocks/nat", json=doc, headers={"If-Match": "1"})
    assert r.status_code == 400
    assert r.json()["diagnostics"]


def test_session_lifecycle_accounting(client):
    r = client.post("/v1/sessions", json={"scenario_id": "natalia_tv_feeding"})
    assert r.status_code == 201
    session = r.json()
    sid = session["session_id"]
    meal_len = len(session["items"]) * session["bites_per_item"]
    assert meal_len == 12
    # play a scripted meal: alternate between predicted item and a fixed one
    for k in range(meal_len):
        current = client.get(f"/v1/sessions/{sid}").json()
        assert sum(current["remaining"].values()) + len(current["history"]) == meal_len
        pick = current["prediction_next"] if k % 2 == 0 else max(
            (i for i, c in current["remaining"].items() if c > 0)
        )
        r = client.post(f"/v1/sessions/{sid}/choice", json={"item": pick})
        assert r.status_code == 200
        matches = sum(
            1 for h in client.get(f"/v1/sessions/{sid}").json()["history"]
            if h["prediction"] == h["choice"]
        )
        assert r.json()["accuracy_so_far"] == pytest.approx(matches / (k + 1))
    final = client.get(f"/v1/sessions/{sid}").json()
    assert final["status"] == "Complete"
    assert sum(final["remaining"].values()) == 0
    assert len(final["history"]) == meal_len


def test_session_predictions_recorded_before_choices(client):
    sid = client.post("/v1/sessions", json={"scenario_id": "natalia_tv_feeding"}).json()["session_id"]
    predicted = client.get(f"/v1/sessions/{sid}").json()["prediction_next"]
    r = client.post(f"/v1/sessions/{sid}/choice", json={"item": "grape"})
    history = client.get(f"/v1/sessions/{sid}").json()["history"]
    assert history[0]["prediction"] == predicted
    assert history[0]["choice"] == "grape"
    assert history[0]["position"] == 0


def test_session_exhausted_item_conflicts(client):
    sid = client.post("/v1/sessions", json={"scenario_id": "natalia_tv_feeding"}).json()["session_id"]
    for _ in range(3):
        assert client.post(f"/v1/sessions/{sid}/choice", json={"item": "kiwi"}).status_code == 200
    assert client.post(f"/v1/sessions/{sid}/choice", json={"item": "kiwi"}).status_code == 409
    assert client.post(f"/v1/sessions/{sid}/choice", json={"item": "nope"}).status_code == 409


def test_session_unknown_404(client):
    assert client.get("/v1/sessions/sess-9999").status_code == 404
    assert client.post("/v1/sessions/sess-9999/choice", json={"item": "kiwi"}).status_code == 404
    assert client.post("/v1/sessions", json={"scenario_id": "ghost"}).status_code == 404


def test_completed_meal_updates_scenario_model(client, tmp_path):
    store = DocumentStore(tmp_path / "store")
    sid = client.post("/v1/sessions", json={"scenario_id": "natalia_tv_feeding"}).json()["session_id"]
    before_raw, v1 = store.get("models", "natalia_tv_feeding")
    before = DiscreteHmm.from_json(canon.loads(before_raw))
    sequence = []
    for _ in range(12):
        current = client.get(f"/v1/sessions/{sid}").json()
        pick = current["prediction_next"]
        sequence.append(current["items"].index(pick))
        client.post(f"/v1/sessions/{sid}/choice", json={"item": pick})
    after_raw, v2 = store.get("models", "natalia_tv_feeding")
    after = DiscreteHmm.from_json(canon.loads(after_raw))
    assert v2 == v1 + 1
    # the finished sequence is at least as likely under the updated model
    assert forward_loglik(after, sequence) >= forward_loglik(before, sequence) - 1e-9
    # a fresh session starts from the updated model
    s2 = client.post("/v1/sessions", json={"scenario_id": "natalia_tv_feeding"}).json()
    assert s2["session_id"] != sid


def test_scenario_document_validation(client):
    r = client.put("/v1/scenarios/broken", json={"scenario_id": "broken"})
    assert r.status_code == 400
    assert any(d["rule"] == "SchemaError" for d in r.json()["diagnostics"])
