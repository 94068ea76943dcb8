"""Meal-session service: run the live prediction loop against an
in-process instance of the HTTP app (no network needed)."""

import tempfile

from fastapi.testclient import TestClient

from sparcs.service import create_app, seed_store
from sparcs.store import DocumentStore

with tempfile.TemporaryDirectory() as root:
    app = create_app(root)
    seed_store(DocumentStore(root), ids=["natalia_tv_feeding"])
    client = TestClient(app)

    session = client.post("/v1/sessions", json={"scenario_id": "natalia_tv_feeding"}).json()
    sid = session["session_id"]
    print("session", sid, "| first prediction:", session["prediction_next"])

    # the diner follows the model's advice for a whole meal
    prediction = session["prediction_next"]
    while True:
        reply = client.post(f"/v1/sessions/{sid}/choice", json={"item": prediction}).json()
        print(f"  ate {prediction:<7} accuracy {reply['accuracy_so_far']:.2f} "
              f"next -> {reply['prediction_next']}")
        if reply["status"] == "Complete":
            break
        prediction = reply["prediction_next"]

    final = client.get(f"/v1/sessions/{sid}").json()
    print("meal complete | accuracy", final["accuracy_so_far"])
    print("the completed meal updated the scenario model "
          "(version", client.get("/v1/scenarios").json()[0]["version"], "of the scenario doc unchanged)")
