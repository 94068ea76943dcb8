"""Single-tenant JSON-over-HTTP document service plus live meal sessions.

CRUD for scenarios, workflows, and building blocks with optimistic
versioning (ETag / If-Match carry the version integer); validation errors
come back as a 400 with a diagnostics list. Meal sessions run the online
preference loop: the service records its prediction before each choice,
tracks accuracy, and folds completed meals back into the scenario's model.
"""

from __future__ import annotations

import json
import threading
from collections import defaultdict
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from . import canon
from .blocks import parse_building_blocks, serialize_building_blocks
from .errors import SparcsError
from .hmm import (
    DiscreteHmm,
    MealSpec,
    online_update,
    predict_next,
    simulate_sequences,
    train_preference_model,
)
from .scenario import load_scenario, list_scenarios, scenario_root
from .store import DocumentStore, MissingDocument, VersionConflict
from .workflow import decode_workflow, serialize_workflow, validate_hierarchy
from .conditions import ParseError

MEDIA = "application/json; charset=utf-8"

DOC_COLLECTIONS = ("scenarios", "workflows", "blocks")


def _diag(rule: str, message: str, node_id: str = "") -> dict:
    return {"rule": rule, "node_id": node_id, "message": message}


def _canonicalize(collection: str, body: dict) -> tuple:
    """(canonical bytes, diagnostics). Empty diagnostics means valid."""
    if collection == "workflows":
        try:
            wf = decode_workflow(body)
        except ParseError as exc:
            return b"", [_diag("ParseError", str(exc))]
        diags = validate_hierarchy(wf)
        if diags:
            return b"", [d.to_json() for d in diags]
        return serialize_workflow(wf).encode("utf-8"), []
    if collection == "blocks":
        try:
            bbs = parse_building_blocks(body)
        except SparcsError as exc:
            return b"", [_diag(type(exc).__name__, str(exc))]
        return serialize_building_blocks(bbs).encode("utf-8"), []
    # scenarios: composite bundle
    diags = []
    out = {}
    if "scenario_id" not in body:
        diags.append(_diag("SchemaError", "scenario document needs scenario_id"))
    out["scenario_id"] = body.get("scenario_id", "")
    if "blocks" in body:
        try:
            out["blocks"] = canon.loads(serialize_building_blocks(parse_building_blocks(body["blocks"])))
        except SparcsError as exc:
            diags.append(_diag(type(exc).__name__, f"blocks: {exc}"))
    else:
        diags.append(_diag("SchemaError", "scenario document needs blocks"))
    workflows = {}
    for key, doc in (body.get("workflows") or {}).items():
        try:
            wf = decode_workflow(doc)
        except ParseError as exc:
            diags.append(_diag("ParseError", f"workflows.{key}: {exc}"))
            continue
        wf_diags = validate_hierarchy(wf)
        if wf_diags:
            diags.extend(
                {**d.to_json(), "message": f"workflows.{key}: {d.message}"} for d in wf_diags
            )
        else:
            workflows[key] = canon.loads(serialize_workflow(wf))
    out["workflows"] = workflows
    out["config"] = body.get("config", {})
    if diags:
        return b"", diags
    return canon.dump_bytes(out), []


class SessionEngine:
    """Meal-session state transitions on top of the store."""

    def __init__(self, store: DocumentStore):
        self.store = store
        self._locks = defaultdict(threading.Lock)
        self._registry = threading.Lock()
        self._counter_lock = threading.Lock()

    def _lock(self, session_id: str) -> threading.Lock:
        with self._registry:
            return self._locks[session_id]

    # -- scenario material -------------------------------------------------

    def _scenario_config(self, scenario_id: str) -> dict:
        if self.store.exists("scenarios", scenario_id):
            data, _ = self.store.get("scenarios", scenario_id)
            doc = canon.loads(data)
            cfg = doc.get("config", {})
        else:
            scenario = load_scenario(scenario_id)
            cfg = scenario.config
        if "meal" not in cfg or "preference" not in cfg:
            raise SparcsError(f"scenario {scenario_id!r} has no meal/preference config")
        return cfg

    def _meal(self, cfg: dict) -> MealSpec:
        return MealSpec(tuple(cfg["meal"]["items"]), int(cfg["meal"]["bites_per_item"]))

    def _sim_corpus(self, cfg: dict, spec: MealSpec):
        from .hmm import EatingPreference, UserPrefProfile

        pref = cfg["preference"]
        profile = UserPrefProfile(dict(pref["affinity"]), EatingPreference(pref["eating_preference"]))
        hmm_cfg = cfg.get("demo", {}).get("hmm", {})
        return (
            simulate_sequences(
                profile,
                spec,
                int(hmm_cfg.get("n_sim_meals", 30)),
                float(hmm_cfg.get("sim_temperature", 0.5)),
                np.random.default_rng([int(hmm_cfg.get("model_seed", 17)), 23]),
            ),
            hmm_cfg,
        )

    def _current_model(self, scenario_id: str, cfg: dict, spec: MealSpec) -> DiscreteHmm:
        if self.store.exists("models", scenario_id):
            data, _ = self.store.get("models", scenario_id)
            return DiscreteHmm.from_json(canon.loads(data))
        corpus, hmm_cfg = self._sim_corpus(cfg, spec)
        model = train_preference_model(
            corpus,
            n_symbols=len(spec.items),
            symbols=spec.items,
            n_states=int(hmm_cfg.get("n_states", 4)),
            restarts=int(hmm_cfg.get("restarts", 3)),
            rng_seed=np.random.default_rng([int(hmm_cfg.get("model_seed", 17)), 29]),
        )
        model = DiscreteHmm(
            model.pi, model.a, model.b, model.symbols,
            trained_on={"scenario": scenario_id, "meals_observed": 0},
        )
        self.store.put("models", scenario_id, model.dumps().encode("utf-8"), None)
        return model

    # -- session lifecycle -------------------------------------------------

    def _next_session_id(self) -> str:
        with self._counter_lock:
            existing = [doc["id"] for doc in self.store.list("sessions")]
            n = 1
            while f"sess-{n:04d}" in existing:
                n += 1
            return f"sess-{n:04d}"

    def create(self, scenario_id: str) -> dict:
        cfg = self._scenario_config(scenario_id)
        spec = self._meal(cfg)
        model = self._current_model(scenario_id, cfg, spec)
        remaining = {item: spec.bites_per_item for item in spec.items}
        prediction = spec.items[
            predict_next(model, [], self._counts(remaining, spec))
        ]
        doc = {
            "session_id": self._next_session_id(),
            "scenario_id": scenario_id,
            "items": list(spec.items),
            "bites_per_item": spec.bites_per_item,
            "status": "Open",
            "remaining": remaining,
            "history": [],
            "prediction_next": prediction,
            "accuracy_so_far": 0.0,
        }
        self.store.put("sessions", doc["session_id"], canon.dump_bytes(doc), None)
        return doc

    def get(self, session_id: str) -> dict:
        data, _ = self.store.get("sessions", session_id)
        return canon.loads(data)

    @staticmethod
    def _counts(remaining: dict, spec: MealSpec):
        return [int(remaining[item]) for item in spec.items]

    def choice(self, session_id: str, item: str) -> dict:
        with self._lock(session_id):
            data, version = self.store.get("sessions", session_id)
            doc = canon.loads(data)
            if doc["status"] != "Open":
                raise VersionConflict(f"session {session_id} already complete")
            if item not in doc["remaining"] or doc["remaining"][item] < 1:
                raise VersionConflict(f"item {item!r} exhausted or unknown")

            doc["history"].append(
                {
                    "position": len(doc["history"]),
                    "prediction": doc["prediction_next"],
                    "choice": item,
                }
            )
            doc["remaining"][item] -= 1
            matches = sum(1 for h in doc["history"] if h["prediction"] == h["choice"])
            doc["accuracy_so_far"] = matches / len(doc["history"])

            spec = MealSpec(tuple(doc["items"]), int(doc["bites_per_item"]))
            cfg = self._scenario_config(doc["scenario_id"])
            model = self._current_model(doc["scenario_id"], cfg, spec)
            if len(doc["history"]) >= spec.length:
                doc["status"] = "Complete"
                doc["prediction_next"] = None
                self._finish_meal(doc, cfg, spec, model)
            else:
                counts = self._counts(doc["remaining"], spec)
                prefix = [spec.items.index(h["choice"]) for h in doc["history"]]
                doc["prediction_next"] = spec.items[predict_next(model, prefix, counts)]
            self.store.put("sessions", session_id, canon.dump_bytes(doc), version)
            return doc

    def _finish_meal(self, doc: dict, cfg: dict, spec: MealSpec, model: DiscreteHmm) -> None:
        sequence = [spec.items.index(h["choice"]) for h in doc["history"]]
        corpus, hmm_cfg = self._sim_corpus(cfg, spec)
        observed = model.trained_on.get("observed_sequences", [])
        observed = [list(s) for s in observed] + [sequence]
        updated = online_update(
            model, observed, float(hmm_cfg.get("user_weight", 10.0)), corpus
        )
        updated = DiscreteHmm(
            updated.pi, updated.a, updated.b, updated.symbols,
            trained_on={
                "scenario": doc["scenario_id"],
                "meals_observed": len(observed),
                "observed_sequences": observed,
            },
        )
        _, version = self.store.get("models", doc["scenario_id"])
        self.store.put(
            "models", doc["scenario_id"], updated.dumps().encode("utf-8"), version
        )


def seed_store(store: DocumentStore, ids=None) -> list:
    """Import bundled scenario directories into the store (skip existing)."""
    loaded = []
    for sid in ids or list_scenarios():
        if store.exists("scenarios", sid):
            continue
        scenario = load_scenario(scenario_root() / sid)
        doc = {
            "scenario_id": scenario.scenario_id,
            "blocks": canon.loads(serialize_building_blocks(scenario.blocks)),
            "workflows": {},
            "config": scenario.config,
        }
        for key, wf in (("human", scenario.workflow_human), ("robot", scenario.workflow_robot)):
            if wf is not None:
                doc["workflows"][key] = canon.loads(serialize_workflow(wf))
        data, diags = _canonicalize("scenarios", doc)
        if diags:
            raise SparcsError(f"bundled scenario {sid} failed validation: {diags}")
        store.put("scenarios", sid, data, None)
        loaded.append(sid)
    return loaded


def create_app(store_dir: str | Path, ui_dir: str | Path | None = None) -> FastAPI:
    store = DocumentStore(store_dir)
    sessions = SessionEngine(store)
    app = FastAPI(title="sparcs service", version="0.1.0")
    app.state.store = store
    app.state.sessions = sessions

    def canonical_response(data: bytes, version: int, status: int = 200) -> Response:
        return Response(
            content=data, status_code=status, media_type=MEDIA, headers={"ETag": str(version)}
        )

    def error(status: int, message: str, diagnostics=None) -> JSONResponse:
        body = {"error": message}
        if diagnostics is not None:
            body["diagnostics"] = diagnostics
        return JSONResponse(body, status_code=status, media_type=MEDIA)

    def expected_version(request: Request) -> int | None:
        raw = request.headers.get("if-match")
        if raw is None:
            return None
        try:
            return int(raw.strip().strip('"'))
        except ValueError:
            return -1

    @app.get("/v1/{collection}")
    def list_docs(collection: str):
        if collection == "sessions":
            return JSONResponse(store.list("sessions"), media_type=MEDIA)
        if collection not in DOC_COLLECTIONS:
            return error(404, f"unknown collection {collection!r}")
        return JSONResponse(store.list(collection), media_type=MEDIA)

    @app.get("/v1/{collection}/{doc_id}")
    def get_doc(collection: str, doc_id: str):
        if collection == "sessions":
            try:
                data, version = store.get("sessions", doc_id)
            except MissingDocument:
                return error(404, f"no session {doc_id!r}")
            return canonical_response(data, version)
        if collection not in DOC_COLLECTIONS:
            return error(404, f"unknown collection {collection!r}")
        try:
            data, version = store.get(collection, doc_id)
        except MissingDocument:
            return error(404, f"no document {collection}/{doc_id}")
        return canonical_response(data, version)

    @app.put("/v1/{collection}/{doc_id}")
    async def put_doc(collection: str, doc_id: str, request: Request):
        if collection not in DOC_COLLECTIONS:
            return error(404, f"unknown collection {collection!r}")
        try:
            body = json.loads(await request.body())
        except ValueError as exc:
            return error(400, f"invalid JSON: {exc}", [])
        data, diags = _canonicalize(collection, body)
        if diags:
            return error(400, "validation failed", diags)
        existed = store.exists(collection, doc_id)
        try:
            version = store.put(collection, doc_id, data, expected_version(request))
        except VersionConflict as exc:
            return error(409, str(exc))
        return canonical_response(data, version, status=200 if existed else 201)

    @app.delete("/v1/{collection}/{doc_id}")
    def delete_doc(collection: str, doc_id: str, request: Request):
        if collection not in DOC_COLLECTIONS:
            return error(404, f"unknown collection {collection!r}")
        try:
            store.delete(collection, doc_id, expected_version(request))
        except MissingDocument:
            return error(404, f"no document {collection}/{doc_id}")
        except VersionConflict as exc:
            return error(409, str(exc))
        return Response(status_code=204)

    @app.post("/v1/sessions")
    async def create_session(request: Request):
        try:
            body = json.loads(await request.body())
        except ValueError as exc:
            return error(400, f"invalid JSON: {exc}")
        scenario_id = body.get("scenario_id")
        if not scenario_id:
            return error(400, "scenario_id required")
        try:
            doc = sessions.create(scenario_id)
        except SparcsError as exc:
            return error(404, str(exc))
        return JSONResponse(doc, status_code=201, media_type=MEDIA)

    @app.post("/v1/sessions/{session_id}/choice")
    async def post_choice(session_id: str, request: Request):
        try:
            body = json.loads(await request.body())
        except ValueError as exc:
            return error(400, f"invalid JSON: {exc}")
        item = body.get("item")
        if not item:
            return error(400, "item required")
        try:
            doc = sessions.choice(session_id, item)
        except MissingDocument:
            return error(404, f"no session {session_id!r}")
        except VersionConflict as exc:
            return error(409, str(exc))
        return JSONResponse(
            {
                "prediction_next": doc["prediction_next"],
                "accuracy_so_far": doc["accuracy_so_far"],
                "status": doc["status"],
                "remaining": doc["remaining"],
            },
            media_type=MEDIA,
        )

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
