"""HTTP planning service: sessions, solves, and what-if deltas.

The service wraps the solver suite behind a small JSON API so a planning
UI can load an instance, solve it, and probe capacity or availability
changes without recomputing anything client-side. State is session
scoped and lives in memory; with a state directory configured every
session is also snapshotted to a JSON file and reloaded on startup.

Paths are versioned under ``/v1``. A solve that finishes within a short
grace period returns its result directly; longer solves return 202 with
a poll URL. Within one session solves are serialized (a second solve
while one runs gets 409); sessions are fully independent of each other.

What-if deltas are JSON objects applied to a copy of the instance
document, so committed history can be replayed from the initial document
to reproduce the current one byte for byte:

* ``{"op": "scale_capacity", "server": "name" | "*", "factor": x}``
* ``{"op": "set_availability", "kind": "server" | "cluster" | "vnf",
  "name": "...", "value": a}``
* ``{"op": "add_request", "request": {...request document entry...}}``
* ``{"op": "remove_request", "request": "name"}``
"""

from __future__ import annotations

import copy
import json
import threading
import time
import uuid
from concurrent.futures import Future, ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeout
from pathlib import Path
from typing import Any, Mapping

from fastapi import Body, FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .exact import ExactConfig, ExactScopeError, exact_solve
from .greedy import POLICIES, greedy
from .model import InstanceError, ProblemInstance, instance_from_doc, validate
from .placement import (
    InfeasibleError,
    OperationRejected,
    Placement,
    SolveReport,
    export_placement,
    import_placement,
    verify_placement,
)
from .vns import VnsConfig, vns

#: Solves finishing within this many seconds answer synchronously.
SYNC_GRACE = 2.0
#: Default wall budget for a what-if re-solve.
WHATIF_BUDGET = 10.0

ALGORITHMS = ("greedy", "vns", "exact")


class DeltaError(ValueError):
    """A what-if delta that cannot be applied to the instance document."""


class SolveBody(BaseModel):
    algorithm: str = "vns"
    policy: str | None = None
    split: bool = False
    timeLimit: float | None = None
    maxIterations: int | None = None
    nodeBudget: int | None = None
    seed: int = 0


class WhatIfBody(BaseModel):
    delta: dict | list[dict]
    commit: bool = False
    timeLimit: float | None = None


class _Session:
    def __init__(self, sid: str, doc: dict):
        self.id = sid
        self.doc = doc
        self.initial_doc = copy.deepcopy(doc)
        self.instance = instance_from_doc(doc)
        self.lock = threading.Lock()
        self.busy = False
        self.placement: Placement | None = None
        self.report: SolveReport | None = None
        self.solve_params: dict[str, Any] | None = None
        self.history: list[dict] = []
        self.jobs: dict[str, Future] = {}


def apply_delta(doc: Mapping[str, Any], delta: Mapping[str, Any]) -> dict:
    """Return a copy of the instance document with one delta applied."""
    out = copy.deepcopy(dict(doc))
    op = delta.get("op")
    if op == "scale_capacity":
        factor = delta.get("factor")
        if not isinstance(factor, (int, float)) or factor <= 0:
            raise DeltaError(f"scale_capacity needs a positive factor, got {factor!r}")
        target = delta.get("server", "*")
        hit = False
        for entry in out["servers"]:
            if target in ("*", entry["name"]):
                entry["capacity"] = entry["capacity"] * factor
                hit = True
        if not hit:
            raise DeltaError(f"scale_capacity: unknown server {target!r}")
    elif op == "set_availability":
        kind = delta.get("kind")
        sections = {"server": "servers", "cluster": "clusters", "vnf": "vnf_types"}
        if kind not in sections:
            raise DeltaError(f"set_availability: unknown kind {kind!r}")
        value = delta.get("value")
        if not isinstance(value, (int, float)) or not 0.0 < value <= 1.0:
            raise DeltaError(f"set_availability needs a value in (0, 1], got {value!r}")
        target = delta.get("name", "*")
        hit = False
        for entry in out[sections[kind]]:
            if target in ("*", entry["name"]):
                entry["availability"] = value
                hit = True
        if not hit:
            raise DeltaError(f"set_availability: unknown {kind} {target!r}")
    elif op == "add_request":
        entry = delta.get("request")
        if not isinstance(entry, dict) or "name" not in entry:
            raise DeltaError("add_request needs a request document entry with a name")
        if any(r["name"] == entry["name"] for r in out["requests"]):
            raise DeltaError(f"add_request: request {entry['name']!r} already exists")
        out["requests"].append(copy.deepcopy(entry))
    elif op == "remove_request":
        name = delta.get("request")
        before = len(out["requests"])
        out["requests"] = [r for r in out["requests"] if r["name"] != name]
        if len(out["requests"]) == before:
            raise DeltaError(f"remove_request: unknown request {name!r}")
    else:
        raise DeltaError(f"unknown delta op {op!r}")
    return out


def apply_deltas(doc: Mapping[str, Any], deltas: list[Mapping[str, Any]]) -> dict:
    out = dict(doc)
    for delta in deltas:
        out = apply_delta(out, delta)
    return out


def create_app(state_dir: str | Path | None = None, sync_grace: float = SYNC_GRACE) -> FastAPI:
    app = FastAPI(title="HA-VNFP planning service", version="1")
    sessions: dict[str, _Session] = {}
    registry_lock = threading.Lock()
    pool = ThreadPoolExecutor(max_workers=4, thread_name_prefix="solver")
    state_path = Path(state_dir) if state_dir is not None else None

    if state_path is not None:
        state_path.mkdir(parents=True, exist_ok=True)
        for snapshot in sorted(state_path.glob("*.json")):
            session = _load_snapshot(snapshot)
            if session is not None:
                sessions[session.id] = session

    def _persist(session: _Session) -> None:
        if state_path is None:
            return
        snap = {
            "id": session.id,
            "doc": session.doc,
            "initialDoc": session.initial_doc,
            "history": session.history,
            "solveParams": session.solve_params,
            "placement": None
            if session.placement is None
            else export_placement(session.placement),
            "report": None
            if session.report is None
            else _report_doc(session.instance, session.report),
        }
        tmp = state_path / f".{session.id}.tmp"
        tmp.write_text(json.dumps(snap, indent=2))
        tmp.replace(state_path / f"{session.id}.json")

    def _get(sid: str) -> _Session:
        session = sessions.get(sid)
        if session is None:
            raise HTTPException(404, f"unknown session {sid!r}")
        return session

    @app.post("/v1/sessions", status_code=201)
    def create_session(doc: dict = Body(...)):
        try:
            instance = instance_from_doc(doc)
        except InstanceError as exc:
            raise HTTPException(422, detail=[str(exc)])
        violations = validate(instance)
        errors = [v for v in violations if not v.startswith("warning:")]
        if errors:
            raise HTTPException(422, detail=errors)
        sid = uuid.uuid4().hex[:12]
        session = _Session(sid, doc)
        with registry_lock:
            sessions[sid] = session
        _persist(session)
        return {"id": sid, "violations": violations}

    @app.get("/v1/sessions/{sid}")
    def get_session(sid: str):
        session = _get(sid)
        with session.lock:
            return {
                "id": session.id,
                "instance": session.doc,
                "solved": session.report is not None,
                "report": None
                if session.report is None
                else _report_doc(session.instance, session.report),
                "solveParams": session.solve_params,
                "history": session.history,
                "busy": session.busy,
            }

    @app.post("/v1/sessions/{sid}/solve")
    def solve_session(sid: str, body: SolveBody):
        session = _get(sid)
        _check_solve_params(body)
        with session.lock:
            if session.busy:
                raise HTTPException(409, "a solve is already running for this session")
            session.busy = True

        def work():
            try:
                payload = _run_solve(session.instance, body)
                with session.lock:
                    if payload["feasible"]:
                        session.placement = payload.pop("_placement")
                        session.report = payload.pop("_report")
                        session.solve_params = body.model_dump()
                _persist(session)
                return payload
            finally:
                with session.lock:
                    session.busy = False

        future = pool.submit(work)
        try:
            return future.result(timeout=sync_grace)
        except FutureTimeout:
            jid = uuid.uuid4().hex[:12]
            with session.lock:
                session.jobs[jid] = future
            return _accepted({"job": f"/v1/sessions/{sid}/jobs/{jid}"})

    @app.get("/v1/sessions/{sid}/jobs/{jid}")
    def poll_job(sid: str, jid: str):
        session = _get(sid)
        with session.lock:
            future = session.jobs.get(jid)
        if future is None:
            raise HTTPException(404, f"unknown job {jid!r}")
        if not future.done():
            return _accepted({"status": "running"})
        try:
            return future.result()
        except Exception as exc:
            raise HTTPException(500, str(exc))

    @app.get("/v1/sessions/{sid}/placement")
    def get_placement(sid: str):
        session = _get(sid)
        with session.lock:
            if session.placement is None:
                raise HTTPException(404, "session has no placement yet")
            return export_placement(session.placement)

    @app.get("/v1/sessions/{sid}/availability")
    def get_availability(sid: str):
        session = _get(sid)
        with session.lock:
            if session.placement is None or session.report is None:
                raise HTTPException(404, "session has no placement yet")
            return _availability_doc(session.instance, session.placement, session.report)

    @app.post("/v1/sessions/{sid}/whatif")
    def whatif(sid: str, body: WhatIfBody):
        session = _get(sid)
        with session.lock:
            if session.report is None or session.placement is None:
                raise HTTPException(409, "solve the session before running what-ifs")
            if session.busy:
                raise HTTPException(409, "a solve is already running for this session")
            session.busy = True
        try:
            return _run_whatif(session, body, _persist)
        finally:
            with session.lock:
                session.busy = False

    return app


def _check_solve_params(body: SolveBody) -> None:
    if body.algorithm not in ALGORITHMS:
        raise HTTPException(422, f"unknown algorithm {body.algorithm!r}")
    if body.algorithm == "greedy":
        policy = body.policy or "bestfit"
        if policy not in POLICIES:
            raise HTTPException(422, f"unknown greedy policy {policy!r}")
    if body.timeLimit is not None and body.timeLimit <= 0:
        raise HTTPException(422, "timeLimit must be positive")


def _run_solve(
    instance: ProblemInstance, body: SolveBody, initial: Placement | None = None
) -> dict[str, Any]:
    """Solve and return the wire payload (placement/report stowed under _keys)."""
    try:
        if body.algorithm == "greedy":
            placement = greedy(instance, body.policy or "bestfit", split=body.split)
            report = placement.evaluate(algorithm=f"greedy-{body.policy or 'bestfit'}")
        elif body.algorithm == "vns":
            config = VnsConfig(
                split=body.split,
                time_limit_per_start=body.timeLimit,
                max_iterations=body.maxIterations,
                rng_seed=body.seed,
            )
            placement, report = vns(instance, config, initial=initial)
        else:
            config = ExactConfig(
                split_grid=0.5 if body.split else None,
                time_limit=body.timeLimit,
                node_budget=body.nodeBudget or ExactConfig.node_budget,
            )
            result = exact_solve(instance, config)
            placement, report = result.placement, result.report
    except (InfeasibleError, ExactScopeError) as exc:
        return {"feasible": False, "error": str(exc)}
    return {
        "feasible": True,
        "report": _report_doc(instance, report),
        "placement": export_placement(placement),
        "_placement": placement,
        "_report": report,
    }


def _run_whatif(session: _Session, body: WhatIfBody, persist) -> dict[str, Any]:
    deltas = body.delta if isinstance(body.delta, list) else [body.delta]
    try:
        new_doc = apply_deltas(session.doc, deltas)
        new_instance = instance_from_doc(new_doc)
    except (DeltaError, InstanceError) as exc:
        raise HTTPException(422, detail=[str(exc)])
    violations = [v for v in validate(new_instance) if not v.startswith("warning:")]
    if violations:
        raise HTTPException(422, detail=violations)

    budget = body.timeLimit if body.timeLimit is not None else WHATIF_BUDGET
    initial = _carry_placement(new_instance, session.placement)
    params = dict(session.solve_params or {"algorithm": "vns"})
    starts = 3 + (1 if initial is not None else 0)
    params["timeLimit"] = budget if params["algorithm"] == "exact" else budget / starts
    solve_body = SolveBody(**{k: v for k, v in params.items() if v is not None})
    payload = _run_solve(new_instance, solve_body, initial=initial)

    old = {
        "objective": session.report.objective,
        "perRequest": _per_request_names(session.instance, session.report),
        "worstRequests": _names(session.instance, session.report.worst_requests),
    }
    if not payload["feasible"]:
        if body.commit:
            raise HTTPException(409, f"cannot commit an infeasible what-if: {payload['error']}")
        return {"feasible": False, "error": payload["error"], "old": old, "committed": False}

    new_report: SolveReport = payload["_report"]
    new = {
        "objective": new_report.objective,
        "perRequest": _per_request_names(new_instance, new_report),
        "worstRequests": _names(new_instance, new_report.worst_requests),
    }
    worst_diff = {
        "entered": sorted(set(new["worstRequests"]) - set(old["worstRequests"])),
        "left": sorted(set(old["worstRequests"]) - set(new["worstRequests"])),
    }
    committed = False
    if body.commit:
        with session.lock:
            session.doc = new_doc
            session.instance = new_instance
            session.placement = payload["_placement"]
            session.report = new_report
            session.history.append({"delta": deltas, "timestamp": time.time()})
            committed = True
        persist(session)
    return {
        "feasible": True,
        "old": old,
        "new": new,
        "worstDiff": worst_diff,
        "committed": committed,
        "report": payload["report"],
        "placement": payload["placement"],
    }


def _carry_placement(instance: ProblemInstance, placement: Placement | None) -> Placement | None:
    """Incumbent placement re-imported into a delta-modified instance.

    Returns None when the incumbent does not transfer (removed entities,
    shrunk capacity, new requests leaving it incomplete).
    """
    if placement is None:
        return None
    try:
        carried = import_placement(instance, export_placement(placement))
    except (OperationRejected, InfeasibleError):
        return None
    if not carried.is_complete() or verify_placement(carried):
        return None
    return carried


def _names(instance: ProblemInstance, ids) -> list[str]:
    return [instance.requests[r].name for r in ids]


def _per_request_names(instance: ProblemInstance, report: SolveReport) -> dict[str, float]:
    return {instance.requests[r].name: a for r, a in sorted(report.per_request.items())}


def _report_doc(instance: ProblemInstance, report: SolveReport) -> dict[str, Any]:
    return {
        "algorithm": report.algorithm,
        "objective": report.objective,
        "worstRequests": _names(instance, report.worst_requests),
        "perRequest": _per_request_names(instance, report),
        "splits": report.splits,
        "vacuous": report.vacuous,
        "runtimeS": report.runtime_s,
    }


def _availability_doc(
    instance: ProblemInstance, placement: Placement, report: SolveReport
) -> dict[str, Any]:
    return {
        "objective": report.objective,
        "vacuous": report.vacuous,
        "worstRequests": _names(instance, report.worst_requests),
        "requests": [placement.availability_detail(r.id) for r in instance.requests],
    }


def _accepted(payload: dict) -> Any:
    return JSONResponse(payload, status_code=202)


def _load_snapshot(path: Path) -> _Session | None:
    try:
        snap = json.loads(path.read_text())
        session = _Session(snap["id"], snap["doc"])
        session.initial_doc = snap["initialDoc"]
        session.history = snap["history"]
        session.solve_params = snap["solveParams"]
        if snap["placement"] is not None:
            session.placement = import_placement(session.instance, snap["placement"])
            session.report = session.placement.evaluate(
                algorithm=snap["report"]["algorithm"],
                runtime_s=snap["report"]["runtimeS"],
            )
        return session
    except (KeyError, ValueError, OperationRejected, InstanceError, OSError):
        return None


app = create_app()
