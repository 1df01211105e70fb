"""Local JSON service exposing the reasoners, planner, and world.

One world, many planner sessions; reasoner endpoints are stateless and
side-effect free, while /api/goal, /reject and /accept mutate session or
world state.  Robot moves are serialized through a single world lock.
"""

from __future__ import annotations

import json
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from . import bench as bench_mod
from . import planner, simworld
from .kb import KnowledgeBase, canon
from .ontology import OntologyReasoner
from .reasoner import METHODS, ReasonerError, ReasonerResult, compare_results
from .relational import RelationalReasoner


class ApiError(Exception):
    def __init__(self, status: int, kind: str, subject: str):
        super().__init__(f"{kind}: {subject}")
        self.status = status
        self.kind = kind
        self.subject = subject


class ServiceState:
    def __init__(self, kb: KnowledgeBase, world: simworld.GridWorld):
        self.kb = kb
        self.world = world
        self.backends = {
            "relational": RelationalReasoner(kb),
            "ontology": OntologyReasoner(kb),
        }
        self.sessions: dict[str, planner.PlanSession] = {}
        self._session_counter = 0
        self.world_lock = threading.Lock()
        self.sessions_lock = threading.Lock()

    def backend(self, name: str):
        if name not in self.backends:
            raise ApiError(400, "BadRequest", f"unknown backend {name!r}")
        return self.backends[name]

    def new_session(self, session: planner.PlanSession) -> str:
        with self.sessions_lock:
            self._session_counter += 1
            sid = f"s{self._session_counter}"
            self.sessions[sid] = session
            return sid

    def session(self, sid: str) -> planner.PlanSession:
        with self.sessions_lock:
            if sid not in self.sessions:
                raise ApiError(404, "UnknownSession", sid)
            return self.sessions[sid]


def _chain_json(chain) -> list[dict[str, str]]:
    return [{"entity": hop.entity, "kind": hop.kind} for hop in chain]


def _proposal_json(state: ServiceState, proposal: planner.Proposal) -> dict:
    return {
        "destination": proposal.destination,
        "destination_class": state.kb.physical_rooms[proposal.destination],
        "chain": _chain_json(proposal.chain),
        "ordinal": proposal.ordinal,
    }


def _result_json(result: ReasonerResult) -> dict:
    return {
        "backend": result.backend_id,
        "answers": list(result.answers),
        "chains": [list(c) for c in result.chains],
    }


def _exhausted_json(session: planner.PlanSession) -> dict:
    return {
        "exhausted": True,
        "unrealizable": [
            {"chain": _chain_json(chain), "reason": reason}
            for chain, reason in session.unrealizable
        ],
    }


def _state_json(state: ServiceState) -> dict:
    world = state.world
    return {
        "width": world.width,
        "height": world.height,
        "rows": world.occupancy_rows(),
        "regions": {room: sorted(cells) for room, cells in world.regions.items()},
        "anchors": {room: list(cell) for room, cell in world.anchors.items()},
        "robot": list(world.robot),
        "rooms": {room: state.kb.physical_rooms[room] for room in world.regions},
    }


def _advance(state: ServiceState, sid: str, session: planner.PlanSession) -> dict:
    proposal = session.next_proposal()
    if proposal is None:
        return {"session": sid, **_exhausted_json(session)}
    return {"session": sid, "proposal": _proposal_json(state, proposal)}


class Handler(BaseHTTPRequestHandler):
    state: ServiceState
    static_dir: Path | None = None

    # -- plumbing -------------------------------------------------------------

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _send(self, status: int, payload: dict, content_type: str = "application/json") -> None:
        body = json.dumps(payload).encode() if content_type == "application/json" else payload
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.end_headers()
        self.wfile.write(body)

    def _send_error(self, exc: ApiError) -> None:
        self._send(exc.status, {"error": {"kind": exc.kind, "subject": exc.subject}})

    def _read_json(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b"{}"
        try:
            payload = json.loads(raw or b"{}")
        except json.JSONDecodeError:
            raise ApiError(400, "BadRequest", "body is not valid JSON") from None
        if not isinstance(payload, dict):
            raise ApiError(400, "BadRequest", "body must be a JSON object")
        return payload

    def do_OPTIONS(self):
        self._send(204, {})

    # -- routing ---------------------------------------------------------------

    def do_GET(self):
        url = urlparse(self.path)
        query = {k: v[0] for k, v in parse_qs(url.query).items()}
        try:
            if url.path == "/api/state":
                self._send(200, _state_json(self.state))
            elif url.path == "/api/kb/methods":
                self._send(200, {"methods": [
                    {"name": m.name, "input": m.input_kind, "description": m.description}
                    for m in METHODS]})
            elif url.path == "/api/kb/query":
                self._send(200, self._query(query))
            elif url.path == "/api/bench":
                self._send(200, self._bench(query))
            else:
                self._static(url.path)
        except ApiError as exc:
            self._send_error(exc)

    def do_POST(self):
        url = urlparse(self.path)
        try:
            payload = self._read_json()
            if url.path == "/api/goal":
                self._send(200, self._goal(payload))
                return
            match = re.fullmatch(r"/api/session/([a-z0-9]+)/(reject|accept)", url.path)
            if match:
                sid, action = match.groups()
                handler = self._reject if action == "reject" else self._accept
                self._send(200, handler(sid, payload))
                return
            raise ApiError(404, "NotFound", url.path)
        except ApiError as exc:
            self._send_error(exc)

    # -- endpoint bodies ---------------------------------------------------------

    def _query(self, query: dict) -> dict:
        method = query.get("method", "")
        raw_input = query.get("input", "")
        backend_name = query.get("backend", "relational")
        inputs = tuple(canon(tok) for tok in re.split(r"[,\s]+", raw_input) if tok)
        names = ["relational", "ontology"] if backend_name == "both" else [backend_name]
        results = {}
        for name in names:
            backend = self.state.backend(name)
            try:
                results[name] = backend.run_method(method, inputs)
            except ReasonerError as exc:
                raise ApiError(404 if exc.kind == "UnknownEntity" else 400,
                               exc.kind, exc.subject) from exc
            except ValueError as exc:
                raise ApiError(400, "BadRequest", str(exc)) from exc
        if len(results) == 1:
            return _result_json(next(iter(results.values())))
        return {
            "relational": _result_json(results["relational"]),
            "ontology": _result_json(results["ontology"]),
            "equal": compare_results(results["relational"], results["ontology"]),
        }

    def _bench(self, query: dict) -> dict:
        try:
            reps = int(query.get("reps", bench_mod.DEFAULT_REPETITIONS))
            cases = bench_mod.comparison_cases(reps)
        except ValueError as exc:
            raise ApiError(400, "BadRequest", str(exc)) from exc
        report = bench_mod.run_suite(cases, self.state.kb, list(self.state.backends.values()))
        return {
            "kb_digest": report.kb_digest,
            "timestamp": report.timestamp,
            "boundary": report.boundary,
            "all_equal": report.all_equal,
            "cases": [
                {
                    "method": r.case.method,
                    "input": r.case.input_label(),
                    "outputs_equal": r.outputs_equal,
                    "backends": {
                        b: {"mean_ns": run.mean_ns, "runs": run.runs, "digest": run.digest}
                        for b, run in r.runs.items()
                    },
                }
                for r in report.results
            ],
        }

    def _goal(self, payload: dict) -> dict:
        request = payload.get("request", "")
        backend = self.state.backend(payload.get("backend", "relational"))
        if not isinstance(request, str) or not request.strip():
            raise ApiError(400, "BadRequest", "missing request")
        try:
            session = planner.resolve(request, self.state.kb, backend)
        except ReasonerError as exc:
            raise ApiError(404 if exc.kind == "UnknownEntity" else 400,
                           exc.kind, exc.subject) from exc
        except planner.AmbiguousRequest as exc:
            raise ApiError(400, "AmbiguousRequest", exc.name) from exc
        sid = self.state.new_session(session)
        return _advance(self.state, sid, session)

    def _ordinal(self, payload: dict) -> int:
        ordinal = payload.get("ordinal")
        if not isinstance(ordinal, int):
            raise ApiError(400, "BadRequest", "ordinal must be an integer")
        return ordinal

    def _reject(self, sid: str, payload: dict) -> dict:
        session = self.state.session(sid)
        try:
            session.reject(self._ordinal(payload))
        except planner.UnknownOrdinal as exc:
            raise ApiError(400, "UnknownOrdinal", str(exc.ordinal)) from exc
        return _advance(self.state, sid, session)

    def _accept(self, sid: str, payload: dict) -> dict:
        session = self.state.session(sid)
        ordinal = self._ordinal(payload)
        with self.state.world_lock:
            try:
                proposal = session.emitted[ordinal]
            except KeyError:
                raise ApiError(400, "UnknownOrdinal", str(ordinal)) from None
            try:
                path = simworld.plan_path(self.state.world, proposal.destination)
                simworld.execute(self.state.world, path)
            except simworld.WorldError as exc:
                raise ApiError(400, "NoPath", str(exc)) from exc
            try:
                session.accept(ordinal)
            except planner.UnknownOrdinal as exc:
                raise ApiError(400, "UnknownOrdinal", str(exc.ordinal)) from exc
            arrived = self.state.world.room_at(self.state.world.robot)
        return {
            "session": sid,
            "trajectory": [list(cell) for cell in path],
            "arrived": arrived,
            "arrived_class": self.state.kb.physical_rooms.get(arrived) if arrived else None,
            "robot": list(self.state.world.robot),
        }

    # -- static assets -------------------------------------------------------------

    _CONTENT_TYPES = {".html": "text/html", ".js": "text/javascript",
                      ".css": "text/css", ".map": "application/json",
                      ".svg": "image/svg+xml"}

    def _static(self, path: str) -> None:
        if self.static_dir is None:
            raise ApiError(404, "NotFound", path)
        rel = path.lstrip("/") or "index.html"
        target = (self.static_dir / rel).resolve()
        if not str(target).startswith(str(self.static_dir.resolve())) or not target.is_file():
            raise ApiError(404, "NotFound", path)
        content_type = self._CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        self._send(200, target.read_bytes(), content_type)


def make_server(kb: KnowledgeBase, world: simworld.GridWorld, host: str, port: int,
                static_dir: str | None = None) -> ThreadingHTTPServer:
    state = ServiceState(kb, world)
    handler = type("BoundHandler", (Handler,), {
        "state": state,
        "static_dir": Path(static_dir) if static_dir else None,
    })
    return ThreadingHTTPServer((host, port), handler)


def serve(kb: KnowledgeBase, world: simworld.GridWorld, host: str, port: int,
          static_dir: str | None = None) -> None:
    server = make_server(kb, world, host, port, static_dir)
    print(f"serving on http://{host}:{server.server_address[1]}/")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
