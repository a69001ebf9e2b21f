"""HTTP service exposing authoring, correction, evaluation, retargeting and
generation over JSON; the interactive canvas UI is its main consumer.

Routes (all JSON, SMAP payloads travel base64-encoded as ``smapB64``):

    POST /sessions                   {prompt?, spec?} -> session state
    GET  /sessions/{id}              full session state
    GET  /sessions/{id}/spec         mixture spec
    PUT  /sessions/{id}/spec         replace mixture spec
    POST /sessions/{id}/render?w=&h= rendered preview as SMAP base64
    POST /sessions/{id}/correct      {options?, prompt?} -> correction result
    POST /eval                       {targetB64, achievedB64, fixationsCsv?, ppd?}
    POST /retarget                   {targetB64, display|preset, profile?, mode, lambda?}
    POST /generate                   {prompt, conditioningB64, width, height, seed, steps}
    GET  /healthz                    build + index status

Errors: 404 unknown session/route, 422 invariant violations (message names
the offending field path), 502 backend failures with context. Sessions
persist as one JSON file each (atomic rename) when a data dir is
configured; a restarted service restores them byte-identically.
"""
from __future__ import annotations

import base64
import json
import os
import re
import threading
import time
import uuid
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from . import __version__
from .config import resolve_setting
from .correction import CorrectionOptions, correct_to_reference, _retrieve
from .display import DISPLAY_PRESETS, DisplayConfig, EccentricityProfile, retarget
from .embedding import default_embedder
from .errors import (
    BackendError,
    FormatError,
    GazeForgeError,
    InvalidArgumentsError,
)
from .formats import parse_fixation_csv, smap_from_bytes, smap_to_bytes
from .gateway import BackendConfig, GenerationClient, GenerationRequest
from .index import load_index
from .maps import SaliencyMap
from .metrics import evaluate_pair
from .mixture import GaussianMixtureSpec, mixture_from_dict, mixture_to_dict, render_mixture
from .transport import canonical_json

__all__ = ["ServiceConfig", "GazeForgeService", "serve"]

MAX_RENDER_SIDE = 4096


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8099
    data_dir: str = ""  # empty: sessions are in-memory only
    index_path: str = ""
    embedder_name: str = "hashed-512"
    backend: BackendConfig = field(default_factory=BackendConfig)
    cors_origin: str = "*"

    @classmethod
    def from_settings(cls, get=resolve_setting) -> "ServiceConfig":
        return cls(
            host=get("host"),
            port=int(get("port")),
            data_dir=get("data_dir"),
            index_path=get("index"),
            embedder_name=get("embedder"),
            backend=BackendConfig(
                endpoint=get("backend"), timeout_ms=int(get("timeout_ms"))
            ),
            cors_origin=get("cors_origin"),
        )


class _HttpFault(Exception):
    def __init__(self, status, message, **extra):
        super().__init__(message)
        self.status = status
        self.payload = {"error": message, **extra}


_FIELD_PATH = re.compile(r"^([a-zA-Z_][\w.\[\]]*):")


def _invariant_fault(message: str) -> _HttpFault:
    match = _FIELD_PATH.match(message)
    extra = {"field": match.group(1)} if match else {}
    return _HttpFault(422, message, **extra)


class GazeForgeService:
    """Application core behind the HTTP handler; also usable directly in
    tests. All responses are canonical-JSON-stable dicts."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.embedder = default_embedder(config.embedder_name)
        self.index = load_index(config.index_path) if config.index_path else None
        self.client = GenerationClient(config.backend)
        self._sessions: dict = {}
        self._session_locks: dict = {}
        self._registry_lock = threading.Lock()
        if config.data_dir:
            self._session_dir = Path(config.data_dir) / "sessions"
            self._session_dir.mkdir(parents=True, exist_ok=True)
            for path in sorted(self._session_dir.glob("*.json")):
                state = json.loads(path.read_text())
                self._sessions[state["sessionId"]] = state
        else:
            self._session_dir = None

    # -- session plumbing --------------------------------------------------

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._session_locks.setdefault(session_id, threading.Lock())

    def _get_session(self, session_id: str) -> dict:
        state = self._sessions.get(session_id)
        if state is None:
            raise _HttpFault(404, f"unknown session {session_id}")
        return state

    def _persist(self, state: dict) -> None:
        if self._session_dir is None:
            return
        path = self._session_dir / f"{state['sessionId']}.json"
        tmp = path.with_suffix(".json.tmp")
        tmp.write_bytes(canonical_json(state))
        os.replace(tmp, path)

    def _parse_spec(self, data) -> GaussianMixtureSpec:
        try:
            return mixture_from_dict(data)
        except FormatError as exc:
            raise _invariant_fault(str(exc)) from None

    @staticmethod
    def _decode_smap(b64: str, name: str) -> SaliencyMap:
        try:
            return smap_from_bytes(base64.b64decode(b64))
        except (FormatError, ValueError) as exc:
            raise _HttpFault(422, f"{name}: {exc}") from None

    # -- routes ------------------------------------------------------------

    def create_session(self, body: dict) -> dict:
        session_id = uuid.uuid4().hex
        spec = body.get("spec")
        if spec is not None:
            spec = mixture_to_dict(self._parse_spec(spec))
        else:
            spec = mixture_to_dict(GaussianMixtureSpec(512, 512, ()))
        now = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        state = {
            "sessionId": session_id,
            "prompt": str(body.get("prompt", "")),
            "spec": spec,
            "lastCorrection": None,
            "createdAt": now,
            "updatedAt": now,
        }
        with self._registry_lock:
            self._sessions[session_id] = state
        self._persist(state)
        return state

    def get_session(self, session_id: str) -> dict:
        return self._get_session(session_id)

    def get_spec(self, session_id: str) -> dict:
        return self._get_session(session_id)["spec"]

    def put_spec(self, session_id: str, body: dict) -> dict:
        spec = self._parse_spec(body)
        with self._lock_for(session_id):
            state = self._get_session(session_id)
            state["spec"] = mixture_to_dict(spec)
            state["updatedAt"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
            self._persist(state)
            return state["spec"]

    def render_session(self, session_id: str, width: int, height: int) -> dict:
        if not (1 <= width <= MAX_RENDER_SIDE and 1 <= height <= MAX_RENDER_SIDE):
            raise _HttpFault(422, f"render dims must be in [1, {MAX_RENDER_SIDE}]")
        with self._lock_for(session_id):
            spec = self._parse_spec(self._get_session(session_id)["spec"])
        rendered = render_mixture(spec, width, height)
        return {"smapB64": base64.b64encode(smap_to_bytes(rendered)).decode("ascii")}

    def correct_session(self, session_id: str, body: dict) -> dict:
        if self.index is None:
            raise _HttpFault(422, "no guidance index configured on this service")
        opts = CorrectionOptions.from_dict(body.get("options", {}))
        with self._lock_for(session_id):
            state = self._get_session(session_id)
            prompt = str(body.get("prompt", state["prompt"]) or "")
            spec = self._parse_spec(state["spec"])
            try:
                ref_prompt, ref_map, ref_id = _retrieve(prompt, self.index, self.embedder)
                result = correct_to_reference(spec, ref_map, ref_prompt, opts)
            except GazeForgeError as exc:
                raise _invariant_fault(str(exc)) from None
            result.metadata["referenceId"] = ref_id
            payload = result.to_dict()
            state["prompt"] = prompt
            state["lastCorrection"] = payload
            state["updatedAt"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
            self._persist(state)
            return payload

    def eval_pair(self, body: dict) -> dict:
        target = self._decode_smap(body.get("targetB64", ""), "targetB64")
        achieved = self._decode_smap(body.get("achievedB64", ""), "achievedB64")
        fixations = None
        if body.get("fixationsCsv"):
            ppd = float(body.get("ppd", resolve_setting("ppd")))
            try:
                fixations = parse_fixation_csv(body["fixationsCsv"], display_ppd=ppd)
            except FormatError as exc:
                raise _HttpFault(422, f"fixationsCsv: {exc}") from None
        epsilon = float(body.get("epsilon", 1e-8))
        return evaluate_pair(target, achieved, fixations, epsilon).to_dict()

    def retarget_map(self, body: dict) -> dict:
        target = self._decode_smap(body.get("targetB64", ""), "targetB64")
        display_spec = body.get("display", "study-24in")
        if isinstance(display_spec, str):
            display = DISPLAY_PRESETS.get(display_spec)
            if display is None:
                raise _HttpFault(422, f"display: unknown preset {display_spec!r}")
        else:
            try:
                display = DisplayConfig.from_dict(display_spec)
            except (KeyError, TypeError, ValueError, InvalidArgumentsError) as exc:
                raise _HttpFault(422, f"display: {exc}") from None
        profile = (
            EccentricityProfile.from_dict(body["profile"])
            if body.get("profile")
            else EccentricityProfile()
        )
        mode = body.get("mode", "weight")
        try:
            out = retarget(
                target,
                display,
                profile,
                mode=mode,
                lam=float(body.get("lambda", 0.5)),
            )
        except GazeForgeError as exc:
            raise _invariant_fault(str(exc)) from None
        return {"smapB64": base64.b64encode(smap_to_bytes(out)).decode("ascii")}

    def generate(self, body: dict) -> dict:
        conditioning = self._decode_smap(body.get("conditioningB64", ""), "conditioningB64")
        try:
            request = GenerationRequest(
                prompt=str(body.get("prompt", "")),
                conditioning=conditioning,
                width=int(body.get("width", 512)),
                height=int(body.get("height", 512)),
                seed=int(body.get("seed", 0)),
                steps=int(body.get("steps", 20)),
            )
        except (InvalidArgumentsError, ValueError) as exc:
            raise _invariant_fault(str(exc)) from None
        try:
            response = self.client.generate(request)
        except BackendError as exc:
            raise _HttpFault(502, f"generation backend failed: {exc}") from None
        return {
            "imageB64": base64.b64encode(response.image_bytes).decode("ascii"),
            "backendId": response.backend_id,
            "elapsedMs": response.elapsed_ms,
        }

    def healthz(self) -> dict:
        return {
            "status": "ok",
            "version": __version__,
            "backend": self.config.backend.endpoint,
            "index": {
                "loaded": self.index is not None,
                "records": len(self.index) if self.index else 0,
            },
        }


_SESSION_ROUTE = re.compile(r"^/sessions/([0-9a-f]{32})(/(?:spec|render|correct))?$")


class _Handler(BaseHTTPRequestHandler):
    service: GazeForgeService = None  # injected by make_server
    protocol_version = "HTTP/1.1"

    # -- plumbing ----------------------------------------------------------

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _cors(self):
        self.send_header("Access-Control-Allow-Origin", self.service.config.cors_origin)
        self.send_header("Access-Control-Allow-Methods", "GET, PUT, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")

    def _reply(self, status: int, payload: dict):
        body = canonical_json(payload)
        self.send_response(status)
        self._cors()
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _drain_body(self) -> bytes:
        # Always consume the request body, even on routes that ignore it;
        # unread bytes would corrupt the next request on a keep-alive
        # connection.
        length = int(self.headers.get("Content-Length") or 0)
        return self.rfile.read(length) if length else b""

    def _body(self) -> dict:
        if not self._raw_body:
            return {}
        try:
            data = json.loads(self._raw_body.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise _HttpFault(422, f"request body is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise _HttpFault(422, "request body must be a JSON object")
        return data

    def _dispatch(self, method: str):
        try:
            self._raw_body = self._drain_body()
            status, payload = self._route(method)
            self._reply(status, payload)
        except _HttpFault as fault:
            self._reply(fault.status, fault.payload)
        except GazeForgeError as exc:
            self._reply(422, {"error": str(exc)})
        except Exception as exc:  # pragma: no cover - last resort
            self._reply(500, {"error": f"internal error: {exc}"})

    # -- routing -----------------------------------------------------------

    def _route(self, method: str):
        svc = self.service
        parsed = urlparse(self.path)
        path = parsed.path.rstrip("/") or "/"
        if method == "GET" and path == "/healthz":
            return 200, svc.healthz()
        if method == "POST" and path == "/sessions":
            return 200, svc.create_session(self._body())
        if method == "POST" and path == "/eval":
            return 200, svc.eval_pair(self._body())
        if method == "POST" and path == "/retarget":
            return 200, svc.retarget_map(self._body())
        if method == "POST" and path == "/generate":
            return 200, svc.generate(self._body())
        match = _SESSION_ROUTE.match(path)
        if match:
            session_id, tail = match.group(1), match.group(2) or ""
            if method == "GET" and tail == "":
                return 200, svc.get_session(session_id)
            if method == "GET" and tail == "/spec":
                return 200, svc.get_spec(session_id)
            if method == "PUT" and tail == "/spec":
                return 200, svc.put_spec(session_id, self._body())
            if method == "POST" and tail == "/render":
                query = parse_qs(parsed.query)
                try:
                    width = int(query.get("w", ["0"])[0])
                    height = int(query.get("h", ["0"])[0])
                except ValueError:
                    raise _HttpFault(422, "w and h must be integers") from None
                return 200, svc.render_session(session_id, width, height)
            if method == "POST" and tail == "/correct":
                return 200, svc.correct_session(session_id, self._body())
        raise _HttpFault(404, f"no route for {method} {self.path}")

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def do_PUT(self):
        self._dispatch("PUT")

    def do_OPTIONS(self):
        self._drain_body()
        self.send_response(204)
        self._cors()
        self.send_header("Content-Length", "0")
        self.end_headers()


def make_server(config: ServiceConfig) -> ThreadingHTTPServer:
    """Build the HTTP server without starting it (port 0 picks a free port)."""
    service = GazeForgeService(config)
    handler = type("BoundHandler", (_Handler,), {"service": service})
    server = ThreadingHTTPServer((config.host, config.port), handler)
    server.service = service
    return server


def serve(config: ServiceConfig) -> None:
    """Run the service until interrupted."""
    server = make_server(config)
    host, port = server.server_address[:2]
    print(
        f"gazeforge service on http://{host}:{port} (backend {config.backend.endpoint})",
        flush=True,
    )
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
