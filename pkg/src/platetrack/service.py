"""HTTP JSON API over the track store: login, queries, admin CRUD, ingest.

Plain-stdlib server (ThreadingHTTPServer). Every non-2xx body is the
ApiError shape {"http_status", "code", "message"}. Reads take bearer
tokens; admin mutations need the admin role; ingest authenticates with a
camera API key only - user tokens can never ingest.
"""

from __future__ import annotations

import json
import logging
import re
import secrets
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, unquote, urlparse

from .errors import (
    ArgumentError,
    DuplicateEntityError,
    InvalidCredentials,
    UnknownEntityError,
)
from .store import ROLES, TrackStore

log = logging.getLogger("platetrack.service")

TOKEN_TTL_MS = 12 * 3600 * 1000

# method, path pattern, auth requirement; the route-scan test reads this
ROUTES: list[tuple[str, str, str]] = [
    ("POST", r"^/api/login$", "none"),
    ("GET", r"^/api/sightings$", "token"),
    ("GET", r"^/api/path$", "token"),
    ("GET", r"^/api/cameras$", "token"),
    ("POST", r"^/api/cameras$", "admin"),
    ("DELETE", r"^/api/cameras/(?P<camera_id>[^/]+)$", "admin"),
    ("POST", r"^/api/users$", "admin"),
    ("DELETE", r"^/api/users/(?P<username>[^/]+)$", "admin"),
    ("POST", r"^/api/ingest$", "apikey"),
]


@dataclass(frozen=True)
class SessionToken:
    token: str
    username: str
    role: str
    expires_at: int  # UTC ms


class TokenTable:
    """In-memory bearer tokens; 128-bit values, fixed TTL."""

    def __init__(self, ttl_ms: int = TOKEN_TTL_MS):
        self.ttl_ms = ttl_ms
        self._lock = threading.Lock()
        self._tokens: dict[str, SessionToken] = {}

    def issue(self, username: str, role: str) -> SessionToken:
        tok = SessionToken(
            token=secrets.token_urlsafe(16),
            username=username,
            role=role,
            expires_at=int(time.time() * 1000) + self.ttl_ms,
        )
        with self._lock:
            self._tokens[tok.token] = tok
        return tok

    def check(self, token: str) -> SessionToken | None:
        with self._lock:
            tok = self._tokens.get(token)
        if tok is None or tok.expires_at <= int(time.time() * 1000):
            return None
        return tok


class _HttpError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _bad_request(message: str) -> _HttpError:
    return _HttpError(400, "bad-request", message)


class ApiHandler(BaseHTTPRequestHandler):
    server_version = "platetrack"
    protocol_version = "HTTP/1.1"

    # ------------- plumbing -------------

    def log_message(self, fmt, *args):  # quiet by default
        log.debug("%s - %s", self.address_string(), fmt % args)

    def _send_json(self, status: int, payload) -> None:
        body = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self._cors()
        self.end_headers()
        self.wfile.write(body)

    def _send_error(self, status: int, code: str, message: str) -> None:
        self._send_json(status, {"http_status": status, "code": code, "message": message})

    def _cors(self) -> None:
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS")
        self.send_header(
            "Access-Control-Allow-Headers", "Authorization, Content-Type, X-Api-Key"
        )

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            raise _bad_request("empty body")
        try:
            body = json.loads(raw)
        except ValueError:
            raise _bad_request("body is not valid JSON") from None
        if not isinstance(body, dict):
            raise _bad_request("body must be a JSON object")
        return body

    @property
    def store(self) -> TrackStore:
        return self.server.store  # type: ignore[attr-defined]

    @property
    def tokens(self) -> TokenTable:
        return self.server.tokens  # type: ignore[attr-defined]

    # ------------- dispatch -------------

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def do_DELETE(self):
        self._dispatch("DELETE")

    def do_OPTIONS(self):
        self.send_response(204)
        self._cors()
        self.send_header("Content-Length", "0")
        self.end_headers()

    def _dispatch(self, method: str) -> None:
        url = urlparse(self.path)
        try:
            for route_method, pattern, auth in ROUTES:
                if route_method != method:
                    continue
                m = re.match(pattern, url.path)
                if not m:
                    continue
                ctx = self._authenticate(auth)
                handler = getattr(self, "_h_" + pattern_name(route_method, pattern))
                handler(ctx, m, parse_qs(url.query))
                return
            raise _HttpError(404, "not-found", f"no route for {method} {url.path}")
        except _HttpError as exc:
            self._send_error(exc.status, exc.code, exc.message)
        except Exception:  # pragma: no cover - defensive
            log.exception("unhandled error for %s %s", method, self.path)
            self._send_error(500, "internal", "internal error")

    def _authenticate(self, auth: str):
        if auth == "none":
            return None
        if auth == "apikey":
            key = self.headers.get("X-Api-Key")
            if not key:
                raise _HttpError(401, "missing-api-key", "X-Api-Key header required")
            camera_id = self.store.verify_camera_key(key)
            if camera_id is None:
                raise _HttpError(401, "bad-api-key", "API key not recognized")
            return camera_id
        header = self.headers.get("Authorization") or ""
        if not header.startswith("Bearer "):
            raise _HttpError(401, "missing-token", "Authorization: Bearer token required")
        tok = self.tokens.check(header[len("Bearer ") :])
        if tok is None:
            raise _HttpError(401, "invalid-token", "token missing or expired")
        if auth == "admin" and tok.role != "admin":
            raise _HttpError(403, "forbidden", "admin role required")
        return tok

    # ------------- handlers -------------

    def _h_post_api_login(self, _ctx, _m, _q):
        body = self._read_body()
        username = body.get("username")
        password = body.get("password")
        if not isinstance(username, str) or not isinstance(password, str):
            raise _bad_request("username and password are required strings")
        try:
            role = self.store.verify_credentials(username, password)
        except InvalidCredentials:
            raise _HttpError(401, "invalid-credentials", "invalid credentials") from None
        tok = self.tokens.issue(username, role)
        self._send_json(
            200, {"token": tok.token, "role": tok.role, "expires_at": tok.expires_at}
        )

    @staticmethod
    def _int_param(q, name) -> int | None:
        if name not in q:
            return None
        try:
            return int(q[name][0])
        except ValueError:
            raise _bad_request(f"query param {name} must be an integer") from None

    def _h_get_api_sightings(self, _ctx, _m, q):
        t_from = self._int_param(q, "from")
        t_to = self._int_param(q, "to")
        limit = self._int_param(q, "limit")
        if t_from is not None and t_to is not None and t_from > t_to:
            raise _bad_request("from must be <= to")
        rows = self.store.list_sightings(
            plate=q.get("plate", [None])[0],
            camera=q.get("camera", [None])[0],
            t_from=t_from,
            t_to=t_to,
            limit=limit if limit is not None else 100,
        )
        self._send_json(200, [s.to_json() for s in rows])

    def _h_get_api_path(self, _ctx, _m, q):
        plate = q.get("plate", [None])[0]
        if not plate:
            raise _bad_request("plate query param is required")
        t_from = self._int_param(q, "from")
        t_to = self._int_param(q, "to")
        if t_from is not None and t_to is not None and t_from > t_to:
            raise _bad_request("from must be <= to")
        points = self.store.path_for_plate(plate, t_from=t_from, t_to=t_to)
        self._send_json(200, [p.to_json() for p in points])

    def _h_get_api_cameras(self, _ctx, _m, _q):
        cams = self.store.list_cameras()
        self._send_json(
            200,
            [
                {
                    "camera_id": c.camera_id,
                    "label": c.label,
                    "lat": c.lat,
                    "lon": c.lon,
                    "active": c.active,
                }
                for c in cams
            ],
        )

    def _h_post_api_cameras(self, _ctx, _m, _q):
        body = self._read_body()
        camera_id = body.get("camera_id")
        label = body.get("label", "")
        lat = body.get("lat")
        lon = body.get("lon")
        if not isinstance(camera_id, str) or not camera_id:
            raise _bad_request("camera_id is required")
        if not isinstance(lat, (int, float)) or not isinstance(lon, (int, float)):
            raise _bad_request("lat and lon are required numbers")
        try:
            camera, key = self.store.upsert_camera(camera_id, str(label), float(lat), float(lon))
        except DuplicateEntityError as exc:
            raise _HttpError(409, "duplicate", str(exc)) from None
        except ArgumentError as exc:
            raise _bad_request(str(exc)) from None
        self._send_json(
            201,
            {
                "camera_id": camera.camera_id,
                "label": camera.label,
                "lat": camera.lat,
                "lon": camera.lon,
                "active": camera.active,
                "api_key": key,  # shown exactly once
            },
        )

    def _h_delete_api_cameras(self, _ctx, m, _q):
        try:
            self.store.delete_camera(unquote(m.group("camera_id")))
        except UnknownEntityError as exc:
            raise _HttpError(404, "unknown-camera", str(exc)) from None
        self._send_json(200, {"status": "deleted"})

    def _h_post_api_users(self, _ctx, _m, _q):
        body = self._read_body()
        username = body.get("username")
        password = body.get("password")
        role = body.get("role")
        if not isinstance(username, str) or not isinstance(password, str) or role not in ROLES:
            raise _bad_request(f"username, password and role ({'/'.join(ROLES)}) are required")
        try:
            self.store.create_user(username, password, role)
        except DuplicateEntityError as exc:
            raise _HttpError(409, "duplicate", str(exc)) from None
        except ArgumentError as exc:
            raise _bad_request(str(exc)) from None
        self._send_json(201, {"username": username, "role": role})

    def _h_delete_api_users(self, _ctx, m, _q):
        try:
            self.store.delete_user(unquote(m.group("username")))
        except UnknownEntityError as exc:
            raise _HttpError(404, "unknown-user", str(exc)) from None
        self._send_json(200, {"status": "deleted"})

    def _h_post_api_ingest(self, camera_id, _m, _q):
        body = self._read_body()
        errors = _validate_ingest(body)
        if errors:
            raise _HttpError(422, "schema-violation", "; ".join(errors))
        if body["camera_id"] != camera_id:
            raise _HttpError(
                403,
                "camera-mismatch",
                f"key authenticates {camera_id!r}, payload names {body['camera_id']!r}",
            )
        nonce = body.get("client_nonce")
        existing = self.store.has_nonce(camera_id, nonce) if nonce else None
        if existing is not None:
            self._send_json(200, {"id": existing, "duplicate": True})
            return
        sid = self.store.insert_sighting(
            plate=body["plate"],
            camera_id=camera_id,
            first_seen=body["first_seen_ms"],
            last_seen=body["last_seen_ms"],
            confidence=body["confidence"],
            box=body.get("box"),
            client_nonce=nonce,
        )
        self._send_json(201, {"id": sid, "duplicate": False})


def _validate_ingest(body: dict) -> list[str]:
    errors = []
    if not isinstance(body.get("plate"), str) or not body.get("plate"):
        errors.append("plate must be a nonempty string")
    if not isinstance(body.get("camera_id"), str) or not body.get("camera_id"):
        errors.append("camera_id must be a nonempty string")
    for key in ("first_seen_ms", "last_seen_ms"):
        if not isinstance(body.get(key), int):
            errors.append(f"{key} must be an integer (UTC ms)")
    if (
        isinstance(body.get("first_seen_ms"), int)
        and isinstance(body.get("last_seen_ms"), int)
        and body["first_seen_ms"] > body["last_seen_ms"]
    ):
        errors.append("first_seen_ms must be <= last_seen_ms")
    conf = body.get("confidence")
    if not isinstance(conf, (int, float)) or not 0.0 <= float(conf) <= 1.0:
        errors.append("confidence must be a number in [0, 1]")
    box = body.get("box")
    if box is not None:
        if not isinstance(box, dict):
            errors.append("box must be an object")
        else:
            for key in ("cx", "cy", "w", "h", "angle"):
                if not isinstance(box.get(key), (int, float)):
                    errors.append(f"box.{key} must be a number")
    nonce = body.get("client_nonce")
    if nonce is not None and not isinstance(nonce, str):
        errors.append("client_nonce must be a string")
    return errors


def pattern_name(method: str, pattern: str) -> str:
    """Stable handler-method suffix for a route, e.g. post_api_login."""
    words = re.findall(r"[a-z]+", pattern.split("(")[0])
    return "_".join([method.lower()] + words)


class ApiServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, store: TrackStore, token_ttl_ms: int = TOKEN_TTL_MS):
        super().__init__(address, ApiHandler)
        self.store = store
        self.tokens = TokenTable(ttl_ms=token_ttl_ms)


def make_server(store: TrackStore, bind: str = "127.0.0.1:8080", token_ttl_ms: int = TOKEN_TTL_MS) -> ApiServer:
    host, _, port = bind.rpartition(":")
    return ApiServer((host or "127.0.0.1", int(port)), store, token_ttl_ms=token_ttl_ms)


def serve_forever(store: TrackStore, bind: str) -> None:  # pragma: no cover - CLI loop
    server = make_server(store, bind)
    log.info("serving on %s", bind)
    try:
        server.serve_forever()
    finally:
        server.server_close()
