"""Durable sighting/camera/user store over append-only JSON-lines logs.

Single-writer discipline: every mutation appends one record under a lock
and reaches disk before the call returns. Recovery replays the logs; a torn
final line is dropped with a warning, anything else corrupt is fatal.
"""

from __future__ import annotations

import hashlib
import hmac
import json
import os
import secrets
import threading
from dataclasses import dataclass

from .errors import (
    ArgumentError,
    DuplicateEntityError,
    InvalidCredentials,
    RecoveryError,
    UnknownCameraError,
    UnknownEntityError,
)

ROLES = ("admin", "basic")
PBKDF2_ALGO = "pbkdf2-sha256"
DEFAULT_ITERATIONS = 50_000


@dataclass(frozen=True)
class Camera:
    camera_id: str
    label: str
    lat: float
    lon: float
    api_key_salt: str
    api_key_hash: str
    active: bool = True


@dataclass(frozen=True)
class User:
    username: str
    role: str
    password_params: dict


@dataclass(frozen=True)
class Sighting:
    id: int
    plate: str
    camera_id: str
    first_seen: int  # UTC ms
    last_seen: int
    lat: float
    lon: float
    confidence: float
    box: dict | None = None
    client_nonce: str | None = None

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "plate": self.plate,
            "camera_id": self.camera_id,
            "first_seen_ms": self.first_seen,
            "last_seen_ms": self.last_seen,
            "lat": self.lat,
            "lon": self.lon,
            "confidence": self.confidence,
            "box": self.box,
        }


@dataclass(frozen=True)
class PathPoint:
    camera_id: str
    lat: float
    lon: float
    first_seen: int
    last_seen: int

    def to_json(self) -> dict:
        return {
            "camera_id": self.camera_id,
            "lat": self.lat,
            "lon": self.lon,
            "first_seen_ms": self.first_seen,
            "last_seen_ms": self.last_seen,
        }


def _hash_password(password: str, iterations: int, salt: bytes | None = None) -> dict:
    salt = salt if salt is not None else secrets.token_bytes(16)
    digest = hashlib.pbkdf2_hmac("sha256", password.encode(), salt, iterations)
    return {
        "algo": PBKDF2_ALGO,
        "iterations": iterations,
        "salt": salt.hex(),
        "hash": digest.hex(),
    }


def _verify_password(password: str, params: dict) -> bool:
    if params.get("algo") != PBKDF2_ALGO:
        return False
    digest = hashlib.pbkdf2_hmac(
        "sha256", password.encode(), bytes.fromhex(params["salt"]), int(params["iterations"])
    )
    return hmac.compare_digest(digest.hex(), params["hash"])


def _hash_api_key(key: str, salt: str) -> str:
    # API keys are 192-bit random secrets, so a single salted SHA-256 is
    # enough; iteration counts only matter for low-entropy passwords.
    return hashlib.sha256(bytes.fromhex(salt) + key.encode()).hexdigest()


class TrackStore:
    """Embedded store for sightings, cameras and users with roles."""

    def __init__(self, root, fsync: bool = True, pbkdf2_iterations: int = DEFAULT_ITERATIONS):
        self.root = str(root)
        self.fsync = fsync
        self.iterations = pbkdf2_iterations
        os.makedirs(self.root, exist_ok=True)
        self._lock = threading.RLock()
        self._sightings: list[Sighting] = []
        self._cameras: dict[str, Camera] = {}
        self._users: dict[str, User] = {}
        self._nonces: dict[tuple[str, str], int] = {}
        self._next_id = 1
        self.recovery_warnings: list[str] = []
        self._recover()

    # ---------------- persistence ----------------

    def _path(self, name: str) -> str:
        return os.path.join(self.root, name)

    def _append(self, name: str, record: dict) -> None:
        with open(self._path(name), "ab") as fh:
            fh.write(json.dumps(record, separators=(",", ":")).encode() + b"\n")
            fh.flush()
            if self.fsync:
                os.fsync(fh.fileno())

    def _replay(self, name: str):
        """Yield parsed records; torn trailing line is cut off with a warning."""
        path = self._path(name)
        if not os.path.exists(path):
            return
        with open(path, "rb") as fh:
            blob = fh.read()
        lines = blob.split(b"\n")
        # a well-formed file ends with a newline, so the final element is empty
        trailing = lines.pop() if lines else b""
        records = []
        for lineno, line in enumerate(lines, start=1):
            try:
                records.append(json.loads(line))
            except ValueError as exc:
                if lineno == len(lines) and not trailing:
                    self._truncate_tail(path, blob, line + b"\n")
                    self.recovery_warnings.append(
                        f"{name}: dropped torn final line {lineno}"
                    )
                    break
                raise RecoveryError(f"{name}: corrupt record at line {lineno}: {exc}") from exc
        if trailing:
            self._truncate_tail(path, blob, trailing)
            self.recovery_warnings.append(
                f"{name}: dropped torn final line {len(lines) + 1}"
            )
        yield from records

    @staticmethod
    def _truncate_tail(path: str, blob: bytes, tail: bytes) -> None:
        with open(path, "wb") as fh:
            fh.write(blob[: len(blob) - len(tail)])

    def _recover(self) -> None:
        for rec in self._replay("cameras.jsonl"):
            if rec.get("op") == "delete":
                self._cameras.pop(rec["camera_id"], None)
            else:
                self._cameras[rec["camera_id"]] = Camera(
                    camera_id=rec["camera_id"],
                    label=rec["label"],
                    lat=rec["lat"],
                    lon=rec["lon"],
                    api_key_salt=rec["api_key_salt"],
                    api_key_hash=rec["api_key_hash"],
                    active=rec.get("active", True),
                )
        for rec in self._replay("users.jsonl"):
            if rec.get("op") == "delete":
                self._users.pop(rec["username"], None)
            else:
                self._users[rec["username"]] = User(
                    username=rec["username"], role=rec["role"], password_params=rec["pw"]
                )
        for rec in self._replay("sightings.jsonl"):
            s = Sighting(
                id=rec["id"],
                plate=rec["plate"],
                camera_id=rec["camera_id"],
                first_seen=rec["first_seen"],
                last_seen=rec["last_seen"],
                lat=rec["lat"],
                lon=rec["lon"],
                confidence=rec["confidence"],
                box=rec.get("box"),
                client_nonce=rec.get("client_nonce"),
            )
            self._sightings.append(s)
            if s.client_nonce:
                self._nonces[(s.camera_id, s.client_nonce)] = s.id
            self._next_id = max(self._next_id, s.id + 1)

    # ---------------- sightings ----------------

    def insert_sighting(
        self,
        plate: str,
        camera_id: str,
        first_seen: int,
        last_seen: int,
        confidence: float,
        box: dict | None = None,
        client_nonce: str | None = None,
    ) -> int:
        """Persist one sighting; location is copied from the camera now.

        A (camera, nonce) pair already seen returns the original id without
        inserting again.
        """
        if first_seen > last_seen:
            raise ArgumentError("first_seen must be <= last_seen")
        if not plate:
            raise ArgumentError("plate must be nonempty")
        with self._lock:
            camera = self._cameras.get(camera_id)
            if camera is None:
                raise UnknownCameraError(f"unknown camera {camera_id!r}")
            if client_nonce is not None:
                existing = self._nonces.get((camera_id, client_nonce))
                if existing is not None:
                    return existing
            s = Sighting(
                id=self._next_id,
                plate=plate,
                camera_id=camera_id,
                first_seen=int(first_seen),
                last_seen=int(last_seen),
                lat=camera.lat,
                lon=camera.lon,
                confidence=float(confidence),
                box=box,
                client_nonce=client_nonce,
            )
            self._next_id += 1
            self._sightings.append(s)
            if client_nonce is not None:
                self._nonces[(camera_id, client_nonce)] = s.id
            self._append(
                "sightings.jsonl",
                {
                    "op": "insert",
                    "id": s.id,
                    "plate": s.plate,
                    "camera_id": s.camera_id,
                    "first_seen": s.first_seen,
                    "last_seen": s.last_seen,
                    "lat": s.lat,
                    "lon": s.lon,
                    "confidence": s.confidence,
                    "box": s.box,
                    "client_nonce": s.client_nonce,
                },
            )
            return s.id

    def has_nonce(self, camera_id: str, nonce: str) -> int | None:
        with self._lock:
            return self._nonces.get((camera_id, nonce))

    def list_sightings(
        self,
        plate: str | None = None,
        camera: str | None = None,
        t_from: int | None = None,
        t_to: int | None = None,
        limit: int = 100,
    ) -> list[Sighting]:
        """Matching sightings, most recent first_seen first, capped at limit."""
        if t_from is not None and t_to is not None and t_from > t_to:
            raise ArgumentError("time range requires from <= to")
        with self._lock:
            rows = [
                s
                for s in self._sightings
                if (plate is None or s.plate == plate)
                and (camera is None or s.camera_id == camera)
                and (t_from is None or s.first_seen >= t_from)
                and (t_to is None or s.first_seen <= t_to)
            ]
        rows.sort(key=lambda s: (-s.first_seen, -s.id))
        return rows[: max(0, limit)]

    def path_for_plate(
        self, plate: str, t_from: int | None = None, t_to: int | None = None
    ) -> list[PathPoint]:
        """Time-ordered trail of a plate across cameras (empty if unknown)."""
        with self._lock:
            rows = [
                s
                for s in self._sightings
                if s.plate == plate
                and (t_from is None or s.first_seen >= t_from)
                and (t_to is None or s.first_seen <= t_to)
            ]
        rows.sort(key=lambda s: (s.first_seen, s.id))
        return [
            PathPoint(
                camera_id=s.camera_id,
                lat=s.lat,
                lon=s.lon,
                first_seen=s.first_seen,
                last_seen=s.last_seen,
            )
            for s in rows
        ]

    # ---------------- cameras ----------------

    def upsert_camera(self, camera_id: str, label: str, lat: float, lon: float) -> tuple[Camera, str]:
        """Create a camera; returns it plus the plaintext API key, shown
        exactly once (only the salted hash is stored)."""
        if not camera_id:
            raise ArgumentError("camera_id must be nonempty")
        if not -90.0 <= lat <= 90.0 or not -180.0 <= lon <= 180.0:
            raise ArgumentError(f"location out of range: ({lat}, {lon})")
        key = secrets.token_urlsafe(24)
        salt = secrets.token_bytes(16).hex()
        camera = Camera(
            camera_id=camera_id,
            label=label,
            lat=float(lat),
            lon=float(lon),
            api_key_salt=salt,
            api_key_hash=_hash_api_key(key, salt),
        )
        with self._lock:
            if camera_id in self._cameras:
                raise DuplicateEntityError(f"camera {camera_id!r} already exists")
            self._cameras[camera_id] = camera
            self._append(
                "cameras.jsonl",
                {
                    "op": "put",
                    "camera_id": camera.camera_id,
                    "label": camera.label,
                    "lat": camera.lat,
                    "lon": camera.lon,
                    "api_key_salt": camera.api_key_salt,
                    "api_key_hash": camera.api_key_hash,
                    "active": camera.active,
                },
            )
        return camera, key

    def delete_camera(self, camera_id: str) -> None:
        with self._lock:
            if camera_id not in self._cameras:
                raise UnknownEntityError(f"unknown camera {camera_id!r}")
            del self._cameras[camera_id]
            self._append("cameras.jsonl", {"op": "delete", "camera_id": camera_id})

    def list_cameras(self) -> list[Camera]:
        with self._lock:
            return sorted(self._cameras.values(), key=lambda c: c.camera_id)

    def get_camera(self, camera_id: str) -> Camera | None:
        with self._lock:
            return self._cameras.get(camera_id)

    def verify_camera_key(self, key: str) -> str | None:
        """camera_id whose active key matches, else None (linear scan)."""
        with self._lock:
            cameras = list(self._cameras.values())
        for cam in cameras:
            if cam.active and hmac.compare_digest(
                _hash_api_key(key, cam.api_key_salt), cam.api_key_hash
            ):
                return cam.camera_id
        return None

    # ---------------- users ----------------

    def create_user(self, username: str, password: str, role: str) -> None:
        if not username:
            raise ArgumentError("username must be nonempty")
        if role not in ROLES:
            raise ArgumentError(f"role must be one of {ROLES}, got {role!r}")
        if len(password) < 8:
            raise ArgumentError("password must be at least 8 characters")
        params = _hash_password(password, self.iterations)
        with self._lock:
            if username in self._users:
                raise DuplicateEntityError(f"user {username!r} already exists")
            self._users[username] = User(username=username, role=role, password_params=params)
            self._append("users.jsonl", {"op": "put", "username": username, "role": role, "pw": params})

    def delete_user(self, username: str) -> None:
        with self._lock:
            if username not in self._users:
                raise UnknownEntityError(f"unknown user {username!r}")
            del self._users[username]
            self._append("users.jsonl", {"op": "delete", "username": username})

    def list_users(self) -> list[User]:
        with self._lock:
            return sorted(self._users.values(), key=lambda u: u.username)

    def verify_credentials(self, username: str, password: str) -> str:
        """Role on success; unknown user and bad password are identical
        failures, with a dummy hash keeping the timing flat."""
        with self._lock:
            user = self._users.get(username)
        if user is None:
            _verify_password(password, _hash_password("*", self.iterations))
            raise InvalidCredentials("invalid credentials")
        if not _verify_password(password, user.password_params):
            raise InvalidCredentials("invalid credentials")
        return user.role
