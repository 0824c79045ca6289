import threading
import time

import pytest
import requests

from platetrack.service import ROUTES, make_server, pattern_name
from platetrack.store import TrackStore


@pytest.fixture
def service(tmp_path):
    store = TrackStore(tmp_path / "store", fsync=False, pbkdf2_iterations=500)
    store.create_user("root", "admin-pass-1", "admin")
    store.create_user("viewer", "basic-pass-1", "basic")
    server = make_server(store, "127.0.0.1:0")
    thread = threading.Thread(target=lambda: server.serve_forever(poll_interval=0.02), daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{server.server_address[1]}"
    yield base, store, server
    server.shutdown()
    server.server_close()


def login(base, username, password):
    resp = requests.post(f"{base}/api/login", json={"username": username, "password": password})
    assert resp.status_code == 200
    return resp.json()


def auth(token):
    return {"Authorization": f"Bearer {token}"}


def make_camera(base, admin_token, camera_id="cam-1", lat=1.0, lon=2.0):
    resp = requests.post(
        f"{base}/api/cameras",
        json={"camera_id": camera_id, "label": "gate", "lat": lat, "lon": lon},
        headers=auth(admin_token),
    )
    assert resp.status_code == 201, resp.text
    return resp.json()


def ingest_payload(camera_id="cam-1", plate="MH12AB1234", nonce=None, first=1000, last=2000):
    body = {
        "plate": plate,
        "camera_id": camera_id,
        "first_seen_ms": first,
        "last_seen_ms": last,
        "confidence": 0.9,
        "box": {"cx": 1, "cy": 2, "w": 30, "h": 10, "angle": 0.0},
    }
    if nonce:
        body["client_nonce"] = nonce
    return body


class TestLogin:
    def test_valid_admin_login(self, service):
        base, _, _ = service
        body = login(base, "root", "admin-pass-1")
        assert body["role"] == "admin"
        assert body["expires_at"] > int(time.time() * 1000)
        assert len(body["token"]) >= 20

    def test_wrong_password_is_api_error_shape(self, service):
        base, _, _ = service
        resp = requests.post(f"{base}/api/login", json={"username": "root", "password": "nope-nope"})
        assert resp.status_code == 401
        assert resp.json() == {
            "http_status": 401,
            "code": "invalid-credentials",
            "message": "invalid credentials",
        }

    def test_missing_field_is_400(self, service):
        base, _, _ = service
        resp = requests.post(f"{base}/api/login", json={"username": "root"})
        assert resp.status_code == 400

    def test_non_json_body_is_400(self, service):
        base, _, _ = service
        resp = requests.post(f"{base}/api/login", data=b"not json at all")
        assert resp.status_code == 400


class TestQueries:
    def test_basic_role_can_list(self, service):
        base, store, _ = service
        token = login(base, "viewer", "basic-pass-1")["token"]
        resp = requests.get(f"{base}/api/sightings", headers=auth(token))
        assert resp.status_code == 200
        assert resp.json() == []

    def test_expired_token_rejected(self, tmp_path):
        store = TrackStore(tmp_path / "s", fsync=False, pbkdf2_iterations=500)
        store.create_user("viewer", "basic-pass-1", "basic")
        server = make_server(store, "127.0.0.1:0", token_ttl_ms=50)
        threading.Thread(target=lambda: server.serve_forever(poll_interval=0.02), daemon=True).start()
        base = f"http://127.0.0.1:{server.server_address[1]}"
        try:
            token = login(base, "viewer", "basic-pass-1")["token"]
            time.sleep(0.1)
            resp = requests.get(f"{base}/api/sightings", headers=auth(token))
            assert resp.status_code == 401
        finally:
            server.shutdown()
            server.server_close()

    def test_bad_range_is_400(self, service):
        base, _, _ = service
        token = login(base, "viewer", "basic-pass-1")["token"]
        resp = requests.get(f"{base}/api/sightings?from=10&to=5", headers=auth(token))
        assert resp.status_code == 400

    def test_bad_int_param_is_400(self, service):
        base, _, _ = service
        token = login(base, "viewer", "basic-pass-1")["token"]
        resp = requests.get(f"{base}/api/sightings?limit=ten", headers=auth(token))
        assert resp.status_code == 400

    def test_path_endpoint_orders_by_time(self, service):
        base, store, _ = service
        admin = login(base, "root", "admin-pass-1")["token"]
        for cam, t in (("A", 5000), ("B", 1000), ("C", 3000)):
            make_camera(base, admin, cam)
            store.insert_sighting("MH12AB1234", cam, t, t + 10, 0.9)
        token = login(base, "viewer", "basic-pass-1")["token"]
        resp = requests.get(f"{base}/api/path?plate=MH12AB1234", headers=auth(token))
        assert resp.status_code == 200
        assert [p["camera_id"] for p in resp.json()] == ["B", "C", "A"]

    def test_cameras_listing_hides_key_material(self, service):
        base, _, _ = service
        admin = login(base, "root", "admin-pass-1")["token"]
        make_camera(base, admin)
        token = login(base, "viewer", "basic-pass-1")["token"]
        (cam,) = requests.get(f"{base}/api/cameras", headers=auth(token)).json()
        assert set(cam) == {"camera_id", "label", "lat", "lon", "active"}


class TestAdminCrud:
    def test_basic_role_gets_403_not_401(self, service):
        base, _, _ = service
        token = login(base, "viewer", "basic-pass-1")["token"]
        resp = requests.post(
            f"{base}/api/cameras",
            json={"camera_id": "x", "label": "", "lat": 0, "lon": 0},
            headers=auth(token),
        )
        assert resp.status_code == 403

    def test_camera_create_returns_one_time_key(self, service):
        base, _, _ = service
        admin = login(base, "root", "admin-pass-1")["token"]
        body = make_camera(base, admin)
        assert "api_key" in body and len(body["api_key"]) > 20
        token = login(base, "viewer", "basic-pass-1")["token"]
        listed = requests.get(f"{base}/api/cameras", headers=auth(token)).json()
        assert "api_key" not in listed[0]

    def test_duplicate_camera_409(self, service):
        base, _, _ = service
        admin = login(base, "root", "admin-pass-1")["token"]
        make_camera(base, admin, "dup")
        resp = requests.post(
            f"{base}/api/cameras",
            json={"camera_id": "dup", "label": "", "lat": 0, "lon": 0},
            headers=auth(admin),
        )
        assert resp.status_code == 409

    def test_delete_unknown_user_404(self, service):
        base, _, _ = service
        admin = login(base, "root", "admin-pass-1")["token"]
        resp = requests.delete(f"{base}/api/users/ghost", headers=auth(admin))
        assert resp.status_code == 404

    def test_user_create_then_login(self, service):
        base, _, _ = service
        admin = login(base, "root", "admin-pass-1")["token"]
        resp = requests.post(
            f"{base}/api/users",
            json={"username": "carol", "password": "longenough1", "role": "basic"},
            headers=auth(admin),
        )
        assert resp.status_code == 201
        assert login(base, "carol", "longenough1")["role"] == "basic"

    def test_deleted_camera_key_stops_ingesting(self, service):
        base, _, _ = service
        admin = login(base, "root", "admin-pass-1")["token"]
        body = make_camera(base, admin, "cam-gone")
        resp = requests.delete(f"{base}/api/cameras/cam-gone", headers=auth(admin))
        assert resp.status_code == 200
        resp = requests.post(
            f"{base}/api/ingest",
            json=ingest_payload("cam-gone"),
            headers={"X-Api-Key": body["api_key"]},
        )
        assert resp.status_code == 401


class TestIngest:
    def test_valid_key_inserts(self, service):
        base, store, _ = service
        admin = login(base, "root", "admin-pass-1")["token"]
        key = make_camera(base, admin)["api_key"]
        resp = requests.post(
            f"{base}/api/ingest", json=ingest_payload(), headers={"X-Api-Key": key}
        )
        assert resp.status_code == 201
        assert len(store.list_sightings()) == 1

    def test_replayed_nonce_same_id_no_duplicate(self, service):
        base, store, _ = service
        admin = login(base, "root", "admin-pass-1")["token"]
        key = make_camera(base, admin)["api_key"]
        payload = ingest_payload(nonce="nonce-1")
        first = requests.post(f"{base}/api/ingest", json=payload, headers={"X-Api-Key": key})
        second = requests.post(f"{base}/api/ingest", json=payload, headers={"X-Api-Key": key})
        assert first.status_code == 201
        assert second.status_code == 200
        assert first.json()["id"] == second.json()["id"]
        assert len(store.list_sightings()) == 1

    def test_payload_naming_other_camera_403(self, service):
        base, _, _ = service
        admin = login(base, "root", "admin-pass-1")["token"]
        key = make_camera(base, admin, "cam-a")["api_key"]
        make_camera(base, admin, "cam-b")
        resp = requests.post(
            f"{base}/api/ingest", json=ingest_payload("cam-b"), headers={"X-Api-Key": key}
        )
        assert resp.status_code == 403

    def test_schema_violation_422(self, service):
        base, _, _ = service
        admin = login(base, "root", "admin-pass-1")["token"]
        key = make_camera(base, admin)["api_key"]
        bad = ingest_payload()
        bad["confidence"] = 7
        resp = requests.post(f"{base}/api/ingest", json=bad, headers={"X-Api-Key": key})
        assert resp.status_code == 422

    def test_bearer_token_cannot_ingest(self, service):
        base, _, _ = service
        admin = login(base, "root", "admin-pass-1")["token"]
        make_camera(base, admin)
        resp = requests.post(
            f"{base}/api/ingest", json=ingest_payload(), headers=auth(admin)
        )
        assert resp.status_code == 401


class TestRouteSecurity:
    def test_every_non_login_route_rejects_anonymous(self, service):
        base, _, _ = service
        for method, pattern, authkind in ROUTES:
            if authkind == "none":
                continue
            path = (
                pattern.strip("^$")
                .replace("(?P<camera_id>[^/]+)", "some-cam")
                .replace("(?P<username>[^/]+)", "some-user")
            )
            resp = requests.request(method, f"{base}{path}", json={})
            assert resp.status_code == 401, f"{method} {path} -> {resp.status_code}"
            body = resp.json()
            assert set(body) == {"http_status", "code", "message"}

    def test_role_matrix(self, service):
        base, _, _ = service
        basic = login(base, "viewer", "basic-pass-1")["token"]
        admin = login(base, "root", "admin-pass-1")["token"]
        # basic: reads succeed, mutations 403
        assert requests.get(f"{base}/api/sightings", headers=auth(basic)).status_code == 200
        assert requests.get(f"{base}/api/cameras", headers=auth(basic)).status_code == 200
        assert (
            requests.post(
                f"{base}/api/users",
                json={"username": "x", "password": "abcdefgh1", "role": "basic"},
                headers=auth(basic),
            ).status_code
            == 403
        )
        assert requests.delete(f"{base}/api/users/root", headers=auth(basic)).status_code == 403
        assert requests.delete(f"{base}/api/cameras/c", headers=auth(basic)).status_code == 403
        # admin reads + CRUD succeed (404 only because the id is unknown)
        assert requests.get(f"{base}/api/sightings", headers=auth(admin)).status_code == 200
        assert requests.delete(f"{base}/api/cameras/ghost", headers=auth(admin)).status_code == 404

    def test_unknown_route_404_with_error_shape(self, service):
        base, _, _ = service
        resp = requests.get(f"{base}/api/nothing-here")
        assert resp.status_code == 404
        assert set(resp.json()) == {"http_status", "code", "message"}

    def test_every_route_has_a_handler(self):
        from platetrack.service import ApiHandler

        for method, pattern, _ in ROUTES:
            assert hasattr(ApiHandler, "_h_" + pattern_name(method, pattern))

    def test_cors_preflight(self, service):
        base, _, _ = service
        resp = requests.options(f"{base}/api/sightings")
        assert resp.status_code == 204
        assert resp.headers["Access-Control-Allow-Origin"] == "*"
