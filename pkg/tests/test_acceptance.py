"""Acceptance suite: every criterion at its stated tolerance.

Each test prints one summary line; the conftest terminal hook repeats a
PASS/FAIL line per criterion at the end of the run.
"""

import math
import time

import numpy as np
import pytest
from shapely.geometry import Polygon

import platetrack
from platetrack.detect import (
    DetectorConfig,
    GeometryMap,
    RotatedBox,
    ScoreMap,
    decode_east,
    filter_plate_candidates,
    iou_rotated,
    nms_locality_aware,
    nms_standard,
)
from platetrack.imaging import ImageBuffer, gaussian_blur
from platetrack.recognize import builtin_template_library, recognize_plate
from platetrack.service import ROUTES
from platetrack.store import TrackStore
from platetrack.synth import (
    add_gaussian_noise,
    encode_east,
    encode_east_region,
    random_plate_text,
    render_plate,
)


def random_box(rng, spread=20.0) -> RotatedBox:
    return RotatedBox(
        cx=float(rng.uniform(-spread, spread)),
        cy=float(rng.uniform(-spread, spread)),
        w=float(rng.uniform(2, 18)),
        h=float(rng.uniform(2, 18)),
        angle=float(rng.uniform(-1.5, 1.5)),
        score=float(rng.uniform(0, 1)),
    )


def shapely_iou(a: RotatedBox, b: RotatedBox) -> float:
    pa, pb = Polygon(a.corners()), Polygon(b.corners())
    inter = pa.intersection(pb).area
    union = pa.area + pb.area - inter
    return inter / union if union > 0 else 0.0


def test_nms_oracle_equivalence():
    """200 random inputs (n <= 50): greedy NMS matches the O(n^2) oracle
    exactly — same boxes, same order."""
    rng = np.random.default_rng(2024)
    for trial in range(200):
        n = int(rng.integers(0, 51))
        boxes = [random_box(rng) for _ in range(n)]
        tau = float(rng.uniform(0.1, 0.7))
        order = sorted(range(n), key=lambda i: (-boxes[i].score, i))
        kept = []
        for i in order:
            if all(shapely_iou(boxes[i], boxes[j]) <= tau for j in kept):
                kept.append(i)
        oracle = [boxes[i] for i in kept]
        assert nms_standard(boxes, tau) == oracle, f"trial {trial} diverged"
    print("ACC nms-oracle-equivalence: 200/200 inputs identical")


def test_rotated_iou_accuracy():
    """|iou - MonteCarlo(1e5)| <= 0.01 on 100 pairs; fixed examples to 1e-9."""
    a = RotatedBox.axis_aligned(0, 0, 1, 1)
    assert iou_rotated(a, a) == pytest.approx(1.0, abs=1e-9)
    far = RotatedBox(100, 0, 10, 10)
    near = RotatedBox(0, 0, 10, 10)
    assert iou_rotated(near, far) == pytest.approx(0.0, abs=1e-9)
    b = RotatedBox.axis_aligned(0.5, 0, 1.5, 1)
    assert iou_rotated(a, b) == pytest.approx(1.0 / 3.0, abs=1e-9)

    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        x = random_box(rng, spread=6.0)
        y = random_box(rng, spread=6.0)
        pts = np.vstack([x.corners(), y.corners()])
        x0, y0 = pts.min(axis=0)
        x1, y1 = pts.max(axis=0)
        xs = rng.uniform(x0, x1, 100_000)
        ys = rng.uniform(y0, y1, 100_000)

        def inside(box):
            c, s = math.cos(box.angle), math.sin(box.angle)
            dx, dy = xs - box.cx, ys - box.cy
            u = c * dx + s * dy
            v = -s * dx + c * dy
            return (np.abs(u) <= box.w / 2) & (np.abs(v) <= box.h / 2)

        in_x, in_y = inside(x), inside(y)
        union = (in_x | in_y).sum()
        estimate = float((in_x & in_y).sum() / union) if union else 0.0
        err = abs(iou_rotated(x, y) - estimate)
        worst = max(worst, err)
        assert err <= 0.01
    print(f"ACC rotated-iou-accuracy: worst |analytic - MC| = {worst:.5f} <= 0.01")


def test_convolution_correctness():
    """Separable blur vs direct 2-D convolution: <= 1 gray level over 50
    random 64x64 images."""
    rng = np.random.default_rng(99)
    worst = 0
    for _ in range(50):
        arr = rng.integers(0, 256, (64, 64), np.uint8)
        sigma = float(rng.uniform(0.5, 3.0))
        ksize = int(rng.choice([3, 5, 7, 9]))
        out = gaussian_blur(ImageBuffer.from_array(arr), sigma, ksize).pixels

        half = ksize // 2
        idx = np.arange(-half, half + 1, dtype=np.float64)
        k1 = np.exp(-(idx**2) / (2 * sigma * sigma))
        k1 /= k1.sum()
        kernel = np.outer(k1, k1)  # direct 2-D kernel, one convolution pass
        padded = np.pad(arr.astype(np.float64), half, mode="edge")
        acc = np.zeros((64, 64))
        for dy in range(ksize):
            for dx in range(ksize):
                acc += kernel[dy, dx] * padded[dy : dy + 64, dx : dx + 64]
        oracle = np.floor(acc + 0.5).astype(np.uint8)

        diff = int(np.abs(out.astype(int) - oracle.astype(int)).max())
        worst = max(worst, diff)
        assert diff <= 1
    print(f"ACC convolution-correctness: worst per-pixel diff = {worst} <= 1")


def test_east_decode_round_trip():
    """100 random boxes encoded one-hot and decoded back: corners within
    0.5 px."""
    rng = np.random.default_rng(17)
    cfg = DetectorConfig()
    worst = 0.0
    for _ in range(100):
        box = RotatedBox(
            cx=float(rng.uniform(40, 1240)),
            cy=float(rng.uniform(40, 680)),
            w=float(rng.uniform(12, 300)),
            h=float(rng.uniform(12, 120)),
            angle=float(rng.uniform(-1.45, 1.45)),
            score=float(rng.uniform(0.81, 1.0)),
        )
        scores, geom = encode_east([box], 180, 320, stride=4)
        (decoded,) = decode_east(ScoreMap(scores), GeometryMap(geom), cfg)
        err = float(np.abs(decoded.corners() - box.corners()).max())
        worst = max(worst, err)
        assert err <= 0.5
    print(f"ACC east-decode-round-trip: worst corner error = {worst:.4f} px <= 0.5")


def test_end_to_end_recognition_corpus():
    """200 rendered plates with noise sigma <= 10: full-string >= 95%,
    per-character >= 99%, suite section under 60 s."""
    rng = np.random.default_rng(512)
    lib = builtin_template_library()
    t0 = time.perf_counter()
    full = 0
    chars_total = 0
    chars_ok = 0
    for _ in range(200):
        text = random_plate_text(rng)
        plate = render_plate(text)
        sigma = float(rng.uniform(0.0, 10.0))
        noisy = add_gaussian_noise(plate, sigma, rng) if sigma > 0 else plate
        read = recognize_plate(noisy, lib)
        if read.text == text:
            full += 1
        chars_total += len(text)
        if len(read.text) == len(text):
            chars_ok += sum(a == b for a, b in zip(read.text, text))
    elapsed = time.perf_counter() - t0
    full_acc = full / 200
    char_acc = chars_ok / chars_total
    print(
        f"ACC end-to-end-recognition: full {full_acc:.1%} (>=95%), "
        f"char {char_acc:.3%} (>=99%), {elapsed:.1f}s (<60s)"
    )
    assert full_acc >= 0.95
    assert char_acc >= 0.99
    assert elapsed < 60.0


def test_postprocess_throughput():
    """decode + locality-aware NMS + filters on 180x320-cell maps must
    sustain >= 33 maps/s single-threaded (native kernel path)."""
    import os

    if os.environ.get("PLATETRACK_FORCE_FALLBACK") == "1":
        pytest.skip("fallback forced by env; criterion targets the compiled path")
    assert platetrack.KERNEL_BACKEND == "native", "compiled kernels missing; rebuild the extension"
    rng = np.random.default_rng(31)
    cfg = DetectorConfig()
    frame = ImageBuffer.full(1280, 720, 128)

    maps = []
    for _ in range(10):
        boxes = []
        for _ in range(6):
            boxes.append(
                RotatedBox(
                    cx=float(rng.uniform(150, 1130)),
                    cy=float(rng.uniform(80, 640)),
                    w=float(rng.uniform(120, 300)),
                    h=float(rng.uniform(30, 70)),
                    angle=float(rng.uniform(-0.3, 0.3)),
                    score=float(rng.uniform(0.85, 0.99)),
                )
            )
        scores, geom = encode_east_region(boxes, 180, 320, stride=4, rng=rng)
        maps.append((ScoreMap(scores), GeometryMap(geom)))

    hot = sum(int((m[0].values >= cfg.score_threshold).sum()) for m in maps) / len(maps)

    # warm up, then time repeated passes over the map set
    for score, geom in maps:
        boxes = decode_east(score, geom, cfg)
        boxes = nms_locality_aware(boxes, cfg.nms_iou_threshold)
        filter_plate_candidates(boxes, frame, cfg)
    n_runs = 3
    t0 = time.perf_counter()
    for _ in range(n_runs):
        for score, geom in maps:
            boxes = decode_east(score, geom, cfg)
            boxes = nms_locality_aware(boxes, cfg.nms_iou_threshold)
            filter_plate_candidates(boxes, frame, cfg)
    elapsed = time.perf_counter() - t0
    rate = n_runs * len(maps) / elapsed
    print(
        f"ACC postprocess-throughput: {rate:.1f} maps/s (>= 33), "
        f"avg {hot:.0f} candidate cells/map"
    )
    assert rate >= 33.0


def test_store_durability(tmp_path):
    """1000-op random workload: recover equals live state; a torn final
    line loses exactly one record."""
    root = tmp_path / "store"
    store = TrackStore(root, fsync=False, pbkdf2_iterations=300)
    rng = np.random.default_rng(41)
    store.upsert_camera("cam-0", "seed", 0.0, 0.0)
    cameras = {"cam-0"}
    users = set()
    for i in range(1000):
        roll = rng.random()
        if roll < 0.80:
            cam = sorted(cameras)[int(rng.integers(len(cameras)))]
            t = int(rng.integers(0, 1 << 40))
            store.insert_sighting(
                f"MH{int(rng.integers(10, 99))}AB{int(rng.integers(1000, 9999))}",
                cam,
                t,
                t + int(rng.integers(0, 10_000)),
                float(rng.random()),
                box={"cx": 1.0, "cy": 2.0, "w": 30.0, "h": 10.0, "angle": 0.0},
            )
        elif roll < 0.90:
            cam = f"cam-{int(rng.integers(1, 8))}"
            if cam in cameras:
                store.delete_camera(cam)
                cameras.discard(cam)
            else:
                store.upsert_camera(cam, "x", 0.0, 0.0)
                cameras.add(cam)
        else:
            name = f"user-{int(rng.integers(0, 6))}"
            if name in users:
                store.delete_user(name)
                users.discard(name)
            else:
                store.create_user(name, "password123", "basic")
                users.add(name)
    recovered = TrackStore(root, fsync=False, pbkdf2_iterations=300)
    assert recovered.list_sightings(limit=10**6) == store.list_sightings(limit=10**6)
    assert recovered.list_cameras() == store.list_cameras()
    assert recovered.list_users() == store.list_users()

    n_before = len(store.list_sightings(limit=10**6))
    log = root / "sightings.jsonl"
    blob = log.read_bytes()
    log.write_bytes(blob[:-20])  # tear the final record mid-line
    torn = TrackStore(root, fsync=False, pbkdf2_iterations=300)
    assert len(torn.list_sightings(limit=10**6)) == n_before - 1
    assert any("torn" in w for w in torn.recovery_warnings)
    print(
        f"ACC store-durability: {n_before} records round-tripped; "
        "torn tail lost exactly 1 record"
    )


def test_security_floor(tmp_path):
    """No unauthenticated non-login route; no plaintext credentials in any
    persisted file."""
    import threading

    import requests

    from platetrack.service import make_server

    root = tmp_path / "store"
    store = TrackStore(root, fsync=False, pbkdf2_iterations=500)
    password = "floor-secret-pw1"
    store.create_user("admin", password, "admin")
    _, api_key = store.upsert_camera("cam-1", "gate", 1.0, 2.0)
    store.insert_sighting("MH12AB1234", "cam-1", 1, 2, 0.9)

    server = make_server(store, "127.0.0.1:0")
    thread = threading.Thread(target=lambda: server.serve_forever(poll_interval=0.02), daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{server.server_address[1]}"
    try:
        open_routes = []
        for method, pattern, auth in ROUTES:
            path = (
                pattern.strip("^$")
                .replace("(?P<camera_id>[^/]+)", "c")
                .replace("(?P<username>[^/]+)", "u")
            )
            resp = requests.request(method, f"{base}{path}", json={})
            if auth == "none":
                continue
            if resp.status_code != 401:
                open_routes.append(f"{method} {path} -> {resp.status_code}")
        assert not open_routes, open_routes
    finally:
        server.shutdown()
        server.server_close()

    leaked = []
    for file in root.iterdir():
        blob = file.read_bytes()
        if password.encode() in blob or api_key.encode() in blob:
            leaked.append(file.name)
    assert not leaked, leaked
    print(
        f"ACC security-floor: {sum(1 for r in ROUTES if r[2] != 'none')} routes "
        "reject anonymous access; no plaintext secrets on disk"
    )
