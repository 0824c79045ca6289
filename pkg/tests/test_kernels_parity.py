"""The compiled kernels and the pure-Python fallback must agree."""

import os

import numpy as np
import pytest

from platetrack._kernels import BACKEND, fallback

native = pytest.importorskip("platetrack._kernels._native")


def test_native_backend_is_active_by_default():
    if os.environ.get("PLATETRACK_FORCE_FALLBACK") == "1":
        pytest.skip("fallback forced by env")
    assert BACKEND == "native"


def random_rows(rng, n):
    rows = np.empty((n, 6))
    rows[:, 0] = rng.uniform(-30, 30, n)
    rows[:, 1] = rng.uniform(-30, 30, n)
    rows[:, 2] = rng.uniform(2, 25, n)
    rows[:, 3] = rng.uniform(2, 25, n)
    rows[:, 4] = rng.uniform(-1.5, 1.5, n)
    rows[:, 5] = rng.uniform(0, 1, n)
    return rows


def test_decode_parity(rng):
    scores = rng.random((40, 50)).astype(np.float32)
    geom = np.abs(rng.normal(size=(40, 50, 5))).astype(np.float32) * 4
    a = native.decode_rbox(scores, geom, 0.8, 4.0)
    b = fallback.decode_rbox(scores, geom, 0.8, 4.0)
    assert a.shape == b.shape
    assert np.allclose(a, b, atol=1e-9)


def test_quad_iou_parity(rng):
    for _ in range(200):
        qa = np.ascontiguousarray(fallback.box_corners(*random_rows(rng, 1)[0, :5]))
        qb = np.ascontiguousarray(fallback.box_corners(*random_rows(rng, 1)[0, :5]))
        assert native.quad_iou(qa, qb) == pytest.approx(fallback.quad_iou(qa, qb), abs=1e-12)


def test_nms_parity(rng):
    for _ in range(25):
        rows = random_rows(rng, int(rng.integers(1, 60)))
        tau = float(rng.uniform(0.1, 0.6))
        a = native.nms_greedy(rows, tau)
        b = fallback.nms_greedy(rows, tau)
        assert np.array_equal(a, b)


def test_lanms_parity(rng):
    for _ in range(25):
        rows = random_rows(rng, int(rng.integers(1, 60)))
        # cluster boxes so merges actually happen
        rows[:, 0] = np.sort(rows[:, 0]) * 0.2
        rows[:, 1] *= 0.1
        tau = float(rng.uniform(0.1, 0.4))
        a = native.lanms_merge(rows, tau)
        b = fallback.lanms_merge(rows, tau)
        assert a.shape == b.shape
        assert np.allclose(a, b, atol=1e-9)


def test_label_components_parity(rng):
    for _ in range(15):
        mask = (rng.random((30, 40)) < 0.45).astype(np.uint8)
        la, na = native.label_components(mask)
        lb, nb = fallback.label_components(mask)
        assert na == nb
        assert np.array_equal(la, lb)


def test_label_components_basics():
    mask = np.array(
        [
            [1, 0, 0, 1],
            [0, 1, 0, 0],
            [0, 0, 0, 1],
        ],
        dtype=np.uint8,
    )
    labels, count = fallback.label_components(mask)
    # diagonal touch joins (0,0) and (1,1); (0,3) and (2,3) stay apart
    assert count == 3
    assert labels[0, 0] == labels[1, 1] == 1
    assert labels[0, 3] == 2
    assert labels[2, 3] == 3
    ln, cn = native.label_components(mask)
    assert cn == 3 and np.array_equal(ln, labels)


def test_normalize_angle_scalar_matches_vector():
    angles = [0.0, 1.0, -1.0, 2.0, -2.5, 5.0, -5.0, np.pi / 2, -np.pi / 2, 3 * np.pi]
    for a in angles:
        scalar = fallback.normalize_angle(a)
        assert -np.pi / 2 < scalar <= np.pi / 2 + 1e-15
        vector = float(np.pi / 2 - np.mod(np.pi / 2 - a, np.pi))
        assert scalar == pytest.approx(vector, abs=1e-12)
