"""Benchmark the detection post-processing hot path: compiled vs fallback.

Runs decode -> locality-aware NMS -> candidate filters over synthetic
180x320-cell maps (a 1280x720 frame at stride 4) and prints maps/s for the
compiled extension and the pure-Python kernels side by side.

Usage: python benchmarks/bench_postprocess.py [--maps 10] [--runs 3] [--json]
"""

import argparse
import json
import time

import numpy as np


def build_maps(n_maps: int, seed: int):
    from platetrack.detect import GeometryMap, RotatedBox, ScoreMap
    from platetrack.synth import encode_east_region

    rng = np.random.default_rng(seed)
    maps = []
    for _ in range(n_maps):
        boxes = [
            RotatedBox(
                cx=float(rng.uniform(150, 1130)),
                cy=float(rng.uniform(80, 640)),
                w=float(rng.uniform(120, 300)),
                h=float(rng.uniform(30, 70)),
                angle=float(rng.uniform(-0.3, 0.3)),
                score=float(rng.uniform(0.85, 0.99)),
            )
            for _ in range(6)
        ]
        scores, geom = encode_east_region(boxes, 180, 320, stride=4, rng=rng)
        maps.append((ScoreMap(scores), GeometryMap(geom)))
    return maps


def time_backend(maps, runs: int):
    from platetrack.detect import DetectorConfig, decode_east, filter_plate_candidates, nms_locality_aware
    from platetrack.imaging import ImageBuffer

    cfg = DetectorConfig()
    frame = ImageBuffer.full(1280, 720, 128)

    def one_pass():
        total_boxes = 0
        for score, geom in maps:
            boxes = decode_east(score, geom, cfg)
            boxes = nms_locality_aware(boxes, cfg.nms_iou_threshold)
            total_boxes += len(filter_plate_candidates(boxes, frame, cfg))
        return total_boxes

    one_pass()  # warm-up
    t0 = time.perf_counter()
    for _ in range(runs):
        kept = one_pass()
    elapsed = time.perf_counter() - t0
    return runs * len(maps) / elapsed, kept


def run_in_subprocess(force_fallback: bool, n_maps: int, runs: int, seed: int):
    """Fresh interpreter so the kernel-selection env var takes effect."""
    import os
    import subprocess
    import sys

    env = dict(os.environ)
    if force_fallback:
        env["PLATETRACK_FORCE_FALLBACK"] = "1"
    else:
        env.pop("PLATETRACK_FORCE_FALLBACK", None)
    code = (
        "import json, sys; sys.path.insert(0, {path!r}); "
        "import bench_postprocess as b; import platetrack; "
        "maps = b.build_maps({n_maps}, {seed}); "
        "rate, kept = b.time_backend(maps, {runs}); "
        "print(json.dumps({{'backend': platetrack.KERNEL_BACKEND, 'maps_per_s': rate, 'kept': kept}}))"
    ).format(path=str(__import__("pathlib").Path(__file__).parent), n_maps=n_maps, runs=runs, seed=seed)
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--maps", type=int, default=10, help="distinct synthetic maps")
    parser.add_argument("--runs", type=int, default=3, help="timed passes over the set")
    parser.add_argument("--seed", type=int, default=31)
    parser.add_argument("--json", action="store_true")
    args = parser.parse_args()

    results = []
    for force_fallback in (False, True):
        results.append(run_in_subprocess(force_fallback, args.maps, args.runs, args.seed))
    if args.json:
        print(json.dumps(results, indent=1))
        return
    print(f"{args.maps} maps x {args.runs} runs, 180x320 cells, 6 plates/map")
    print(f"{'backend':<10} {'maps/s':>10} {'boxes kept':>12}")
    for r in results:
        print(f"{r['backend']:<10} {r['maps_per_s']:>10.2f} {r['kept']:>12}")
    native = next(r for r in results if r["backend"] == "native")
    fallback = next(r for r in results if r["backend"] == "fallback")
    print(f"speedup: {native['maps_per_s'] / fallback['maps_per_s']:.1f}x")
    if native["kept"] != fallback["kept"]:
        print("WARNING: backends kept different box counts")


if __name__ == "__main__":
    main()
