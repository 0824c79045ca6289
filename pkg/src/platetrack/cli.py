"""Command-line surface: detection, recognition, pipeline runs, evaluation,
template building, the HTTP service and store maintenance."""

from __future__ import annotations

import argparse
import getpass
import json
import sys

from . import _kernels
from .config import load_config, parse_input_size, pipeline_config_from
from .errors import PlatetrackError
from .evaluate import evaluate_directory, load_truth
from .imaging import load_pnm
from .pipeline import (
    FrameSource,
    HttpSink,
    JournalSink,
    PipelineConfig,
    StoreSink,
    detect_boxes,
    replay_journal,
)
from .recognize import ReaderParams, build_template_library, recognize_plate, write_glyph_dir
from .store import TrackStore
from .synth import make_corpus


def _fail(code: str, message: str, http_status: int = 400) -> int:
    json.dump({"http_status": http_status, "code": code, "message": message}, sys.stderr)
    sys.stderr.write("\n")
    return 1


def _pipeline_config(args) -> PipelineConfig:
    values = load_config(args.config) if getattr(args, "config", None) else {}
    cfg = pipeline_config_from(values, backend=getattr(args, "backend", None))
    if getattr(args, "input_size", None) is not None:
        cfg = PipelineConfig(
            backend=cfg.backend,
            detector=cfg.detector,
            reader=cfg.reader,
            plate_pattern=cfg.plate_pattern,
            min_confidence=cfg.min_confidence,
            dedup_window_s=cfg.dedup_window_s,
            input_size=parse_input_size(args.input_size),
        )
    return cfg


def _library(args):
    if getattr(args, "templates", None):
        return build_template_library(args.templates)
    from .recognize import builtin_template_library

    return builtin_template_library()


def cmd_detect(args) -> int:
    img = load_pnm(args.image)
    cfg = _pipeline_config(args)
    from .imaging import resize_bilinear, to_grayscale

    if cfg.input_size is not None and (img.width, img.height) != cfg.input_size:
        img = resize_bilinear(img, cfg.input_size[0], cfg.input_size[1])
    gray = to_grayscale(img)
    maps = None
    if cfg.backend == "east":
        if not args.score_map or not args.geom_map:
            return _fail("bad-args", "east backend requires --score-map and --geom-map")
        from .detect import GeometryMap, ScoreMap, load_tensor

        score = load_tensor(args.score_map, stride=cfg.detector.stride)
        geom = load_tensor(args.geom_map, stride=cfg.detector.stride)
        if not isinstance(score, ScoreMap) or not isinstance(geom, GeometryMap):
            return _fail("bad-args", "map files have swapped channel counts")
        maps = (score, geom)
    boxes = detect_boxes(gray, cfg, maps)
    payload = [b.to_json() for b in boxes]
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=1)
    json.dump(payload, sys.stdout, indent=1)
    print()
    return 0


def cmd_recognize(args) -> int:
    img = load_pnm(args.image)
    lib = _library(args)
    read = recognize_plate(img, lib, ReaderParams())
    json.dump(read.to_json(), sys.stdout, indent=1)
    print()
    return 0


def cmd_run(args) -> int:
    cfg = _pipeline_config(args)
    lib = _library(args)
    source = FrameSource(
        path=args.frames, camera_id=args.camera, frame_interval=args.frame_interval
    )
    if args.serve_url:
        if not args.api_key:
            return _fail("bad-args", "--serve-url requires --api-key")
        journal = args.journal or "undelivered.jsonl"
        sink = HttpSink(args.serve_url, args.api_key, journal)
    elif args.store:
        sink = StoreSink(TrackStore(args.store), args.camera)
    elif args.journal:
        sink = JournalSink(args.journal)
    else:
        return _fail("bad-args", "one of --store, --serve-url or --journal is required")
    report = run_pipeline(source, cfg, lib, sink)
    json.dump(report.to_json(), sys.stdout, indent=1)
    print()
    return 0


def run_pipeline(source, cfg, lib, sink):
    from .pipeline import run

    return run(source, cfg, lib, sink)


def cmd_make_templates(args) -> int:
    import os

    from .imaging import save_pnm
    from .imaging.buffer import ImageBuffer

    if args.glyphs == "builtin":
        write_glyph_dir(args.out)
        print(f"wrote built-in glyph set to {args.out}")
        return 0
    lib = build_template_library(args.glyphs)
    os.makedirs(args.out, exist_ok=True)
    for char, template in lib.templates.items():
        save_pnm(ImageBuffer.from_array(template), os.path.join(args.out, f"{char}.pgm"))
    print(f"wrote {len(lib.templates)} normalized templates to {args.out}")
    return 0


def cmd_glyphs(args) -> int:
    write_glyph_dir(args.out)
    print(f"wrote built-in glyph set to {args.out}")
    return 0


def cmd_synth_corpus(args) -> int:
    make_corpus(
        args.out,
        n_frames=args.frames,
        n_plates=args.plates,
        seed=args.seed,
        backend=args.backend,
        frame_w=args.width,
        frame_h=args.height,
        noise_sigma=args.noise,
    )
    print(f"wrote {args.frames} frames and truth.json to {args.out}")
    return 0


def cmd_eval(args) -> int:
    cfg = _pipeline_config(args)
    lib = _library(args)
    truth = load_truth(args.truth)
    report = evaluate_directory(args.frames, truth, cfg, lib)
    json.dump(report, sys.stdout, indent=1)
    print()
    return 0


def cmd_serve(args) -> int:
    from .service import serve_forever

    values = load_config(args.config) if args.config else {}
    store_dir = args.store or values.get("store_dir")
    bind = args.bind or values.get("bind", "127.0.0.1:8080")
    if not store_dir:
        return _fail("bad-args", "--store or config store_dir is required")
    store = TrackStore(str(store_dir))
    for warning in store.recovery_warnings:
        print(f"recovery warning: {warning}", file=sys.stderr)
    serve_forever(store, str(bind))
    return 0


def cmd_user(args) -> int:
    store = TrackStore(args.store)
    if args.action == "add":
        password = args.password or getpass.getpass("password: ")
        store.create_user(args.username, password, args.role)
        print(f"user {args.username} ({args.role}) created")
    else:
        store.delete_user(args.username)
        print(f"user {args.username} removed")
    return 0


def cmd_camera(args) -> int:
    store = TrackStore(args.store)
    if args.action == "add":
        camera, key = store.upsert_camera(args.camera_id, args.label, args.lat, args.lon)
        print(json.dumps({"camera_id": camera.camera_id, "api_key": key}))
        print("store this API key now; it is not shown again", file=sys.stderr)
    else:
        store.delete_camera(args.camera_id)
        print(f"camera {args.camera_id} removed")
    return 0


def cmd_replay_journal(args) -> int:
    delivered, remaining = replay_journal(args.journal, args.serve_url, args.api_key)
    print(json.dumps({"delivered": delivered, "remaining": remaining}))
    return 0 if remaining == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="platetrack",
        description="License plate detection, recognition and sighting tracking "
        f"(kernel backend: {_kernels.BACKEND})",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, templates=True):
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--input-size", dest="input_size", help="WxH resize before detection, or 'none'")
        if templates:
            p.add_argument("--templates", help="glyph template directory (default: built-in font)")

    p = sub.add_parser("detect", help="detect plate boxes in one image")
    p.add_argument("--image", required=True)
    p.add_argument("--backend", choices=("heuristic", "east"), default="heuristic")
    p.add_argument("--score-map")
    p.add_argument("--geom-map")
    p.add_argument("--out", help="write boxes JSON here as well as stdout")
    add_common(p, templates=False)
    p.set_defaults(fn=cmd_detect)

    p = sub.add_parser("recognize", help="read the plate in a cropped image")
    p.add_argument("--image", required=True)
    p.add_argument("--templates")
    p.set_defaults(fn=cmd_recognize)

    p = sub.add_parser("run", help="process a frame directory into sightings")
    p.add_argument("--frames", required=True)
    p.add_argument("--camera", required=True)
    p.add_argument("--backend", choices=("heuristic", "east"), default="heuristic")
    p.add_argument("--store", help="local store directory sink")
    p.add_argument("--serve-url", help="remote service base URL sink")
    p.add_argument("--api-key", help="camera API key for --serve-url")
    p.add_argument("--journal", help="journal file (offline sink, or spool for --serve-url)")
    p.add_argument("--frame-interval", type=float, default=1.0 / 30.0)
    add_common(p)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("make-templates", help="build a normalized template set")
    p.add_argument("--glyphs", required=True, help="glyph directory, or 'builtin'")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_make_templates)

    p = sub.add_parser("glyphs", help="export the built-in glyph set as PGM files")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_glyphs)

    p = sub.add_parser("synth-corpus", help="generate a synthetic frame corpus with truth")
    p.add_argument("--out", required=True)
    p.add_argument("--frames", type=int, default=100)
    p.add_argument("--plates", type=int, default=10)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--backend", choices=("heuristic", "east"), default="east")
    p.add_argument("--width", type=int, default=640)
    p.add_argument("--height", type=int, default=360)
    p.add_argument("--noise", type=float, default=4.0)
    p.set_defaults(fn=cmd_synth_corpus)

    p = sub.add_parser("eval", help="score pipeline output against ground truth")
    p.add_argument("--frames", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--backend", choices=("heuristic", "east"), default="heuristic")
    add_common(p)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("serve", help="run the HTTP JSON API")
    p.add_argument("--store")
    p.add_argument("--bind")
    p.add_argument("--config")
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("user", help="manage users in a store directory")
    p.add_argument("action", choices=("add", "rm"))
    p.add_argument("username")
    p.add_argument("--store", required=True)
    p.add_argument("--role", choices=("admin", "basic"), default="basic")
    p.add_argument("--password", help="prompted when omitted")
    p.set_defaults(fn=cmd_user)

    p = sub.add_parser("camera", help="manage cameras in a store directory")
    p.add_argument("action", choices=("add", "rm"))
    p.add_argument("camera_id")
    p.add_argument("--store", required=True)
    p.add_argument("--label", default="")
    p.add_argument("--lat", type=float, default=0.0)
    p.add_argument("--lon", type=float, default=0.0)
    p.set_defaults(fn=cmd_camera)

    p = sub.add_parser("replay-journal", help="re-send spooled sightings to the service")
    p.add_argument("--journal", required=True)
    p.add_argument("--serve-url", required=True)
    p.add_argument("--api-key", required=True)
    p.set_defaults(fn=cmd_replay_journal)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except PlatetrackError as exc:
        return _fail(type(exc).__name__.lower().replace("error", "-error"), str(exc))
    except FileNotFoundError as exc:
        return _fail("not-found", str(exc), http_status=404)


if __name__ == "__main__":
    sys.exit(main())
