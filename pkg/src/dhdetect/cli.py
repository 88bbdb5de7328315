"""``dhdetect`` command line.

    dhdetect detect IMAGE_OR_DIR [--report PATH] [--overlay PATH] [detector flags]
    dhdetect synth --out scene.png [--seed N] [--size WxH] [--dh N] [--vessels N] [--fovea]

Exit codes: 0 success, 1 I/O or decode failure, 2 bad arguments.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from pathlib import Path
from typing import List, Optional

from .detector import DetectorConfig, detect
from .errors import ConfigError, DecodeError, PlacementError
from .raster_io import encode_gray, encode_rgb, read_image, render_overlay
from .synthgen import generate_scene

log = logging.getLogger("dhdetect")

IMAGE_SUFFIXES = {".png", ".ppm", ".bmp"}

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2


def _ranged_int(lo, hi=None):
    def parse(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
        if v < lo or (hi is not None and v > hi):
            bound = f"{lo}..{hi}" if hi is not None else f">= {lo}"
            raise argparse.ArgumentTypeError(f"{v} out of range ({bound})")
        return v

    return parse


def _finite_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if v != v or v in (float("inf"), float("-inf")):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return v


def _size(text):
    try:
        w, h = (int(p) for p in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must look like WxH, got {text!r}")
    if w < 1 or h < 1:
        raise argparse.ArgumentTypeError(f"size must be positive, got {text!r}")
    return w, h


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dhdetect", description="Dot hemorrhage detection in fundus images.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    det = sub.add_parser("detect", help="detect dot hemorrhages in an image or a directory of images")
    det.add_argument("input", type=Path)
    det.add_argument("--report", type=Path, help="JSON report path (a directory in batch mode)")
    det.add_argument("--overlay", type=Path, help="overlay PNG path (a directory in batch mode)")
    det.add_argument("--threshold", type=_ranged_int(0, 255), default=12)
    det.add_argument("--fovea-fraction", type=_finite_float, default=0.0046)
    det.add_argument("--min-area", type=_ranged_int(1), default=4)
    det.add_argument("--connectivity", type=int, choices=(4, 8), default=8)
    det.add_argument("--circ-min", type=_finite_float, default=1.0)
    det.add_argument("--sf-min", type=_finite_float, default=0.70)
    det.add_argument("--sf-max", type=_finite_float, default=0.90)

    syn = sub.add_parser("synth", help="write a synthetic scene PNG and its ground truth JSON")
    syn.add_argument("--seed", type=int, default=0)
    syn.add_argument("--size", type=_size, default=(466, 489), help="WxH (default 466x489)")
    syn.add_argument("--dh", type=_ranged_int(0), default=3)
    syn.add_argument("--vessels", type=_ranged_int(0), default=2)
    syn.add_argument("--fovea", action="store_true")
    syn.add_argument("--out", type=Path, default=Path("scene.png"))
    return parser


def _write_atomic(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _list_images(directory: Path) -> List[Path]:
    return sorted(
        (p for p in directory.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES),
        key=lambda p: p.name,
    )


def run_detect(args: argparse.Namespace) -> int:
    try:
        cfg = DetectorConfig(
            threshold=args.threshold,
            fovea_fraction=args.fovea_fraction,
            min_area=args.min_area,
            connectivity=args.connectivity,
            circ_min=args.circ_min,
            sf_min=args.sf_min,
            sf_max=args.sf_max,
        )
    except ConfigError as exc:
        print(f"dhdetect: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    src: Path = args.input
    if src.is_dir():
        images = _list_images(src)
        report_dir = args.report or src
        overlay_dir = args.overlay
        jobs = [
            (p, report_dir / f"{p.stem}.report.json", overlay_dir / f"{p.stem}.overlay.png" if overlay_dir else None)
            for p in images
        ]
    else:
        jobs = [(src, args.report or src.with_suffix(".report.json"), args.overlay)]

    status = EXIT_OK
    for image_path, report_path, overlay_path in jobs:
        try:
            img = read_image(image_path)
        except (OSError, DecodeError) as exc:
            print(f"dhdetect: error: {image_path}: {exc}", file=sys.stderr)
            status = EXIT_IO
            continue
        report = detect(img, cfg, image_id=image_path.name)
        try:
            _write_atomic(report_path, (report.to_json() + "\n").encode())
            if overlay_path is not None:
                _write_atomic(overlay_path, encode_rgb(render_overlay(img, report)))
        except OSError as exc:
            print(f"dhdetect: error: {exc}", file=sys.stderr)
            status = EXIT_IO
            continue
        print(f"{image_path.name}, {report.dh_count}, {report.total_dh_area}")
    return status


def truth_path(scene_path: Path) -> Path:
    return scene_path.with_name(f"{scene_path.stem}.truth.json")


def run_synth(args: argparse.Namespace) -> int:
    width, height = args.size
    try:
        raster, truth = generate_scene(args.seed, width, height, args.dh, args.vessels, args.fovea)
    except PlacementError as exc:
        print(f"dhdetect: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        _write_atomic(args.out, encode_gray(raster))
        _write_atomic(truth_path(args.out), (json.dumps(truth.to_dict(), indent=2) + "\n").encode())
    except OSError as exc:
        print(f"dhdetect: error: {exc}", file=sys.stderr)
        return EXIT_IO
    log.info("wrote %s and %s", args.out, truth_path(args.out))
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.command == "detect":
        return run_detect(args)
    return run_synth(args)


if __name__ == "__main__":
    sys.exit(main())
