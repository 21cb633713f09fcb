#!/usr/bin/env python3
"""Convert a UCSD-style clip directory (TIFF/BMP/PNG frames) to the PGM
sequence layout the `aad` pipeline consumes.

UCSD Anomaly Detection clips ship as directories of numbered .tif frames
(Test001/, Test002/, ...) with frame-level ground truth published as MATLAB
index ranges. This script re-encodes one clip as frame_0000.pgm,
frame_0001.pgm, ... and can emit the matching truth.txt from those ranges:

    ucsd_to_pgm.py --src UCSDped1/Test/Test001 --out work/test001 \
        --truth-ranges 60-152

Requires Pillow (pip install pillow) for TIFF decoding.
"""

import argparse
import re
import sys
from pathlib import Path


def natural_key(name: str):
    return [int(tok) if tok.isdigit() else tok for tok in re.split(r"(\d+)", name)]


def parse_ranges(text: str):
    """'60-152,170-180' -> [(60, 152), (170, 180)], 1-based inclusive."""
    ranges = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        m = re.fullmatch(r"(\d+)\s*-\s*(\d+)", part)
        if not m:
            raise ValueError(f"bad range {part!r}, want FIRST-LAST")
        first, last = int(m.group(1)), int(m.group(2))
        if first < 1 or last < first:
            raise ValueError(f"bad range {part!r}: need 1 <= FIRST <= LAST")
        ranges.append((first, last))
    if not ranges:
        raise ValueError("no ranges given")
    return ranges


def save_pgm(path: Path, width: int, height: int, pixels: bytes):
    with open(path, "wb") as f:
        f.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        f.write(pixels)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--src", required=True, type=Path,
                        help="clip directory containing the source frames")
    parser.add_argument("--out", required=True, type=Path,
                        help="output directory for the PGM sequence")
    parser.add_argument("--pattern", default="*.tif",
                        help="source frame glob (default: *.tif)")
    parser.add_argument("--truth-ranges", default=None,
                        help="anomalous frame ranges, 1-based inclusive, "
                             "e.g. '60-152' or '60-152,170-180'; writes truth.txt")
    args = parser.parse_args()

    try:
        from PIL import Image
    except ImportError:
        print("error: Pillow is required (pip install pillow)", file=sys.stderr)
        return 1

    if not args.src.is_dir():
        print(f"error: {args.src} is not a directory", file=sys.stderr)
        return 1
    sources = sorted((p for p in args.src.glob(args.pattern) if p.is_file()),
                     key=lambda p: natural_key(p.name))
    if not sources:
        print(f"error: no files match {args.pattern} in {args.src}", file=sys.stderr)
        return 1

    try:
        ranges = parse_ranges(args.truth_ranges) if args.truth_ranges else None
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1

    args.out.mkdir(parents=True, exist_ok=True)
    size = None
    for index, src in enumerate(sources):
        with Image.open(src) as img:
            gray = img.convert("L")
            if size is None:
                size = gray.size
            elif gray.size != size:
                print(f"error: {src.name} is {gray.size[0]}x{gray.size[1]}, "
                      f"expected {size[0]}x{size[1]}", file=sys.stderr)
                return 1
            save_pgm(args.out / f"frame_{index:04d}.pgm",
                     gray.size[0], gray.size[1], gray.tobytes())

    if ranges is not None:
        n = len(sources)
        for first, last in ranges:
            if last > n:
                print(f"error: range end {last} exceeds frame count {n}",
                      file=sys.stderr)
                return 1
        labels = [0] * n
        for first, last in ranges:
            for i in range(first - 1, last):
                labels[i] = 1
        (args.out / "truth.txt").write_text("".join(f"{v}\n" for v in labels))

    print(f"wrote {len(sources)} frames ({size[0]}x{size[1]}) to {args.out}"
          + (" with truth.txt" if ranges else ""))
    return 0


if __name__ == "__main__":
    sys.exit(main())
