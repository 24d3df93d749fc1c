#!/usr/bin/env python3
"""Regenerate tests/data/mini: three small images, two subjects' fixations,
one label map, and the golden metric CSVs produced by the infosal CLI.

    python3 tools/make_mini_fixture.py --infosal build/infosal

The inputs are built from Python's seeded Mersenne Twister, so they do not
change between runs. Goldens must be regenerated (and reviewed) whenever a
deliberate change moves the maps.
"""

import argparse
import pathlib
import random
import subprocess
import sys
import tempfile

WIDTH, HEIGHT = 96, 72
SQUARE = 12
# Top-left corner of the planted square in each image.
SQUARES = [(60, 16), (20, 40), (44, 28)]

# Per-frame fixations: (subject, dx, dy) relative to the square's center,
# plus one stray fixation per subject elsewhere.
OFFSETS = {
    "s1": [(0, 0), (3, -2), (-4, 3)],
    "s2": [(1, 1), (-3, -4), (5, 2)],
}
STRAYS = {"s1": (10.5, 60.0), "s2": (85.0, 8.5)}

SKY, ROAD, CAR, CHILD = 1, 18, 25, 32

# Commands run in this order; the acceptance test mirrors them. `{maps}` is
# the three map paths in frame order, `{fix}` the fixation CSV.
METRICS = [
    ("roc.csv", ["eval-roc", "{maps}", "{fix}"]),
    ("isroc.csv", ["eval-isroc", "{maps}", "{fix}"]),
    ("nsv.csv", ["eval-nsv", "--nsv-radius", "4", "{maps}", "{fix}"]),
    ("cas.csv", ["eval-cas", "--nsv-radius", "4", "--random-count", "100", "--seed", "0",
                 "{maps}", "{fix}"]),
    ("xcorr.csv", ["eval-xcorr", "--labels", "{map0}", "{labels}"]),
]


def smooth_background(rng):
    noise = [[rng.random() for _ in range(WIDTH)] for _ in range(HEIGHT)]
    out = []
    for y in range(HEIGHT):
        row = []
        for x in range(WIDTH):
            acc, n = 0.0, 0
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    yy = min(max(y + dy, 0), HEIGHT - 1)
                    xx = min(max(x + dx, 0), WIDTH - 1)
                    acc += noise[yy][xx]
                    n += 1
            row.append(int(round(255 * (0.5 + 0.25 * (acc / n - 0.5)))))
        out.append(row)
    return out


def planted_image(seed, x0, y0):
    rng = random.Random(seed)
    img = smooth_background(rng)
    blocks = [[rng.random() < 0.5 for _ in range(SQUARE // 2)] for _ in range(SQUARE // 2)]
    for y in range(SQUARE):
        for x in range(SQUARE):
            img[y0 + y][x0 + x] = 255 if blocks[y // 2][x // 2] else 0
    return img


def pgm_bytes(rows):
    header = f"P5\n{len(rows[0])} {len(rows)}\n255\n".encode()
    return header + bytes(v for row in rows for v in row)


def label_map(x0, y0):
    rows = []
    for y in range(HEIGHT):
        row = []
        for x in range(WIDTH):
            if x0 <= x < x0 + SQUARE and y0 <= y < y0 + SQUARE:
                row.append(CHILD)
            elif y < HEIGHT // 3:
                row.append(SKY)
            elif y >= 2 * HEIGHT // 3:
                row.append(ROAD)
            else:
                row.append(CAR)
        rows.append(row)
    return rows


def fixation_csv():
    lines = ["frame,x,y,subject"]
    for frame, (x0, y0) in enumerate(SQUARES):
        cx, cy = x0 + SQUARE / 2, y0 + SQUARE / 2
        for subject, offsets in OFFSETS.items():
            for dx, dy in offsets:
                lines.append(f"{frame},{cx + dx:g},{cy + dy:g},{subject}")
            sx, sy = STRAYS[subject]
            lines.append(f"{frame},{sx:g},{sy:g},{subject}")
    return "\n".join(lines) + "\n"


def run(infosal, args):
    result = subprocess.run([infosal, *args], capture_output=True, check=False)
    if result.returncode != 0:
        sys.exit(f"infosal {' '.join(args)} failed:\n{result.stderr.decode()}")
    return result.stdout


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--infosal", required=True, help="path to the infosal binary")
    parser.add_argument("--out", default=pathlib.Path(__file__).resolve().parent.parent
                        / "tests" / "data" / "mini", type=pathlib.Path)
    args = parser.parse_args()

    out = args.out
    (out / "golden").mkdir(parents=True, exist_ok=True)
    images = []
    for i, (x0, y0) in enumerate(SQUARES):
        path = out / f"img{i}.pgm"
        path.write_bytes(pgm_bytes(planted_image(100 + i, x0, y0)))
        images.append(path)
    (out / "labels0.pgm").write_bytes(pgm_bytes(label_map(*SQUARES[0])))
    (out / "fixations.csv").write_text(fixation_csv())

    with tempfile.TemporaryDirectory() as tmp:
        maps = []
        for i, image in enumerate(images):
            m = pathlib.Path(tmp) / f"map{i}.raw"
            run(args.infosal, ["spatial", str(image), "--out", str(m), "--format", "raw64"])
            maps.append(str(m))
        for name, template in METRICS:
            argv = []
            for a in template:
                if a == "{maps}":
                    argv += maps
                elif a == "{fix}":
                    argv.append(str(out / "fixations.csv"))
                elif a == "{map0}":
                    argv.append(maps[0])
                elif a == "{labels}":
                    argv.append(str(out / "labels0.pgm"))
                else:
                    argv.append(a)
            (out / "golden" / name).write_bytes(run(args.infosal, argv))
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
