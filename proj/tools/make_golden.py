#!/usr/bin/env python3
"""Regenerates tests/golden: a 2x2 prediction/ground-truth pair and the
error-index curve computed by an exhaustive per-threshold loop."""

import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "golden" / "eval2x2"


def write_pgm(path, width, height, samples):
    path.parent.mkdir(parents=True, exist_ok=True)
    header = f"P5\n{width} {height}\n255\n".encode()
    path.write_bytes(header + bytes(samples))


def curve(pred, gt, beta1=1.0, beta2=1.0):
    n = len(pred)
    errors = [abs(p - g) for p, g in zip(pred, gt)]
    lines = ["threshold,ie,se,total"]
    best = None
    for i in range(0, 253):
        mass = sum(e for e in errors if e <= i)
        ie = mass / (n * 255.0)
        se = sum(1 for e in errors if e > i) / n
        total = beta1 * ie + beta2 * se
        lines.append("%d,%.12g,%.12g,%.12g" % (i, ie, se, total))
        if best is None or total < best[0]:
            best = (total, i)
    lines.append("# tl=%.12g argmin=%d beta1=%.12g beta2=%.12g mode=plain"
                 % (best[0], best[1], beta1, beta2))
    return "\n".join(lines) + "\n"


def main():
    gt = [0, 0, 0, 0]
    pred = [0, 10, 60, 255]
    write_pgm(ROOT / "pred" / "sample_target.pgm", 2, 2, pred)
    write_pgm(ROOT / "gt" / "sample_target.pgm", 2, 2, gt)
    (ROOT / "sample_target.csv").write_text(curve(pred, gt))
    return 0


if __name__ == "__main__":
    sys.exit(main())
