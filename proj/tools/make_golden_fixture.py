#!/usr/bin/env python3
#
# Copyright 2026 The QFE Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Regenerates the golden end-to-end fixture under tests/fixtures/golden/.

The expected scores come from plain Python integers, independently of the
C++ library: quantize float weights, shift the pixels down to 4 bits, then
evaluate z_i = sum_k D_ik (P x')_k^2 with x' = (1, x).

    python3 tools/make_golden_fixture.py [--out DIR]
"""

import argparse
import json
import math
import random
import struct
from pathlib import Path

N, D, CLASSES, BITS, INPUT_BITS = 784, 40, 4, 4, 4
SIDE = 28
SEED = 20240611


def quantize(weights, bits):
    """Symmetric per-tensor quantization, round half to even."""
    qmax = (1 << (bits - 1)) - 1
    max_abs = max(abs(w) for w in weights)
    scale = qmax / max_abs if max_abs > 0 else 1.0
    # Python's round() is ties-to-even on the exact double product.
    values = [max(-qmax - 1, min(qmax, round(w * scale))) for w in weights]
    return values, scale, max_abs


def make_weights(rng):
    # Each hidden unit looks mostly at one 10x10 patch, with weak dense
    # background weights so that every input contributes.
    proj = []
    for _ in range(D):
        cy, cx = rng.randrange(4, 24), rng.randrange(4, 24)
        row = [rng.gauss(0.0, 0.3)]  # bias column
        for y in range(SIDE):
            for x in range(SIDE):
                near = abs(y - cy) <= 5 and abs(x - cx) <= 5
                row.append(rng.gauss(0.0, 1.0 if near else 0.08))
        proj.extend(row)
    diag = [[rng.gauss(0.0, 1.0) for _ in range(D)] for _ in range(CLASSES)]
    return proj, diag


def make_image():
    # A ring, roughly a handwritten zero, with a soft edge.
    pixels = []
    for y in range(SIDE):
        for x in range(SIDE):
            r = math.hypot((y - 13.5) / 1.25, x - 13.5)
            v = max(0.0, 1.0 - abs(r - 8.0) / 3.0)
            pixels.append(min(255, int(255 * v + 0.5)))
    return pixels


def score_bound(proj, diag, input_max):
    cols = N + 1
    hidden_sq = []
    for k in range(D):
        row = proj[k * cols:(k + 1) * cols]
        acc = abs(row[0]) + sum(abs(w) * input_max for w in row[1:])
        hidden_sq.append(acc * acc)
    return max(sum(abs(dk) * h for dk, h in zip(drow, hidden_sq)) for drow in diag)


def scores(proj, diag, x):
    cols = N + 1
    xa = [1] + x
    hidden = [sum(proj[k * cols + j] * xa[j] for j in range(cols)) for k in range(D)]
    return [sum(dk * h * h for dk, h in zip(drow, hidden)) for drow in diag]


def header(fields):
    return "".join(f"{k}={fields[k]}\n" for k in sorted(fields)).encode()


def real(v):
    return "%.17g" % v


def i32_tensor(values):
    return struct.pack("<Q", len(values)) + struct.pack(f"<{len(values)}i", *values)


def encode_model(proj, diag, meta, bound):
    fields = {
        "bits": BITS,
        "classes": CLASSES,
        "d": D,
        "input_bits": INPUT_BITS,
        "kind": "model",
        "max_abs_d": real(meta["max_abs_d"]),
        "max_abs_p": real(meta["max_abs_p"]),
        "n": N,
        "scale_d": real(meta["scale_d"]),
        "scale_p": real(meta["scale_p"]),
        "score_bound": bound,
    }
    h = header(fields)
    flat_diag = [v for row in diag for v in row]
    return (b"QFE1" + struct.pack("<II", 1, len(h)) + h + i32_tensor(proj) +
            i32_tensor(flat_diag))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path,
                    default=Path(__file__).resolve().parent.parent / "tests/fixtures/golden")
    args = ap.parse_args()
    rng = random.Random(SEED)

    proj_real, diag_real = make_weights(rng)
    proj, scale_p, max_abs_p = quantize(proj_real, BITS)
    flat_d, scale_d, max_abs_d = quantize([v for row in diag_real for v in row], BITS)
    diag = [flat_d[c * D:(c + 1) * D] for c in range(CLASSES)]
    meta = dict(scale_p=scale_p, scale_d=scale_d, max_abs_p=max_abs_p, max_abs_d=max_abs_d)

    input_max = (1 << INPUT_BITS) - 1
    bound = score_bound(proj, diag, input_max)
    pixels = make_image()
    x = [p >> (8 - INPUT_BITS) for p in pixels]
    z = scores(proj, diag, x)
    assert all(abs(v) <= bound for v in z)
    best = max(range(CLASSES), key=lambda i: (z[i], -i))

    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "model.qfe").write_bytes(encode_model(proj, diag, meta, bound))
    (args.out / "image.pgm").write_bytes(f"P5\n{SIDE} {SIDE}\n255\n".encode() + bytes(pixels))
    (args.out / "image.json").write_text(json.dumps(pixels) + "\n")
    (args.out / "expected_scores.json").write_text(
        json.dumps({"scores": z, "argmax": best, "score_bound": bound}, indent=2) + "\n")
    print(f"scores={z} argmax={best} score_bound={bound}")


if __name__ == "__main__":
    main()
