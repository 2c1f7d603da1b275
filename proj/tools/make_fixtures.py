#!/usr/bin/env python3
"""Writes the golden model blobs in tests/fixtures.

Built from the byte layout alone, without the C++ encoder, so the golden
comparison catches encoder regressions.
"""
import os
import struct
import sys

HEADER = 120
EDGE = 128
MAGIC = b"TPUEMU-MODEL\0"
VERSION = 1
KIND = {"conv2d": 0, "fully_connected": 1}


def pad(v):
    return (v + EDGE - 1) // EDGE * EDGE


def blob(rows, cols, code, scale, zero_point, kind):
    prows, pcols = pad(rows), pad(cols)
    data = bytearray([zero_point]) * (prows * pcols)
    for r in range(rows):
        base = r * pcols
        data[base:base + cols] = bytes(code(r, c) for c in range(cols))
    header = bytearray(HEADER)
    header[0:len(MAGIC)] = MAGIC
    header[16:20] = struct.pack("<I", VERSION)
    header[HEADER - 4:] = struct.pack("<I", len(data))
    meta = struct.pack("<IIf", prows, pcols, scale)
    ext = struct.pack("<IIBBxx", rows, cols, zero_point, KIND[kind])
    return bytes(header) + bytes(data) + meta + ext


FIXTURES = {
    "block_1x1.blob": (1, 1, lambda r, c: 7, 1.0, 0, "fully_connected"),
    "block_130x5.blob": (130, 5, lambda r, c: (r * 7 + c * 3) % 256, 0.5, 128, "conv2d"),
    "block_2048x2048.blob": (2048, 2048, lambda r, c: (r * 31 + c * 17 + 5) % 256, 2.0, 0, "fully_connected"),
}


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "tests", "fixtures")
    os.makedirs(out, exist_ok=True)
    for name, args in FIXTURES.items():
        with open(os.path.join(out, name), "wb") as f:
            f.write(blob(*args))


if __name__ == "__main__":
    main()
