import struct
import zlib

import numpy as np
import pytest

from dhdetect.segmentation import BinaryMask

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(name, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] {name}" + (f" -- {detail}" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


# --- independent oracles -------------------------------------------------


def flood_fill_partition(bits, connectivity):
    """Components as a set of frozensets of (x, y), by explicit-stack flood fill."""
    bits = np.asarray(bits)
    h, w = bits.shape
    if connectivity == 4:
        steps = [(1, 0), (-1, 0), (0, 1), (0, -1)]
    else:
        steps = [(dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1) if dx or dy]
    seen = np.zeros_like(bits, dtype=bool)
    parts = set()
    for y in range(h):
        for x in range(w):
            if not bits[y, x] or seen[y, x]:
                continue
            comp = []
            stack = [(x, y)]
            seen[y, x] = True
            while stack:
                cx, cy = stack.pop()
                comp.append((cx, cy))
                for dx, dy in steps:
                    nx, ny = cx + dx, cy + dy
                    if 0 <= nx < w and 0 <= ny < h and bits[ny, nx] and not seen[ny, nx]:
                        seen[ny, nx] = True
                        stack.append((nx, ny))
            parts.add(frozenset(comp))
    return parts


def label_partition(labels):
    labels = np.asarray(labels)
    parts = {}
    ys, xs = np.nonzero(labels)
    for x, y, lab in zip(xs.tolist(), ys.tolist(), labels[ys, xs].tolist()):
        parts.setdefault(lab, []).append((x, y))
    return {frozenset(p) for p in parts.values()}


def brute_diameter2(points):
    pts = list(points)
    best = 0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            dx = pts[i][0] - pts[j][0]
            dy = pts[i][1] - pts[j][1]
            best = max(best, dx * dx + dy * dy)
    return best


def random_blob(rng, size):
    """Connected (4-connected) pixel set grown by random accretion."""
    pts = {(0, 0)}
    frontier = [(1, 0), (-1, 0), (0, 1), (0, -1)]
    while len(pts) < size:
        i = int(rng.integers(len(frontier)))
        p = frontier[i]
        frontier[i] = frontier[-1]
        frontier.pop()
        if p in pts:
            continue
        pts.add(p)
        x, y = p
        frontier.extend(q for q in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)) if q not in pts)
    return pts


def mask_from_pixels(pixels, pad=2):
    """Mask containing exactly ``pixels`` (shifted to non-negative coords) and the shifted pixels."""
    pts = np.array(sorted(pixels), dtype=np.int64)
    pts = pts - pts.min(axis=0) + pad
    w, h = pts.max(axis=0) + 1 + pad
    bits = np.zeros((h, w), dtype=np.uint8)
    bits[pts[:, 1], pts[:, 0]] = 1
    return BinaryMask(bits), pts


def digital_disk(r, cx=0, cy=0):
    return {(cx + x, cy + y) for x in range(-r, r + 1) for y in range(-r, r + 1) if x * x + y * y <= r * r}


def digital_rect(w, h, x0=0, y0=0):
    return {(x0 + x, y0 + y) for x in range(w) for y in range(h)}


# --- hand-built encoders, independent of Pillow --------------------------


def png_bytes(arr, color_type):
    """Minimal 8-bit PNG writer (filter 0 on every row)."""
    arr = np.asarray(arr, dtype=np.uint8)
    h, w = arr.shape[:2]

    def chunk(tag, data):
        body = tag + data
        return struct.pack(">I", len(data)) + body + struct.pack(">I", zlib.crc32(body) & 0xFFFFFFFF)

    raw = b"".join(b"\x00" + arr[y].tobytes() for y in range(h))
    ihdr = struct.pack(">IIBBBBB", w, h, 8, color_type, 0, 0, 0)
    return (
        b"\x89PNG\r\n\x1a\n"
        + chunk(b"IHDR", ihdr)
        + chunk(b"IDAT", zlib.compress(raw))
        + chunk(b"IEND", b"")
    )


def bmp24_bytes(rgb):
    rgb = np.asarray(rgb, dtype=np.uint8)
    h, w = rgb.shape[:2]
    row_len = (3 * w + 3) // 4 * 4
    rows = []
    for y in range(h - 1, -1, -1):
        row = rgb[y, :, ::-1].tobytes()
        rows.append(row + b"\x00" * (row_len - len(row)))
    data = b"".join(rows)
    header = struct.pack("<2sIHHI", b"BM", 54 + len(data), 0, 0, 54)
    info = struct.pack("<IiiHHIIiiII", 40, w, h, 1, 24, 0, len(data), 2835, 2835, 0, 0)
    return header + info + data
