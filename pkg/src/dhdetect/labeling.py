"""Two-pass connected-component labeling backed by a union-find table.

The first raster pass hands out provisional labels and records every
equivalence it sees between already-labeled neighbours; the second pass
replaces each provisional label by its union-find root, renumbered densely
in row-major first-encounter order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np
from numba import njit

from .segmentation import BinaryMask


@njit(cache=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    # path compression
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit(cache=True)
def _union(parent, rank, a, b):
    ra = _find(parent, a)
    rb = _find(parent, b)
    if ra == rb:
        return ra
    if rank[ra] < rank[rb]:
        ra, rb = rb, ra
    parent[rb] = ra
    if rank[ra] == rank[rb]:
        rank[ra] += 1
    return ra


class UnionFind:
    """Disjoint sets over ``0..n-1`` with union by rank and path compression."""

    def __init__(self, n: int):
        if n < 0:
            raise ValueError("element count must be non-negative")
        self.parent = np.arange(n, dtype=np.int64)
        self.rank = np.zeros(n, dtype=np.int64)

    def __len__(self):
        return len(self.parent)

    def _check(self, a):
        if not 0 <= a < len(self.parent):
            raise IndexError(f"element {a} out of range for {len(self.parent)} elements")

    def find(self, a: int) -> int:
        self._check(a)
        return int(_find(self.parent, a))

    def union(self, a: int, b: int) -> None:
        self._check(a)
        self._check(b)
        _union(self.parent, self.rank, a, b)

    def connected(self, a: int, b: int) -> bool:
        return self.find(a) == self.find(b)


@njit(cache=True)
def _merge(parent, rank, lab, n):
    if lab == 0:
        return n
    if n != lab:
        _union(parent, rank, lab, n)
    return lab


@njit(cache=True)
def _label_two_pass(bits, eight):
    h, w = bits.shape
    labels = np.zeros((h, w), dtype=np.int32)
    # a new provisional label needs a background pixel to its west
    cap = h * ((w + 1) // 2) + 1
    parent = np.zeros(cap, dtype=np.int32)
    rank = np.zeros(cap, dtype=np.int32)
    next_label = 1

    for y in range(h):
        for x in range(w):
            if bits[y, x] == 0:
                continue
            lab = 0
            if x > 0 and labels[y, x - 1] != 0:
                lab = labels[y, x - 1]
            if y > 0:
                if eight and x > 0 and labels[y - 1, x - 1] != 0:
                    lab = _merge(parent, rank, lab, labels[y - 1, x - 1])
                if labels[y - 1, x] != 0:
                    lab = _merge(parent, rank, lab, labels[y - 1, x])
                if eight and x + 1 < w and labels[y - 1, x + 1] != 0:
                    lab = _merge(parent, rank, lab, labels[y - 1, x + 1])
            if lab == 0:
                lab = next_label
                parent[lab] = lab
                next_label += 1
            labels[y, x] = lab

    dense = np.zeros(next_label, dtype=np.int32)
    count = 0
    for y in range(h):
        for x in range(w):
            lab = labels[y, x]
            if lab == 0:
                continue
            root = _find(parent, lab)
            if dense[root] == 0:
                count += 1
                dense[root] = count
            labels[y, x] = dense[root]
    return labels, count


@dataclass(frozen=True, eq=False)
class LabelMap:
    """Per-pixel component labels (0 = background, 1..region_count)."""

    labels: np.ndarray
    region_count: int

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    def __eq__(self, other):
        if not isinstance(other, LabelMap):
            return NotImplemented
        return self.region_count == other.region_count and np.array_equal(
            self.labels, other.labels
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Region:
    """One connected component; ``pixels`` is an (N, 2) array of (x, y) in row-major order."""

    label: int
    pixels: np.ndarray

    def __post_init__(self):
        if len(self.pixels) == 0:
            raise ValueError("a region needs at least one pixel")

    @property
    def area(self) -> int:
        return len(self.pixels)

    def __eq__(self, other):
        if not isinstance(other, Region):
            return NotImplemented
        return self.label == other.label and np.array_equal(self.pixels, other.pixels)

    __hash__ = None


def label_components(mask: BinaryMask, connectivity: int = 8) -> LabelMap:
    if connectivity not in (4, 8):
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    labels, count = _label_two_pass(mask.bits, connectivity == 8)
    labels.setflags(write=False)
    return LabelMap(labels, int(count))


def extract_regions(lm: LabelMap) -> List[Region]:
    """Split a label map into regions, ordered by label."""
    if lm.region_count == 0:
        return []
    flat = lm.labels.ravel()
    idx = np.flatnonzero(flat)
    # stable sort keeps row-major order inside each label
    order = np.argsort(flat[idx], kind="stable")
    idx = idx[order]
    counts = np.bincount(flat[idx], minlength=lm.region_count + 1)[1:]
    ys, xs = np.divmod(idx, lm.width)
    coords = np.stack([xs, ys], axis=1)
    coords.setflags(write=False)
    regions = []
    start = 0
    for label, n in enumerate(counts, start=1):
        regions.append(Region(label, coords[start:start + n]))
        start += n
    return regions
