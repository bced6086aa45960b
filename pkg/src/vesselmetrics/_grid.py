"""Shared raster helpers: neighborhoods, component labeling, line rasterization."""

from __future__ import annotations

import numpy as np
from scipy import ndimage

# 8-neighborhood offsets in the traversal order used throughout: axial
# directions first, then diagonals (up, down, left, right, then corners).
NEIGHBOR_OFFSETS = (
    (-1, 0), (1, 0), (0, -1), (0, 1),
    (-1, -1), (-1, 1), (1, -1), (1, 1),
)

_STRUCT8 = np.ones((3, 3), dtype=int)


def validate_raster(bits: np.ndarray, name: str = "mask") -> np.ndarray:
    """Check a 2-D boolean raster of size >= 3x3; returns it as bool ndarray."""
    arr = np.asarray(bits)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array, got shape {arr.shape}")
    if arr.shape[0] < 3 or arr.shape[1] < 3:
        raise ValueError(f"{name} must be at least 3x3, got {arr.shape[0]}x{arr.shape[1]}")
    return arr.astype(bool, copy=False)


def neighbor_count(bits: np.ndarray) -> np.ndarray:
    """Number of set 8-neighbors per pixel (outside the raster counts as unset)."""
    padded = np.pad(bits.astype(np.uint8), 1)
    total = np.zeros(bits.shape, dtype=np.uint8)
    for dr, dc in NEIGHBOR_OFFSETS:
        total += padded[1 + dr:padded.shape[0] - 1 + dr, 1 + dc:padded.shape[1] - 1 + dc]
    return total


def label_components(bits: np.ndarray) -> tuple[np.ndarray, int]:
    """8-connected component labeling; returns (labels, count)."""
    return ndimage.label(bits, structure=_STRUCT8)


def component_count(bits: np.ndarray) -> int:
    return label_components(bits)[1]


def bresenham_line(p: tuple[int, int], q: tuple[int, int]) -> list[tuple[int, int]]:
    """Integer line rasterization from p to q inclusive.

    The pixel set is direction-independent: endpoints are ordered
    lexicographically before tracing, so bresenham_line(p, q) and
    bresenham_line(q, p) return the same pixels (possibly reversed).
    """
    flip = q < p
    if flip:
        p, q = q, p
    (r0, c0), (r1, c1) = p, q
    dr, dc = abs(r1 - r0), abs(c1 - c0)
    sr = 1 if r1 >= r0 else -1
    sc = 1 if c1 >= c0 else -1
    err = dr - dc
    out = []
    r, c = r0, c0
    while True:
        out.append((r, c))
        if r == r1 and c == c1:
            break
        e2 = 2 * err
        if e2 > -dc:
            err -= dc
            r += sr
        if e2 < dr:
            err += dr
            c += sc
    if flip:
        out.reverse()
    return out
