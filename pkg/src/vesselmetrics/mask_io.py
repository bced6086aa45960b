"""Loading, saving and overlay rendering of binary segmentation masks.

Masks are 8-bit PNG images (grayscale or RGB); bright pixels are vessel.
Loading thresholds luminance at a configurable level (default 127), so a
white-on-black segmentation round-trips bit-exactly through save/load.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
from PIL import Image

from ._grid import validate_raster

# Overlay palette (RGB).
VESSEL_COLOR = (90, 90, 90)
SKELETON_COLOR = (255, 255, 255)
ENDPOINT_COLOR = (0, 255, 0)
INTERSECTION_COLOR = (255, 0, 0)
ANGLE_COLOR = (255, 255, 0)


def load_mask(path, threshold: int = 127) -> np.ndarray:
    """Load a binary mask from a raster image file.

    A pixel is vessel iff its luminance is strictly greater than
    ``threshold``. Raises OSError for unreadable files and ValueError for
    degenerate (smaller than 3x3) images.
    """
    if not 0 <= threshold <= 255:
        raise ValueError(f"threshold must be in [0, 255], got {threshold}")
    with Image.open(path) as img:
        gray = img.convert("L")
        arr = np.asarray(gray)
    if arr.size == 0:
        raise ValueError(f"{path}: image is empty")
    return validate_raster(arr > threshold, name=str(path))


def save_mask(mask: np.ndarray, path) -> None:
    """Write a binary mask as an 8-bit grayscale PNG (vessel=255)."""
    mask = validate_raster(mask)
    Image.fromarray(mask.astype(np.uint8) * 255, mode="L").save(path, format="PNG")


def render_overlay(
    mask: np.ndarray,
    skeleton: np.ndarray | None = None,
    points=None,
    angles: Iterable = (),
) -> np.ndarray:
    """Render an annotated RGB overlay of a mask and its derived features.

    Vessel pixels are drawn gray, skeleton pixels white, endpoints green,
    intersections red and branching-angle vertices yellow (drawn in that
    order, later layers on top). ``points`` is a ParticularPoints-like
    object exposing ``endpoints`` and ``intersections`` coordinate lists;
    ``angles`` is an iterable of measurements exposing ``vertex``. Output is
    a (H, W, 3) uint8 array and is a pure function of its inputs.
    """
    mask = validate_raster(mask)
    out = np.zeros(mask.shape + (3,), dtype=np.uint8)
    out[mask] = VESSEL_COLOR
    if skeleton is not None:
        skeleton = validate_raster(skeleton, name="skeleton")
        if skeleton.shape != mask.shape:
            raise ValueError(f"skeleton shape {skeleton.shape} != mask shape {mask.shape}")
        out[skeleton] = SKELETON_COLOR
    layers = []
    if points is not None:
        layers.append((points.endpoints, ENDPOINT_COLOR))
        layers.append((points.intersections, INTERSECTION_COLOR))
    layers.append(([a.vertex for a in angles], ANGLE_COLOR))
    for coords, color in layers:
        for r, c in coords:
            if not (0 <= r < mask.shape[0] and 0 <= c < mask.shape[1]):
                raise ValueError(f"annotation point ({r}, {c}) outside raster {mask.shape}")
            out[r, c] = color
    return out


def save_overlay(overlay: np.ndarray, path) -> None:
    """Write an RGB overlay produced by render_overlay as PNG."""
    arr = np.asarray(overlay)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"overlay must be (H, W, 3), got {arr.shape}")
    Image.fromarray(arr.astype(np.uint8), mode="RGB").save(path, format="PNG")


def count_color(overlay: np.ndarray, color: Sequence[int]) -> int:
    """Number of overlay pixels exactly matching an RGB color."""
    return int(np.all(overlay == np.asarray(color, dtype=np.uint8), axis=-1).sum())
