"""Scaled length, perimeter and area of a vessel network.

All three biomarkers share one length rule: a foreground pixel contributes
sqrt(2) when every one of its foreground 8-neighbors is a diagonal neighbor
(the pixel lies on a purely diagonal run), and 1 otherwise; isolated pixels
contribute 1. A straight horizontal run of n pixels therefore measures n,
and a 45-degree run of n pixels measures n*sqrt(2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._grid import validate_raster

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class GeometryBiomarkers:
    """Scaled geometric biomarkers of one vessel network."""

    ovlen: float
    ovper: float
    ovarea: float
    norm_area: float


def diagonal_pixel_counts(bits: np.ndarray) -> tuple[int, int]:
    """(total set pixels, pixels whose set 8-neighbors are all diagonal).

    Pixels with no neighbors at all are not counted as diagonal.
    """
    bits = validate_raster(bits)
    padded = np.pad(bits, 1)
    h, w = padded.shape
    axial = np.zeros(bits.shape, dtype=np.uint8)
    diag = np.zeros(bits.shape, dtype=np.uint8)
    for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
        axial += padded[1 + dr:h - 1 + dr, 1 + dc:w - 1 + dc]
    for dr, dc in ((-1, -1), (-1, 1), (1, -1), (1, 1)):
        diag += padded[1 + dr:h - 1 + dr, 1 + dc:w - 1 + dc]
    total = int(bits.sum())
    n_diag = int((bits & (axial == 0) & (diag > 0)).sum())
    return total, n_diag


def weighted_pixel_length(bits: np.ndarray) -> float:
    """Total weighted length of the set pixels under the sqrt2/1 pixel rule."""
    total, n_diag = diagonal_pixel_counts(bits)
    return (total - n_diag) + n_diag * SQRT2


def _check_norm(norm_area: float) -> float:
    if norm_area <= 0:
        raise ValueError(f"norm_area must be positive, got {norm_area}")
    return float(norm_area)


def overall_length(skeleton: np.ndarray, norm_area: float) -> float:
    """Scaled total skeleton length: 1000 * weighted pixel length / norm_area."""
    return 1000.0 * weighted_pixel_length(skeleton) / _check_norm(norm_area)


def overall_perimeter(edges: np.ndarray, norm_area: float) -> float:
    """Scaled boundary length: 100 * weighted pixel length / norm_area."""
    return 100.0 * weighted_pixel_length(edges) / _check_norm(norm_area)


def overall_area(mask: np.ndarray, norm_area: float) -> float:
    """Percent of the normalization area covered by vessel pixels."""
    mask = validate_raster(mask)
    return 100.0 * int(mask.sum()) / _check_norm(norm_area)


def geometry_biomarkers(
    mask: np.ndarray,
    skeleton: np.ndarray,
    edges: np.ndarray,
    norm_area: float | None = None,
) -> GeometryBiomarkers:
    """Compute the three geometric biomarkers of one network.

    norm_area defaults to the image area (height*width); pass a fixed value
    (e.g. 1444**2) to reproduce a dataset-specific normalization.
    """
    mask = validate_raster(mask)
    if norm_area is None:
        norm_area = mask.shape[0] * mask.shape[1]
    norm_area = _check_norm(norm_area)
    return GeometryBiomarkers(
        ovlen=overall_length(skeleton, norm_area),
        ovper=overall_perimeter(edges, norm_area),
        ovarea=overall_area(mask, norm_area),
        norm_area=norm_area,
    )
