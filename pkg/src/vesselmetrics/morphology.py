"""Skeleton and boundary extraction from binary vessel masks.

Both operations are pure: the input mask is never modified. The skeleton is
produced by Zhang-Suen iterative thinning (8-connectivity) followed by a
cleanup pass that removes residual fully-set 2x2 blocks, so the result is
one pixel wide, stays a subset of the mask, and keeps the mask's 8-connected
component count.
"""

from __future__ import annotations

import numpy as np

from ._grid import label_components, validate_raster

# Neighbor ring in Yokoi order: x0..x7 = E, NE, N, NW, W, SW, S, SE.
_RING = ((0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1))


def _shift(img: np.ndarray, dr: int, dc: int) -> np.ndarray:
    """View of a 1-padded image displaced by (dr, dc)."""
    h, w = img.shape
    return img[1 + dr:h - 1 + dr, 1 + dc:w - 1 + dc]


def _zhang_suen(mask: np.ndarray) -> np.ndarray:
    """Standard two-subiteration Zhang-Suen thinning on a padded working copy."""
    img = np.pad(mask.astype(np.uint8), 1)
    while True:
        changed = False
        for phase in (0, 1):
            p2 = _shift(img, -1, 0)
            p3 = _shift(img, -1, 1)
            p4 = _shift(img, 0, 1)
            p5 = _shift(img, 1, 1)
            p6 = _shift(img, 1, 0)
            p7 = _shift(img, 1, -1)
            p8 = _shift(img, 0, -1)
            p9 = _shift(img, -1, -1)
            ring = (p2, p3, p4, p5, p6, p7, p8, p9, p2)
            b = p2.astype(np.int16) + p3 + p4 + p5 + p6 + p7 + p8 + p9
            a = np.zeros(b.shape, dtype=np.int16)
            for u, v in zip(ring, ring[1:]):
                a += ((u == 0) & (v == 1))
            if phase == 0:
                cond = ((p2 & p4 & p6) == 0) & ((p4 & p6 & p8) == 0)
            else:
                cond = ((p2 & p4 & p8) == 0) & ((p2 & p6 & p8) == 0)
            core = img[1:-1, 1:-1]
            kill = (core == 1) & (b >= 2) & (b <= 6) & (a == 1) & cond
            if kill.any():
                core[kill] = 0
                changed = True
        if not changed:
            break
    return img


def _yokoi8(img: np.ndarray, r: int, c: int) -> int:
    """Yokoi connectivity number for 8-connected foreground at (r, c)."""
    xb = [1 - int(img[r + dr, c + dc]) for dr, dc in _RING]
    total = 0
    for k in (0, 2, 4, 6):
        total += xb[k] - xb[k] * xb[(k + 1) % 8] * xb[(k + 2) % 8]
    return total


def _clear_thick_blocks(img: np.ndarray) -> None:
    """Delete simple pixels until no fully-set 2x2 block remains.

    Zhang-Suen occasionally converges with a 2x2 block left at a junction.
    Pixels are removed one at a time (lexicographic scan order) and only when
    the Yokoi connectivity number is 1 and the pixel is not an endpoint, so
    connectivity and topology are preserved. Operates in place on the padded
    working image.
    """
    for _ in range(int(img.sum()) + 1):
        blocks = img[:-1, :-1] & img[1:, :-1] & img[:-1, 1:] & img[1:, 1:]
        rows, cols = np.nonzero(blocks)
        if len(rows) == 0:
            return
        deleted = False
        for r, c in sorted(zip(rows.tolist(), cols.tolist())):
            for dr, dc in ((0, 0), (0, 1), (1, 0), (1, 1)):
                rr, cc = r + dr, c + dc
                nb = sum(int(img[rr + a, cc + b]) for a, b in _RING)
                if img[rr, cc] and nb >= 2 and _yokoi8(img, rr, cc) == 1:
                    img[rr, cc] = 0
                    deleted = True
                    break
            if deleted:
                break
        if not deleted:
            return


def skeletonize(mask: np.ndarray) -> np.ndarray:
    """Thin a binary mask to a one-pixel-wide 8-connected skeleton.

    Parameters
    ----------
    mask : ndarray of bool
        Binary vessel raster, at least 3x3.

    Returns
    -------
    ndarray of bool
        Skeleton raster of the same shape. Guarantees: subset of the mask,
        no fully-set 2x2 neighborhood, and the same number of 8-connected
        components as the mask (tiny components that thinning would erase
        entirely are restored as a single representative pixel).
    """
    mask = validate_raster(mask)
    if not mask.any():
        return np.zeros_like(mask, dtype=bool)

    img = _zhang_suen(mask)
    _clear_thick_blocks(img)
    skeleton = img[1:-1, 1:-1].astype(bool)

    # Zhang-Suen deletes some very small components outright (a lone 2x2
    # square vanishes); put back one pixel per lost component.
    labels, n = label_components(mask)
    if n != label_components(skeleton)[1]:
        surviving = np.unique(labels[skeleton])
        for comp in range(1, n + 1):
            if comp not in surviving:
                rows, cols = np.nonzero(labels == comp)
                order = np.lexsort((cols, rows))
                skeleton[rows[order[0]], cols[order[0]]] = True
    return skeleton


def extract_edges(mask: np.ndarray) -> np.ndarray:
    """Boundary raster of a binary mask.

    A pixel is a boundary pixel iff it is a vessel pixel whose 8-neighbor
    Laplacian response (center weight 8, neighbors -1, binary input) is
    strictly positive, i.e. it has at least one background 8-neighbor.
    Pixels on the raster border treat the outside as background, so border
    vessel pixels are always boundary pixels.
    """
    mask = validate_raster(mask)
    padded = np.pad(mask.astype(np.int16), 1)
    response = 8 * padded[1:-1, 1:-1]
    for dr, dc in _RING:
        response -= padded[1 + dr:padded.shape[0] - 1 + dr, 1 + dc:padded.shape[1] - 1 + dc]
    return mask & (response > 0)
