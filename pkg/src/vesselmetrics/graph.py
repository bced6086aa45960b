"""Skeleton topology: particular points, connectivity, tortuosity, angles.

A skeleton pixel is an *endpoint* when it has exactly one skeleton
8-neighbor and an *intersection* when it has three or more. Both are
detected by convolving the skeleton with a 3x3 kernel (center 10,
neighbors 1) and thresholding the response at skeleton pixels: 11 marks
endpoints, >= 13 marks intersections (ordinary path pixels score 12,
isolated pixels 10).

For graph construction, 8-adjacent intersection pixels are merged into one
junction node anchored at the cluster's lexicographically smallest pixel;
thinning routinely produces 2-pixel junction clusters that would otherwise
inject spurious one-pixel segments.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ._grid import NEIGHBOR_OFFSETS, bresenham_line, label_components, neighbor_count, validate_raster

SQRT2 = math.sqrt(2.0)

Pixel = tuple[int, int]
Path = tuple[Pixel, ...]


@dataclass(frozen=True)
class ParticularPoints:
    """Skeleton endpoints and intersection pixels, each sorted row-major."""

    endpoints: tuple[Pixel, ...]
    intersections: tuple[Pixel, ...]


@dataclass
class VesselGraph:
    """Connectivity of particular points along the skeleton.

    segments holds each vessel segment exactly once as
    (node_a, node_b, path); the path is the ordered pixel run from a
    member pixel of node_a to a member pixel of node_b, inclusive.
    adjacency expands the same segments into one entry per direction, so
    it is symmetric by construction. junction_clusters maps each junction
    node to the intersection pixels merged into it.
    """

    adjacency: dict[Pixel, list[tuple[Pixel, Path]]] = field(default_factory=dict)
    segments: list[tuple[Pixel, Pixel, Path]] = field(default_factory=list)
    junction_clusters: dict[Pixel, tuple[Pixel, ...]] = field(default_factory=dict)


@dataclass(frozen=True)
class AngleMeasurement:
    """One branching angle: the junction vertex, its two arm endpoints, degrees."""

    vertex: Pixel
    arm_a: Pixel
    arm_b: Pixel
    degrees: float


@dataclass(frozen=True)
class TopologyBiomarkers:
    """Endpoint/junction counts and median tortuosity / branching angle.

    inter_count counts junction sites (8-adjacent intersection pixels merged
    into one site). Missing measurements are None, never 0.
    """

    end_count: int
    inter_count: int
    median_tortuosity: float | None
    median_branching_angle: float | None


def detect_particular_points(skeleton: np.ndarray) -> ParticularPoints:
    """Detect endpoint and intersection pixels of a skeleton.

    The kernel response at a skeleton pixel is 10 plus its skeleton
    8-neighbor count; endpoints respond 11, intersections >= 13.
    """
    skeleton = validate_raster(skeleton, name="skeleton")
    response = np.where(skeleton, 10 + neighbor_count(skeleton).astype(int), 0)
    ends = np.argwhere(response == 11)
    inters = np.argwhere(response >= 13)
    return ParticularPoints(
        endpoints=tuple(map(tuple, ends.tolist())),
        intersections=tuple(map(tuple, inters.tolist())),
    )


def _junction_clusters(skeleton_shape: tuple[int, int],
                       intersections: tuple[Pixel, ...]) -> dict[Pixel, tuple[Pixel, ...]]:
    """Group 8-adjacent intersection pixels; key = lexicographically smallest member."""
    if not intersections:
        return {}
    raster = np.zeros(skeleton_shape, dtype=bool)
    rows, cols = zip(*intersections)
    raster[list(rows), list(cols)] = True
    labels, n = label_components(raster)
    clusters: dict[int, list[Pixel]] = {}
    for p in intersections:
        clusters.setdefault(int(labels[p]), []).append(p)
    return {min(members): tuple(sorted(members)) for members in clusters.values()}


def _skeleton_neighbors(skeleton: np.ndarray, p: Pixel) -> list[Pixel]:
    h, w = skeleton.shape
    out = []
    for dr, dc in NEIGHBOR_OFFSETS:
        r, c = p[0] + dr, p[1] + dc
        if 0 <= r < h and 0 <= c < w and skeleton[r, c]:
            out.append((r, c))
    return out


def build_connectivity(skeleton: np.ndarray, points: ParticularPoints) -> VesselGraph:
    """Trace every skeleton segment between particular points.

    From each particular point, chains of ordinary (degree-2) pixels are
    walked until the next particular point; walked pixels are marked
    visited exactly once (particular points themselves are never marked),
    so each segment is discovered exactly once and then expanded into one
    adjacency entry per direction.
    """
    skeleton = validate_raster(skeleton, name="skeleton")
    clusters = _junction_clusters(skeleton.shape, points.intersections)
    node_of: dict[Pixel, Pixel] = {p: p for p in points.endpoints}
    for rep, members in clusters.items():
        for m in members:
            node_of[m] = rep
    stops = set(node_of)

    graph = VesselGraph(junction_clusters=clusters)
    visited = np.zeros(skeleton.shape, dtype=bool)
    segments: list[tuple[Pixel, Pixel, Path]] = []

    for m in sorted(stops):
        origin = node_of[m]
        for s in _skeleton_neighbors(skeleton, m):
            if s in stops:
                # Direct adjacency between two particular pixels: record once.
                if node_of[s] != origin and m < s:
                    segments.append((origin, node_of[s], (m, s)))
                continue
            if visited[s]:
                continue
            path = [m, s]
            visited[s] = True
            prev, cur = m, s
            while True:
                arrival = None
                nxt = None
                for nb in _skeleton_neighbors(skeleton, cur):
                    if nb == prev:
                        continue
                    if nb in stops:
                        arrival = nb
                        break
                    if nxt is None and not visited[nb]:
                        nxt = nb
                if arrival is not None:
                    path.append(arrival)
                    segments.append((origin, node_of[arrival], tuple(path)))
                    break
                if nxt is None:
                    break  # open chain into already-visited pixels; no segment
                visited[nxt] = True
                path.append(nxt)
                prev, cur = cur, nxt

    segments.sort(key=lambda seg: (seg[0], seg[1], seg[2]))
    graph.segments = segments
    for a, b, path in segments:
        graph.adjacency.setdefault(a, []).append((b, path))
        graph.adjacency.setdefault(b, []).append((a, tuple(reversed(path))))
    for node in sorted(set(node_of.values())):
        graph.adjacency.setdefault(node, [])
    return graph


def _path_weighted_length(path: Path) -> float:
    """Weighted pixel length of an ordered pixel run (sqrt2/1 pixel rule)."""
    n = len(path)
    diag = 0
    for i in range(n):
        steps = []
        if i > 0:
            steps.append((path[i][0] - path[i - 1][0], path[i][1] - path[i - 1][1]))
        if i < n - 1:
            steps.append((path[i + 1][0] - path[i][0], path[i + 1][1] - path[i][1]))
        if steps and all(dr != 0 and dc != 0 for dr, dc in steps):
            diag += 1
    return (n - diag) + diag * SQRT2


def segment_tortuosity(path: Path) -> float:
    """Arc-chord ratio of one segment.

    The arc is the weighted pixel length of the traced path; the chord is
    the weighted pixel length of the rasterized straight line between the
    path's two end pixels, so a straight vessel measures exactly 1.0
    regardless of orientation.
    """
    arc = _path_weighted_length(path)
    chord = _path_weighted_length(tuple(bresenham_line(path[0], path[-1])))
    return arc / chord


def median_tortuosity(graph: VesselGraph) -> float | None:
    """Median arc-chord tortuosity over all segments.

    Segments whose end pixels are less than 2 pixels apart (self-loops,
    directly adjacent particular points) are excluded. Returns None when
    no segment qualifies.
    """
    values = []
    for _, _, path in graph.segments:
        chord = math.hypot(path[-1][0] - path[0][0], path[-1][1] - path[0][1])
        if chord < 2.0:
            continue
        values.append(segment_tortuosity(path))
    if not values:
        return None
    return float(np.median(values))


def _component_arrays(skeleton: np.ndarray):
    """Label skeleton components; per component, index pixels and adjacency."""
    labels, n = label_components(skeleton)
    comp_pixels: list[list[Pixel]] = [[] for _ in range(n)]
    rows, cols = np.nonzero(skeleton)
    for r, c in zip(rows.tolist(), cols.tolist()):
        comp_pixels[labels[r, c] - 1].append((r, c))
    return labels, comp_pixels


def _bfs(neigh: list[list[int]], src: int) -> list[int]:
    dist = [-1] * len(neigh)
    dist[src] = 0
    queue = deque([src])
    while queue:
        v = queue.popleft()
        dv = dist[v]
        for u in neigh[v]:
            if dist[u] < 0:
                dist[u] = dv + 1
                queue.append(u)
    return dist


def _component_center(pixels: list[Pixel], skeleton: np.ndarray,
                      seeds: list[int]) -> Pixel:
    """Exact argmin of eccentricity (max geodesic distance) over a component.

    Maintains per-pixel lower/upper eccentricity bounds refined by whole
    BFS sweeps until every candidate for the minimum is resolved; ties are
    broken toward the lexicographically smallest pixel (component pixels
    are already in row-major order, so index order is lexicographic).
    """
    n = len(pixels)
    if n == 1:
        return pixels[0]
    index = {p: i for i, p in enumerate(pixels)}
    neigh: list[list[int]] = []
    for p in pixels:
        neigh.append([index[q] for q in _skeleton_neighbors(skeleton, p)])

    lower = [0] * n
    upper = [math.inf] * n

    def probe(v: int) -> list[int]:
        dist = _bfs(neigh, v)
        ecc = max(dist)
        for u in range(n):
            d = dist[u]
            if d > lower[u]:
                lower[u] = d
            if ecc - d > lower[u]:
                lower[u] = ecc - d
            if d + ecc < upper[u]:
                upper[u] = d + ecc
        lower[v] = upper[v] = ecc
        return dist

    first = probe(seeds[0] if seeds else 0)
    probe(max(range(n), key=lambda i: (first[i], -i)))  # farthest pixel: good bounds
    for s in seeds[1:4]:
        if lower[s] < upper[s]:
            probe(s)

    while True:
        best_upper = min(upper)
        unresolved = [v for v in range(n) if lower[v] <= best_upper and lower[v] < upper[v]]
        if not unresolved:
            candidates = [v for v in range(n) if lower[v] <= best_upper]
            e_star = min(lower[v] for v in candidates)
            return pixels[min(v for v in candidates if lower[v] == e_star)]
        probe(min(unresolved, key=lambda v: (lower[v], v)))


def compute_centroids(skeleton: np.ndarray,
                      points: ParticularPoints | None = None) -> list[Pixel]:
    """Centroid of every 8-connected skeleton component.

    The centroid is the component pixel minimizing the maximum intra-
    skeleton geodesic distance (in traversal steps) to any other pixel of
    the component; ties break to the smallest (row, col). Components are
    returned in label order (row-major discovery order). Particular points,
    when supplied, seed the bound refinement but never change the result.
    """
    skeleton = validate_raster(skeleton, name="skeleton")
    if not skeleton.any():
        return []
    labels, comp_pixels = _component_arrays(skeleton)
    seed_map: dict[int, list[Pixel]] = {}
    if points is not None:
        for p in list(points.endpoints) + list(points.intersections):
            seed_map.setdefault(int(labels[p]) - 1, []).append(p)
    centroids = []
    for ci, pixels in enumerate(comp_pixels):
        index = {p: i for i, p in enumerate(pixels)}
        seeds = sorted(index[p] for p in seed_map.get(ci, []))
        centroids.append(_component_center(pixels, skeleton, seeds or [0]))
    return centroids


def branching_angles(
    graph: VesselGraph,
    skeleton: np.ndarray,
    arm_step: int = 5,
    arm_mode: str = "path",
) -> tuple[list[AngleMeasurement], float | None]:
    """Measure the branching angle at every junction node.

    At a junction of degree d, the adjacent particular points are ranked by
    geodesic distance from their component's centroid; the nearest arm (the
    parent vessel) is dropped and the angle is measured between the two
    farthest remaining arms. Arm direction is the vector from the arm's
    first pixel to the path pixel arm_step steps along it (arm_mode="path",
    the default) or to the arm's far end pixel (arm_mode="endpoint").

    Returns the individual measurements (vertex order) and their median,
    or ([], None) when the graph has no junction of degree >= 3.
    """
    if arm_mode not in ("path", "endpoint"):
        raise ValueError(f"arm_mode must be 'path' or 'endpoint', got {arm_mode!r}")
    skeleton = validate_raster(skeleton, name="skeleton")
    junctions = [j for j in sorted(graph.junction_clusters) if len(graph.adjacency.get(j, ())) >= 3]
    if not junctions:
        return [], None

    labels, _ = label_components(skeleton)
    centroids = compute_centroids(skeleton)
    centroid_of_comp = {int(labels[c]): c for c in centroids}

    # Geodesic distances from each needed centroid, by flood fill.
    dist_maps: dict[int, np.ndarray] = {}
    for j in junctions:
        comp = int(labels[j])
        if comp in dist_maps:
            continue
        dist = np.full(skeleton.shape, -1, dtype=np.int32)
        src = centroid_of_comp[comp]
        dist[src] = 0
        queue = deque([src])
        while queue:
            p = queue.popleft()
            d = dist[p] + 1
            for nb in _skeleton_neighbors(skeleton, p):
                if dist[nb] < 0:
                    dist[nb] = d
                    queue.append(nb)
        dist_maps[comp] = dist

    measurements = []
    for j in junctions:
        dist = dist_maps[int(labels[j])]
        arms = sorted(
            graph.adjacency[j],
            key=lambda arm: (-int(dist[arm[1][-1]]), arm[1][-1], arm[1]),
        )
        arms = arms[:-1]  # drop the centroid-nearest arm: the parent vessel
        (far_a, path_a), (far_b, path_b) = arms[0], arms[1]
        va = _arm_vector(path_a, arm_step, arm_mode)
        vb = _arm_vector(path_b, arm_step, arm_mode)
        cosang = float(np.dot(va, vb) / (np.linalg.norm(va) * np.linalg.norm(vb)))
        degrees = math.degrees(math.acos(max(-1.0, min(1.0, cosang))))
        measurements.append(AngleMeasurement(vertex=j, arm_a=far_a, arm_b=far_b, degrees=degrees))

    median = float(np.median([m.degrees for m in measurements]))
    return measurements, median


def _arm_vector(path: Path, arm_step: int, arm_mode: str) -> np.ndarray:
    if arm_mode == "endpoint":
        target = path[-1]
    else:
        target = path[min(arm_step, len(path) - 1)]
    return np.array([target[0] - path[0][0], target[1] - path[0][1]], dtype=float)


def topology_biomarkers(skeleton: np.ndarray, arm_step: int = 5,
                        arm_mode: str = "path") -> TopologyBiomarkers:
    """Endpoint count, junction count, median tortuosity and branching angle."""
    skeleton = validate_raster(skeleton, name="skeleton")
    points = detect_particular_points(skeleton)
    graph = build_connectivity(skeleton, points)
    tor = median_tortuosity(graph)
    _, ba = branching_angles(graph, skeleton, arm_step=arm_step, arm_mode=arm_mode)
    return TopologyBiomarkers(
        end_count=len(points.endpoints),
        inter_count=len(graph.junction_clusters),
        median_tortuosity=tor,
        median_branching_angle=ba,
    )
