import math

import numpy as np
import pytest

import vesselmetrics as vm

from shapes import (
    brute_centroids,
    brute_geodesic_distances,
    brute_particular_points,
    diag_line,
    empty_mask,
    hline,
    l_path,
    lattice_tree,
    plus_mask,
    semicircle_mask,
    y_mask,
)


# -- particular point detection --------------------------------------------

def test_detect_plus_sign():
    skeleton = plus_mask(arm=5)
    pts = vm.detect_particular_points(skeleton)
    ends_o, inters_o = brute_particular_points(skeleton)
    assert list(pts.endpoints) == ends_o
    assert len(pts.endpoints) == 4
    # the kernel rule marks the center and its four axial neighbors
    assert list(pts.intersections) == inters_o
    assert len(pts.intersections) == 5


def test_detect_segment():
    skeleton = hline(10)
    pts = vm.detect_particular_points(skeleton)
    assert len(pts.endpoints) == 2
    assert len(pts.intersections) == 0


def test_detect_isolated_pixel():
    skeleton = empty_mask()
    skeleton[5, 5] = True
    pts = vm.detect_particular_points(skeleton)
    assert pts.endpoints == () and pts.intersections == ()


def test_detect_lists_disjoint_and_on_skeleton():
    rng = np.random.default_rng(0)
    skeleton, _, _ = lattice_tree(rng)
    pts = vm.detect_particular_points(skeleton)
    assert not set(pts.endpoints) & set(pts.intersections)
    for p in list(pts.endpoints) + list(pts.intersections):
        assert skeleton[p]


def test_detect_matches_neighbor_rule_exhaustively():
    rng = np.random.default_rng(8)
    for _ in range(5):
        skeleton, _, _ = lattice_tree(rng)
        pts = vm.detect_particular_points(skeleton)
        ends_o, inters_o = brute_particular_points(skeleton)
        assert list(pts.endpoints) == ends_o
        assert list(pts.intersections) == inters_o


# -- connectivity ------------------------------------------------------------

def test_single_segment_adjacency():
    skeleton = hline(10)
    pts = vm.detect_particular_points(skeleton)
    g = vm.build_connectivity(skeleton, pts)
    a, b = pts.endpoints
    assert [other for other, _ in g.adjacency[a]] == [b]
    assert [other for other, _ in g.adjacency[b]] == [a]
    assert len(g.segments) == 1
    assert len(g.segments[0][2]) == 10  # all 10 pixels on the path


def test_plus_connectivity():
    skeleton = plus_mask()
    pts = vm.detect_particular_points(skeleton)
    g = vm.build_connectivity(skeleton, pts)
    assert len(g.junction_clusters) == 1
    center = next(iter(g.junction_clusters))
    tips = set(pts.endpoints)
    assert {other for other, _ in g.adjacency[center]} == tips
    for tip in tips:
        assert [other for other, _ in g.adjacency[tip]] == [center]


def test_disjoint_segments_independent():
    skeleton = empty_mask(24, 40)
    skeleton[5, 3:15] = True
    skeleton[18, 20:35] = True
    pts = vm.detect_particular_points(skeleton)
    g = vm.build_connectivity(skeleton, pts)
    assert len(g.segments) == 2
    for a, b, path in g.segments:
        # both ends of each segment lie in the same brute-force component
        comp = set(brute_geodesic_distances(skeleton, a))
        assert b in comp
        assert set(path) <= comp


def test_adjacency_symmetric():
    rng = np.random.default_rng(1)
    for _ in range(5):
        skeleton, _, _ = lattice_tree(rng)
        pts = vm.detect_particular_points(skeleton)
        g = vm.build_connectivity(skeleton, pts)
        for node, entries in g.adjacency.items():
            for other, _ in entries:
                assert node in [o for o, _ in g.adjacency[other]]


def test_paths_on_skeleton_with_correct_ends():
    rng = np.random.default_rng(2)
    skeleton, _, _ = lattice_tree(rng)
    pts = vm.detect_particular_points(skeleton)
    g = vm.build_connectivity(skeleton, pts)
    particular = set(pts.endpoints) | set(pts.intersections)
    for a, b, path in g.segments:
        assert all(skeleton[p] for p in path)
        assert path[0] in particular and path[-1] in particular
        for u, v in zip(path, path[1:]):
            assert max(abs(u[0] - v[0]), abs(u[1] - v[1])) == 1  # 8-connected steps


def test_empty_graph():
    skeleton = empty_mask()
    pts = vm.detect_particular_points(skeleton)
    g = vm.build_connectivity(skeleton, pts)
    assert g.segments == [] and g.adjacency == {}


# -- tortuosity ---------------------------------------------------------------

def tortuosity_of(skeleton):
    pts = vm.detect_particular_points(skeleton)
    return vm.median_tortuosity(vm.build_connectivity(skeleton, pts))


def test_tortuosity_straight_exact():
    assert tortuosity_of(hline(40)) == pytest.approx(1.0, abs=1e-9)
    assert tortuosity_of(diag_line(40)) == pytest.approx(1.0, abs=1e-9)


def test_tortuosity_l_path():
    mask, _, _ = l_path(60)
    assert tortuosity_of(mask) == pytest.approx(math.sqrt(2), rel=0.05)


def test_tortuosity_semicircle():
    mask, _, _ = semicircle_mask(100)
    assert tortuosity_of(mask) == pytest.approx(math.pi / 2, rel=0.05)


def test_tortuosity_at_least_one():
    rng = np.random.default_rng(3)
    for _ in range(10):
        skeleton, _, _ = lattice_tree(rng)
        pts = vm.detect_particular_points(skeleton)
        g = vm.build_connectivity(skeleton, pts)
        for _, _, path in g.segments:
            chord = math.hypot(path[-1][0] - path[0][0], path[-1][1] - path[0][1])
            if chord < 2.0:
                continue
            from vesselmetrics.graph import segment_tortuosity
            assert segment_tortuosity(path) >= 1.0 - 1e-9


def test_tortuosity_missing_when_no_segments():
    skeleton = empty_mask()
    pts = vm.detect_particular_points(skeleton)
    assert vm.median_tortuosity(vm.build_connectivity(skeleton, pts)) is None


# -- centroid ----------------------------------------------------------------

def test_centroid_straight_path_middle():
    skeleton = hline(21)  # pixels at cols 3..23, middle is col 13
    cents = vm.compute_centroids(skeleton)
    assert cents == [(3, 13)]


def test_centroid_plus_center():
    skeleton = plus_mask(arm=8, pad=2)
    c = skeleton.shape[0] // 2
    assert vm.compute_centroids(skeleton) == [(c, c)]


def test_centroid_asymmetric_t_matches_brute_force():
    skeleton = empty_mask(40, 60)
    skeleton[20, 5:50] = True   # long stem
    skeleton[10:20, 30] = True  # short bar upward at col 30
    assert vm.compute_centroids(skeleton) == brute_centroids(skeleton)


def test_centroid_matches_brute_force_on_trees():
    rng = np.random.default_rng(4)
    for _ in range(6):
        skeleton, _, _ = lattice_tree(rng, n_edges=12)
        pts = vm.detect_particular_points(skeleton)
        assert vm.compute_centroids(skeleton, pts) == brute_centroids(skeleton)


def test_centroid_tie_breaks_lexicographic():
    skeleton = hline(20)  # even-length path: two central pixels tie
    assert vm.compute_centroids(skeleton) == brute_centroids(skeleton)


def test_centroid_multiple_components():
    skeleton = empty_mask(30, 60)
    skeleton[5, 5:26] = True
    skeleton[20, 10:31] = True
    assert vm.compute_centroids(skeleton) == brute_centroids(skeleton)
    assert len(vm.compute_centroids(skeleton)) == 2


def test_centroid_loop_component():
    from shapes import midpoint_circle
    skeleton = empty_mask(40, 40)
    for r, c in midpoint_circle(12):
        skeleton[20 + r, 20 + c] = True
    assert vm.compute_centroids(skeleton) == brute_centroids(skeleton)


# -- branching angles ---------------------------------------------------------

@pytest.mark.parametrize("theta", [60, 90, 120, 180])
def test_branching_angle_constructed_y(theta):
    mask, truth = y_mask(theta)
    pts = vm.detect_particular_points(mask)
    g = vm.build_connectivity(mask, pts)
    measurements, median = vm.branching_angles(g, mask)
    assert len(measurements) == 1
    assert median == pytest.approx(truth, abs=4.0)
    assert median == measurements[0].degrees  # single angle: median equals it


def test_branching_angle_range():
    rng = np.random.default_rng(5)
    for _ in range(8):
        skeleton, _, _ = lattice_tree(rng)
        pts = vm.detect_particular_points(skeleton)
        g = vm.build_connectivity(skeleton, pts)
        measurements, median = vm.branching_angles(g, skeleton)
        for m in measurements:
            assert 0.0 <= m.degrees <= 180.0
        if measurements:
            assert 0.0 <= median <= 180.0


def test_branching_angle_missing_without_junction():
    skeleton = hline(15)
    pts = vm.detect_particular_points(skeleton)
    g = vm.build_connectivity(skeleton, pts)
    assert vm.branching_angles(g, skeleton) == ([], None)


def test_branching_angle_endpoint_mode():
    mask, truth = y_mask(90)
    pts = vm.detect_particular_points(mask)
    g = vm.build_connectivity(mask, pts)
    _, median = vm.branching_angles(g, mask, arm_mode="endpoint")
    assert median == pytest.approx(90.0, abs=4.0)  # straight arms: same bearing


# -- composite ----------------------------------------------------------------

def test_topology_biomarkers_plus():
    topo = vm.topology_biomarkers(plus_mask())
    assert topo.end_count == 4
    assert topo.inter_count == 1
    assert topo.median_tortuosity == pytest.approx(1.0, abs=1e-9)


def test_topology_biomarkers_empty():
    topo = vm.topology_biomarkers(empty_mask())
    assert topo.end_count == 0 and topo.inter_count == 0
    assert topo.median_tortuosity is None
    assert topo.median_branching_angle is None


def test_topology_rot90_invariant():
    rng = np.random.default_rng(6)
    for _ in range(5):
        skeleton, _, _ = lattice_tree(rng)
        a = vm.topology_biomarkers(skeleton)
        b = vm.topology_biomarkers(np.rot90(skeleton).copy())
        assert (a.end_count, a.inter_count) == (b.end_count, b.inter_count)
        pa = sorted(len(p) for _, _, p in vm.build_connectivity(
            skeleton, vm.detect_particular_points(skeleton)).segments)
        rot = np.rot90(skeleton).copy()
        pb = sorted(len(p) for _, _, p in vm.build_connectivity(
            rot, vm.detect_particular_points(rot)).segments)
        assert pa == pb
