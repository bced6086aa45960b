import math

import numpy as np
import pytest

import vesselmetrics as vm
from vesselmetrics.geometry import weighted_pixel_length

from shapes import brute_weighted_length, diag_line, empty_mask, hline, vascular_tree_mask

NORM_1444 = 1444 ** 2


def test_overall_length_empty():
    assert vm.overall_length(empty_mask(), NORM_1444) == 0.0


def test_overall_length_horizontal_line():
    skeleton = hline(1444, w=1450)
    assert vm.overall_length(skeleton, NORM_1444) == pytest.approx(1000.0 * 1444 / NORM_1444)
    assert vm.overall_length(skeleton, NORM_1444) == pytest.approx(0.69252, abs=5e-6)


def test_overall_length_diagonal():
    skeleton = diag_line(100)
    expected = 1000.0 * 100 * math.sqrt(2) / NORM_1444
    assert vm.overall_length(skeleton, NORM_1444) == pytest.approx(expected)
    assert vm.overall_length(skeleton, NORM_1444) == pytest.approx(0.06782, abs=5e-6)


def test_overall_perimeter_empty():
    assert vm.overall_perimeter(empty_mask(), NORM_1444) == 0.0


def test_overall_perimeter_square_ring():
    mask = np.zeros((120, 120), dtype=bool)
    mask[10:110, 10:110] = True  # filled 100x100 square
    edges = vm.extract_edges(mask)
    assert edges.sum() == 396
    assert vm.overall_perimeter(edges, NORM_1444) == pytest.approx(100.0 * 396 / NORM_1444)
    assert vm.overall_perimeter(edges, NORM_1444) == pytest.approx(0.0189916, abs=5e-7)


def test_overall_perimeter_single_pixel():
    edges = empty_mask()
    edges[4, 4] = True
    assert vm.overall_perimeter(edges, NORM_1444) == pytest.approx(100.0 / NORM_1444)


def test_overall_area_full():
    mask = np.ones((1444, 1444), dtype=bool)
    assert vm.overall_area(mask, NORM_1444) == 100.0


def test_overall_area_empty():
    assert vm.overall_area(empty_mask(), NORM_1444) == 0.0


def test_overall_area_line():
    assert vm.overall_area(hline(1444, w=1450), NORM_1444) == pytest.approx(100.0 * 1444 / NORM_1444)


def test_isolated_pixel_counts_one():
    skeleton = empty_mask()
    skeleton[8, 8] = True
    assert weighted_pixel_length(skeleton) == 1.0


def test_symmetry_invariance_exact():
    rng = np.random.default_rng(11)
    mask = vascular_tree_mask(rng, size=96)
    skeleton = vm.skeletonize(mask)
    edges = vm.extract_edges(mask)
    norm = 96 * 96
    for transform in (np.rot90, np.flipud, np.fliplr):
        assert vm.overall_length(transform(skeleton).copy(), norm) == vm.overall_length(skeleton, norm)
        assert vm.overall_perimeter(transform(edges).copy(), norm) == vm.overall_perimeter(edges, norm)
        assert vm.overall_area(transform(mask).copy(), norm) == vm.overall_area(mask, norm)


def test_area_monotone_in_pixels():
    rng = np.random.default_rng(12)
    mask = vascular_tree_mask(rng, size=64)
    grown = mask.copy()
    grown[0:3, 0:3] = True
    assert vm.overall_area(grown, 4096) >= vm.overall_area(mask, 4096)


def test_doubling_norm_halves_metrics():
    rng = np.random.default_rng(13)
    mask = vascular_tree_mask(rng, size=64)
    skeleton = vm.skeletonize(mask)
    a = vm.overall_length(skeleton, 4096)
    b = vm.overall_length(skeleton, 8192)
    assert b == pytest.approx(a / 2, rel=1e-12)
    assert vm.overall_area(mask, 8192) == pytest.approx(vm.overall_area(mask, 4096) / 2, rel=1e-12)


def test_weighted_length_matches_brute_force_exactly():
    rng = np.random.default_rng(14)
    for _ in range(5):
        mask = vascular_tree_mask(rng, size=48)
        skeleton = vm.skeletonize(mask)
        expected, total, n_diag = brute_weighted_length(skeleton)
        assert weighted_pixel_length(skeleton) == expected  # identical arithmetic


def test_geometry_biomarkers_defaults_to_image_area():
    mask = hline(10, h=20, w=30)
    g = vm.geometry_biomarkers(mask, vm.skeletonize(mask), vm.extract_edges(mask))
    assert g.norm_area == 600
    assert g.ovarea == pytest.approx(100.0 * 10 / 600)


def test_bad_norm_area():
    with pytest.raises(ValueError):
        vm.overall_area(empty_mask(), 0)
