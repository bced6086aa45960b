import math

import numpy as np
import pytest

import vesselmetrics as vm
from vesselmetrics.stats import GroupSummary, compare_groups

from shapes import brute_rank_test


def test_summarize_odd():
    assert vm.summarize([1, 2, 3, 4, 5]) == (3, 2, 4)


def test_summarize_single():
    assert vm.summarize([7]) == (7, 7, 7)


def test_summarize_even_interpolated():
    assert vm.summarize([1, 2, 3, 4]) == (2.5, 1.75, 3.25)


def test_summarize_matches_numpy_reference():
    rng = np.random.default_rng(0)
    values = rng.normal(size=37).tolist()
    med, q1, q3 = vm.summarize(values)
    assert med == np.percentile(values, 50)
    assert q1 == np.percentile(values, 25)
    assert q3 == np.percentile(values, 75)


def test_summarize_ignores_missing():
    assert vm.summarize([1, None, 2, float("nan"), 3, 4, 5]) == (3, 2, 4)


def test_summarize_permutation_invariant():
    rng = np.random.default_rng(1)
    values = rng.normal(size=20).tolist()
    shuffled = list(values)
    rng.shuffle(shuffled)
    assert vm.summarize(values) == vm.summarize(shuffled)


def test_summarize_empty_errors():
    with pytest.raises(ValueError):
        vm.summarize([])
    with pytest.raises(ValueError):
        vm.summarize([None, float("nan")])


def test_rank_test_identical_groups():
    assert vm.rank_test([1, 2, 3, 4], [1, 2, 3, 4]) == 1.0


def test_rank_test_separated_groups():
    a = list(range(1, 11))
    b = list(range(101, 111))
    p = vm.rank_test(a, b)
    assert p < 0.001
    assert p == pytest.approx(brute_rank_test(a, b), abs=1e-9)


def test_rank_test_label_swap_symmetric():
    rng = np.random.default_rng(2)
    a = rng.normal(size=8).tolist()
    b = rng.normal(loc=0.5, size=11).tolist()
    assert vm.rank_test(a, b) == pytest.approx(vm.rank_test(b, a), abs=1e-12)


def test_rank_test_monotone_transform_invariant():
    rng = np.random.default_rng(3)
    a = rng.normal(size=7).tolist()
    b = rng.normal(loc=0.3, size=9).tolist()
    p = vm.rank_test(a, b)
    assert vm.rank_test([math.exp(x) for x in a], [math.exp(x) for x in b]) == pytest.approx(p, abs=1e-12)
    assert vm.rank_test([3 * x + 11 for x in a], [3 * x + 11 for x in b]) == pytest.approx(p, abs=1e-12)


def test_rank_test_in_unit_interval():
    rng = np.random.default_rng(4)
    for _ in range(20):
        n_a = int(rng.integers(3, 12))
        n_b = int(rng.integers(3, 12))
        a = rng.integers(0, 6, size=n_a).tolist()  # heavy ties
        b = rng.integers(0, 6, size=n_b).tolist()
        p = vm.rank_test(a, b)
        assert 0.0 < p <= 1.0


def test_rank_test_exact_matches_enumeration_with_ties():
    rng = np.random.default_rng(5)
    for _ in range(12):
        n_a = int(rng.integers(3, 7))
        n_b = int(rng.integers(3, 7))
        a = rng.integers(0, 8, size=n_a).tolist()
        b = rng.integers(0, 8, size=n_b).tolist()
        assert vm.rank_test(a, b) == pytest.approx(brute_rank_test(a, b), abs=1e-9)


def test_rank_test_asymptotic_close_to_exact_at_boundary():
    rng = np.random.default_rng(6)
    a = rng.normal(size=20).tolist()
    b = rng.normal(loc=0.8, size=21).tolist()  # forces asymptotic branch
    p_asym = vm.rank_test(a, b)
    assert 0.0 < p_asym <= 1.0
    p_exact_side = vm.rank_test(a, b[:20])
    assert abs(p_asym - p_exact_side) < 0.2  # same regime, no tolerance claim


def test_rank_test_insufficient_data():
    with pytest.raises(ValueError):
        vm.rank_test([1, 2], [1, 2, 3])
    with pytest.raises(ValueError):
        vm.rank_test([1, 2, 3], [None, None, 1, 2])


def test_compare_groups():
    summary = compare_groups({"NOR": [1, 2, 3, 4, 5], "GLA": [6, 7, 8, 9]}, "OVAREA")
    assert isinstance(summary, GroupSummary)
    assert summary.biomarker == "OVAREA"
    assert summary.groups["NOR"] == (3, 2, 4)
    assert summary.p_value == pytest.approx(brute_rank_test([6, 7, 8, 9], [1, 2, 3, 4, 5]), abs=1e-9)
    assert summary.significant == (summary.p_value < 0.05)


def test_compare_groups_needs_two():
    with pytest.raises(ValueError):
        compare_groups({"NOR": [1, 2, 3]}, "TOR")
