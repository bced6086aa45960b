"""Cohort summaries and the two-group rank test.

Group summaries are median and quartiles (linear interpolation between
order statistics). Significance uses the two-sided Wilcoxon rank-sum
(Mann-Whitney) test: exact permutation p-values when both groups have at
most 20 observations, the normal approximation with tie correction and
continuity correction otherwise. The p-value is defined as the permutation
probability P(|R - E[R]| >= |r_obs - E[R]|) of the group-A rank sum R,
which is symmetric under group relabeling and invariant under strictly
monotone transforms of the pooled values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EXACT_MAX_GROUP = 20
SIGNIFICANCE_LEVEL = 0.05


@dataclass(frozen=True)
class GroupSummary:
    """Per-biomarker comparison row: group quartiles and the rank-test p."""

    biomarker: str
    groups: dict[str, tuple[float, float, float]]  # group -> (median, q1, q3)
    p_value: float

    @property
    def significant(self) -> bool:
        return self.p_value < SIGNIFICANCE_LEVEL


def _clean(values) -> list[float]:
    out = []
    for v in values:
        if v is None:
            continue
        v = float(v)
        if math.isnan(v):
            continue
        out.append(v)
    return out


def summarize(values) -> tuple[float, float, float]:
    """(median, Q1, Q3) of the non-missing values."""
    data = _clean(values)
    if not data:
        raise ValueError("summarize needs at least one non-missing value")
    arr = np.asarray(data, dtype=float)
    q1, med, q3 = np.percentile(arr, [25.0, 50.0, 75.0])
    return float(med), float(q1), float(q3)


def _doubled_ranks(pooled: list[float]) -> list[int]:
    """Fractional ranks of the pooled sample, doubled so they are integers."""
    order = sorted(range(len(pooled)), key=lambda i: pooled[i])
    doubled = [0] * len(pooled)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and pooled[order[j + 1]] == pooled[order[i]]:
            j += 1
        # average rank of positions i..j (1-based), doubled: (i+1 + j+1)
        for k in range(i, j + 1):
            doubled[order[k]] = (i + 1) + (j + 1)
        i = j + 1
    return doubled


def _exact_p(doubled: list[int], n_a: int, r2_obs: int) -> float:
    """Exact two-sided permutation p-value of the group-A rank sum.

    Counts n_a-subsets of the pooled doubled ranks by dynamic programming
    over (subset size, doubled rank sum); all arithmetic is integral until
    the final division, so equal-deviation ties are handled exactly.
    """
    n = len(doubled)
    max_sum = sum(sorted(doubled, reverse=True)[:n_a])
    # ways[k][s] = number of k-subsets with doubled rank sum s
    ways = np.zeros((n_a + 1, max_sum + 1), dtype=float)
    ways[0, 0] = 1.0
    for rank in doubled:
        for k in range(min(n_a, n) - 1, -1, -1):
            row = ways[k]
            nz = np.nonzero(row)[0]
            if len(nz) == 0:
                continue
            ways[k + 1, nz + rank] += row[nz]
    mu2 = n_a * (n + 1)  # doubled E[R] = n_a (n+1)
    dev_obs = abs(r2_obs - mu2)
    sums = np.arange(max_sum + 1)
    extreme = np.abs(sums - mu2) >= dev_obs
    total = float(ways[n_a].sum())
    return float(ways[n_a][extreme].sum()) / total


def _normal_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def _asymptotic_p(doubled: list[int], n_a: int, r2_obs: int) -> float:
    """Normal approximation with tie correction and 0.5 continuity correction."""
    n = len(doubled)
    n_b = n - n_a
    counts: dict[int, int] = {}
    for d in doubled:
        counts[d] = counts.get(d, 0) + 1
    tie_term = sum(t ** 3 - t for t in counts.values())
    var_r = n_a * n_b / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if var_r <= 0:
        return 1.0
    dev = abs(r2_obs - n_a * (n + 1)) / 2.0  # un-double the deviation
    z = max(0.0, dev - 0.5) / math.sqrt(var_r)
    return min(1.0, 2.0 * _normal_sf(z))


def rank_test(group_a, group_b) -> float:
    """Two-sided Wilcoxon rank-sum (Mann-Whitney) p-value of two groups.

    Each group needs at least 3 non-missing values. Exact when both groups
    have <= 20 values, asymptotic otherwise.
    """
    a = _clean(group_a)
    b = _clean(group_b)
    if len(a) < 3 or len(b) < 3:
        raise ValueError(f"each group needs >= 3 non-missing values, got {len(a)} and {len(b)}")
    doubled = _doubled_ranks(a + b)
    r2_obs = sum(doubled[: len(a)])
    if len(a) <= EXACT_MAX_GROUP and len(b) <= EXACT_MAX_GROUP:
        return _exact_p(doubled, len(a), r2_obs)
    return _asymptotic_p(doubled, len(a), r2_obs)


def compare_groups(values_by_group: dict[str, list], biomarker: str) -> GroupSummary:
    """Summary row comparing a biomarker across exactly two groups."""
    if len(values_by_group) != 2:
        raise ValueError(f"need exactly two groups, got {sorted(values_by_group)}")
    (name_a, vals_a), (name_b, vals_b) = sorted(values_by_group.items())
    return GroupSummary(
        biomarker=biomarker,
        groups={name_a: summarize(vals_a), name_b: summarize(vals_b)},
        p_value=rank_test(vals_a, vals_b),
    )
