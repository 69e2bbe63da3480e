import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twostacks.enumerator import (ShardSpec, achievable_set, binomial_transform,
                                  count_achievable, count_increment_avoiding,
                                  count_with_start_sequence, enumerate_parallel,
                                  enumerate_series, explored_prefix_count,
                                  inverse_binomial_transform)
from twostacks.errors import ResourceLimit
from twostacks.machine import achievable_brute
from twostacks.series import Series

KNOWN = [1, 1, 2, 6, 24, 120, 720, 5018, 39374, 337816, 3092691]


@pytest.mark.parametrize("n", range(7))
def test_counts_match_brute_force(n):
    expected = len(achievable_brute(n))
    assert count_achievable(n, pruned=True) == expected
    assert count_achievable(n, pruned=False) == expected
    assert expected == KNOWN[n]


def test_count_n7():
    assert count_achievable(7) == 5018


def test_achievable_set_matches_brute():
    for n in range(6):
        assert achievable_set(n, pruned=True) == achievable_brute(n)


def test_pruning_explores_fewer_prefixes():
    for n in (4, 5, 6):
        assert explored_prefix_count(n, pruned=True) < explored_prefix_count(n, pruned=False)


def test_increment_avoiding_small():
    assert count_increment_avoiding(1) == 1
    assert count_increment_avoiding(2) == 1   # only 21; 12 contains the increment
    assert count_increment_avoiding(3) == 3   # 132, 213, 321
    assert count_increment_avoiding(4) == 11


def test_increment_avoiding_matches_inverse_transform():
    s = Series("s", KNOWN[:8])
    t = inverse_binomial_transform(s)
    for n in range(1, 8):
        assert count_increment_avoiding(n) == t.exact[n]


def test_subpermutation_closure():
    # deleting any value from an achievable permutation (and renumbering)
    # leaves an achievable permutation
    for n in (4, 5, 6):
        achievable = achievable_brute(n)
        smaller = achievable_brute(n - 1)
        for p in achievable:
            for drop in range(1, n + 1):
                reduced = tuple(v - (v > drop) for v in p if v != drop)
                assert reduced in smaller, (p, drop)


# --- transforms -----------------------------------------------------------

def test_binomial_transform_examples():
    assert binomial_transform(Series("t", [1, 1, 1, 3])).exact == [1, 1, 2, 6]
    # a single nonzero t_1 gives s_n = 1 for all n
    assert binomial_transform(Series("t", [1, 1, 0, 0, 0, 0])).exact == [1, 1, 1, 1, 1, 1]
    # constant series maps to [1, 1, 0, 0, ...] under the inverse
    assert inverse_binomial_transform(Series("s", [1, 1, 1, 1, 1])).exact == [1, 1, 0, 0, 0]


def test_inverse_transform_of_known_series():
    t = inverse_binomial_transform(Series("s", [1, 1, 2, 6, 24]))
    assert t.exact == [1, 1, 1, 3, 11]


@given(st.lists(st.integers(0, 10 ** 12), min_size=1, max_size=20))
def test_transform_round_trip(values):
    series = Series("x", values)
    assert inverse_binomial_transform(binomial_transform(series)).exact == values
    assert binomial_transform(inverse_binomial_transform(series)).exact == values


def test_binomial_transform_of_ones_is_powers_of_two():
    s = binomial_transform(Series("t", [1] * 9))
    assert s.exact == [1] + [2 ** (n - 1) for n in range(1, 9)]


# --- shards and parallel runs ----------------------------------------------

def test_shard_spec_validation():
    ShardSpec(5, 2, (2, 1))
    with pytest.raises(ValueError):
        ShardSpec(5, 5, (1, 2, 3, 4, 5))
    with pytest.raises(ValueError):
        ShardSpec(5, 2, (2, 2))
    with pytest.raises(ValueError):
        ShardSpec(5, 2, (0, 1))


@pytest.mark.parametrize("n,m", [(5, 1), (5, 2), (6, 2), (7, 1), (7, 3)])
def test_shards_partition_the_count(n, m):
    total = sum(count_with_start_sequence(ShardSpec(n, m, start))
                for start in itertools.permutations(range(1, n + 1), m))
    assert total == KNOWN[n]


def test_shard_matches_filtered_brute():
    start = (2, 1)
    expected = sum(1 for p in achievable_brute(5) if p[:2] == start)
    assert count_with_start_sequence(ShardSpec(5, 2, start)) == expected


def test_increment_avoiding_shard_with_increasing_start_is_zero():
    assert count_with_start_sequence(ShardSpec(6, 2, (1, 2)), increment_avoiding=True) == 0
    assert count_with_start_sequence(ShardSpec(6, 3, (3, 1, 2)), increment_avoiding=True) == 0


def test_enumerate_parallel_matches_serial():
    assert enumerate_parallel(7, m=2, workers=1) == 5018
    assert enumerate_parallel(7, m=2, workers=2) == 5018
    assert enumerate_parallel(7, m=1, workers=2) == enumerate_parallel(7, m=3, workers=2)


def test_enumerate_parallel_increment_avoiding():
    assert enumerate_parallel(7, m=2, workers=2, increment_avoiding=True) == 2097


def test_enumerate_series_matches_known():
    series = enumerate_series(7, m=2, workers=2)
    assert series.exact == KNOWN[:8]


def test_resource_limit():
    with pytest.raises(ResourceLimit):
        count_achievable(5, max_stored=10)


def test_degenerate_sizes():
    assert count_achievable(0) == 1
    assert count_achievable(1) == 1
    assert enumerate_parallel(1) == 1
    with pytest.raises(ValueError):
        enumerate_parallel(6, m=6)
