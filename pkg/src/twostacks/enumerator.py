"""Counting achievable permutations by automaton-pruned depth-first search.

The search walks operation-sequence prefixes, maintaining the machine state
(input pointer and both stacks) and, when pruning, the state of the
factor-avoidance automaton; branches whose automaton state dies are skipped.
Completed outputs are deduplicated in a hash set, so pruning affects running
time only, never the count.

Two refinements from the same playbook keep larger n feasible:

    - increment-avoiding counts: a permutation with some a_{j+1} = a_j + 1 is
      achievable iff the permutation with a_j deleted is, so it suffices to
      count permutations with no such adjacent increment (t_n) and recover
      the full counts via s_n = sum_i C(n-1, i-1) t_i.
    - start-sequence shards: fixing the first m output values splits the run
      into independent shards whose dedup sets only hold output suffixes;
      shards sum to the total and parallelise perfectly.
"""

from __future__ import annotations

import itertools
import multiprocessing
import os
import sys
from dataclasses import dataclass
from math import comb

from .automata import pruning_automaton
from .errors import ResourceLimit
from .series import Series

# dedup entries are small ints; 20M of them is roughly a gigabyte of set
DEFAULT_MAX_STORED = 20_000_000


@dataclass(frozen=True)
class ShardSpec:
    """One start-sequence shard: permutations of length n whose first m
    output values equal `start`."""

    n: int
    m: int
    start: tuple

    def __post_init__(self):
        if not 0 <= self.m < self.n:
            raise ValueError("need 0 <= m < n")
        if len(self.start) != self.m or len(set(self.start)) != self.m:
            raise ValueError("start must hold m distinct values")
        if self.start and not all(1 <= v <= self.n for v in self.start):
            raise ValueError("start values must lie in 1..n")


def _dfs_count(n, table, start, increment_avoiding, max_stored, _keep=None):
    """Core search. Returns (distinct permutation count, explored prefix count).

    `table` is a flat DFA transition list (or None for no pruning); `start`
    is the required output prefix.  Only the output suffix beyond the start
    sequence is stored, packed into an int at bit_length(n) bits per value.
    """
    if n == 0:
        if _keep is not None:
            _keep["seen"] = {0}
        return 1, 1
    m = len(start)
    bits = n.bit_length()
    seen = set()
    seen_add = seen.add
    s1 = []
    s2 = []
    push1, pop1 = s1.append, s1.pop
    push2, pop2 = s2.append, s2.pop
    pruned = table is not None
    nodes = 0

    def dfs(pushed, astate, nout, last, packed):
        nonlocal nodes
        nodes += 1
        if nout == n:
            seen_add(packed)
            if len(seen) > max_stored:
                raise ResourceLimit(
                    f"more than {max_stored} stored permutations; raise max_stored or shard")
            return
        if pushed < n:
            if pruned:
                t = table[astate * 3]
                if t >= 0:
                    push1(pushed + 1)
                    dfs(pushed + 1, t, nout, last, packed)
                    pop1()
            else:
                push1(pushed + 1)
                dfs(pushed + 1, 0, nout, last, packed)
                pop1()
        if s1:
            if pruned:
                t = table[astate * 3 + 1]
                if t >= 0:
                    push2(pop1())
                    dfs(pushed, t, nout, last, packed)
                    push1(pop2())
            else:
                push2(pop1())
                dfs(pushed, 0, nout, last, packed)
                push1(pop2())
        if s2:
            v = s2[-1]
            if increment_avoiding and nout and v == last + 1:
                return
            if nout < m:
                if start[nout] != v:
                    return
                new_packed = packed
            else:
                new_packed = (packed << bits) | v
            if pruned:
                t = table[astate * 3 + 2]
                if t < 0:
                    return
            else:
                t = 0
            pop2()
            dfs(pushed, t, nout + 1, v, new_packed)
            push2(v)

    if sys.getrecursionlimit() < 3 * n + 100:
        sys.setrecursionlimit(3 * n + 100)
    dfs(0, 0, 0, 0, 0)
    if _keep is not None:
        _keep["seen"] = seen
    return len(seen), nodes


def _table_for(n: int, pruned: bool):
    if not pruned or n < 1:
        return None
    return pruning_automaton(n).flat_table()


def count_achievable(n: int, pruned: bool = True, *,
                     max_stored: int = DEFAULT_MAX_STORED) -> int:
    """Number of achievable permutations of length n (s_n), unsharded."""
    count, _ = _dfs_count(n, _table_for(n, pruned), (), False, max_stored)
    return count


def achievable_set(n: int, pruned: bool = True, *,
                   max_stored: int = DEFAULT_MAX_STORED) -> set:
    """The achievable permutations themselves, as tuples.

    With pruning this exercises the automaton path end to end, so comparing
    against `machine.achievable_brute` checks that pruning loses nothing.
    """
    seen = _dfs_set(n, _table_for(n, pruned), max_stored)
    bits = n.bit_length()
    mask = (1 << bits) - 1
    out = set()
    for packed in seen:
        values = []
        for _ in range(n):
            values.append(packed & mask)
            packed >>= bits
        out.add(tuple(reversed(values)))
    return out


def _dfs_set(n, table, max_stored):
    holder = {}
    _dfs_count(n, table, (), False, max_stored, _keep=holder)
    return holder["seen"]


def count_increment_avoiding(n: int, *, pruned: bool = True,
                             max_stored: int = DEFAULT_MAX_STORED) -> int:
    """Number of achievable increment-avoiding permutations of length n (t_n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    count, _ = _dfs_count(n, _table_for(n, pruned), (), True, max_stored)
    return count


def explored_prefix_count(n: int, pruned: bool) -> int:
    """Instrumentation: how many operation-sequence prefixes the search visits."""
    _, nodes = _dfs_count(n, _table_for(n, pruned), (), False, DEFAULT_MAX_STORED)
    return nodes


def count_with_start_sequence(spec: ShardSpec, increment_avoiding: bool = False, *,
                              pruned: bool = True,
                              max_stored: int = DEFAULT_MAX_STORED) -> int:
    """Count achievable permutations whose first m outputs equal spec.start."""
    if increment_avoiding and _has_increment(spec.start):
        return 0
    count, _ = _dfs_count(spec.n, _table_for(spec.n, pruned), tuple(spec.start),
                          increment_avoiding, max_stored)
    return count


def _has_increment(seq) -> bool:
    return any(b == a + 1 for a, b in zip(seq, seq[1:]))


# --- parallel sharding -------------------------------------------------

_worker_state: dict = {}


def _shard_worker_init(n, table, increment_avoiding, max_stored):
    _worker_state["args"] = (n, table, increment_avoiding, max_stored)


def _shard_worker(start):
    n, table, increment_avoiding, max_stored = _worker_state["args"]
    if increment_avoiding and _has_increment(start):
        return 0
    count, _ = _dfs_count(n, table, start, increment_avoiding, max_stored)
    return count


def enumerate_parallel(n: int, m: int | None = None, workers: int | None = None,
                       increment_avoiding: bool = False, *, pruned: bool = True,
                       max_stored: int = DEFAULT_MAX_STORED) -> int:
    """Total count over all start-sequence shards, executed on a worker pool.

    Shards are independent and combined by summation, so the result is
    identical for every worker count.  m defaults to min(6, n-1).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n < 2:
        return 1  # s_0 = s_1 = t_0 = t_1 = 1
    if m is None:
        m = min(6, n - 1)
    if not 1 <= m < n:
        raise ValueError("need 1 <= m < n")
    if workers is None:
        workers = os.cpu_count() or 1
    table = _table_for(n, pruned)
    starts = list(itertools.permutations(range(1, n + 1), m))
    if workers == 1:
        _shard_worker_init(n, table, increment_avoiding, max_stored)
        return sum(_shard_worker(s) for s in starts)
    ctx = multiprocessing.get_context()
    chunk = max(1, len(starts) // (8 * workers))
    with ctx.Pool(workers, initializer=_shard_worker_init,
                  initargs=(n, table, increment_avoiding, max_stored)) as pool:
        return sum(pool.imap_unordered(_shard_worker, starts, chunksize=chunk))


def enumerate_series(n_max: int, *, m: int | None = None, workers: int | None = None,
                     increment_avoiding: bool = False, pruned: bool = True,
                     max_stored: int = DEFAULT_MAX_STORED) -> Series:
    """Series of counts for n = 0..n_max (s_n, or t_n with the increment guard).

    t_0 is taken as 1 (the empty permutation) so the binomial transform can
    start from index 0.
    """
    values = []
    for n in range(n_max + 1):
        if n < 2:
            values.append(1)
        else:
            values.append(enumerate_parallel(n, m=None if m is None else min(m, n - 1),
                                             workers=workers,
                                             increment_avoiding=increment_avoiding,
                                             pruned=pruned, max_stored=max_stored))
    return Series("increment-avoiding" if increment_avoiding else "achievable", values)


# --- binomial transform -------------------------------------------------

def binomial_transform(t: Series) -> Series:
    """s_n = sum_{i=1..n} C(n-1, i-1) t_i (s_0 = t_0), exactly.

    This is the coefficient form of substituting x -> x/(1-x): replacing each
    value of an increment-avoiding permutation with a run of consecutive
    integers yields every achievable permutation exactly once.
    """
    if not t.exact:
        raise ValueError("empty series")
    tv = t.exact
    s = [tv[0]]
    for n in range(1, len(tv)):
        s.append(sum(comb(n - 1, i - 1) * tv[i] for i in range(1, n + 1)))
    return Series(f"{t.name}.binomial", s)


def inverse_binomial_transform(s: Series) -> Series:
    """t_n = sum_{i=1..n} (-1)^(n-i) C(n-1, i-1) s_i (t_0 = s_0), exactly."""
    if not s.exact:
        raise ValueError("empty series")
    sv = s.exact
    t = [sv[0]]
    for n in range(1, len(sv)):
        t.append(sum((-1) ** (n - i) * comb(n - 1, i - 1) * sv[i] for i in range(1, n + 1)))
    return Series(f"{s.name}.inverse-binomial", t)
