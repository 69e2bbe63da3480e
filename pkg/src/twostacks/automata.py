"""Pruning automata for the operation-sequence search.

Two operation sequences are *equivalent* if they emit the same permutation.
Ordering the letters rho < lambda < mu, a word is *forbidden* when some
lexicographically larger word has the same effect on the machine; an optimal
(lex-largest) operation sequence therefore contains no forbidden factor, and
restricting the search to words without known forbidden factors loses no
permutation.

Three infinite families of forbidden factors admit a compact recogniser:

    - "rm"    (rho immediately followed by mu commutes to "mr"),
    - "rlml"  (same effect as "lrlm"),
    - u v     where u is a rho,lambda-Catalan word and v is a
              lambda,mu-Catalan word: u moves items from the input to
              stack 2 while v moves items from stack 1 to the output, so
              the two blocks commute and uv < vu.

`build_gamma` constructs a DFA accepting exactly the words (up to a length
bound) avoiding all three families.  `find_forbidden_words` discovers *all*
short forbidden words from first principles by comparing machine-effect
signatures; the handful that escape the three families get dedicated
factor-avoiding DFAs, and `pruning_automaton` intersects everything into the
single DFA the enumerator consults.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .errors import InvalidAlphabet
from .machine import LAMBDA, MU, RHO, Letter, Word

ALPHABET = (RHO, LAMBDA, MU)

# forbidden-word harvesting beyond this length is exponential and unnecessary:
# longer factors prune too few search branches to pay for themselves
MAX_FORBIDDEN_LENGTH = 9


@dataclass(frozen=True)
class Dfa:
    """Deterministic automaton over the three machine letters.

    Every live state is accepting; a missing transition is a rejection (the
    languages here are factor-avoidance languages, i.e. safety properties).
    ``transitions[s]`` maps a letter to the successor of state ``s``.
    """

    start: int
    transitions: tuple

    @property
    def num_states(self) -> int:
        return len(self.transitions)

    def step(self, state: int, letter) -> int | None:
        return self.transitions[state].get(letter)

    def walk(self, word) -> int | None:
        """Final state after reading word, or None if it dies."""
        state = self.start
        for c in word:
            state = self.transitions[state].get(c)
            if state is None:
                return None
        return state

    def accepts(self, word) -> bool:
        return self.walk(word) is not None

    def flat_table(self) -> list:
        """Dense transition table: entry [3*s + letter] is the successor or -1."""
        table = [-1] * (3 * self.num_states)
        for s, row in enumerate(self.transitions):
            for letter, t in row.items():
                table[3 * s + letter] = t
        return table

    def export_text(self) -> str:
        """Adjacency list '<state> <letter> <state>', one transition per line."""
        lines = [f"# start {self.start}"]
        for s, row in enumerate(self.transitions):
            for letter in ALPHABET:
                if letter in row:
                    lines.append(f"{s} {'rlm'[letter]} {row[letter]}")
        return "\n".join(lines) + "\n"


def _freeze(transitions: dict, start) -> Dfa:
    """Renumber states reachable from start into a dense tuple-backed Dfa."""
    ids = {start: 0}
    order = [start]
    for st in order:
        for letter in ALPHABET:
            nxt = transitions.get(st, {}).get(letter)
            if nxt is not None and nxt not in ids:
                ids[nxt] = len(ids)
                order.append(nxt)
    rows = []
    for st in order:
        row = {}
        for letter in ALPHABET:
            nxt = transitions.get(st, {}).get(letter)
            if nxt is not None:
                row[letter] = ids[nxt]
        rows.append(row)
    return Dfa(start=0, transitions=tuple(rows))


def is_catalan_word(w, x, y) -> bool:
    """True iff w is balanced over {x, y} and no prefix has more y than x."""
    if x == y:
        raise ValueError("x and y must differ")
    h = 0
    for c in w:
        if c == x:
            h += 1
        elif c == y:
            h -= 1
            if h < 0:
                return False
        else:
            raise InvalidAlphabet(f"letter {c!r} not in ({x!r}, {y!r})")
    return h == 0


@dataclass(frozen=True)
class EffectSignature:
    """Canonical description of what a word does to any deep-enough machine.

    ``min_input``/``min_stack1``/``min_stack2`` are the minimal container
    depths the word requires.  ``rearrangement`` records, for a symbolic
    machine holding exactly those minimal depths of generic items, the final
    contents of stack 1, stack 2 and the output (top first for the stacks).
    Items are tagged by origin: ("in", k) is the k-th item consumed from the
    input, ("s1", k) / ("s2", k) the k-th item initially on that stack
    counting from the top.  Two words act identically on every sufficiently
    deep state iff their signatures are equal.
    """

    min_input: int
    min_stack1: int
    min_stack2: int
    rearrangement: tuple


def effect_signature(w) -> EffectSignature:
    """Simulate w symbolically and return its canonical effect."""
    if not w:
        raise ValueError("effect signature of the empty word is not defined")
    nr = 0
    h1 = h2 = 0
    need1 = need2 = 0
    for c in w:
        if c == RHO:
            nr += 1
            h1 += 1
        elif c == LAMBDA:
            h1 -= 1
            need1 = max(need1, -h1)
            h2 += 1
        else:
            h2 -= 1
            need2 = max(need2, -h2)
    # replay on a machine with exactly the minimal depths; index 0 = stack top
    s1 = [("s1", k) for k in range(need1)]
    s2 = [("s2", k) for k in range(need2)]
    out = []
    consumed = 0
    for c in w:
        if c == RHO:
            s1.insert(0, ("in", consumed))
            consumed += 1
        elif c == LAMBDA:
            s2.insert(0, s1.pop(0))
        else:
            out.append(s2.pop(0))
    return EffectSignature(nr, need1, need2, (tuple(s1), tuple(s2), tuple(out)))


def all_forbidden_words(max_len: int) -> set:
    """Every word of length <= max_len with a lex-larger effect-equivalent.

    Only words of equal length and equal letter multiset can share an effect,
    so the search groups by those keys before comparing signatures.
    """
    forbidden = set()
    for length in range(1, max_len + 1):
        groups: dict = {}
        for w in itertools.product(ALPHABET, repeat=length):
            key = (tuple(sorted(w)), effect_signature(w))
            groups.setdefault(key, []).append(w)
        for group in groups.values():
            if len(group) > 1:
                group.sort()
                forbidden.update(group[:-1])
    return forbidden


@lru_cache(maxsize=8)
def find_forbidden_words(max_len: int) -> frozenset:
    """Minimal forbidden words up to max_len.

    A forbidden word is dropped when any proper contiguous subword is itself
    forbidden: the subword's own avoider already rejects everything the
    longer word would.
    """
    if max_len > MAX_FORBIDDEN_LENGTH:
        raise ValueError(f"forbidden-word search is bounded at length {MAX_FORBIDDEN_LENGTH}")
    forbidden = all_forbidden_words(max_len)

    def minimal(w) -> bool:
        n = len(w)
        for i in range(n):
            for j in range(i + 1, n + 1):
                if j - i < n and w[i:j] in forbidden:
                    return False
        return True

    return frozenset(w for w in forbidden if minimal(w))


def contains_forbidden_factor(w) -> bool:
    """Direct pattern scan for the three factor families.

    Independent of the DFA construction; used to cross-check `build_gamma`.
    """
    t = tuple(w)
    n = len(t)
    for i in range(n - 1):
        if t[i] == RHO and t[i + 1] == MU:
            return True
    for i in range(n - 3):
        if t[i:i + 4] == (RHO, LAMBDA, MU, LAMBDA):
            return True
    # u v factors: u balanced over (rho, lambda), v balanced over (lambda, mu)
    for i in range(n):
        if t[i] != RHO:
            continue
        h = 0
        for j in range(i, n):
            if t[j] == RHO:
                h += 1
            elif t[j] == LAMBDA:
                h -= 1
            else:
                break
            if h < 0:
                break
            if h == 0:  # u = t[i..j]; scan for a following v
                k = 0
                for q in range(j + 1, n):
                    if t[q] == LAMBDA:
                        k += 1
                    elif t[q] == MU:
                        k -= 1
                        if k < 0:
                            break
                        if k == 0:
                            return True
                    else:
                        break
    return False


def build_avoiding_dfa(u) -> Dfa:
    """DFA accepting exactly the words without u as a contiguous factor.

    Standard single-pattern failure-function automaton with the full-match
    state removed (made dead).
    """
    u = tuple(u)
    if not u:
        raise ValueError("cannot avoid the empty word")
    n = len(u)
    fail = [0] * n
    for i in range(1, n):
        j = fail[i - 1]
        while j and u[i] != u[j]:
            j = fail[j - 1]
        if u[i] == u[j]:
            j += 1
        fail[i] = j
    rows = []
    for s in range(n):
        row = {}
        for c in ALPHABET:
            j = s
            while j and u[j] != c:
                j = fail[j - 1]
            if u[j] == c:
                j += 1
            if j < n:
                row[c] = j
        rows.append(row)
    return Dfa(start=0, transitions=tuple(rows))


def build_gamma(n: int) -> Dfa:
    """The pruning automaton for words of length <= 3n.

    Accepts exactly the words of length <= 3n containing none of "rm",
    "rlml", or any Catalan pair uv.  (Transitions beyond depth 3n are
    truncated, so longer words may be rejected spuriously; the enumerator
    never feeds them.)
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    uv = _build_uv_avoider(3 * n)
    return intersect([
        uv,
        build_avoiding_dfa((RHO, MU)),
        build_avoiding_dfa((RHO, LAMBDA, MU, LAMBDA)),
    ])


def _build_uv_avoider(max_depth: int) -> Dfa:
    """DFA rejecting any factor uv (u rho,lambda-Catalan; v lambda,mu-Catalan).

    Subset construction over factor-start candidates.  A candidate inside u
    carries its height in the rho/lambda Dyck path (completion at height 0),
    then inside v its height in the lambda/mu path; reaching height 0 in v
    completes a forbidden factor.  All candidate heights shift together, so
    the subsets stay small; states deeper than max_depth are not expanded.
    """
    start = (frozenset(), frozenset())
    depth = {start: 0}
    transitions: dict = {}
    frontier = [start]
    while frontier:
        nxt_frontier = []
        for st in frontier:
            if depth[st] >= max_depth:
                continue
            u_heights, v_heights = st
            row = {}
            # rho: every u-candidate climbs, a new candidate starts, v dies
            row[RHO] = (frozenset(h + 1 for h in u_heights) | {1}, frozenset())
            # lambda: u-candidates descend (a completed u spawns a v), v climbs
            row[LAMBDA] = (
                frozenset(h - 1 for h in u_heights if h >= 1),
                frozenset(k + 1 for k in v_heights) | ({1} if 0 in u_heights else frozenset()),
            )
            # mu: u dies; a v-candidate at height 1 would complete -> dead
            if 1 not in v_heights:
                row[MU] = (frozenset(), frozenset(k - 1 for k in v_heights))
            transitions[st] = row
            for target in row.values():
                if target not in depth:
                    depth[target] = depth[st] + 1
                    nxt_frontier.append(target)
        frontier = nxt_frontier
    return _freeze(transitions, start)


def intersect(dfas) -> Dfa:
    """Product automaton (reachable part) accepting the intersection language."""
    dfas = list(dfas)
    if not dfas:
        raise ValueError("need at least one automaton")
    start = tuple(d.start for d in dfas)
    transitions: dict = {}
    todo = [start]
    seen = {start}
    while todo:
        st = todo.pop()
        row = {}
        for letter in ALPHABET:
            parts = []
            for comp, d in zip(st, dfas):
                t = d.transitions[comp].get(letter)
                if t is None:
                    break
                parts.append(t)
            else:
                nxt = tuple(parts)
                row[letter] = nxt
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
        transitions[st] = row
    return _freeze(transitions, start)


@lru_cache(maxsize=32)
def pruning_automaton(n: int, max_forbidden_len: int = MAX_FORBIDDEN_LENGTH) -> Dfa:
    """Gamma'_n: build_gamma(n) intersected with one avoider per minimal
    forbidden word up to max_forbidden_len.  Cached; safe to share across
    worker processes (immutable)."""
    parts = [build_gamma(n)]
    for u in sorted(find_forbidden_words(max_forbidden_len)):
        parts.append(build_avoiding_dfa(u))
    return intersect(parts)
