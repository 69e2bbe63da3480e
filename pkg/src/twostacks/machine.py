"""The two-stacks-in-series sorting machine and its brute-force oracles.

The machine reads items from an input queue and has three moves:

    rho    push the next input item onto stack 1
    lambda pop stack 1, push onto stack 2
    mu     pop stack 2, append to the output

A permutation is *achievable* if the machine, fed 1..n, can emit it; it is
*sortable* if the machine, fed the permutation, can emit 1..n.  The two
classes are equinumerous, so counting runs work with achievable
permutations throughout.  Everything in this module favours clarity over
speed; it is the reference the fast enumerator is checked against.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from enum import IntEnum

from .errors import IllegalMove


class Letter(IntEnum):
    """Machine moves, ordered RHO < LAMBDA < MU for word comparison."""

    RHO = 0
    LAMBDA = 1
    MU = 2


RHO, LAMBDA, MU = Letter.RHO, Letter.LAMBDA, Letter.MU

Word = tuple  # tuple of Letter; tuples compare lexicographically with the Letter order

_CHAR_TO_LETTER = {
    "r": RHO, "ρ": RHO,
    "l": LAMBDA, "λ": LAMBDA,
    "m": MU, "μ": MU,
}
_LETTER_TO_CHAR = {RHO: "r", LAMBDA: "l", MU: "m"}


def parse_word(text: str) -> Word:
    """Parse a word from characters r/l/m (Greek rho/lambda/mu also accepted)."""
    try:
        return tuple(_CHAR_TO_LETTER[c] for c in text.lower())
    except KeyError as exc:
        raise ValueError(f"unknown letter {exc.args[0]!r} in word {text!r}") from None


def word_str(w: Word) -> str:
    return "".join(_LETTER_TO_CHAR[Letter(c)] for c in w)


@dataclass(frozen=True)
class MachineState:
    """Machine configuration: input queue, both stacks, output list.

    ``input[0]`` is the next item to be pushed; ``stack1[-1]`` and
    ``stack2[-1]`` are the stack tops.
    """

    input: tuple
    stack1: tuple = ()
    stack2: tuple = ()
    output: tuple = ()

    @classmethod
    def initial(cls, n: int) -> "MachineState":
        return cls(input=tuple(range(1, n + 1)))

    @classmethod
    def from_permutation(cls, perm) -> "MachineState":
        return cls(input=tuple(perm))

    def labels(self) -> frozenset:
        """Multiset-as-set of all labels (labels are distinct by construction)."""
        return frozenset(self.input) | frozenset(self.stack1) | \
            frozenset(self.stack2) | frozenset(self.output)


def apply_letter(state: MachineState, letter: Letter) -> MachineState:
    """Apply one move, returning the successor state.

    Raises IllegalMove if the source container for the move is empty.
    """
    if letter == RHO:
        if not state.input:
            raise IllegalMove("rho with empty input")
        return MachineState(state.input[1:], state.stack1 + (state.input[0],),
                            state.stack2, state.output)
    if letter == LAMBDA:
        if not state.stack1:
            raise IllegalMove("lambda with empty stack 1")
        return MachineState(state.input, state.stack1[:-1],
                            state.stack2 + (state.stack1[-1],), state.output)
    if letter == MU:
        if not state.stack2:
            raise IllegalMove("mu with empty stack 2")
        return MachineState(state.input, state.stack1,
                            state.stack2[:-1], state.output + (state.stack2[-1],))
    raise ValueError(f"not a letter: {letter!r}")


def is_operation_sequence(w: Word, n: int) -> bool:
    """True iff w has length 3n, n of each letter, and every prefix satisfies
    #rho >= #lambda >= #mu."""
    if len(w) != 3 * n:
        return False
    nr = nl = nm = 0
    for c in w:
        if c == RHO:
            nr += 1
        elif c == LAMBDA:
            nl += 1
        else:
            nm += 1
        if not (nr >= nl >= nm):
            return False
    return nr == nl == nm == n


def run_sequence(n: int, w: Word) -> tuple:
    """Run an operation sequence from input 1..n; returns the output permutation."""
    if not is_operation_sequence(w, n):
        raise ValueError("not an operation sequence for this n")
    state = MachineState.initial(n)
    for c in w:
        # legality is guaranteed: the prefix condition keeps every source nonempty
        state = apply_letter(state, Letter(c))
    assert len(state.output) == n
    return state.output


def is_permutation(p) -> bool:
    return sorted(p) == list(range(1, len(p) + 1))


def achievable_brute(n: int) -> set:
    """All achievable permutations of length n, by exhaustive search.

    Explores every legal move from the initial state recursively.  Exponential;
    intended for n <= 8 (n = 9 takes hours).
    """
    results = set()
    s1: list = []
    s2: list = []
    out: list = []
    if sys.getrecursionlimit() < 3 * n + 50:
        sys.setrecursionlimit(3 * n + 50)

    def explore(pushed: int) -> None:
        if len(out) == n:
            results.add(tuple(out))
            return
        if pushed < n:
            s1.append(pushed + 1)
            explore(pushed + 1)
            s1.pop()
        if s1:
            s2.append(s1.pop())
            explore(pushed)
            s1.append(s2.pop())
        if s2:
            out.append(s2.pop())
            explore(pushed)
            s2.append(out.pop())

    explore(0)
    return results


def sortable_brute(p) -> bool:
    """True iff the machine can sort permutation p into 1..n.

    Depth-first search over legal moves, memoised on visited states.  A mu
    move is only followed when it emits the next needed value; emitting
    anything else can never reach the sorted output.  States are encoded as
    integers (stacks packed base-32) so the memo set stays compact.
    """
    n = len(p)
    if not is_permutation(p):
        raise ValueError("not a permutation of 1..n")
    if n >= 32:
        raise ValueError("sortable_brute supports n < 32")
    p = tuple(p)
    failed = set()

    def search(ip: int, s1: int, d1: int, s2: int, d2: int, need: int) -> bool:
        # ip: consumed input count; s1/s2: packed stacks; d1/d2: their depths;
        # need: next output value (so need-1 values already emitted)
        if need > n:
            return True
        key = (ip, s1, s2)
        if key in failed:
            return False
        if ip < n and search(ip + 1, (s1 << 5) | p[ip], d1 + 1, s2, d2, need):
            return True
        if d1 and search(ip, s1 >> 5, d1 - 1, (s2 << 5) | (s1 & 31), d2 + 1, need):
            return True
        if d2 and (s2 & 31) == need and search(ip, s1, d1, s2 >> 5, d2 - 1, need + 1):
            return True
        failed.add(key)
        return False

    if sys.getrecursionlimit() < 3 * n + 50:
        sys.setrecursionlimit(3 * n + 50)
    return search(0, 0, 0, 0, 0, 1)
