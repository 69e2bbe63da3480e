import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twostacks.errors import IllegalMove
from twostacks.machine import (LAMBDA, MU, RHO, MachineState, achievable_brute,
                               apply_letter, is_operation_sequence, is_permutation,
                               parse_word, run_sequence, sortable_brute, word_str)


def test_parse_and_format():
    assert parse_word("rlm") == (RHO, LAMBDA, MU)
    assert parse_word("ρλμ") == (RHO, LAMBDA, MU)
    assert word_str((RHO, LAMBDA, MU)) == "rlm"
    with pytest.raises(ValueError):
        parse_word("rxm")


def test_letter_order():
    assert RHO < LAMBDA < MU
    # tuple comparison gives the lexicographic word order, proper prefixes first
    assert parse_word("rl") < parse_word("rlr")
    assert parse_word("rlm") < parse_word("rm")


def test_is_operation_sequence():
    assert is_operation_sequence(parse_word("rlm"), 1)
    assert not is_operation_sequence(parse_word("rml"), 1)  # prefix rm has mu before lambda
    assert is_operation_sequence(parse_word("rrllmm"), 2)
    assert not is_operation_sequence(parse_word("rlm"), 2)
    assert not is_operation_sequence(parse_word("rrrlll"), 2)
    assert is_operation_sequence((), 0)


def test_apply_letter_moves():
    s = MachineState(input=(1,))
    s = apply_letter(s, RHO)
    assert s == MachineState(input=(), stack1=(1,))
    s = apply_letter(s, LAMBDA)
    assert s == MachineState(input=(), stack2=(1,))
    s = apply_letter(s, MU)
    assert s == MachineState(input=(), output=(1,))


def test_apply_letter_illegal():
    empty = MachineState(input=())
    for letter in (RHO, LAMBDA, MU):
        with pytest.raises(IllegalMove):
            apply_letter(empty, letter)


def test_run_sequence_examples():
    assert run_sequence(1, parse_word("rlm")) == (1,)
    # two trips through a stack restore the original order
    assert run_sequence(2, parse_word("rrllmm")) == (1, 2)
    assert run_sequence(2, parse_word("rlrlmm")) == (2, 1)
    with pytest.raises(ValueError):
        run_sequence(2, parse_word("rlm"))


def test_equivalent_sequences_exist():
    # distinct operation sequences can emit the same permutation
    assert run_sequence(2, parse_word("rlmrlm")) == run_sequence(2, parse_word("rrllmm"))
    assert run_sequence(2, parse_word("rlrlmm")) == run_sequence(2, parse_word("rrlmlm"))


def _random_operation_sequence(rng, n):
    state = MachineState.initial(n)
    word = []
    while len(state.output) < n:
        legal = []
        if state.input:
            legal.append(RHO)
        if state.stack1:
            legal.append(LAMBDA)
        if state.stack2:
            legal.append(MU)
        letter = rng.choice(legal)
        word.append(letter)
        state = apply_letter(state, letter)
    return tuple(word), state


@given(st.integers(1, 7), st.integers(0, 2 ** 32))
@settings(max_examples=40)
def test_random_walks_conserve_labels_and_emit_permutations(n, seed):
    rng = random.Random(seed)
    word, state = _random_operation_sequence(rng, n)
    assert is_operation_sequence(word, n)
    assert state.labels() == frozenset(range(1, n + 1))
    assert is_permutation(state.output)
    assert run_sequence(n, word) == state.output


def test_achievable_brute_small():
    assert achievable_brute(0) == {()}
    assert achievable_brute(1) == {(1,)}
    assert len(achievable_brute(3)) == 6
    assert len(achievable_brute(5)) == 120


def test_achievable_brute_first_nontrivial():
    assert len(achievable_brute(7)) == 5018


def test_sortable_small():
    assert sortable_brute((1,))
    assert sortable_brute((1, 2, 3))
    # every permutation of length <= 5 is sortable
    import itertools
    for p in itertools.permutations(range(1, 6)):
        assert sortable_brute(p), p


def test_sortable_matches_achievable_n7():
    import itertools
    count = sum(1 for p in itertools.permutations(range(1, 8)) if sortable_brute(p))
    assert count == 5018


def test_sortable_rejects_bad_input():
    with pytest.raises(ValueError):
        sortable_brute((1, 3))
