import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twostacks.automata import (ALPHABET, all_forbidden_words, build_avoiding_dfa,
                                build_gamma, contains_forbidden_factor,
                                effect_signature, find_forbidden_words, intersect,
                                is_catalan_word, pruning_automaton)
from twostacks.errors import InvalidAlphabet
from twostacks.machine import LAMBDA, MU, RHO, parse_word


def words_upto(max_len):
    for length in range(max_len + 1):
        yield from itertools.product(ALPHABET, repeat=length)


# --- Catalan words -------------------------------------------------------

def test_catalan_examples():
    assert is_catalan_word(parse_word("rl"), RHO, LAMBDA)
    assert not is_catalan_word(parse_word("rllr"), RHO, LAMBDA)
    assert is_catalan_word(parse_word("lmlm"), LAMBDA, MU)
    assert is_catalan_word((), RHO, LAMBDA)


def test_catalan_alphabet_check():
    with pytest.raises(InvalidAlphabet):
        is_catalan_word(parse_word("rm"), RHO, LAMBDA)


@given(st.lists(st.sampled_from((RHO, LAMBDA)), max_size=14))
def test_catalan_matches_dyck_oracle(letters):
    w = tuple(letters)
    heights = []
    h = 0
    for c in w:
        h += 1 if c == RHO else -1
        heights.append(h)
    expected = bool(h == 0 and all(x >= 0 for x in heights))
    assert is_catalan_word(w, RHO, LAMBDA) == expected


# --- effect signatures ---------------------------------------------------

def test_effect_signature_known_pairs():
    assert effect_signature(parse_word("rm")) == effect_signature(parse_word("mr"))
    assert effect_signature(parse_word("rlml")) == effect_signature(parse_word("lrlm"))
    assert effect_signature(parse_word("r")) != effect_signature(parse_word("l"))


def test_effect_signature_respects_concatenation():
    # equal effects stay equal after appending or prepending a common word
    pairs = [(parse_word("rm"), parse_word("mr")),
             (parse_word("rlml"), parse_word("lrlm"))]
    for u, v in pairs:
        for x in words_upto(2):
            if not x:
                continue
            assert effect_signature(u + x) == effect_signature(v + x)
            assert effect_signature(x + u) == effect_signature(x + v)


def test_effect_signature_empty_word():
    with pytest.raises(ValueError):
        effect_signature(())


# --- forbidden words -----------------------------------------------------

def test_find_forbidden_contains_the_short_families():
    assert parse_word("rm") in find_forbidden_words(2)
    assert parse_word("rlml") in find_forbidden_words(4)


def test_catalan_pairs_are_forbidden():
    # every uv with u a rho,lambda-Catalan word and v a lambda,mu-Catalan word
    all_forbidden = all_forbidden_words(6)
    found = 0
    for w in words_upto(6):
        if len(w) < 4:
            continue
        for cut in range(2, len(w) - 1, 2):
            u, v = w[:cut], w[cut:]
            try:
                if is_catalan_word(u, RHO, LAMBDA) and is_catalan_word(v, LAMBDA, MU):
                    assert w in all_forbidden, w
                    found += 1
                    break
            except InvalidAlphabet:
                continue
    assert found > 3


def test_forbidden_words_are_minimal():
    minimal = find_forbidden_words(8)
    for w in minimal:
        for i in range(len(w)):
            for j in range(i + 1, len(w) + 1):
                if j - i < len(w):
                    assert w[i:j] not in minimal


def test_forbidden_word_lengths():
    # harvested minimal forbidden words: 1 of length 2, 2 of length 4,
    # then genuinely new ones at 6 and 7
    by_len = {}
    for w in find_forbidden_words(7):
        by_len.setdefault(len(w), set()).add(w)
    assert len(by_len[2]) == 1
    assert len(by_len[4]) == 2
    assert len(by_len[6]) == 2
    assert len(by_len[7]) == 2


# --- avoiding DFAs -------------------------------------------------------

def test_avoiding_dfa_examples():
    d = build_avoiding_dfa(parse_word("rm"))
    assert not d.accepts(parse_word("lrm"))
    assert d.accepts(parse_word("lmr"))
    d = build_avoiding_dfa(parse_word("rlml"))
    assert not d.accepts(parse_word("rrlml"))
    assert d.accepts(parse_word("rlmm"))


@pytest.mark.parametrize("pattern", ["rm", "rlml", "rllm", "rrlllm"])
def test_avoiding_dfa_exhaustive(pattern):
    u = parse_word(pattern)
    d = build_avoiding_dfa(u)
    for w in words_upto(7):
        has_factor = any(w[i:i + len(u)] == u for i in range(len(w) - len(u) + 1))
        assert d.accepts(w) == (not has_factor), w


# --- the pruning automaton ----------------------------------------------

def test_gamma_examples():
    g = build_gamma(3)
    assert not g.accepts(parse_word("rml"))       # contains rm
    assert not g.accepts(parse_word("rllm"))      # u=rl, v=lm
    assert not g.accepts(parse_word("rrllmm"))    # contains rllm
    assert g.accepts(parse_word("rlmrlm"))
    assert g.accepts(parse_word("rlrlmm"))


def test_gamma_agrees_with_pattern_scan_oracle():
    # exhaustive agreement on every word of length <= 10 (live-prefix walk;
    # rejection is inherited by extensions on both sides)
    g = build_gamma(4)
    stack = [((), g.start)]
    while stack:
        prefix, state = stack.pop()
        if len(prefix) == 10:
            continue
        for c in ALPHABET:
            t = g.transitions[state].get(c)
            word = prefix + (c,)
            assert (t is None) == contains_forbidden_factor(word), word
            if t is not None:
                stack.append((word, t))


def test_gamma_truncation_monotone():
    # Gamma_n and Gamma_{n+1} agree on all words of length <= 3n
    for n in (1, 2):
        g1, g2 = build_gamma(n), build_gamma(n + 1)
        for w in words_upto(3 * n):
            assert g1.accepts(w) == g2.accepts(w), w


def test_gamma_rejects_short_forbidden_words():
    g = build_gamma(3)
    for w in find_forbidden_words(6):
        assert not g.accepts(w), w


def test_intersect_identity():
    d = build_avoiding_dfa(parse_word("rm"))
    product = intersect([d])
    for w in words_upto(6):
        assert product.accepts(w) == d.accepts(w)


def test_intersect_is_language_intersection():
    parts = [build_avoiding_dfa(parse_word("rm")),
             build_avoiding_dfa(parse_word("llm")),
             build_gamma(2)]
    product = intersect(parts)
    for w in words_upto(6):
        assert product.accepts(w) == all(d.accepts(w) for d in parts), w


def test_pruner_rejects_every_minimal_forbidden_word():
    pruner = pruning_automaton(3)
    for w in find_forbidden_words(9):
        assert not pruner.accepts(w), w


def test_export_text():
    d = build_avoiding_dfa(parse_word("rm"))
    text = d.export_text()
    assert text.startswith("# start 0")
    for line in text.strip().splitlines()[1:]:
        src, letter, dst = line.split()
        assert letter in "rlm"
        assert 0 <= int(src) < d.num_states and 0 <= int(dst) < d.num_states
