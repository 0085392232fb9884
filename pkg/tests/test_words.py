import random

import pytest
from hypothesis import given, settings, strategies as st

from simlab import perm as P
from simlab.partial_autos import pauto, from_perm
from simlab.structures import graph, linear_order
from simlab.words import (
    Defined,
    Undefined,
    WordError,
    build_convergent_words,
    concat,
    count_reduced,
    diagonal_conjugate,
    ends_with,
    enumerate_words,
    evaluate,
    format_word,
    invert,
    is_reduced,
    parse_word,
    partial_evaluate,
    reduce,
    surgery,
    word,
)

from oracles import apply_word, reduce_by_passes

letters2 = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=12)


def test_reduce_examples():
    assert reduce([1, -1], 2).letters == ()
    assert reduce([1, 2, -2, 1], 2).letters == (1, 1)
    with pytest.raises(WordError):
        reduce([3], 2)


def test_reduce_matches_pass_oracle_on_seeded_sequences():
    rng = random.Random("reduce")
    for _ in range(500):
        seq = [rng.choice([1, -1, 2, -2]) for _ in range(rng.randint(0, 12))]
        assert reduce(seq, 2).letters == reduce_by_passes(seq)


@given(letters2)
def test_reduce_idempotent(seq):
    w = reduce(seq, 2)
    assert reduce(w.letters, 2) == w
    assert is_reduced(w.letters)


def test_concat_and_invert_examples():
    u = parse_word("s1 s2^-1", 2)
    assert concat(u, invert(u)).letters == ()
    assert format_word(concat(word("s1", 2), word("s2", 2))) == "s1 s2"
    assert format_word(invert(u)) == "s2 s1^-1"
    assert invert(reduce([], 2)).letters == ()
    with pytest.raises(WordError):
        concat(word("s1", 1), word("s1", 2))


@given(letters2, letters2)
def test_concat_parity(a, b):
    u, v = reduce(a, 2), reduce(b, 2)
    assert (len(concat(u, v)) - len(u) - len(v)) % 2 == 0
    assert concat(u, invert(u)).letters == ()


def test_evaluate_examples():
    c3 = graph(3, [(0, 1), (1, 2), (0, 2)])
    shift = (1, 2, 0)
    assert evaluate(word("s1 s1", 1), [shift], c3) == (2, 0, 1)
    assert evaluate(reduce([], 1), [shift]) == (0, 1, 2)
    with pytest.raises(WordError):
        evaluate(word("s1", 1), [(0, 0, 1)])
    with pytest.raises(WordError):
        evaluate(word("s1", 1), [(1, 0, 2)], graph(3, [(0, 2)]))


def test_evaluate_homomorphism_and_conjugation():
    rng = random.Random("hom")
    for _ in range(1000):
        n = 5
        fs = [tuple(rng.sample(range(n), n)) for _ in range(2)]
        u = reduce([rng.choice([1, -1, 2, -2]) for _ in range(rng.randint(0, 6))], 2)
        v = reduce([rng.choice([1, -1, 2, -2]) for _ in range(rng.randint(0, 6))], 2)
        assert evaluate(concat(u, v), fs) == P.compose(evaluate(u, fs), evaluate(v, fs))
        g = tuple(rng.sample(range(n), n))
        hs = diagonal_conjugate(g, fs)
        assert evaluate(u, hs) == P.compose(g, P.compose(evaluate(u, fs), P.inverse(g)))
        x = rng.randrange(n)
        assert evaluate(u, fs)[x] == apply_word(u.letters, fs, x)


def test_diagonal_conjugate_examples():
    g = (1, 2, 0)
    assert diagonal_conjugate(P.identity(3), [g, g]) == (g, g)
    assert diagonal_conjugate(g, [g, g]) == (g, g)


def test_partial_evaluate_examples():
    M = linear_order(4)
    q1, q2 = pauto(M, {1: 2}), pauto(M, {})
    assert partial_evaluate(reduce([], 2), [q1, q2], 0) == Defined(0)
    assert partial_evaluate(word("s1", 2), [q1, q2], 0) == Undefined(1)
    q1, q2 = pauto(M, {2: 3}), pauto(M, {0: 2})
    assert partial_evaluate(word("s1 s2", 2), [q1, q2], 0) == Defined(3)
    with pytest.raises(IndexError):
        partial_evaluate(word("s1", 2), [q1, q2], 9)


def test_partial_evaluate_agrees_with_total_maps():
    rng = random.Random("pe")
    G = graph(5)
    for _ in range(300):
        fs = [tuple(rng.sample(range(5), 5)) for _ in range(2)]
        qs = [from_perm(G, f) for f in fs]
        w = reduce([rng.choice([1, -1, 2, -2]) for _ in range(rng.randint(0, 8))], 2)
        a = rng.randrange(5)
        assert partial_evaluate(w, qs, a) == Defined(evaluate(w, fs)[a])


def test_surgery_examples():
    assert format_word(surgery(word("s1", 2), word("s2", 2))) == "s1^-1 s2 s1"
    assert format_word(surgery(word("s1", 2), word("s1^-1", 2))) == "s1^-1 s2^-1 s1^-1 s2 s1"
    with pytest.raises(WordError):
        surgery(word("s1", 1), word("s1", 1))
    with pytest.raises(WordError):
        surgery(reduce([], 2), word("s1", 2))
    with pytest.raises(WordError):
        surgery(word("s1", 2), reduce([], 2))


def test_build_convergent_words_examples():
    assert [format_word(w) for w in build_convergent_words([word("s1", 2)], [word("s2", 2)])] == ["s1^-1 s2 s1"]
    us = [w for w in enumerate_words(2, 2) if w.letters]
    out = build_convergent_words(us, [word("s2", 2)] * len(us))
    assert all(is_reduced(w.letters) and ends_with(w, u) for w, u in zip(out, us))
    assert build_convergent_words([], []) == []
    with pytest.raises(WordError):
        build_convergent_words([word("s1", 2), word("s2", 2)], [word("s1", 2)])


def test_enumerate_words_counts_and_order():
    assert len(enumerate_words(2, 0)) == 1
    assert len(enumerate_words(2, 1)) == 5
    assert len(enumerate_words(2, 3)) == 53
    for L in range(6):
        assert len(enumerate_words(2, L)) == count_reduced(2, L) == 1 + sum(4 * 3 ** (k - 1) for k in range(1, L + 1))
    ws = enumerate_words(2, 2)
    assert [format_word(w) for w in ws[:5]] == ["e", "s1", "s1^-1", "s2", "s2^-1"]


def test_parse_word_round_trip_and_errors():
    for w in enumerate_words(3, 3):
        assert parse_word(format_word(w), 3) == w
    for bad in ["x1", "s1^2", "s"]:
        with pytest.raises(WordError):
            parse_word(bad)


@settings(max_examples=200)
@given(letters2, letters2)
def test_surgery_property_f2(a, b):
    u, x = reduce(a, 2), reduce(b, 2)
    if not u.letters or not x.letters:
        return
    w = surgery(u, x)
    assert is_reduced(w.letters) and ends_with(w, u)
