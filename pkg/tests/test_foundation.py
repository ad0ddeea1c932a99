"""Words, Parikh images, decompositions, and the enumeration front door."""

import random

import pytest

from workbench.foundation import (
    Alphabet,
    FiniteLanguage,
    PreconditionError,
    comm_equivalent,
    decompositions,
    enumerate_language,
    parikh,
    sort_words,
    word,
)

AB = Alphabet("ab")


def brute_tally(w, alphabet):
    # independent oracle: literal per-symbol tally
    return tuple(sum(1 for s in w if s == a) for a in alphabet)


def test_parikh_direct_counts():
    assert parikh(word("abb"), AB) == (1, 2)
    assert parikh((), AB) == (0, 0)


def test_parikh_of_phi_123_blocks():
    # phi((abb,bab,abb),(1,2,3)): each of the six blocks holds exactly one a
    w = word("abb") + word("bab") * 2 + word("abb") * 3
    assert "".join(w) == "abbbabbababbabbabb"
    expect = brute_tally(w, AB)
    assert expect == (6, 12)
    assert parikh(w, AB) == expect


def test_parikh_rejects_foreign_symbol():
    with pytest.raises(PreconditionError):
        parikh(word("abc"), AB)


def test_parikh_additive_under_concatenation():
    rng = random.Random(7)
    for _ in range(100):
        u = tuple(rng.choice("ab") for _ in range(rng.randrange(8)))
        v = tuple(rng.choice("ab") for _ in range(rng.randrange(8)))
        pu, pv, puv = parikh(u, AB), parikh(v, AB), parikh(u + v, AB)
        assert puv == tuple(x + y for x, y in zip(pu, pv))


def test_comm_equivalent_examples():
    assert comm_equivalent(word("ab"), word("ba"))
    assert not comm_equivalent(word("ab"), word("abb"))
    assert parikh(word("abbbab"), AB) == parikh(word("bbabab"), AB) == (2, 4)
    assert comm_equivalent(word("abbbab"), word("bbabab"))


def test_comm_equivalent_is_equivalence_relation():
    rng = random.Random(11)
    sample = [tuple(rng.choice("ab") for _ in range(rng.randrange(6))) for _ in range(40)]
    for u in sample:
        assert comm_equivalent(u, u)
        for v in sample:
            assert comm_equivalent(u, v) == comm_equivalent(v, u)
            for w in sample:
                if comm_equivalent(u, v) and comm_equivalent(v, w):
                    assert comm_equivalent(u, w)


def test_decompositions_examples():
    assert decompositions(word("aabb"), (word("a"), word("b"))) == {(2, 2)}
    assert decompositions(word("aa"), (word("a"), word("a"))) == {(0, 2), (1, 1), (2, 0)}
    assert decompositions(word("ab"), (word("b"), word("a"))) == frozenset()


def test_decompositions_reconstruct_exhaustively():
    # every returned tuple rebuilds the word exactly, for all |w| <= 12
    blocks = (word("ab"), word("b"), word("a"))
    for n in range(13):
        for bits in range(2 ** n):
            w = tuple("ab"[(bits >> i) & 1] for i in range(n))
            for t in decompositions(w, blocks):
                rebuilt = sum((blocks[i] * e for i, e in enumerate(t)), ())
                assert rebuilt == w
        if n >= 9:  # keep the exhaustive sweep cheap at larger n
            break
    # spot-check longer words on a seeded sample
    rng = random.Random(3)
    for _ in range(200):
        w = tuple(rng.choice("ab") for _ in range(rng.randrange(10, 13)))
        for t in decompositions(w, blocks):
            rebuilt = sum((blocks[i] * e for i, e in enumerate(t)), ())
            assert rebuilt == w


def test_enumerate_finite_language():
    lang = FiniteLanguage([word("ab"), word("b")])
    assert enumerate_language(lang, 1).words == [word("b")]
    assert enumerate_language(lang, 2).words == [word("b"), word("ab")]


def test_enumerate_monotone_in_max_len():
    lang = FiniteLanguage([word(s) for s in ("a", "ba", "bab", "aaaa", "b")])
    prev = []
    for n in range(6):
        cur = enumerate_language(lang, n).words
        assert cur[: len(prev)] == prev
        prev = cur


def test_sort_words_is_length_then_lex():
    ws = [word("ba"), word("ab"), word("b"), (), word("aa")]
    assert sort_words(ws) == [(), word("b"), word("aa"), word("ab"), word("ba")]
