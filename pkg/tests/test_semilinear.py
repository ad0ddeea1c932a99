"""Linear/semilinear membership, phi, boundedness notions, semi-simplicity."""

import random
from itertools import product

import pytest

from workbench.foundation import Alphabet, PreconditionError, enumerate_language, parikh, word
from workbench.semilinear import (
    BoundedSpec,
    SemilinearSet,
    induced_member,
    is_simple,
    linear,
    member,
    morphic_lift,
    phi,
    semilinear,
    validate_semi_simple,
)


def brute_member(q, v, mult_cap=40):
    """Independent oracle: enumerate all multiplier tuples with sum <= cap."""
    for comp in q.components:
        r = len(comp.periods)

        def rec(j, rem, used):
            if all(x == 0 for x in rem):
                return True
            if j == r or used == mult_cap:
                return False
            p = comp.periods[j]
            m = 0
            cur = rem
            while all(x >= 0 for x in cur) and used + m <= mult_cap:
                if rec(j + 1, cur, used + m):
                    return True
                cur = tuple(a - b for a, b in zip(cur, p))
                m += 1
            return False

        rem0 = tuple(a - b for a, b in zip(v, comp.constant))
        if all(x >= 0 for x in rem0) and rec(0, rem0, 0):
            return True
    return False


# Q for { (i,j,k) : 0 < i < j < k } as one linear set
STRICT_CHAIN = semilinear(linear((1, 2, 3), (1, 1, 1), (0, 1, 1), (0, 0, 1)))
DIAGONAL = semilinear(linear((0, 0), (1, 1)))


def test_member_strict_chain_examples():
    assert member(STRICT_CHAIN, (1, 2, 3))
    assert not member(STRICT_CHAIN, (2, 2, 3))


def test_member_diagonal_off_point():
    assert not member(DIAGONAL, (4, 5))
    assert brute_member(DIAGONAL, (4, 5)) is False


FIXTURE_SETS = [
    DIAGONAL,
    STRICT_CHAIN,
    semilinear(linear((1, 1), (1, 0))),
    semilinear(linear((0, 0), (2, 2)), linear((1, 1), (2, 2))),
    semilinear(linear((2, 1), (1, 1), (1, 0))),
    semilinear(linear((0,), (3,)), linear((1,), (3,))),
]


def test_member_agrees_with_brute_oracle_on_box():
    for q in FIXTURE_SETS:
        for v in product(range(16), repeat=q.dim):
            assert member(q, v) == brute_member(q, v), (q, v)


def test_member_dimension_mismatch():
    with pytest.raises(PreconditionError):
        member(DIAGONAL, (1, 2, 3))


def test_phi_examples():
    assert phi((word("abb"), word("bab"), word("abb")), (1, 2, 3)) == word(
        "abbbabbababbabbabb"
    )
    assert phi((word("a"), word("b")), (0, 0)) == ()
    assert phi((word("ab"), word("b")), (2, 1)) == word("ababb")


L3 = BoundedSpec(
    (word("abbb"), word("aab")),
    "ginsburg-parikh",
    q1=semilinear(linear((1, 2), (1, 1), (0, 1))),          # 0 < r < s
    q2=semilinear(linear((2, 1), (1, 1), (1, 0))),          # 0 < s < r  (a-count, b-count)
    alphabet=Alphabet("ab"),
)


def test_induced_member_l3_paper_verdicts():
    w_out = phi(L3.words, (2, 3))
    assert parikh(w_out, L3.alphabet) == (8, 9)
    assert not induced_member(L3, w_out)
    w_in = phi(L3.words, (2, 5))
    assert parikh(w_in, L3.alphabet) == (12, 11)
    assert induced_member(L3, w_in)


def test_induced_member_parikh_kind():
    l2 = BoundedSpec(
        (word("abb"), word("aba")),
        "parikh",
        q2=semilinear(linear((1, 1), (1, 1))),
        alphabet=Alphabet("ab"),
    )
    assert parikh(word("abbaba"), l2.alphabet) == (3, 3)
    assert induced_member(l2, word("abbaba"))
    assert not induced_member(l2, word("abb"))


def test_bounded_parikh_equals_ginsburg_on_tuple_filtered_set():
    # a Parikh spec's language equals the Ginsburg language of
    # { t : psi(phi(t)) in Q2 }, realized here by enumeration cross-check
    words = (word("ab"), word("b"))
    q2 = semilinear(linear((1, 2), (1, 2)))
    spec = BoundedSpec(words, "parikh", q2=q2, alphabet=Alphabet("ab"))
    got = enumerate_language(spec, 10).require_complete().words
    expect = set()
    for i in range(6):
        for j in range(11):
            w = phi(words, (i, j))
            if len(w) <= 10 and member(q2, parikh(w, spec.alphabet)):
                expect.add(w)
    assert set(got) == expect


def test_bounded_relationship_witness_pair():
    # words (a,b,a): Ginsburg diag Q1 gives a^i b^i a^i, the Parikh spec with
    # Q2 = {(2i,i): i>0} gives a^i b^k a^j with i+j=2k>0; they differ by length 4
    words = (word("a"), word("b"), word("a"))
    gins = BoundedSpec(
        words, "ginsburg", q1=semilinear(linear((1, 1, 1), (1, 1, 1)))
    )
    par = BoundedSpec(
        words, "parikh", q2=semilinear(linear((2, 1), (2, 1))), alphabet=Alphabet("ab")
    )
    lg = enumerate_language(gins, 4).require_complete().as_set()
    lp = enumerate_language(par, 4).require_complete().as_set()
    assert lg == {word("aba")}
    assert lp == {word("aab"), word("aba"), word("baa")}
    assert lg != lp


def test_enumerate_bounded_diag_prefix():
    spec = BoundedSpec((word("a"), word("b")), "ginsburg", q1=DIAGONAL)
    assert enumerate_language(spec, 4).words == [(), word("ab"), word("aabb")]


def test_phi_image_equals_wordwise_filtering():
    # tuple-generation enumeration vs induced_member filtering of all words
    spec = BoundedSpec((word("ab"), word("a")), "ginsburg", q1=semilinear(linear((0, 1), (1, 1))))
    via_tuples = enumerate_language(spec, 10).require_complete().as_set()
    via_filter = set()
    for n in range(11):
        for bits in range(2 ** n):
            w = tuple("ab"[(bits >> i) & 1] for i in range(n))
            if induced_member(spec, w):
                via_filter.add(w)
    assert via_tuples == via_filter


def test_is_simple_examples():
    assert is_simple(linear((0, 0), (1, 0), (0, 1)))
    assert not is_simple(linear((0, 0), (1, 1), (2, 2)))
    assert is_simple(linear((0, 0), (1, 2), (2, 1)))


def test_validate_semi_simple_single_component():
    rep = validate_semi_simple(semilinear(linear((1, 1), (1, 0), (0, 1))), 10)
    assert rep.validated


def test_validate_semi_simple_collision():
    q = semilinear(linear((0, 0), (1, 1)), linear((0, 0), (1, 0)))
    rep = validate_semi_simple(q, 5)
    assert not rep.validated
    assert rep.collisions and rep.collisions[0][2] == (0, 0)


def test_validate_semi_simple_parity_disjoint():
    q = semilinear(linear((0, 0), (2, 0)), linear((1, 0), (2, 0)))
    rep = validate_semi_simple(q, 20)
    assert rep.validated


def test_morphic_lift_definition_and_enumeration():
    base = BoundedSpec((word("a"), word("b")), "ginsburg", q1=DIAGONAL)
    lifted = morphic_lift(base, {"a": word("ab"), "b": word("ba")})
    assert lifted.words == (word("ab"), word("ba"))
    assert lifted.q1 is base.q1

    def h_image(w):
        return sum((word("ab") if s == "a" else word("ba") for s in w), ())

    base_words = enumerate_language(base, 4).require_complete().words
    expect = {h_image(w) for w in base_words if len(h_image(w)) <= 8}
    got = enumerate_language(lifted, 8).require_complete().as_set()
    assert got == expect


def test_morphic_lift_rejects_erasing_map():
    base = BoundedSpec((word("a"),), "ginsburg", q1=semilinear(linear((0,), (2,))))
    with pytest.raises(PreconditionError):
        morphic_lift(base, {"a": ()})
    lifted = morphic_lift(base, {"a": word("aa")})
    assert lifted.words == (word("aa"),)
