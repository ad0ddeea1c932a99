"""Weighted Szilard counting vs brute enumeration; recurrence fitting."""

import math
from fractions import Fraction

import pytest

from workbench.foundation import Alphabet, PreconditionError, enumerate_language, word
from workbench.semilinear import linear, semilinear
from workbench import counter as cm
from workbench import matrix as mx
from workbench import series
from workbench.fixtures import copy_language_matrix


def test_counting_coefficients_copy_fixture():
    g = copy_language_matrix()
    table = series.counting_coefficients(g, 17, k=2)
    # f(2n+1) = 2^n for n >= 1, everything else zero
    for n in range(18):
        if n >= 3 and n % 2 == 1:
            assert table[n] == 2 ** ((n - 1) // 2), n
        else:
            assert table[n] == 0, n


def test_counting_matches_brute_counts():
    g = copy_language_matrix()
    table = series.counting_coefficients(g, 12, k=2)
    brute = series.brute_counting(g, 12)
    assert table.lengths() == brute.lengths()


def test_counting_lambda_grammar():
    g = mx.MatrixGrammar(("S",), ("a",), "S", [(("S", ()),)])
    table = series.counting_coefficients(g, 5, k=1)
    assert table[0] == 1
    assert all(table[n] == 0 for n in range(1, 6))


def test_counting_ambiguous_grammar_counts_derivations():
    # two derivations of "a": the table counts matrix strings, which
    # exceeds the brute word count
    g = mx.MatrixGrammar(
        ("S", "A", "B"),
        ("a",),
        "S",
        [
            (("S", ("A",)),),
            (("S", ("B",)),),
            (("A", ("a",)),),
            (("B", ("a",)),),
        ],
    )
    table = series.counting_coefficients(g, 4, k=1)
    brute = series.brute_counting(g, 4)
    assert table[1] == 2 and brute[1] == 1


def test_counting_infinite_coefficient_detected():
    # a zero-weight loop on the way to acceptance pumps the coefficient
    g = mx.MatrixGrammar(
        ("S", "A"),
        ("a",),
        "S",
        [
            (("S", ("A",)),),        # theta = λ
            (("A", ("A",)),),        # theta = λ, zero-weight cycle
            (("A", ("a",)),),
        ],
    )
    table = series.counting_coefficients(g, 3, k=1)
    assert table[1] == series.INFINITE


def test_parikh_multiplicities_copy_fixture():
    g = copy_language_matrix()
    table = series.parikh_multiplicities(g, 7, k=2)  # coordinates (a, b, #)
    assert table[(2, 0, 1)] == 1      # a#a
    assert table[(1, 1, 1)] == 0      # no word has one a, one b, one #
    assert table[(0, 0, 0)] == 0      # λ not in the language
    assert table[(2, 2, 1)] == 2      # ab#ab and ba#ba
    marg = table.marginal_by_total()
    direct = series.counting_coefficients(g, 7, k=2)
    assert marg.lengths() == direct.lengths()


def test_brute_counting_anbn():
    from workbench.semilinear import BoundedSpec

    spec = BoundedSpec((word("a"), word("b")), "ginsburg", q1=semilinear(linear((0, 0), (1, 1))))
    table = series.brute_counting(spec, 10)
    assert table.lengths() == [1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1]


def test_brute_counting_l2_central_binomials():
    # L2 = words with equally many a's and b's, fed through the counter
    # machine realization of the diagonal Parikh set
    diag = semilinear(linear((0, 0), (1, 1)))
    m = cm.from_semilinear(diag, Alphabet("ab"))
    table = series.brute_counting(m, 14)
    expect = [math.comb(n, n // 2) if n % 2 == 0 else 0 for n in range(15)]
    got = table.lengths()
    assert got == expect


def test_fit_recurrence_powers_of_two():
    fit = series.fit_recurrence([1, 2, 4, 8, 16, 32, 64, 128], 2)
    assert fit is not None
    assert fit.order == 1 and fit.coefficients == (Fraction(2),)


def test_fit_recurrence_zeros():
    fit = series.fit_recurrence([0] * 10, 3)
    assert fit is not None and fit.order == 1 and fit.coefficients == (Fraction(0),)


def test_fit_recurrence_fibonacci():
    seq = [1, 1]
    while len(seq) < 20:
        seq.append(seq[-1] + seq[-2])
    fit = series.fit_recurrence(seq, 4)
    assert fit.order == 2 and fit.coefficients == (Fraction(1), Fraction(1))


def test_fit_recurrence_central_binomials_fails():
    seq = [math.comb(2 * n, n) for n in range(40)]
    assert series.fit_recurrence(seq, 8) is None


def test_fit_recurrence_insufficient_terms():
    with pytest.raises(PreconditionError):
        series.fit_recurrence([1, 2, 3], 4)


def test_weighted_counts_state_order_independent():
    # same language through a different pipeline: identical tables
    g = copy_language_matrix()
    t1 = series.counting_coefficients(g, 11, k=2)
    sysr = mx.matrix_to_reduced_etol(g, 2)
    back = mx.reduced_etol_to_matrix(sysr, 2)
    t2 = series.counting_coefficients(back, 11, k=4)
    assert t1.lengths() == t2.lengths()