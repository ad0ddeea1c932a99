"""Shipped fixture objects used across the test suite and the docs.

Everything here is small enough to verify by hand or against the
enumeration oracle; the copy-language matrix grammar is the workhorse
for the normal-form, Szilard, counting and conversion checks.
"""

from .foundation import Alphabet, word
from .semilinear import BoundedSpec, linear, semilinear
from .etol import EtolSystem
from .matrix import MatrixGrammar


def copy_language_matrix():
    """Unambiguous index-2 grammar for { x#x : x in {a,b}+ }.

    Matrices: [S -> A#B], [A -> aA, B -> aB], [A -> bA, B -> bB],
    [A -> a, B -> a], [A -> b, B -> b]."""
    return MatrixGrammar(
        nonterminals=("S", "A", "B"),
        terminals=("a", "b", "#"),
        start="S",
        matrices=[
            (("S", word("A#B")),),
            (("A", word("aA")), ("B", word("aB"))),
            (("A", word("bA")), ("B", word("bB"))),
            (("A", ("a",)), ("B", ("a",))),
            (("A", ("b",)), ("B", ("b",))),
        ],
    )


def copy_language(max_len):
    """{ x#x : x in {a,b}+ } cut at a length bound, by direct generation."""
    out = set()
    n = 1
    while 2 * n + 1 <= max_len:
        for bits in range(2 ** n):
            x = tuple("ab"[(bits >> i) & 1] for i in range(n))
            out.add(x + ("#",) + x)
        n += 1
    return out


def copy_language_reduced_etol():
    """The four-table reduced system for { w#w : w in {a,b}* }."""
    return EtolSystem(
        v=("S", "X"),
        sigma=("a", "b", "#"),
        axiom="S",
        tables=[
            {"S": [word("X#X")]},
            {"X": [word("aX")]},
            {"X": [word("bX")]},
            {"X": [()]},
        ],
        reduced=True,
    )


# bounded-language fixtures from the boundedness-notion comparison
L3_SPEC = BoundedSpec(
    (word("abbb"), word("aab")),
    "ginsburg-parikh",
    q1=semilinear(linear((1, 2), (1, 1), (0, 1))),   # 0 < r < s
    q2=semilinear(linear((2, 1), (1, 1), (1, 0))),   # 0 < s < r on (a, b) counts
    alphabet=Alphabet("ab"),
)

ABA_GINSBURG = BoundedSpec(
    (word("a"), word("b"), word("a")),
    "ginsburg",
    q1=semilinear(linear((1, 1, 1), (1, 1, 1))),
)

ABA_PARIKH = BoundedSpec(
    (word("a"), word("b"), word("a")),
    "parikh",
    q2=semilinear(linear((2, 1), (2, 1))),
    alphabet=Alphabet("ab"),
)


def abn_edol():
    """Single-table deterministic plain system: a => ab, b => b; from
    axiom a it walks a, ab, abb, ... (the {ab^n} chain)."""
    return EtolSystem(
        v=("a", "b"),
        sigma=("a", "b"),
        axiom="a",
        tables=[{"a": [word("ab")], "b": [("b",)]}],
        reduced=False,
    )


def doubling_edol():
    """Single-table deterministic system for {a^(2^n) : n >= 0}."""
    return EtolSystem(
        v=("a",), sigma=("a",), axiom="a", tables=[{"a": [word("aa")]}], reduced=False
    )
