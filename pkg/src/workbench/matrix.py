"""Context-free matrix grammars: sequential matrix application with
origin tracking, finite-index normal form, the Szilard automaton, the
per-matrix terminal morphism, and conversions to and from reduced ETOL.

A matrix applies its productions in order, each rewriting one occurrence
of its left-hand symbol; all occurrence choices are explored.  Each
complete application yields, per position of the source form, the word
that position derived (productions fired inside the same matrix funnel
into the origin they rewrote).  Derivations are counted at exactly this
granularity: a step is a (matrix, per-origin tuple) pair.  For grammars
in normal form every granularity collapses to the matrix string itself,
which is what makes the Szilard automaton deterministic.

The normal form keeps every sentential form's nonterminals pairwise
distinct by renaming them to (symbol, register) pairs, registers packed
1..n left to right, with one end-marker symbol carrying the row width.
Every refined matrix rewrites the entire row plus the marker, so it
applies from exactly one row profile; that exactness is what preserves
derivation counts (plain register pairs would admit prefix-profile
applications that inflate ambiguity).
"""

from __future__ import annotations

from dataclasses import dataclass

from .foundation import (
    DEFAULT_BUDGET,
    Enumeration,
    PreconditionError,
    register_enumerator,
    sort_words,
)
from .etol import EtolSystem, TreeCount, _is_subsequence

INF = float("inf")


class IndexExceeded(PreconditionError):
    """A reachable sentential form needs more registers than the index bound."""


class NormalFormViolation(PreconditionError):
    """A reachable profile breaks distinct-occurrence or unique-application."""


class MatrixGrammar:
    """Matrix rules over context-free productions (lhs in N, rhs over V*)."""

    def __init__(self, nonterminals, terminals, start, matrices):
        self.nonterminals = tuple(nonterminals)
        self.terminals = tuple(terminals)
        self.start = start
        nset, tset = set(self.nonterminals), set(self.terminals)
        if nset & tset:
            raise ValueError("nonterminals and terminals must be disjoint")
        if start not in nset:
            raise ValueError("start symbol must be a nonterminal")
        norm = []
        for m in matrices:
            prods = []
            for lhs, rhs in m:
                if lhs not in nset:
                    raise ValueError("production lhs %r is not a nonterminal" % (lhs,))
                rhs = tuple(rhs)
                for s in rhs:
                    if s not in nset and s not in tset:
                        raise ValueError("unknown symbol %r in rhs" % (s,))
                prods.append((lhs, rhs))
            if not prods:
                raise ValueError("empty matrix")
            norm.append(tuple(prods))
        self.matrices = tuple(norm)
        self._nset = nset
        self._tset = tset

    def is_word(self, sentential):
        return all(s in self._tset for s in sentential)

    def profile(self, sentential):
        return tuple(s for s in sentential if s in self._nset)

    def __repr__(self):
        return "MatrixGrammar(%d matrices, start=%r)" % (len(self.matrices), self.start)


def matrix_applications(g, sentential, m_idx):
    """All complete applications of one matrix, with origin tracking.

    Returns distinct (successor, per_origin, used_fresh) triples where
    per_origin[i] is the word derived by position i of the input and
    used_fresh flags patterns that rewrote a symbol created earlier in
    the same matrix.
    """
    sentential = tuple(sentential)
    start = tuple((i, s, True) for i, s in enumerate(sentential))  # (origin, sym, original?)
    results = {}

    def run(form, p, used_fresh):
        if p == len(g.matrices[m_idx]):
            per_origin = tuple(
                tuple(s for (o, s, _) in form if o == i) for i in range(len(sentential))
            )
            succ = tuple(s for (_, s, _) in form)
            prev = results.get(per_origin)
            results[per_origin] = (succ, used_fresh or (prev[1] if prev else False))
            return
        lhs, rhs = g.matrices[m_idx][p]
        for pos, (origin, sym, original) in enumerate(form):
            if sym != lhs:
                continue
            new = form[:pos] + tuple((origin, s, False) for s in rhs) + form[pos + 1:]
            run(new, p + 1, used_fresh or not original)

    run(start, 0, False)
    out = []
    for per_origin, (succ, used_fresh) in sorted(results.items()):
        out.append((succ, per_origin, used_fresh))
    return out


def apply_matrix(g, sentential, m_idx):
    """All successor sentential forms; empty when the matrix blocks."""
    return sorted(
        {succ for succ, _, _ in matrix_applications(g, sentential, m_idx)},
        key=lambda w: (len(w), w),
    )


def _min_yield_map(g):
    m = {s: 1 for s in g.terminals}
    m.update({a: INF for a in g.nonterminals})
    changed = True
    while changed:
        changed = False
        for matrix in g.matrices:
            for lhs, rhs in matrix:
                cand = sum(m[s] for s in rhs)
                if cand < m[lhs]:
                    m[lhs] = cand
                    changed = True
    return m


def enumerate_matrix(g, max_len, budget=None):
    budget = budget or DEFAULT_BUDGET
    m = _min_yield_map(g)
    start = (g.start,)
    seen = {start}
    frontier = [start]
    words = set()
    explored = 0
    while frontier:
        nxt = []
        for s in frontier:
            explored += 1
            if explored > budget.max_steps:
                return Enumeration(sort_words(words), False, explored)
            if g.is_word(s):
                if len(s) <= max_len:
                    words.add(s)
                continue
            for mi in range(len(g.matrices)):
                for succ in apply_matrix(g, s, mi):
                    if succ in seen:
                        continue
                    if sum(m[x] for x in succ) > max_len:
                        continue
                    seen.add(succ)
                    nxt.append(succ)
        frontier = nxt
    return Enumeration(sort_words(words), True, explored)


register_enumerator(MatrixGrammar, enumerate_matrix)


def count_derivations(g, w, max_depth=None, cap=4096):
    """Distinct derivations of w, a derivation being a sequence of
    (matrix, per-origin tuple) steps; exact unless the budget is hit."""
    w = tuple(w)
    if max_depth is None:
        max_depth = 4 * len(w) + 12
    mym = _min_yield_map(g)
    w_terms = w
    memo = {}

    def count(s, depth):
        if g.is_word(s):
            return (1 if s == w else 0, True)
        if depth == 0:
            return (0, False)
        key = (s, depth)
        if key in memo:
            return memo[key]
        total, exact = 0, True
        for mi in range(len(g.matrices)):
            seen_steps = set()
            for succ, per_origin, _ in matrix_applications(g, s, mi):
                step_id = (mi, per_origin)
                if step_id in seen_steps:
                    continue
                seen_steps.add(step_id)
                if sum(mym[x] for x in succ) > len(w):
                    continue
                if not _is_subsequence(tuple(x for x in succ if x in g._tset), w_terms):
                    continue
                sub, sub_exact = count(succ, depth - 1)
                total += sub
                exact = exact and sub_exact
                if total >= cap:
                    memo[key] = (cap, False)
                    return memo[key]
        memo[key] = (total, exact)
        return memo[key]

    value, exact = count((g.start,), max_depth)
    return TreeCount(value, exact)


def _explore_profiles(g, k):
    """Reachable nonterminal profiles and per-(profile, matrix) applications.

    Raises IndexExceeded when a reachable profile is longer than k."""
    start = (g.start,)
    table = {}
    frontier = [start]
    seen = {start}
    while frontier:
        x = frontier.pop()
        if len(x) > k:
            raise IndexExceeded(
                "profile %r exceeds index bound %d" % (x, k)
            )
        apps = {}
        for mi in range(len(g.matrices)):
            hits = matrix_applications(g, x, mi)
            if hits:
                apps[mi] = hits
                for succ, _, _ in hits:
                    nxt = g.profile(succ)
                    if nxt not in seen:
                        seen.add(nxt)
                        frontier.append(nxt)
        table[x] = apps
    return table


@dataclass(frozen=True)
class NormalFormCert:
    """Evidence from exhaustive profile exploration (the profile space is
    finite, so the certificate covers every reachable sentential form)."""

    index: int
    profiles: tuple
    already_normal: bool


def _check_normal(profile_table):
    for x, apps in profile_table.items():
        if len(set(x)) != len(x):
            return False
        for mi, hits in apps.items():
            if len(hits) > 1:
                return False
            if any(used_fresh for _, _, used_fresh in hits):
                return False
    return True


def normal_form(g, k):
    """Equivalent index-k grammar whose sentential forms carry pairwise
    distinct nonterminals and whose matrices apply fully, plus the
    certificate.  Derivation counts per word are preserved exactly.

    Registers alternate between two namespaces by step parity so the
    fresh names a matrix introduces can never collide with the names a
    later production of the same matrix still has to rewrite.  Grammars
    already satisfying the conditions are returned unchanged."""
    table = _explore_profiles(g, k)
    if _check_normal(table):
        return g, NormalFormCert(k, tuple(sorted(table)), True)

    used = set(g.terminals) | set(g.nonterminals)

    def reg(sym, i, parity):
        return "[%s|%d%s]" % (sym, i, "ab"[parity])

    marker = "#"
    while any(reg(marker, i, p) in used for i in range(k + 2) for p in (0, 1)):
        marker += "#"
    start0 = "S0"
    while start0 in used:
        start0 += "'"

    new_matrices = []
    new_nts = {start0}
    new_matrices.append(((start0, (reg(g.start, 1, 0), reg(marker, 2, 0))),))
    new_nts.add(reg(g.start, 1, 0))
    new_nts.add(reg(marker, 2, 0))

    for parity in (0, 1):
        for x in sorted(table):
            if not x:
                continue
            apps = table[x]
            for mi in sorted(apps):
                for succ, per_origin, _ in apps[mi]:
                    newprof = g.profile(succ)
                    if len(newprof) > k:
                        raise IndexExceeded(
                            "profile %r exceeds index bound %d" % (newprof, k)
                        )
                    flip = 1 - parity
                    prods = []
                    counter = 0
                    for i, part in enumerate(per_origin):
                        rhs = []
                        for s in part:
                            if s in g._nset:
                                counter += 1
                                rhs.append(reg(s, counter, flip))
                                new_nts.add(reg(s, counter, flip))
                            else:
                                rhs.append(s)
                        prods.append((reg(x[i], i + 1, parity), tuple(rhs)))
                        new_nts.add(reg(x[i], i + 1, parity))
                    width = len(newprof)
                    old_mark = reg(marker, len(x) + 1, parity)
                    new_mark = (reg(marker, width + 1, flip),) if width else ()
                    prods.append((old_mark, new_mark))
                    new_nts.add(old_mark)
                    if new_mark:
                        new_nts.add(new_mark[0])
                    new_matrices.append(tuple(prods))

    out = MatrixGrammar(sorted(new_nts), g.terminals, start0, new_matrices)
    cert_table = _explore_profiles(out, k + 2)
    if not _check_normal(cert_table):
        raise NormalFormViolation("register construction left a violation")
    return out, NormalFormCert(k, tuple(sorted(cert_table)), False)


def theta(g):
    """Per matrix, the concatenated terminal parts of its right-hand sides."""
    out = []
    for matrix in g.matrices:
        img = []
        for _, rhs in matrix:
            img.extend(s for s in rhs if s in g._tset)
        out.append(tuple(img))
    return tuple(out)


@dataclass(frozen=True)
class SzilardDFA:
    """States are nonterminal profiles, transitions are matrix indexes,
    the empty profile accepts; deterministic for normal-form grammars."""

    states: tuple
    initial: int
    accepting: frozenset
    transitions: dict
    n_letters: int

    def step(self, state, letter):
        return self.transitions.get((state, letter))

    def accepts(self, seq):
        q = self.initial
        for a in seq:
            q = self.transitions.get((q, a))
            if q is None:
                return False
        return q in self.accepting

    def accepted_strings(self, max_len):
        out = []
        frontier = [(self.initial, ())]
        while frontier:
            nxt = []
            for q, seq in frontier:
                if q in self.accepting:
                    out.append(seq)
                if len(seq) == max_len:
                    continue
                for a in range(self.n_letters):
                    t = self.transitions.get((q, a))
                    if t is not None:
                        nxt.append((t, seq + (a,)))
            frontier = nxt
        return out


def szilard_dfa(g, k):
    """DFA over matrix indexes accepting exactly the Szilard language.

    Requires the normal-form conditions; transitions follow the unique
    profile successor, the empty profile is the one accepting state."""
    table = _explore_profiles(g, k)
    if not _check_normal(table):
        raise NormalFormViolation(
            "grammar is not in normal form; run normal_form first"
        )
    profiles = sorted(table)
    index = {x: i for i, x in enumerate(profiles)}
    transitions = {}
    for x, apps in table.items():
        for mi, hits in apps.items():
            succ, _, _ = hits[0]
            transitions[(index[x], mi)] = index[g.profile(succ)]
    accepting = frozenset([index[()]]) if () in index else frozenset()
    return SzilardDFA(
        tuple(profiles), index[(g.start,)], accepting, transitions, len(g.matrices)
    )


def dfa_equivalent(d1, d2):
    """Language equality of two Szilard-style DFAs over one alphabet,
    by synchronized search with implicit dead states."""
    if d1.n_letters != d2.n_letters:
        return False
    DEAD = -1
    seen = {(d1.initial, d2.initial)}
    stack = [(d1.initial, d2.initial)]
    while stack:
        q1, q2 = stack.pop()
        acc1 = q1 != DEAD and q1 in d1.accepting
        acc2 = q2 != DEAD and q2 in d2.accepting
        if acc1 != acc2:
            return False
        for a in range(d1.n_letters):
            t1 = d1.transitions.get((q1, a), DEAD) if q1 != DEAD else DEAD
            t2 = d2.transitions.get((q2, a), DEAD) if q2 != DEAD else DEAD
            if (t1, t2) != (DEAD, DEAD) and (t1, t2) not in seen:
                seen.add((t1, t2))
                stack.append((t1, t2))
    return True


def replay(g, alpha):
    """Replay a matrix string from the start symbol; the sentential form
    sequence, or None where the derivation blocks (normal form only)."""
    forms = [(g.start,)]
    cur = (g.start,)
    for mi in alpha:
        succ = apply_matrix(g, cur, mi)
        if not succ:
            return None
        if len(succ) > 1:
            raise NormalFormViolation("ambiguous application during replay")
        cur = succ[0]
        forms.append(cur)
    return forms


def matrix_to_reduced_etol(g, k):
    """Reduced ETOL with the same language and derivation counts.

    Nonterminals are (profile, position) pairs; one table per (profile,
    matrix, application); everything foreign falls to the dead symbol."""
    table = _explore_profiles(g, k)
    used = set(g.terminals)

    def name(x, i):
        return "[%s|%d]" % (".".join(x), i)

    dead = "F"
    while dead in used:
        dead += "'"
    all_nts = {dead}
    for x in table:
        for i in range(len(x)):
            all_nts.add(name(x, i + 1))

    tables = []
    for x in sorted(table):
        if not x:
            continue
        for mi in sorted(table[x]):
            for succ, per_origin, _ in table[x][mi]:
                newprof = g.profile(succ)
                t = {}
                counter = 0
                for i, part in enumerate(per_origin):
                    rhs = []
                    for s in part:
                        if s in g._nset:
                            counter += 1
                            rhs.append(name(newprof, counter))
                        else:
                            rhs.append(s)
                    t[name(x, i + 1)] = (tuple(rhs),)
                for nt in all_nts:
                    t.setdefault(nt, ((dead,),))
                tables.append(t)
    axiom = name((g.start,), 1)
    all_nts.add(axiom)
    if not tables:
        tables.append({nt: ((dead,),) for nt in all_nts})
    return EtolSystem(sorted(all_nts), g.terminals, axiom, tables, reduced=True)


def _explore_etol_profiles(g, k):
    """Reachable nonterminal profiles of a reduced ETOL system, with the
    per-(profile, table) rewrite combinations."""
    if not g.reduced:
        raise PreconditionError("conversion expects a reduced ETOL system")
    from itertools import product as iproduct

    start = (g.axiom,)
    seen = {start}
    frontier = [start]
    table = {}
    while frontier:
        x = frontier.pop()
        if len(x) > k:
            raise IndexExceeded("profile %r exceeds index bound %d" % (x, k))
        combos = {}
        for ti, t in enumerate(g.tables):
            opts = [t.get(s) for s in x]
            if any(o is None for o in opts):
                continue
            all_combos = []
            for choice in iproduct(*opts):
                newprof = tuple(
                    s for part in choice for s in part if g.is_nonterminal(s)
                )
                all_combos.append((choice, newprof))
                if newprof not in seen:
                    seen.add(newprof)
                    frontier.append(newprof)
            combos[ti] = all_combos
        table[x] = combos
    return table


def reduced_etol_to_edtol(g, k):
    """Deterministic reduced system: nonterminals get packed position
    subscripts; one table per (profile, table, rewrite combination)."""
    table = _explore_etol_profiles(g, k)
    used = set(g.sigma)

    def name(sym, i):
        return "%s@%d" % (sym, i)

    dead = "F"
    while dead in used:
        dead += "'"
    all_nts = {dead, name(g.axiom, 1)}
    for x in table:
        for i, s in enumerate(x):
            all_nts.add(name(s, i + 1))

    new_tables = []
    for x in sorted(table):
        if not x:
            continue
        for ti in sorted(table[x]):
            for choice, newprof in table[x][ti]:
                t = {}
                counter = 0
                for i, part in enumerate(choice):
                    rhs = []
                    for s in part:
                        if g.is_nonterminal(s):
                            counter += 1
                            rhs.append(name(s, counter))
                            all_nts.add(name(s, counter))
                        else:
                            rhs.append(s)
                    t[name(x[i], i + 1)] = (tuple(rhs),)
                new_tables.append(t)
    for t in new_tables:
        for nt in all_nts:
            t.setdefault(nt, ((dead,),))
    if not new_tables:
        new_tables.append({nt: ((dead,),) for nt in all_nts})
    return EtolSystem(
        sorted(all_nts), g.sigma, name(g.axiom, 1), new_tables, reduced=True
    )


def reduced_etol_to_matrix(g, k):
    """Matrix grammar simulating one parallel step per matrix.

    Position-subscripted nonterminals plus a row-width end marker make
    each matrix applicable from exactly one profile, so derivations map
    bijectively and counts survive the trip.  Subscript namespaces
    alternate by step parity to keep a matrix's fresh names apart from
    the row names later productions of the same matrix rewrite."""
    table = _explore_etol_profiles(g, k)
    used = set(g.sigma)

    def name(sym, i, parity):
        return "%s@%d%s" % (sym, i, "ab"[parity])

    marker = "#row"
    while any(name(marker, i, p) in used for i in range(k + 2) for p in (0, 1)):
        marker += "'"
    start0 = "S0"
    while start0 in used:
        start0 += "'"

    nts = {start0}
    matrices = [((start0, (name(g.axiom, 1, 0), name(marker, 2, 0))),)]
    nts.add(name(g.axiom, 1, 0))
    nts.add(name(marker, 2, 0))
    for parity in (0, 1):
        for x in sorted(table):
            if not x:
                continue
            for ti in sorted(table[x]):
                for choice, newprof in table[x][ti]:
                    if len(newprof) > k:
                        raise IndexExceeded(
                            "profile %r exceeds index bound %d" % (newprof, k)
                        )
                    flip = 1 - parity
                    prods = []
                    counter = 0
                    for i, part in enumerate(choice):
                        rhs = []
                        for s in part:
                            if g.is_nonterminal(s):
                                counter += 1
                                rhs.append(name(s, counter, flip))
                                nts.add(name(s, counter, flip))
                            else:
                                rhs.append(s)
                        prods.append((name(x[i], i + 1, parity), tuple(rhs)))
                        nts.add(name(x[i], i + 1, parity))
                    width = len(newprof)
                    new_mark = (name(marker, width + 1, flip),) if width else ()
                    prods.append((name(marker, len(x) + 1, parity), new_mark))
                    nts.add(name(marker, len(x) + 1, parity))
                    if new_mark:
                        nts.add(new_mark[0])
                    matrices.append(tuple(prods))
    return MatrixGrammar(sorted(nts), g.sigma, start0, matrices)
