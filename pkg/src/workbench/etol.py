"""ETOL machinery: parallel table rewriting, derivation-tree counting,
index audits, reduced/plain conversions, and the constructions that turn
semilinear sets into (unambiguous) finite-index systems.

Two table conventions coexist:

* plain systems rewrite *every* symbol at every step, so each table must
  offer at least one production for every symbol of the total alphabet;
* reduced systems rewrite only nonterminals and copy terminals verbatim.
  Reduced tables carry productions for nonterminals only and may be
  partial; a nonterminal with no production under the chosen table
  simply blocks that step.

Derivation trees are compared structurally *including the table used at
each level*: two trees that apply identical productions but name
different tables are distinct.  The tree-count search memoizes on
(sentential form, depth) so unit cycles surface as a budget-marked
">= n" lower bound instead of nontermination.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from itertools import product

from .foundation import (
    Budget,
    DEFAULT_BUDGET,
    Enumeration,
    PreconditionError,
    register_enumerator,
    sort_words,
)
from .semilinear import phi, member, validate_semi_simple, _tuples_within_length

INF = float("inf")


class EtolSystem:
    """Tables of productions with an axiom and terminal alphabet.

    ``v`` is the rewritable alphabet: the total alphabet for plain
    systems (terminals included), the nonterminal alphabet for reduced
    ones.  ``tables`` is a list of {symbol: tuple of right-hand words}.
    """

    def __init__(self, v, sigma, axiom, tables, reduced=False):
        self.v = tuple(v)
        self.sigma = tuple(sigma)
        self.axiom = axiom
        self.reduced = bool(reduced)
        vset, sset = set(self.v), set(self.sigma)
        if len(vset) != len(self.v) or len(sset) != len(self.sigma):
            raise ValueError("duplicate symbols in alphabets")
        if self.reduced:
            if vset & sset:
                raise ValueError("reduced system needs disjoint nonterminals/terminals")
        else:
            if not sset <= vset:
                raise ValueError("plain system needs terminals inside the total alphabet")
        if axiom not in vset:
            raise ValueError("axiom must be a rewritable symbol")
        allowed = vset | sset
        norm = []
        for table in tables:
            t = {}
            for x, rhss in table.items():
                if x not in vset:
                    raise ValueError("production from non-rewritable symbol %r" % (x,))
                rhss = tuple(dict.fromkeys(tuple(r) for r in rhss))
                for r in rhss:
                    for s in r:
                        if s not in allowed:
                            raise ValueError("unknown symbol %r in production" % (s,))
                if rhss:
                    t[x] = rhss
            norm.append(t)
            if not self.reduced:
                missing = vset - set(t)
                if missing:
                    raise ValueError(
                        "plain table misses productions for %r" % (sorted(missing),)
                    )
        self.tables = tuple(norm)
        self._vset = vset
        self._sset = sset

    def is_nonterminal(self, s):
        return s in self._vset if self.reduced else s not in self._sset

    def is_word(self, sentential):
        return all(s in self._sset for s in sentential)

    def table_deterministic(self, i):
        """Exactly one image for every rewritable symbol."""
        t = self.tables[i]
        return set(t) == self._vset and all(len(r) == 1 for r in t.values())

    def active_symbols(self):
        """Symbols with a non-identity production in some table (plain view)."""
        act = set()
        for t in self.tables:
            for x, rhss in t.items():
                if any(r != (x,) for r in rhss):
                    act.add(x)
        return act

    def __repr__(self):
        return "EtolSystem(%d tables, axiom=%r, reduced=%r)" % (
            len(self.tables),
            self.axiom,
            self.reduced,
        )


def classify(g):
    """Subfamily flags: EDTOL (all tables functional-total), E0L (one
    table), ED0L (both)."""
    flags = set()
    if all(g.table_deterministic(i) for i in range(len(g.tables))):
        flags.add("EDTOL")
    if len(g.tables) == 1:
        flags.add("E0L")
    if flags >= {"EDTOL", "E0L"}:
        flags.add("ED0L")
    return frozenset(flags)


def _options(g, sentential, table):
    """Per-position rewrite options; None when the table blocks."""
    t = g.tables[table]
    opts = []
    for s in sentential:
        if g.reduced and s in g._sset:
            opts.append(((s,),))
        else:
            rhss = t.get(s)
            if rhss is None:
                if not g.reduced:
                    raise PreconditionError(
                        "symbol %r has no production in table %d" % (s, table)
                    )
                return None
            opts.append(rhss)
    return opts


def step(g, sentential, table):
    """All successors of one parallel rewriting step under the table."""
    sentential = tuple(sentential)
    opts = _options(g, sentential, table)
    if opts is None:
        return []
    out = set()
    for choice in product(*opts):
        out.add(tuple(s for part in choice for s in part))
    return sorted(out, key=lambda w: (len(w), w))


def step_with_multiplicity(g, sentential, table):
    """Successors keyed to the number of distinct choice vectors reaching
    them; the multiplicity is what tree counting needs."""
    sentential = tuple(sentential)
    opts = _options(g, sentential, table)
    if opts is None:
        return {}
    out = {}
    for choice in product(*opts):
        w = tuple(s for part in choice for s in part)
        out[w] = out.get(w, 0) + 1
    return out


def min_yield_map(g):
    """Per-symbol lower bound on the length of a derivable terminal word,
    ignoring table synchronization (safe for pruning)."""
    m = {s: (1 if s in g._sset else INF) for s in set(g.v) | set(g.sigma)}
    changed = True
    while changed:
        changed = False
        for t in g.tables:
            for x, rhss in t.items():
                for r in rhss:
                    cand = sum(m[s] for s in r)
                    if cand < m[x]:
                        m[x] = cand
                        changed = True
    return m


def min_yield(g, sentential, m=None):
    m = m or min_yield_map(g)
    return sum(m[s] for s in sentential)


def enumerate_etol(g, max_len, budget=None):
    """L(G) ∩ Σ^{≤max_len} by breadth-first search over sentential forms."""
    budget = budget or DEFAULT_BUDGET
    m = min_yield_map(g)
    start = (g.axiom,)
    seen = {start}
    frontier = [start]
    words = set()
    explored = 0
    complete = True
    while frontier:
        nxt = []
        for s in frontier:
            explored += 1
            if explored > budget.max_steps:
                return Enumeration(sort_words(words), False, explored)
            if g.is_word(s) and len(s) <= max_len:
                words.add(s)
            for ti in range(len(g.tables)):
                for succ in step(g, s, ti):
                    if succ in seen:
                        continue
                    if min_yield(g, succ, m) > max_len:
                        continue
                    seen.add(succ)
                    nxt.append(succ)
        frontier = nxt
    return Enumeration(sort_words(words), complete, explored)


register_enumerator(EtolSystem, enumerate_etol)


@dataclass(frozen=True)
class TreeCount:
    """Exact derivation-tree count, or a budget-marked lower bound."""

    value: int
    exact: bool

    def __str__(self):
        return str(self.value) if self.exact else ">= %d" % self.value


def _is_subsequence(small, big):
    it = iter(big)
    return all(s in it for s in small)


def count_trees(g, w, max_depth=None, cap=4096):
    """Number of distinct derivation trees of w, within depth/count budget.

    A tree is the full record of one derivation: the table chosen at
    each level plus the production applied at every node.  Counts are
    exact for reduced systems without unit cycles; when the search hits
    the depth or count cap the result is a lower bound.
    """
    w = tuple(w)
    if max_depth is None:
        max_depth = 4 * len(w) + 12
    m = min_yield_map(g)
    if g.reduced:
        persistent = set(g.sigma)
    else:
        persistent = (set(g.v) | set(g.sigma)) - g.active_symbols()
    w_persist = tuple(s for s in w if s in persistent)
    memo = {}

    def count(s, depth):
        if g.is_word(s):
            base = 1 if s == w else 0
            if g.reduced:
                return (base, True)
        else:
            base = 0
        if depth == 0:
            return (base, False)
        key = (s, depth)
        if key in memo:
            return memo[key]
        total, exact = base, True
        for ti in range(len(g.tables)):
            for succ, mult in step_with_multiplicity(g, s, ti).items():
                if min_yield(g, succ, m) > len(w):
                    continue
                if not _is_subsequence(
                    tuple(x for x in succ if x in persistent), w_persist
                ):
                    continue
                sub, sub_exact = count(succ, depth - 1)
                total += mult * sub
                exact = exact and sub_exact
                if total >= cap:
                    memo[key] = (cap, False)
                    return memo[key]
        memo[key] = (total, exact)
        return memo[key]

    value, exact = count((g.axiom,), max_depth)
    return TreeCount(value, exact)


@dataclass
class IndexAudit:
    """Bounded evidence about derivation indexes.

    ``per_word`` maps each found word to its minimal derivation index
    (the bottleneck number of active symbols over the best derivation);
    exact for fully explored words."""

    per_word: dict
    grammar_index: int | None
    complete: bool

    def bounded_by(self, k):
        return all(v <= k for v in self.per_word.values())


def index_audit(g, max_len, budget=None):
    """Minimal bottleneck active-symbol count per word, via a cheapest-
    bottleneck search over sentential forms."""
    budget = budget or DEFAULT_BUDGET
    m = min_yield_map(g)
    active = set(g.v) if g.reduced else g.active_symbols()

    def weight(s):
        return sum(1 for x in s if x in active)

    start = (g.axiom,)
    best = {start: weight(start)}
    heap = [(best[start], start)]
    per_word = {}
    explored = 0
    complete = True
    while heap:
        cost, s = heapq.heappop(heap)
        if cost > best.get(s, INF):
            continue
        explored += 1
        if explored > budget.max_steps:
            complete = False
            break
        if g.is_word(s) and len(s) <= max_len:
            per_word.setdefault(s, cost)
            if g.reduced:
                continue
        for ti in range(len(g.tables)):
            for succ in step(g, s, ti):
                if succ == s:
                    continue
                if min_yield(g, succ, m) > max_len:
                    continue
                nc = max(cost, weight(succ))
                if nc < best.get(succ, INF):
                    best[succ] = nc
                    heapq.heappush(heap, (nc, succ))
    gi = max(per_word.values()) if per_word else None
    return IndexAudit(per_word, gi, complete)


def _fresh(base, used):
    name = base
    while name in used:
        name += "'"
    used.add(name)
    return name


def active_normal_form(g):
    """Equivalent plain system whose active symbols are exactly V - Σ.

    Active terminals move their productions to a primed nonterminal that
    can re-emit the terminal at any step; inactive nonterminals become
    dead-but-active via a two-symbol cycle, which preserves the language
    (forms containing them never terminated anyway).
    """
    if g.reduced:
        raise PreconditionError("active normal form applies to plain systems")
    act = g.active_symbols()
    nonterminals = set(g.v) - set(g.sigma)
    if act == nonterminals:
        return g
    used = set(g.v) | set(g.sigma)
    active_terms = sorted(act & set(g.sigma))
    prime = {a: _fresh(a + "'", used) for a in active_terms}
    inactive_nts = sorted(nonterminals - act)
    dead = None
    if inactive_nts:
        dead = (_fresh("D1", used), _fresh("D2", used))

    def h(rhs):
        return tuple(prime.get(s, s) for s in rhs)

    new_tables = []
    for t in g.tables:
        nt = {}
        for x in g.v:
            rhss = t[x]
            if x in prime:
                nt[x] = ((x,),)
                nt[prime[x]] = tuple(h(r) for r in rhss) + ((x,),)
            elif x in g._sset:
                nt[x] = ((x,),)
            elif x in inactive_nts:
                nt[x] = ((dead[0],),)
            else:
                nt[x] = tuple(h(r) for r in rhss)
        if dead:
            nt[dead[0]] = ((dead[1],),)
            nt[dead[1]] = ((dead[0],),)
        new_tables.append(nt)
    new_v = tuple(g.v) + tuple(prime[a] for a in active_terms) + (tuple(dead) if dead else ())
    axiom = prime.get(g.axiom, g.axiom)
    if axiom in inactive_nts:
        axiom = dead[0]  # language was empty apart from never-terminating forms
    if g.axiom in g._sset and g.axiom not in act:
        axiom = g.axiom  # inactive terminal axiom: L = {axiom}, keep as-is
    return EtolSystem(new_v, g.sigma, axiom, new_tables, reduced=False)


def to_reduced(g):
    """Reduced system generating L(G) with no more derivation trees.

    Active terminals gain primed nonterminal copies that carry their
    productions; identity productions of inactive terminals vanish; a
    finalization table maps primed symbols to their terminals and every
    other nonterminal to the dead symbol F.
    """
    if g.reduced:
        return g
    act = g.active_symbols()
    used = set(g.v) | set(g.sigma)
    active_terms = sorted(act & set(g.sigma))
    prime = {a: _fresh(a + "'", used) for a in active_terms}
    dead = _fresh("F", used)
    nonterminals = [x for x in g.v if x not in g._sset]

    def h(rhs):
        return tuple(prime.get(s, s) for s in rhs)

    new_tables = []
    for t in g.tables:
        nt = {}
        for x in nonterminals:
            nt[x] = tuple(h(r) for r in t[x])
        for a in active_terms:
            nt[prime[a]] = tuple(h(r) for r in t[a])
        nt[dead] = ((dead,),)
        new_tables.append(nt)
    finalize = {prime[a]: ((a,),) for a in active_terms}
    for x in nonterminals:
        finalize[x] = ((dead,),)
    finalize[dead] = ((dead,),)
    new_tables.append(finalize)

    axiom = g.axiom
    new_v = tuple(nonterminals) + tuple(prime[a] for a in active_terms) + (dead,)
    if axiom in g._sset:
        if axiom in prime:
            axiom = prime[axiom]
        else:
            # inactive terminal axiom: L = {axiom}; seed it from a fresh start
            start = _fresh("S0", used)
            new_v = new_v + (start,)
            new_tables[-1][start] = ((g.axiom,),)
            axiom = start
    return EtolSystem(new_v, g.sigma, axiom, new_tables, reduced=True)


def from_reduced(g):
    """Plain system with the same language and exactly the same number of
    derivation trees per word.

    Barred copies of symbols mark the paths of maximum height in each
    derivation tree; terminals produced early turn into subscripted
    placeholders that survive untouched until one finalization table
    converts everything at the last step.  The bar discipline forces a
    unique marking per tree, which is what makes the correspondence a
    bijection.  The index may grow (the placeholders count as active).
    """
    if not g.reduced:
        raise PreconditionError("from_reduced expects a reduced system")
    used = set(g.v) | set(g.sigma)
    bar = {s: _fresh(s + "_bar", used) for s in list(g.v) + list(g.sigma)}
    lam_bar = _fresh("lam_bar", used)
    one = {a: _fresh(a + "_1", used) for a in g.sigma}
    two = {a: _fresh(a + "_2", used) for a in g.sigma}
    lam1 = _fresh("lam_1", used)
    lam2 = _fresh("lam_2", used)
    dead = _fresh("F", used)
    nts = set(g.v)

    def h1(rhs):
        if not rhs:
            return (lam1,)
        return tuple(s if s in nts else one[s] for s in rhs)

    def barword(rhs):
        if not rhs:
            return (lam_bar,)
        return tuple(bar[s] for s in rhs)

    def barvariants(rhs):
        img = h1(rhs)
        nt_positions = [i for i, s in enumerate(rhs) if s in nts]
        out = []
        for mask in range(1, 2 ** len(nt_positions)):
            chosen = {nt_positions[i] for i in range(len(nt_positions)) if (mask >> i) & 1}
            out.append(
                tuple(
                    bar[rhs[i]] if i in chosen else img[i] for i in range(len(rhs))
                )
            )
        return out

    all_v = (
        list(g.v)
        + [bar[s] for s in list(g.v) + list(g.sigma)]
        + [lam_bar]
        + [one[a] for a in g.sigma]
        + [two[a] for a in g.sigma]
        + [lam1, lam2]
        + [dead]
        + list(g.sigma)
    )

    new_tables = []
    for t in g.tables:
        nt = {}
        for x in g.v:
            rhss = t.get(x, ())
            plain_imgs = [h1(r) for r in rhss]
            bar_imgs = []
            for r in rhss:
                if all(s in g._sset for s in r):
                    bar_imgs.append(barword(r))
                else:
                    bar_imgs.extend(barvariants(r))
            nt[x] = tuple(plain_imgs) or ((dead,),)
            nt[bar[x]] = tuple(bar_imgs) or ((dead,),)
        for a in g.sigma:
            nt[one[a]] = ((two[a],),)
            nt[two[a]] = ((two[a],),)
            nt[a] = ((dead,),)
            nt[bar[a]] = ((dead,),)
        nt[lam1] = ((lam2,),)
        nt[lam2] = ((lam2,),)
        nt[lam_bar] = ((dead,),)
        nt[dead] = ((dead,),)
        new_tables.append(nt)

    finalize = {dead: ((dead,),)}
    for a in g.sigma:
        finalize[bar[a]] = ((a,),)
        finalize[one[a]] = ((dead,),)
        finalize[two[a]] = ((a,),)
        finalize[a] = ((dead,),)
    finalize[lam_bar] = ((),)
    finalize[lam1] = ((dead,),)
    finalize[lam2] = ((),)
    for x in g.v:
        finalize[x] = ((dead,),)
        finalize[bar[x]] = ((dead,),)
    new_tables.append(finalize)

    return EtolSystem(all_v, g.sigma, bar[g.axiom], new_tables, reduced=False)


def semilinear_to_etol(q, letters):
    """Two-table plain system of index k generating {a1^l1 .. ak^lk : l ∈ Q}.

    Table 1 seeds one subsystem per linear component (union by initial
    choice) and advances/erases the per-block markers; table 0 pumps one
    period's worth of letters into every block at once.
    """
    letters = tuple(l if isinstance(l, str) else tuple(l)[0] for l in letters)
    if len(set(letters)) != len(letters):
        raise PreconditionError("semilinear_to_etol needs distinct letters")
    k = len(letters)
    if q.dim != k:
        raise PreconditionError("set dimension must equal letter count")
    used = set(letters)
    S = _fresh("S", used)
    Z = _fresh("Z", used)
    pump = {}      # table 0
    advance = {}   # table 1
    pump[S] = ((Z,),)
    seeds = []
    xsym = {}
    for c, comp in enumerate(q.components):
        r = len(comp.periods)
        if r == 0:
            seeds.append(phi(tuple((l,) for l in letters), comp.constant))
            continue
        for i in range(k):
            for j in range(1, r + 1):
                xsym[(c, i, j)] = _fresh("X%d_%d_%d" % (c, i + 1, j), used)
        seed = []
        for i in range(k):
            seed.extend((letters[i],) * comp.constant[i])
            seed.append(xsym[(c, i, 1)])
        seeds.append(tuple(seed))
        for i in range(k):
            for j in range(1, r + 1):
                x = xsym[(c, i, j)]
                gain = comp.periods[j - 1][i]
                pump[x] = (((letters[i],) * gain) + (x,),)
                if j < r:
                    advance[x] = ((xsym[(c, i, j + 1)],),)
                else:
                    advance[x] = ((),)
    advance[S] = tuple(seeds)
    for a in list(letters) + [Z]:
        pump[a] = ((a,),)
        advance[a] = ((a,),)
    v = tuple(letters) + (S, Z) + tuple(xsym[key] for key in sorted(xsym))
    return EtolSystem(v, letters, S, [pump, advance], reduced=False)


def unambiguous_bounded_etol(words, q, box=8, injectivity_len=14):
    """Reduced finite-index system generating phi(Q) with one derivation
    tree per word.

    Requires a semi-simple Q (validated on a box) and phi injective on Q
    (validated by exponent-tuple collisions up to a length bound).  The
    system guesses the linear component, runs one branch per block, and
    emits constant-many then period-many copies of each block word, one
    period at a time; simplicity plus disjointness plus injectivity make
    every choice recoverable from the generated word.
    """
    words = tuple(tuple(w) for w in words)
    if any(not w for w in words):
        raise PreconditionError("block words must be nonempty")
    k = len(words)
    if q.dim != k:
        raise PreconditionError("set dimension must equal block count")
    report = validate_semi_simple(q, box)
    if not report.validated:
        raise PreconditionError("semi-simple validation failed: %s" % report)
    seen = {}
    for t in _tuples_within_length(words, injectivity_len):
        if not member(q, t):
            continue
        w = phi(words, t)
        if w in seen and seen[w] != t:
            raise PreconditionError(
                "phi not injective on Q: %r from %r and %r" % (w, seen[w], t)
            )
        seen[w] = t

    sigma = sorted({s for w in words for s in w})
    used = set(sigma)
    S = _fresh("S", used)
    bsym = {}
    for c, comp in enumerate(q.components):
        for s in range(k):
            for j in range(1, len(comp.periods) + 1):
                bsym[(c, s, j)] = _fresh("B%d_%d_%d" % (c, s + 1, j), used)

    tables = []
    init = {}
    seeds = []
    for c, comp in enumerate(q.components):
        r = len(comp.periods)
        if r == 0:
            seeds.append(phi(words, comp.constant))
            continue
        seed = []
        for s in range(k):
            seed.extend(words[s] * comp.constant[s])
            seed.append(bsym[(c, s, 1)])
        seeds.append(tuple(seed))
    init[S] = tuple(seeds)
    tables.append(init)
    for c, comp in enumerate(q.components):
        r = len(comp.periods)
        for j in range(1, r + 1):
            pump = {}
            adv = {}
            for s in range(k):
                x = bsym[(c, s, j)]
                pump[x] = ((words[s] * comp.periods[j - 1][s]) + (x,),)
                adv[x] = ((bsym[(c, s, j + 1)],),) if j < r else ((),)
            tables.append(pump)
            tables.append(adv)
    v = (S,) + tuple(bsym[key] for key in sorted(bsym))
    return EtolSystem(v, sigma, S, tables, reduced=True)
