"""Decision backend for semilinear sets: synchronous multi-track base-2
automata over N^k with boolean closure and comparison.

Vectors are encoded least-significant-digit first, one bit per track per
step, all tracks in lockstep.  Every automaton built here is kept
*padding-closed*: appending all-zero digit tuples never changes
acceptance, so the encoding length is never ambiguous.  Projection is
the only step that can break this, and it repairs the property with a
zero-digit closure pass before minimizing.

The solver core is the classic digit-by-digit construction for integer
linear equations A·y = b: states are carry vectors, reading digit tuple
d from carry r requires (r_i - (A·d)_i) even on every row and moves to
(r - A·d)/2, and the zero carry accepts.  Inequalities are handled
upstream by slack variables plus projection.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .foundation import PreconditionError
from .semilinear import LinearSet, SemilinearSet


def digit_tuples(tracks):
    return list(product((0, 1), repeat=tracks))


@dataclass(frozen=True)
class VectorDFA:
    """Deterministic synchronous automaton over {0,1}^tracks digit tuples.

    ``transitions`` maps (state, digits) -> state and may be partial;
    a missing entry is an implicit dead state.
    """

    tracks: int
    n_states: int
    initial: int
    transitions: dict
    accepting: frozenset

    def step(self, state, digits):
        return self.transitions.get((state, digits))

    def accepts_digits(self, digit_seq):
        q = self.initial
        for d in digit_seq:
            q = self.transitions.get((q, d))
            if q is None:
                return False
        return q in self.accepting

    def accepts_vector(self, v):
        if len(v) != self.tracks:
            raise PreconditionError(
                "vector has %d coordinates, automaton has %d tracks" % (len(v), self.tracks)
            )
        return self.accepts_digits(encode_vector(v))


def encode_vector(v, width=None):
    """LSD-first binary digit tuples for a nonnegative vector."""
    if any(x < 0 for x in v):
        raise PreconditionError("only nonnegative vectors are encodable")
    if width is None:
        width = max((int(x).bit_length() for x in v), default=0)
    return [tuple((x >> t) & 1 for x in v) for t in range(width)]


def decode_digits(digit_seq, tracks):
    v = [0] * tracks
    for t, d in enumerate(digit_seq):
        for i in range(tracks):
            v[i] += d[i] << t
    return tuple(v)


@dataclass(frozen=True)
class EquationSystem:
    """Integer equations A·y = b; existential columns get projected away."""

    matrix: tuple          # rows of integer coefficients
    rhs: tuple
    existential: tuple     # per-column flag

    def __init__(self, matrix, rhs, existential=None):
        matrix = tuple(tuple(int(a) for a in row) for row in matrix)
        rhs = tuple(int(x) for x in rhs)
        if len(matrix) != len(rhs):
            raise ValueError("one rhs entry per equation row required")
        cols = {len(row) for row in matrix}
        if len(cols) > 1:
            raise ValueError("ragged coefficient matrix")
        ncols = cols.pop() if cols else 0
        if existential is None:
            existential = (False,) * ncols
        existential = tuple(bool(x) for x in existential)
        if len(existential) != ncols:
            raise ValueError("one existential flag per column required")
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "existential", existential)

    @property
    def n_vars(self):
        return len(self.existential)


def from_equations(eq):
    """DFA over all variables accepting encodings of solutions of A·y = b."""
    tracks = eq.n_vars
    rows = eq.matrix
    alphabet = digit_tuples(tracks)
    start = tuple(eq.rhs)
    index = {start: 0}
    order = [start]
    transitions = {}
    frontier = [start]
    while frontier:
        carry = frontier.pop()
        q = index[carry]
        for d in alphabet:
            nxt = []
            ok = True
            for i, row in enumerate(rows):
                s = carry[i] - sum(a * bit for a, bit in zip(row, d))
                if s % 2 != 0:
                    ok = False
                    break
                nxt.append(s // 2)
            if not ok:
                continue
            nxt = tuple(nxt)
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
                frontier.append(nxt)
            transitions[(q, d)] = index[nxt]
    zero = tuple([0] * len(rows))
    accepting = frozenset([index[zero]]) if zero in index else frozenset()
    return VectorDFA(tracks, len(order), 0, transitions, accepting)


def _dead_closed(dfa):
    """Total transition map with an explicit dead sink where needed."""
    alphabet = digit_tuples(dfa.tracks)
    needs_sink = any(
        (q, d) not in dfa.transitions for q in range(dfa.n_states) for d in alphabet
    )
    trans = dict(dfa.transitions)
    n = dfa.n_states
    if needs_sink:
        sink = n
        n += 1
        for q in range(n):
            for d in alphabet:
                trans.setdefault((q, d), sink)
    return VectorDFA(dfa.tracks, n, dfa.initial, trans, dfa.accepting)


def minimize(dfa):
    """Canonical minimal DFA: totalize, refine, renumber in BFS order."""
    dfa = _dead_closed(dfa)
    alphabet = digit_tuples(dfa.tracks)

    # reachable restriction first
    reach = {dfa.initial}
    stack = [dfa.initial]
    while stack:
        q = stack.pop()
        for d in alphabet:
            t = dfa.transitions[(q, d)]
            if t not in reach:
                reach.add(t)
                stack.append(t)

    # Moore refinement
    block = {q: (q in dfa.accepting) for q in reach}
    while True:
        sig = {
            q: (block[q],) + tuple(block[dfa.transitions[(q, d)]] for d in alphabet)
            for q in reach
        }
        new_ids = {}
        new_block = {}
        for q in sorted(reach):
            s = sig[q]
            if s not in new_ids:
                new_ids[s] = len(new_ids)
            new_block[q] = new_ids[s]
        if len(set(new_block.values())) == len(set(block.values())):
            block = new_block
            break
        block = new_block

    # canonical BFS renumbering of blocks
    rep = {}
    for q in sorted(reach):
        rep.setdefault(block[q], q)
    numbering = {}
    order = [block[dfa.initial]]
    numbering[block[dfa.initial]] = 0
    i = 0
    while i < len(order):
        b = order[i]
        i += 1
        q = rep[b]
        for d in sorted(alphabet):
            tb = block[dfa.transitions[(q, d)]]
            if tb not in numbering:
                numbering[tb] = len(order)
                order.append(tb)
    transitions = {}
    for b, num in numbering.items():
        q = rep[b]
        for d in alphabet:
            transitions[(num, d)] = numbering[block[dfa.transitions[(q, d)]]]
    accepting = frozenset(
        numbering[block[q]] for q in reach if q in dfa.accepting
    )
    return VectorDFA(dfa.tracks, len(order), 0, transitions, accepting)


def equivalent(m1, m2):
    """Language equality via canonical minimal forms."""
    if m1.tracks != m2.tracks:
        raise PreconditionError("track count mismatch")
    a, b = minimize(m1), minimize(m2)
    return (
        a.n_states == b.n_states
        and a.accepting == b.accepting
        and a.transitions == b.transitions
    )


def project(dfa, drop):
    """Existentially project away the given tracks.

    Subset construction over the digit-erased nondeterministic automaton,
    then the padding-closure repair: a state becomes accepting when some
    accepting state is reachable from it along all-zero digit tuples
    (shorter encodings of a kept-track vector may need zero padding to
    reach the acceptance the dropped tracks required).  Minimized.
    """
    drop = frozenset(drop)
    if not drop <= set(range(dfa.tracks)):
        raise PreconditionError("dropped tracks outside automaton")
    keep = [t for t in range(dfa.tracks) if t not in drop]
    kept_alphabet = digit_tuples(len(keep))
    completions = digit_tuples(len(drop))
    drop_sorted = sorted(drop)

    def full_digit(kd, cd):
        d = [0] * dfa.tracks
        for i, t in enumerate(keep):
            d[t] = kd[i]
        for i, t in enumerate(drop_sorted):
            d[t] = cd[i]
        return tuple(d)

    start = frozenset([dfa.initial])
    index = {start: 0}
    order = [start]
    transitions = {}
    i = 0
    while i < len(order):
        subset = order[i]
        i += 1
        for kd in kept_alphabet:
            nxt = set()
            for q in subset:
                for cd in completions:
                    t = dfa.transitions.get((q, full_digit(kd, cd)))
                    if t is not None:
                        nxt.add(t)
            nxt = frozenset(nxt)
            if not nxt:
                continue
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            transitions[(index[subset], kd)] = index[nxt]

    base_accepting = {
        index[s] for s in order if s & dfa.accepting
    }
    # zero-digit backward closure
    zero = tuple([0] * len(keep))
    accepting = set(base_accepting)
    changed = True
    while changed:
        changed = False
        for s in range(len(order)):
            if s in accepting:
                continue
            t = transitions.get((s, zero))
            if t is not None and t in accepting:
                accepting.add(s)
                changed = True
    out = VectorDFA(len(keep), len(order), 0, transitions, frozenset(accepting))
    return minimize(out)


def universe(tracks):
    trans = {(0, d): 0 for d in digit_tuples(tracks)}
    return VectorDFA(tracks, 1, 0, trans, frozenset([0]))


def empty(tracks):
    trans = {(0, d): 0 for d in digit_tuples(tracks)}
    return VectorDFA(tracks, 1, 0, trans, frozenset())


def combine(m1, m2, op):
    """Product construction with boolean acceptance; minimized."""
    if m1.tracks != m2.tracks:
        raise PreconditionError("track count mismatch")
    if op not in ("union", "intersection", "difference"):
        raise ValueError("op must be union/intersection/difference")
    a, b = _dead_closed(m1), _dead_closed(m2)
    alphabet = digit_tuples(a.tracks)
    start = (a.initial, b.initial)
    index = {start: 0}
    order = [start]
    transitions = {}
    i = 0
    while i < len(order):
        (qa, qb) = order[i]
        i += 1
        for d in alphabet:
            nxt = (a.transitions[(qa, d)], b.transitions[(qb, d)])
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            transitions[(index[(qa, qb)], d)] = index[nxt]
    accepting = set()
    for (qa, qb), num in index.items():
        ina, inb = qa in a.accepting, qb in b.accepting
        hit = (
            (ina or inb)
            if op == "union"
            else (ina and inb) if op == "intersection" else (ina and not inb)
        )
        if hit:
            accepting.add(num)
    return minimize(VectorDFA(a.tracks, len(order), 0, transitions, frozenset(accepting)))


def complement(m):
    return combine(universe(m.tracks), m, "difference")


def is_empty(m):
    reach = {m.initial}
    stack = [m.initial]
    while stack:
        q = stack.pop()
        if q in m.accepting:
            return False
        for d in digit_tuples(m.tracks):
            t = m.transitions.get((q, d))
            if t is not None and t not in reach:
                reach.add(t)
                stack.append(t)
    return True


def shortest_accepted(m):
    """Shortest accepted digit string, decoded to a vector; None if empty."""
    from collections import deque

    if m.initial in m.accepting:
        return tuple([0] * m.tracks)
    seen = {m.initial}
    queue = deque([(m.initial, [])])
    alphabet = sorted(digit_tuples(m.tracks))
    while queue:
        q, path = queue.popleft()
        for d in alphabet:
            t = m.transitions.get((q, d))
            if t is None or t in seen:
                continue
            if t in m.accepting:
                return decode_digits(path + [d], m.tracks)
            seen.add(t)
            queue.append((t, path + [d]))
    return None


def from_linear(ls):
    """DFA over k tracks accepting exactly the members of a linear set.

    Solves x - sum(l_j * v_j) = v0 over variables (x, l) and projects
    the multiplier tracks away.
    """
    k = ls.dim
    r = len(ls.periods)
    rows = []
    for i in range(k):
        row = [0] * (k + r)
        row[i] = 1
        for j, p in enumerate(ls.periods):
            row[k + j] = -p[i]
        rows.append(tuple(row))
    eq = EquationSystem(rows, ls.constant, (False,) * k + (True,) * r)
    dfa = from_equations(eq)
    if r == 0:
        return minimize(dfa)
    return project(dfa, set(range(k, k + r)))


def from_semilinear_set(q):
    out = None
    for comp in q.components:
        m = from_linear(comp)
        out = m if out is None else combine(out, m, "union")
    return out


def compare(q1, q2, rel):
    """Decide equal/subset/disjoint on semilinear sets, with witness.

    On a False verdict the witness is the vector with the shortest
    accepted encoding demonstrating the discrepancy.
    """
    if rel not in ("equal", "subset", "disjoint"):
        raise ValueError("rel must be equal/subset/disjoint")
    if q1.dim != q2.dim:
        raise PreconditionError("dimension mismatch")
    m1, m2 = from_semilinear_set(q1), from_semilinear_set(q2)
    if rel == "subset":
        diff = combine(m1, m2, "difference")
        if is_empty(diff):
            return True, None
        return False, shortest_accepted(diff)
    if rel == "equal":
        d12 = combine(m1, m2, "difference")
        if not is_empty(d12):
            return False, shortest_accepted(d12)
        d21 = combine(m2, m1, "difference")
        if not is_empty(d21):
            return False, shortest_accepted(d21)
        return True, None
    inter = combine(m1, m2, "intersection")
    if is_empty(inter):
        return True, None
    return False, shortest_accepted(inter)


def dump_tsv(m):
    """Plain-text transition table: header, then one row per transition."""
    lines = [
        "tracks\t%d" % m.tracks,
        "states\t%d" % m.n_states,
        "initial\t%d" % m.initial,
        "accepting\t%s" % ",".join(str(q) for q in sorted(m.accepting)),
    ]
    for (q, d), t in sorted(m.transitions.items()):
        lines.append("%d\t%s\t%d" % (q, "".join(map(str, d)), t))
    return "\n".join(lines) + "\n"
