"""Inversion of logical rules through CAN and M (no restriction on the input derivation).

These constructions are the standard way CAN enters derivations; they feed
the CAN-elimination corpus.
"""
from __future__ import annotations

from ..calculus import CAN, JOIN, M, MEET, PLUS, S, TIMES, W, ZERO, Rule, init, node, run_deep, seqs_of
from ..errors import ShapeViolation
from ..hypersequents import WeightedTerm
from ..terms import Join, Meet, Plus, Scale, Zero, negate_nnf
from .build import weaken_into
from .weaken import weaken_pairs


def identity(pairs):
    """Derivation of |- r.A, r.bar(A), ... for the (coefficient, term) pairs given."""
    d = init()
    for r, a in pairs:
        d = weaken_pairs(d, a, {0: ([r], [r])})
    return d


def _wt(r, a):
    return WeightedTerm(r, a)


def _cut(d, g, gamma, extra, side, k_term, r, tail=()):
    """CAN on k_term below M of d (concluding G | gamma, r.k_term | tail) and side.

    side concludes G | extra, r.bar(k_term) | tail; the result concludes
    G | gamma, extra | tail.
    """
    g, tail = list(g), list(tail)
    n = len(g)
    pre = g + [gamma + [_wt(r, k_term)] + extra + [_wt(r, negate_nnf(k_term))]] + tail
    mixed = node(pre, Rule(M, seq=n, items=tuple(range(len(gamma) + 1))), (d, side))
    return node(g + [gamma + extra] + tail, Rule(CAN, seq=n, term=k_term, r=(r,), s=(r,)), (mixed,))


def invert_with_can(d, k, j):
    """Derivations of the premises of the logical rule acting on item j of sequent k."""
    return run_deep(_invert, d, k, j)


def _invert(d, k, j):
    seqs = seqs_of(d)
    item = seqs[k][j]
    r, a = item.coeff, item.term
    g = [s for q, s in enumerate(seqs) if q != k]
    gamma = [it for q, it in enumerate(seqs[k]) if q != j]
    # d concludes G | gamma, r.a (up to order)
    if isinstance(a, Zero):
        side = weaken_into(node([[_wt(r, a)]], Rule(ZERO, seq=0, items=(0,)), (init(),)), g + [[_wt(r, a)]])
        return [_cut(d, g, gamma, [], side, a, r)]
    if isinstance(a, Plus):
        lb, rb = negate_nnf(a.left), negate_nnf(a.right)
        ident = identity([(r, a.left), (r, a.right)])
        top = [_wt(r, a.left), _wt(r, a.right), _wt(r, Plus(lb, rb))]
        side = node([top], Rule(PLUS, seq=0, items=(2,)), (ident,))
        return [_cut(d, g, gamma, top[:2], weaken_into(side, g + [top]), a, r)]
    if isinstance(a, Scale):
        sr = r * a.coeff
        top = [_wt(sr, a.arg), _wt(r, Scale(a.coeff, negate_nnf(a.arg)))]
        side = node([top], Rule(TIMES, seq=0, items=(1,)), (identity([(sr, a.arg)]),))
        return [_cut(d, g, gamma, top[:1], weaken_into(side, g + [top]), a, r)]
    if isinstance(a, Meet):
        lb, rb = negate_nnf(a.left), negate_nnf(a.right)
        outs = []
        for part in (a.left, a.right):
            top = [_wt(r, part), _wt(r, Join(lb, rb))]
            spread = [[_wt(r, part), _wt(r, lb)], [_wt(r, part), _wt(r, rb)]]
            base = identity([(r, part)])
            other = 1 if part is a.left else 0
            wide = node(spread, Rule(W, seq=other), (base,))
            side = node([top], Rule(JOIN, seq=0, items=(1,)), (wide,))
            outs.append(_cut(d, g, gamma, top[:1], weaken_into(side, g + [top]), a, r))
        return outs
    if isinstance(a, Join):
        return [_invert_join(d, g, gamma, r, a)]
    raise ShapeViolation(f"no logical rule acts on {a}")


def _invert_join(d, g, gamma, r, a):
    A, B = a.left, a.right
    Ab, Bb = negate_nnf(A), negate_nnf(B)
    rA, rB, rAb, rBb = _wt(r, A), _wt(r, B), _wt(r, Ab), _wt(r, Bb)
    meet_bar = _wt(r, Meet(Ab, Bb))
    tail_b = [gamma + [rB]]
    # Pi concludes G | r.A, r.Bb | gamma, r.B
    mixed = identity([(r, B), (r, A)])
    split = node([[rA, rBb], [rB, rAb]], Rule(S, seq=0, other=1), (mixed,))
    right = node([[rA, rBb], [rB, rBb]], Rule(W, seq=0), (identity([(r, B)]),))
    meet = node([[rA, rBb], [rB, meet_bar]], Rule(MEET, seq=1, items=(1,)), (split, right))
    side = weaken_into(meet, g + [[rA, rBb], [rB, meet_bar]])
    left = weaken_into(d, g + [[rA, rBb], gamma + [_wt(r, a)]])
    pi = _cut(left, g + [[rA, rBb]], gamma, [rB], side, a, r)
    # main derivation of G | gamma, r.A | gamma, r.B
    ida = weaken_into(identity([(r, A)]), g + [[rA, rAb]] + tail_b)
    meet2 = node(g + [[rA, meet_bar]] + tail_b, Rule(MEET, seq=len(g), items=(1,)), (ida, pi))
    left2 = weaken_into(d, g + [gamma + [_wt(r, a)]] + tail_b)
    return _cut(left2, g, gamma, [rA], meet2, a, r, tail=tail_b)
