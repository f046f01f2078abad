"""Elimination of the T rule from CAN-free HR derivations with rational scalars.

The derivation is inverted along the reduction of its conclusion down to
atomic leaves.  Each leaf derivation is folded into a vector of multipliers
(a non-negative, non-zero weighting of the leaf's sequents whose sum cancels
every variable), and the leaf is rebuilt from the integer multiple of that
vector with C, S and ID steps only.
"""
from __future__ import annotations

from fractions import Fraction

from ..calculus import (CAN, DIAMOND, HR, M, ONE, T, count, iter_nodes, premise_views, run_deep)
from ..decide import integer_multipliers, reconstruct_atomic_derivation
from ..errors import NotCanFree, NotHR, NotRational, TransformError
from ..poly import is_concrete
from ..reduce import reassemble, reduce
from ..terms import has_modal, scalar_variables
from .invert import invert

MAX_COPIES = 100_000


def _check_input(d):
    if count(d, CAN):
        raise NotCanFree("T elimination needs a CAN-free derivation")
    for nd in iter_nodes(d):
        if nd.rule.tag in (ONE, DIAMOND):
            raise NotHR(f"{nd.rule.tag} is not an HR rule")
        for item in nd.conclusion.items():
            if has_modal(item.term):
                raise NotHR("modal or unit terms are outside HR")
            if not is_concrete(item.coeff) or scalar_variables(item.term):
                raise NotRational("scalars must be rational numbers")
        if nd.rule.scalar is not None and not is_concrete(nd.rule.scalar):
            raise NotRational("T scalars must be rational numbers")


def leaf_multipliers(d):
    """Multipliers witnessing an atomic conclusion, read off a CAN-free HR derivation."""
    return run_deep(_fold, d, {})


def _fold(d, memo):
    # inverted derivations share subtrees, so results are cached per node object
    got = memo.get(id(d))
    if got is not None:
        return got[1]
    out = _fold_node(d, memo)
    memo[id(d)] = (d, out)
    return out


def _fold_node(d, memo):
    n = len(d.conclusion)
    if not d.premises:
        return [Fraction(1)] * n
    views = premise_views(d)
    kids = [_fold(p, memo) for p in d.premises]
    if d.rule.tag == M:
        k = d.rule.seq
        (_, lmap, _), (_, rmap, _) = views
        lam, mu = kids
        l1, m2 = lam[lmap[k]], mu[rmap[k]]
        if l1 == 0:
            return [lam[lmap[q]] if q != k else Fraction(0) for q in range(n)]
        if m2 == 0:
            return [mu[rmap[q]] if q != k else Fraction(0) for q in range(n)]
        return [l1 * m2 if q == k else m2 * lam[lmap[q]] + l1 * mu[rmap[q]] for q in range(n)]
    (prem, seq_map, _), = views
    lam = kids[0]
    out = [Fraction(0)] * n
    for q, srcs in enumerate(prem.seq_src):
        for src in srcs:
            out[src] += lam[seq_map[q]] * prem.seq_scale[q]
    return out


def _rebuild_leaf(d):
    lam = leaf_multipliers(d)
    if sum(integer_multipliers([t for t in lam if t])) > MAX_COPIES:
        raise TransformError("multipliers too large to rebuild without T")
    return reconstruct_atomic_derivation(d.conclusion, lam, integer_limit=MAX_COPIES)


def _eliminate(d):
    trace = reduce(d.conclusion, HR)
    leaves = []
    stack = [(trace.tree, d)]
    while stack:
        nd, der = stack.pop()
        if nd.rule is None:
            leaves.append(_rebuild_leaf(der))
            continue
        prems = invert(der, nd.rule)
        stack.extend(reversed(list(zip(nd.children, prems))))
    return reassemble(trace, leaves)


def eliminate_t_rational(d):
    """A T-free derivation of the same conclusion."""
    _check_input(d)
    if not count(d, T):
        return d
    return run_deep(_eliminate, d)
