"""Elimination of the M rule."""
from __future__ import annotations

from dataclasses import replace

from ..calculus import (CAN, DIAMOND, INIT, M, S, Rule, count, init, node, premise_views,
                        run_deep, seqs_of)
from ..errors import NotCanFree, SideConditionViolated
from ..poly import coeff_mul
from .build import contract_into, expect, from_empty, gen_t, seq_key, vscale, weaken_into
from .weaken import block_items, push_extras


def _copy(d, vecs):
    """From d concluding [Gamma_k] derive [vecs_k . Gamma_k] without adding M steps of its own."""
    if all(list(v) == [1] for v in vecs):
        return d
    seqs = seqs_of(d)
    target = [vscale(v, s) for v, s in zip(vecs, seqs)]
    if any(not v for v in vecs):
        return from_empty(target)
    rule = d.rule
    tag = rule.tag
    if tag == INIT:
        return init()
    views = premise_views(d)
    if tag == S:
        (prem, seq_map, _), = views
        i, j = rule.seq, rule.other
        vi, vj = list(vecs[i]), list(vecs[j])
        cvecs = [None] * len(d.premises[0].conclusion)
        for q, srcs in enumerate(prem.seq_src):
            cvecs[seq_map[q]] = [coeff_mul(a, b) for a in vi for b in vj] if len(srcs) == 2 else list(vecs[srcs[0]])
        c = _copy(d.premises[0], cvecs)
        others = [target[q] for q in range(len(seqs)) if q not in (i, j)]
        n = len(others)
        gi, gj = vscale(vi, seqs[i]), vscale(vj, seqs[j])
        e = node(others + [vscale(vj, gi), vscale(vi, gj)], Rule(S, seq=n, other=n + 1), (c,))
        e = gen_t(e, others + [vscale(vi, gj)], gi, vj)
        e = gen_t(e, others + [gi], gj, vi)
        return expect(e, target)
    kids = []
    for (prem, seq_map, _), child in zip(views, d.premises):
        cvecs = [None] * len(child.conclusion)
        for q, srcs in enumerate(prem.seq_src):
            cvecs[seq_map[q]] = list(vecs[srcs[0]])
        kids.append(_copy(child, cvecs))
    if rule.seq is not None and rule.items:
        k = rule.seq
        width = len(seqs[k])
        rule = replace(rule, items=tuple(a * width + j for a in range(len(vecs[k])) for j in rule.items))
    if rule.tag == CAN:
        vk = vecs[rule.seq]
        rule = replace(rule, r=tuple(coeff_mul(a, c) for a in vk for c in rule.r),
                       s=tuple(coeff_mul(a, c) for a in vk for c in rule.s))
    return node(target, rule, kids)


def copy_scaled(d, vecs):
    """Scaled copies: from [Gamma_k] derive [vecs_k . Gamma_k] (an empty vector empties the sequent)."""
    vecs = [list(v) for v in vecs]
    if len(vecs) != len(d.conclusion):
        raise SideConditionViolated("one weight vector per sequent is needed")
    if any(c <= 0 for v in vecs for c in v):
        raise SideConditionViolated("copy weights must be positive")
    return run_deep(_copy, d, vecs)


def _unit_vecs(d, k, vec):
    vecs = [[1] for _ in d.conclusion]
    vecs[k] = list(vec)
    return vecs


def m_merge(d1, k1, d2, k2):
    """From G | Gamma1 (d1, sequent k1) and G | Gamma2 (d2, sequent k2) derive G | Gamma1, Gamma2.

    Both inputs should be M-free; the output then is too.
    """
    s1, s2 = seqs_of(d1), seqs_of(d2)
    g = [s for q, s in enumerate(s2) if q != k2]
    gamma2 = s2[k2]
    extras = [[] for _ in s1]
    extras[k1] = [(1, gamma2, "merge")]

    def at_init(blocks, tail):
        return _copy(d2, _unit_vecs(d2, k2, [a for a, _, _ in blocks]))

    def at_diamond(dn, blocks, tail):
        vec = [a for a, _, _ in blocks]
        e = _copy(d2, _unit_vecs(d2, k2, vec))
        want = seq_key(vscale(vec, gamma2))
        idx = next(q for q, s in enumerate(e.conclusion) if s.key() == want)
        omega = list(dn.conclusion[0])
        d_p = dn.premises[0]
        ext = [[] for _ in e.conclusion]
        ext[idx] = [(1, omega, "omega")]

        def at_init2(bl, _tail):
            q = [a for a, _, _ in bl]
            return node([vscale(q, omega)], Rule(DIAMOND), (_copy(d_p, [q]),))

        def at_diamond2(dm, bl, _tail):
            q = [a for a, _, _ in bl]
            body = m_merge(dm.premises[0], 0, _copy(d_p, [q]), 0)
            return node([list(dm.conclusion[0]) + vscale(q, omega)], Rule(DIAMOND), (body,))

        return push_extras(e, ext, [], at_init2, at_diamond2)

    pushed = push_extras(d1, extras, g, at_init, at_diamond)
    target = [s + (gamma2 if q == k1 else []) for q, s in enumerate(s1)]
    return contract_into(pushed, target)


def _elim(d):
    kids = tuple(_elim(p) for p in d.premises)
    if d.rule.tag == M:
        (_, lmap, _), (_, rmap, _) = premise_views(d)
        k = d.rule.seq
        return expect(m_merge(kids[0], lmap[k], kids[1], rmap[k]), seqs_of(d))
    if all(a is b for a, b in zip(kids, d.premises)):
        return d
    return replace(d, premises=kids)


def eliminate_m_raw(d):
    if not count(d, M):
        return d
    if count(d, CAN):
        raise NotCanFree("M elimination needs a CAN-free derivation")
    return _elim(d)


def eliminate_m(d):
    """An M-free derivation of the same conclusion."""
    if count(d, CAN):
        raise NotCanFree("M elimination needs a CAN-free derivation")
    return run_deep(eliminate_m_raw, d)
