"""Elimination of the CAN rule, by induction on the cut formula."""
from __future__ import annotations

from dataclasses import replace

from ..calculus import (CAN, DIAMOND, ID, INIT, M, MEET, ONE, PLUS, TIMES, ZERO, Rule, node,
                        premise_views, run_deep, seqs_of)
from ..errors import TransformError
from ..hypersequents import align
from ..poly import coeff_mul
from ..terms import (ONE as ONE_TERM, CoOne, CoVar, Diamond, Join, Meet, One, Plus, Scale, Var,
                     Zero)
from .build import contract_into, expect, weighted
from .invert import DROP, child_marks, invert_join, invert_local, join_target, local_target
from .melim import eliminate_m_raw

# ---------------------------------------------------------------- atomic and unit base cases


def _retarget(d, marks, targets, var):
    """Delete marked atoms (var) or units (var None) and add target items instead.

    targets[k] = (p, n): weights of new positive/negative atoms (or 1 and -1)
    for sequent k.  ID on var (resp. ONE) steps are absorbed into the
    targets, and the accumulated items are discharged at INIT or below a
    DIAMOND.
    """
    targets = {k: v for k, v in targets.items() if v[0] or v[1]}
    if not marks and not targets:
        return d
    rule = d.rule
    tag = rule.tag
    if tag in (CAN, M):
        raise TransformError(f"internal: {tag} reached a base case of CAN elimination")
    pos_t, neg_t = (Var(var), CoVar(var)) if var is not None else (ONE_TERM, CoOne())
    seqs = seqs_of(d)
    new, pos = [], {}
    for k, s in enumerate(seqs):
        out = []
        for j, it in enumerate(s):
            if (k, j) not in marks:
                pos[(k, j)] = len(out)
                out.append(it)
        p, n = targets.get(k, ([], []))
        new.append(out + weighted(p, pos_t) + weighted(n, neg_t))
    discharge = Rule(ID, var=var) if var is not None else Rule(ONE)
    if tag == INIT:
        return node(new, replace(discharge, seq=0, items=tuple(range(len(new[0])))), (d,))
    if tag == DIAMOND and var is not None:
        base = len(seqs[0])
        return node(new, replace(discharge, seq=0, items=tuple(range(base, len(new[0])))), (d,))
    views = premise_views(d)
    cms = child_marks(d, {m: True for m in marks}, views)
    absorb = (tag == ID and rule.var == var) if var is not None else tag == ONE
    kids = []
    for (prem, seq_map, _), child, cm in zip(views, d.premises, cms):
        ct = {}
        for q, srcs in enumerate(prem.seq_src):
            sc = prem.seq_scale[q]
            p = [coeff_mul(a, sc) for src in srcs for a in targets.get(src, ([], []))[0]]
            n = [coeff_mul(a, sc) for src in srcs for a in targets.get(src, ([], []))[1]]
            ct[seq_map[q]] = (p, n)
        if absorb:
            k = rule.seq
            q = k  # the active sequent keeps its position in the premise
            free = [j for j in rule.items if (k, j) not in marks]
            p, n = ct[seq_map[q]]
            p = p + [seqs[k][j].coeff for j in free if isinstance(seqs[k][j].term, (Var, One))]
            n = n + [seqs[k][j].coeff for j in free if isinstance(seqs[k][j].term, (CoVar, CoOne))]
            ct[seq_map[q]] = (p, n)
        kids.append(_retarget(child, set(cm), ct, var))
    if absorb:
        return expect(kids[0], new)
    if rule.items:
        rule = replace(rule, items=tuple(pos[(rule.seq, j)] for j in rule.items))
    return node(new, rule, kids)


# ---------------------------------------------------------------- induction on the cut formula


def _follow(d_in, removed, d_out):
    """Map items of d_in that survive into d_out (whose conclusion is d_in's minus `removed`)."""
    seqs = seqs_of(d_in)
    positional, where = [], {}
    for k, s in enumerate(seqs):
        out = []
        for j, it in enumerate(s):
            if (k, j) not in removed:
                where[(k, j)] = len(out)
                out.append(it)
        positional.append(out)
    seq_map, item_maps = align(positional, d_out.conclusion)
    return lambda m: (seq_map[m[0]], item_maps[m[0]][where[m]])


def _canon(positional, d):
    seq_map, item_maps = align(positional, d.conclusion)
    return lambda k, j: (seq_map[k], item_maps[k][j])


def _pair(d, a, pos_b, neg_b, pos_c, neg_c):
    """Cut on the left component then on the right one."""
    d1 = cut_marked(d, a.left, pos_b, neg_b)
    f = _follow(d, pos_b | neg_b, d1)
    return cut_marked(d1, a.right, {f(m) for m in pos_c}, {f(m) for m in neg_c})


def cut_marked(d, a, pos, neg):
    """Remove marked occurrences of a (pos) and bar(a) (neg) from a CAN-free derivation.

    Each sequent must carry equal total weight on both sides.
    """
    pos, neg = set(pos), set(neg)
    if not pos and not neg:
        return d
    if isinstance(a, (Var, CoVar)):
        return _retarget(eliminate_m_raw(d), pos | neg, {}, a.name)
    if isinstance(a, (One, CoOne)):
        return _retarget(eliminate_m_raw(d), pos | neg, {}, None)
    if isinstance(a, Zero):
        return invert_local(d, {m: True for m in pos | neg}, ZERO)
    if isinstance(a, (Plus, Scale)):
        kind = PLUS if isinstance(a, Plus) else TIMES
        marks = {m: True for m in pos | neg}
        res = invert_local(d, marks, kind)
        new, _, rpos = local_target(seqs_of(d), marks, kind)
        at = _canon(new, res)

        def part(ms, i):
            return {at(m[0], rpos[m][i]) for m in ms}

        if kind == TIMES:
            return cut_marked(res, a.arg, part(pos, 0), part(neg, 0))
        return _pair(res, a, part(pos, 0), part(neg, 0), part(pos, 1), part(neg, 1))
    if isinstance(a, (Join, Meet)):
        return _cut_lattice(d, a, pos, neg)
    if isinstance(a, Diamond):
        return _cut_diamond(eliminate_m_raw(d), a, pos, neg)
    raise TransformError(f"cannot cut on {a}")


def _cut_lattice(d, a, pos, neg):
    joins, meets = (pos, neg) if isinstance(a, Join) else (neg, pos)
    seqs = seqs_of(d)
    j = invert_join(d, joins)
    new, jpos, mpos, copy_of = join_target(seqs, {m: True for m in joins})
    at1 = _canon(new, j)
    marks2 = {}
    for m in meets:
        k = m[0]
        if k not in copy_of:
            raise TransformError("internal: unbalanced cut marks")
        marks2[at1(k, jpos[m])] = 0
        marks2[at1(copy_of[k], jpos[m])] = 1
    res = invert_local(j, marks2, MEET)
    new2, pos2, rpos2 = local_target(seqs_of(j), marks2, MEET)
    at2 = _canon(new2, res)

    def kept(k, idx):
        kk, jj = at1(k, idx)
        return at2(kk, pos2[(kk, jj)])

    def repl(k, idx):
        kk, jj = at1(k, idx)
        return at2(kk, rpos2[(kk, jj)][0])

    jb = {kept(m[0], mpos[m]) for m in joins}
    jc = {kept(copy_of[m[0]], mpos[m]) for m in joins}
    mb = {repl(m[0], jpos[m]) for m in meets}
    mc = {repl(copy_of[m[0]], jpos[m]) for m in meets}
    if isinstance(a, Join):
        out = _pair(res, a, jb, mb, jc, mc)
    else:
        out = _pair(res, a, mb, jb, mc, jc)
    marked = pos | neg
    target = [[it for jj, it in enumerate(s) if (k, jj) not in marked] for k, s in enumerate(seqs)]
    return contract_into(out, target)


def _cut_diamond(d, a, pos, neg):
    marks = {m: "p" for m in pos}
    marks.update({m: "n" for m in neg})

    def at_diamond(dn, ms):
        cm = child_marks(dn, ms)[0]
        inner = cut_marked(dn.premises[0], a.arg, {m for m, v in cm.items() if v == "p"},
                           {m for m, v in cm.items() if v == "n"})
        rest = [it for j, it in enumerate(dn.conclusion[0]) if (0, j) not in ms]
        if any(isinstance(it.term, Diamond) for it in rest):
            return node([rest], Rule(DIAMOND), (inner,))
        return inner

    return invert_local(d, marks, DROP, at_diamond)


# ---------------------------------------------------------------- driver


def _elim(d):
    kids = tuple(_elim(p) for p in d.premises)
    if d.rule.tag == CAN:
        (prem, seq_map, item_maps), = premise_views(d)
        k = d.rule.seq
        fresh = [j for j, src in enumerate(prem.item_src[k]) if src is None]
        nr = len(d.rule.r)
        pos = {(seq_map[k], item_maps[k][j]) for j in fresh[:nr]}
        neg = {(seq_map[k], item_maps[k][j]) for j in fresh[nr:]}
        return expect(cut_marked(kids[0], d.rule.term, pos, neg), seqs_of(d))
    if all(x is y for x, y in zip(kids, d.premises)):
        return d
    return replace(d, premises=kids)


def eliminate_can(d):
    """A CAN-free derivation of the same conclusion (topmost CAN first, left to right)."""
    return run_deep(_elim, d)
