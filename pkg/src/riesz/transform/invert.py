"""CAN-free inversion of the logical rules and of DIAMOND.

Marks are annotations on conclusion items, keyed by (sequent, item) in the
canonical conclusion.  They are carried upward through the derivation via
the provenance recorded by `premise_layout`, and the rule that introduced a
marked item is removed (or re-applied to its unmarked items only).
"""
from __future__ import annotations

from dataclasses import replace

from ..calculus import (C, CAN, DIAMOND, ID, JOIN, M, MEET, ONE, PLUS, S, T, TIMES, W, ZERO,
                        Rule, count, node, premise_layout, premise_views, run_deep, seqs_of)
from ..calculus import LayoutError
from ..errors import NotCanFree, ShapeViolation
from ..hypersequents import WeightedTerm
from ..poly import coeff_mul
from ..terms import CoOne, Diamond, One
from .build import and_ab, expect, gen_t, gen_t2, or_ab, vscale, weaken_into, weighted

DROP = "DROP"


def child_marks(d, marks, views=None):
    """Marks of each premise, following item provenance."""
    out = []
    for prem, seq_map, item_maps in views if views is not None else premise_views(d):
        cm = {}
        for q, srcs in enumerate(prem.item_src):
            for j, src in enumerate(srcs):
                if src is not None and src in marks:
                    cm[(seq_map[q], item_maps[q][j])] = marks[src]
        out.append(cm)
    return out


# ---------------------------------------------------------------- local inversion


def _repl(kind, item, side):
    t, c = item.term, item.coeff
    if kind in (ZERO, DROP):
        return []
    if kind == PLUS:
        return [WeightedTerm(c, t.left), WeightedTerm(c, t.right)]
    if kind == TIMES:
        return [WeightedTerm(coeff_mul(c, t.coeff), t.arg)]
    if kind == MEET:
        return [WeightedTerm(c, t.left if side == 0 else t.right)]
    if kind == DIAMOND:
        return [WeightedTerm(c, t.arg)]
    raise ValueError(kind)


def local_target(seqs, marks, kind):
    """Unmarked items first, then the replacements of marked ones, in item order."""
    new, pos, rpos = [], {}, {}
    for k, seq in enumerate(seqs):
        out = []
        for j, it in enumerate(seq):
            if (k, j) not in marks:
                pos[(k, j)] = len(out)
                out.append(it)
        for j, it in enumerate(seq):
            if (k, j) in marks:
                rep = _repl(kind, it, marks[(k, j)])
                rpos[(k, j)] = list(range(len(out), len(out) + len(rep)))
                out.extend(rep)
        new.append(out)
    return new, pos, rpos


def invert_local(d, marks, kind, on_diamond=None):
    """Replace marked items by their immediate components.

    kind is ZERO, PLUS, TIMES, MEET (marks hold the side 0/1), DIAMOND (marks
    must cover every diamond of the generalized shape) or DROP, which deletes
    marked items and hands DIAMOND nodes to on_diamond(node, marks).
    """
    if not marks:
        return d
    rule = d.rule
    tag = rule.tag
    if tag == CAN:
        raise NotCanFree("inversion needs a CAN-free derivation")
    seqs = seqs_of(d)
    new, pos, rpos = local_target(seqs, marks, kind)
    views = premise_views(d)
    cms = child_marks(d, marks, views)
    if tag == DIAMOND and kind == DIAMOND:
        if sum(isinstance(i.term, Diamond) for i in d.conclusion[0]) != len(marks):
            raise ShapeViolation("every diamond of the sequent must be inverted at once")
        return expect(d.premises[0], new)
    if tag == DIAMOND and kind == DROP:
        return expect(on_diamond(d, marks), new)
    k = rule.seq
    acting = tag == kind and any((k, j) in marks for j in rule.items)
    if acting and kind in (ZERO, PLUS, TIMES):
        c = invert_local(d.premises[0], cms[0], kind, on_diamond)
        rest = [j for j in rule.items if (k, j) not in marks]
        if not rest:
            return expect(c, new)
        return node(new, replace(rule, items=tuple(pos[(k, j)] for j in rest)), (c,))
    if acting and kind == MEET:
        ih = [invert_local(p, cm, kind, on_diamond) for p, cm in zip(d.premises, cms)]
        items = set(rule.items)
        s0 = [j for j in rule.items if marks.get((k, j)) == 0]
        s1 = [j for j in rule.items if marks.get((k, j)) == 1]
        rest = [j for j in rule.items if (k, j) not in marks]
        others = [new[q] for q in range(len(new)) if q != k]
        gamma = [seqs[k][j] for j in range(len(seqs[k])) if (k, j) not in marks and j not in items]
        for j in range(len(seqs[k])):
            if (k, j) in marks and j not in items:
                gamma += _repl(kind, seqs[k][j], marks[(k, j)])
        term = seqs[k][rule.items[0]].term

        def coeffs(js):
            return [seqs[k][j].coeff for j in js]

        def target(u, v):
            if not v:
                return ih[0]
            if not u:
                return ih[1]
            return and_ab(others, gamma, coeffs(u), coeffs(v), term.left, term.right, ih[0], ih[1])

        if not rest:
            return expect(target(s0, s1), new)
        return node(new, replace(rule, items=tuple(pos[(k, j)] for j in rest)),
                    (target(s0 + rest, s1), target(s0, s1 + rest)))
    kids = [invert_local(p, cm, kind, on_diamond) for p, cm in zip(d.premises, cms)]
    if rule.items:
        items = []
        for j in rule.items:
            items.extend([pos[(k, j)]] if (k, j) in pos else rpos[(k, j)])
        rule = replace(rule, items=tuple(items))
    return node(new, rule, kids)


# ---------------------------------------------------------------- JOIN inversion


def join_target(seqs, marks):
    """Marked sequent k keeps its left components in place; a right copy is appended."""
    new, pos, mpos, copy_of = [], {}, {}, {}
    rights = []
    for k, seq in enumerate(seqs):
        kept = [j for j in range(len(seq)) if (k, j) not in marks]
        marked = [j for j in range(len(seq)) if (k, j) in marks]
        base = [seq[j] for j in kept]
        for p, j in enumerate(kept):
            pos[(k, j)] = p
        if not marked:
            new.append(list(seq))
            continue
        for p, j in enumerate(marked):
            mpos[(k, j)] = len(kept) + p
        new.append(base + [WeightedTerm(seq[j].coeff, seq[j].term.left) for j in marked])
        rights.append((k, base + [WeightedTerm(seq[j].coeff, seq[j].term.right) for j in marked]))
    for k, seq in rights:
        copy_of[k] = len(new)
        new.append(seq)
    return new, pos, mpos, copy_of


def _cross_meet(x, ib, ic, z1, z2, d_a, d_b):
    """X from X|z1 (by d_a) and X|z2 (by d_b) when z1,z2 and X[ib],X[ic] are equal as a pair-sum."""
    n = len(x)
    left = weaken_into(d_a, x + [z1])
    right = weaken_into(d_b, x + [z2])
    mix = node(x + [z1 + z2], Rule(M, seq=n, items=tuple(range(len(z1)))), (left, right))
    d = node(x + [x[ib], x[ic]], Rule(S, seq=n, other=n + 1), (mix,))
    d = node(x + [x[ib]], Rule(C, seq=ic), (d,))
    return node(x, Rule(C, seq=ib), (d,))


def _cross_mix(x, ib, ic, a, b):
    """X with part a (left copy) at ib and part b (right copy) at ic.

    A part is (left version, right version, mark weights, inverted premise).
    """
    a_l, a_r, ra, ih_a = a
    b_l, b_r, rb, ih_b = b
    if not ra:
        return weaken_into(ih_a, x)
    if not rb:
        return weaken_into(ih_b, x)
    n = len(x)
    g = [x[q] for q in range(n) if q not in (ib, ic)]
    z1, z2 = vscale(rb, a_r), vscale(ra, b_l)
    p_a = weaken_into(gen_t2(ih_a, g + [a_l], a_r, rb), x + [z1])
    p_b = weaken_into(gen_t2(ih_b, g + [b_r], b_l, ra), x + [z2])
    mix = node(x + [z1 + z2], Rule(M, seq=n, items=tuple(range(len(z1)))), (p_a, p_b))
    d = node(x + [vscale(rb, a_l), vscale(ra, b_r)], Rule(S, seq=n, other=n + 1), (mix,))
    d = gen_t(d, x + [vscale(ra, b_r)], a_l, rb)
    d = gen_t(d, x + [a_l], b_r, ra)
    d = node(x + [a_l], Rule(C, seq=ic), (d,))
    return node(x, Rule(C, seq=ib), (d,))


_UNARY = (W, C, T, ZERO, PLUS, TIMES, ID, ONE, JOIN)


def invert_join(d, marks):
    """Split every marked join: sequent k becomes k[left] and k[right] (appended).

    All marks must be occurrences of one join formula.
    """
    if not marks:
        return d
    marks = {m: True for m in marks}
    rule = d.rule
    tag = rule.tag
    if tag == CAN:
        raise NotCanFree("inversion needs a CAN-free derivation")
    seqs = seqs_of(d)
    new, pos, mpos, copy_of = join_target(seqs, marks)
    views = premise_views(d)
    cms = child_marks(d, marks, views)
    k = rule.seq
    on_marked = tag == JOIN and any((k, j) in marks for j in rule.items)
    if tag in _UNARY and k in copy_of and not on_marked:
        c = invert_join(d.premises[0], cms[0])
        rb = replace(rule, items=tuple(pos[(k, j)] for j in rule.items)) if rule.items else rule
        rc = replace(rb, seq=copy_of[k])
        mid = premise_layout(new, rc)[0].seqs
        return node(new, rc, (node(mid, rb, (c,)),))
    if tag == S and (k in copy_of or rule.other in copy_of):
        c = invert_join(d.premises[0], cms[0])
        i, j = rule.seq, rule.other
        if i in copy_of and j in copy_of:
            ci, cj = copy_of[i], copy_of[j]
            x1 = [new[q] for q in range(len(new)) if q not in (ci, cj)] + [new[ci] + new[cj]]
            d1 = node(x1, Rule(S, seq=i, other=j), (c,))
            return node(new, Rule(S, seq=ci, other=cj), (d1,))
        mk, um = (i, j) if i in copy_of else (j, i)
        wide = new + [list(seqs[um])]
        e = len(new)
        l1 = [wide[q] for q in range(len(wide)) if q not in (mk, um)] + [wide[mk] + wide[um]]
        d1 = node(l1, Rule(S, seq=copy_of[mk] - 2, other=e - 2), (c,))
        d2 = node(wide, Rule(S, seq=mk, other=um), (d1,))
        return node(new, Rule(C, seq=um), (d2,))
    if on_marked:
        return _join_on_marked(d, marks, seqs, new, pos, copy_of, cms[0])
    if tag == MEET and k in copy_of:
        c0, c1 = (invert_join(p, cm) for p, cm in zip(d.premises, cms))
        itm = tuple(pos[(k, j)] for j in rule.items)
        rb, rc = Rule(MEET, seq=k, items=itm), Rule(MEET, seq=copy_of[k], items=itm)
        qd, qe = (p.seqs for p in premise_layout(new, rb))
        qdd, qde = (p.seqs for p in premise_layout(qd, rc))
        qed, qee = (p.seqs for p in premise_layout(qe, rc))
        ck = copy_of[k]
        d_de = _cross_meet(qde, k, ck, qee[k], qdd[ck], c1, c0)
        d_ed = _cross_meet(qed, k, ck, qdd[k], qee[ck], c0, c1)
        return node(new, rb, (node(qd, rc, (c0, d_de)), node(qe, rc, (d_ed, c1))))
    if tag == M and k in copy_of:
        c_l, c_r = (invert_join(p, cm) for p, cm in zip(d.premises, cms))
        left = set(rule.items)
        itm = tuple(pos[(k, j)] if (k, j) in pos else mpos[(k, j)] for j in sorted(left))
        ck = copy_of[k]
        rb, rc = Rule(M, seq=k, items=itm), Rule(M, seq=ck, items=itm)
        ql, qr = (p.seqs for p in premise_layout(new, rb))
        qll, qlr = (p.seqs for p in premise_layout(ql, rc))
        qrl, qrr = (p.seqs for p in premise_layout(qr, rc))
        r1 = [seqs[k][j].coeff for j in sorted(left) if (k, j) in marks]
        r2 = [seqs[k][j].coeff for j in range(len(seqs[k])) if j not in left and (k, j) in marks]
        part1 = (ql[k], qll[ck], r1, c_l)
        part2 = (qr[k], qrr[ck], r2, c_r)
        d_ll = weaken_into(c_l, qll) if not r1 else c_l
        d_rr = weaken_into(c_r, qrr) if not r2 else c_r
        d_lr = _cross_mix(qlr, k, ck, part1, part2)
        d_rl = _cross_mix(qrl, k, ck, part2, part1)
        return node(new, rb, (node(ql, rc, (d_ll, d_lr)), node(qr, rc, (d_rl, d_rr))))
    kids = [invert_join(p, cm) for p, cm in zip(d.premises, cms)]
    return node(new, rule, kids)


def _join_on_marked(d, marks, seqs, new, pos, copy_of, cm):
    rule = d.rule
    k = rule.seq
    items = set(rule.items)
    term = seqs[k][rule.items[0]].term
    ck = copy_of[k]
    c = invert_join(d.premises[0], cm)
    gamma = [seqs[k][j] for j in range(len(seqs[k])) if (k, j) not in marks and j not in items]
    u = [seqs[k][j].coeff for j in range(len(seqs[k])) if (k, j) in marks and j not in items]
    s = [j for j in rule.items if (k, j) in marks]
    t = [j for j in rule.items if (k, j) not in marks]
    v = [seqs[k][j].coeff for j in s + t]
    rest = [new[q] for q in range(len(new)) if q not in (k, ck)]
    if u:
        s4 = gamma + weighted(u, term.right) + weighted(v, term.left)
        c = or_ab(rest + [s4], gamma, u, v, term.left, term.right, c)
        c = or_ab(rest, gamma, v, u, term.left, term.right, c)
    if not t:
        return expect(c, new)
    titems = tuple(pos[(k, j)] for j in t)
    rc = Rule(JOIN, seq=ck, items=titems)
    rb = Rule(JOIN, seq=k, items=titems)
    mid = premise_layout(new, rc)[0].seqs
    top = premise_layout(mid, rb)[0].seqs
    return node(new, rc, (node(mid, rb, (weaken_into(c, top),)),))


# ---------------------------------------------------------------- public entry


def invert_diamond(d):
    """From a derivation of [|- <>Gamma_i, r_i.1, s_i.-1]_i derive [|- Gamma_i, r_i.1, s_i.-1]_i."""
    marks = {}
    for k, seq in enumerate(d.conclusion):
        for j, it in enumerate(seq):
            if isinstance(it.term, Diamond):
                marks[(k, j)] = True
            elif not isinstance(it.term, (One, CoOne)):
                raise ShapeViolation("DIAMOND inversion needs only diamonds and units")
    return run_deep(invert_local, d, marks, DIAMOND)


def invert(d, rule):
    """Derivations of the premises of `rule` applied to the conclusion of d."""
    if count(d, CAN):
        raise NotCanFree("inversion needs a CAN-free derivation")
    try:
        premise_layout(seqs_of(d), rule)
    except LayoutError as exc:
        raise ShapeViolation(str(exc)) from exc
    k = rule.seq
    if rule.tag in (ZERO, PLUS, TIMES):
        return [run_deep(invert_local, d, {(k, j): True for j in rule.items}, rule.tag)]
    if rule.tag == MEET:
        return [run_deep(invert_local, d, {(k, j): side for j in rule.items}, MEET) for side in (0, 1)]
    if rule.tag == JOIN:
        return [run_deep(invert_join, d, {(k, j) for j in rule.items})]
    if rule.tag == DIAMOND:
        return [invert_diamond(d)]
    raise ShapeViolation(f"{rule.tag} is not an invertible logical rule")
