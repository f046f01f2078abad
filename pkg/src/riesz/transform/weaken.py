"""Adding balanced pairs r.A, s.bar(A) to a derivation, and substitution of terms for variables."""
from __future__ import annotations

from dataclasses import replace

from ..calculus import (CAN, DIAMOND, ID, INIT, JOIN, M, MEET, ONE, PLUS, TIMES, W, ZERO, Rule,
                        init, node, premise_views, run_deep, seqs_of)
from ..errors import SideConditionViolated
from ..hypersequents import WeightedTerm, align
from ..poly import coeff_mul, coeff_sum, is_concrete
from ..terms import (CoOne, CoVar, Diamond, Join, Meet, One, Plus, Scale, Var, Zero, negate_nnf,
                     substitute)
from .build import expect, weaken_into, weighted

# ---------------------------------------------------------------- extras engine


def block_items(blocks):
    return [i.scaled(a) for a, items, _ in blocks for i in items]


def push_extras(d, extras, tail, at_init, at_diamond):
    """Derive d's conclusion with items appended to its sequents and sequents appended.

    extras[k] is a list of blocks (scalar, items, tag) appended to canonical
    sequent k; `tail` is a list of extra sequents.  Blocks travel up the
    derivation with their sequent (scaled by T, copied by C, merged by S, and
    sent to the left premise of M).  The handlers finish the job at INIT and
    DIAMOND nodes whose sequent carries blocks:
    at_init(blocks, tail) and at_diamond(node, blocks, tail).
    """
    tail = [list(s) for s in tail]
    if not any(extras):
        return weaken_into(d, seqs_of(d) + tail)
    tag = d.rule.tag
    if tag == INIT:
        return at_init(extras[0], tail)
    if tag == DIAMOND:
        return at_diamond(d, extras[0], tail)
    seqs = seqs_of(d)
    concl = [s + block_items(extras[k]) for k, s in enumerate(seqs)] + tail
    children = []
    for side, ((prem, seq_map, _), child) in enumerate(zip(premise_views(d), d.premises)):
        cext = [[] for _ in child.conclusion]
        for q, srcs in enumerate(prem.seq_src):
            if tag == M and side == 1 and srcs == [d.rule.seq]:
                continue
            scale = prem.seq_scale[q]
            cext[seq_map[q]] = [(coeff_mul(a, scale), items, t) for src in srcs for a, items, t in extras[src]]
        children.append(push_extras(child, cext, tail, at_init, at_diamond))
    rule = d.rule
    if tag == M:
        k = rule.seq
        added = len(block_items(extras[k]))
        rule = replace(rule, items=tuple(rule.items) + tuple(range(len(seqs[k]), len(seqs[k]) + added)))
    return node(concl, rule, children)


# ---------------------------------------------------------------- balanced pairs


def _check_pairs(pairs):
    for r, s in pairs.values():
        if any(not is_concrete(c) or c <= 0 for c in list(r) + list(s)):
            raise SideConditionViolated("weights must be positive rationals")
        if coeff_sum(r) != coeff_sum(s):
            raise SideConditionViolated("the two weight vectors must have equal sums")


def _pair_target(seqs, a, abar, pairs):
    out = [list(s) for s in seqs]
    for k, (r, s) in pairs.items():
        out[k] = out[k] + weighted(r, a) + weighted(s, abar)
    return out


def _moved(d_before, target, d_after, pairs):
    """Re-index `pairs` (keyed by sequents of d_before) onto d_after, whose conclusion is `target`."""
    seq_map, _ = align(target, d_after.conclusion)
    return {seq_map[k]: v for k, v in pairs.items()}


def weaken_pairs(d, a, pairs):
    """d concluding [Gamma_k] derives [Gamma_k, r_k.a, s_k.bar(a)] for pairs {k: (r_k, s_k)}."""
    pairs = {k: (list(r), list(s)) for k, (r, s) in pairs.items() if r or s}
    if not pairs:
        return d
    abar = negate_nnf(a)
    seqs = seqs_of(d)
    target = _pair_target(seqs, a, abar, pairs)
    lens = {k: len(seqs[k]) for k in pairs}

    def spans(k):
        r, s = pairs[k]
        base = lens[k]
        return list(range(base, base + len(r))), list(range(base + len(r), base + len(r) + len(s)))

    if isinstance(a, (Var, CoVar)):
        cur, out = [list(s) for s in seqs], d
        for k in sorted(pairs):
            cur = [list(s) for s in cur]
            cur[k] = target[k]
            rs, ss = spans(k)
            out = node(cur, Rule(ID, seq=k, items=tuple(rs + ss), var=a.name), (out,))
        return expect(out, target)
    if isinstance(a, (Zero, One, CoOne)):
        tag = ZERO if isinstance(a, Zero) else ONE
        cur, out = [list(s) for s in seqs], d
        for k in sorted(pairs):
            cur = [list(s) for s in cur]
            cur[k] = target[k]
            rs, ss = spans(k)
            out = node(cur, Rule(tag, seq=k, items=tuple(rs + ss)), (out,))
        return out
    if isinstance(a, Plus):
        mid = _pair_target(seqs, a.left, abar.left, pairs)
        d1 = weaken_pairs(d, a.left, pairs)
        d2 = weaken_pairs(d1, a.right, _moved(d, mid, d1, pairs))
        # stage-wise: first split the bar side of every sequent, then the a side
        stage = [list(s) for s in seqs]
        for k, (r, s) in pairs.items():
            stage[k] = stage[k] + weighted(r, a.left) + weighted(r, a.right) + weighted(s, abar.left) + weighted(s, abar.right)
        out = expect(d2, stage)
        for k in sorted(pairs):
            r, s = pairs[k]
            stage = [list(x) for x in stage]
            stage[k] = seqs[k] + weighted(r, a.left) + weighted(r, a.right) + weighted(s, abar)
            base = lens[k] + 2 * len(r)
            out = node(stage, Rule(PLUS, seq=k, items=tuple(range(base, base + len(s)))), (out,))
        for k in sorted(pairs):
            r, s = pairs[k]
            stage = [list(x) for x in stage]
            stage[k] = target[k]
            rs, _ = spans(k)
            out = node(stage, Rule(PLUS, seq=k, items=tuple(rs)), (out,))
        return out
    if isinstance(a, Scale):
        c = a.coeff
        inner = {k: ([coeff_mul(c, x) for x in r], [coeff_mul(c, x) for x in s]) for k, (r, s) in pairs.items()}
        out = weaken_pairs(d, a.arg, inner)
        stage = [list(s) for s in seqs]
        for k, (r, s) in inner.items():
            stage[k] = stage[k] + weighted(r, a.arg) + weighted(s, abar.arg)
        for k in sorted(pairs):
            r, s = pairs[k]
            stage = [list(x) for x in stage]
            stage[k] = seqs[k] + weighted(inner[k][0], a.arg) + weighted(s, abar)
            out = node(stage, Rule(TIMES, seq=k, items=tuple(range(lens[k] + len(r), lens[k] + len(r) + len(s)))), (out,))
            stage = [list(x) for x in stage]
            stage[k] = target[k]
            out = node(stage, Rule(TIMES, seq=k, items=tuple(range(lens[k], lens[k] + len(r)))), (out,))
        return out
    if isinstance(a, (Join, Meet)):
        return _weaken_lattice(d, a, abar, pairs, seqs, target, spans)
    if isinstance(a, Diamond):
        return _weaken_diamond(d, a, abar, pairs)
    raise SideConditionViolated(f"cannot weaken with term {a}")


def _weaken_lattice(d, a, abar, pairs, seqs, target, spans):
    # the join-shaped side is split by JOIN inside each branch (keeping the
    # copy that matches the branch); the meet-shaped side by MEET below, one
    # branch per choice of component in every sequent
    a_is_join = isinstance(a, Join)
    keys = sorted(pairs)

    def comp(term, side):
        return term.left if side == 0 else term.right

    def split(k, side):
        """Sequent k with its meet-shaped side reduced to component `side`."""
        r, s = pairs[k]
        if a_is_join:
            return seqs[k] + weighted(r, a) + weighted(s, comp(abar, side))
        return seqs[k] + weighted(r, comp(a, side)) + weighted(s, abar)

    def branch(picks):
        left = {k: v for k, v in pairs.items() if picks[k] == 0}
        right = {k: v for k, v in pairs.items() if picks[k] == 1}
        d1 = weaken_pairs(d, a.left, left)
        mid = _pair_target(seqs, a.left, abar.left, left)
        out = weaken_pairs(d1, a.right, _moved(d, mid, d1, right))
        stage = [list(s) for s in seqs]
        for k in keys:
            r, s = pairs[k]
            stage[k] = stage[k] + weighted(r, comp(a, picks[k])) + weighted(s, comp(abar, picks[k]))
        expect(out, stage)
        for k in keys:
            r, s = pairs[k]
            side = picks[k]
            if a_is_join:
                copies = [seqs[k] + weighted(r, comp(a, t)) + weighted(s, comp(abar, side)) for t in (0, 1)]
                jitems = spans(k)[0]
            else:
                copies = [seqs[k] + weighted(r, comp(a, side)) + weighted(s, comp(abar, t)) for t in (0, 1)]
                jitems = spans(k)[1]
            wide = [list(x) for x in stage]
            wide[k] = copies[0]
            wide.append(copies[1])
            out = node(wide, Rule(W, seq=len(wide) - 1 if side == 0 else k), (out,))
            stage = [list(x) for x in stage]
            stage[k] = split(k, side)
            out = node(stage, Rule(JOIN, seq=k, items=tuple(jitems)), (out,))
        return out

    def build(i, choice):
        if i == len(keys):
            return branch(dict(zip(keys, choice)))
        k = keys[i]
        kids = [build(i + 1, choice + [t]) for t in (0, 1)]
        stage = [list(s) for s in target]
        for kk, t in zip(keys[:i], choice):
            stage[kk] = split(kk, t)
        rs, ss = spans(k)
        return node(stage, Rule(MEET, seq=k, items=tuple(ss if a_is_join else rs)), kids)

    return expect(build(0, []), target)


def _weaken_diamond(d, a, abar, pairs):
    blocks = [[] for _ in d.conclusion]
    for k, (r, s) in pairs.items():
        blocks[k] = [(1, weighted(r, a), "pos"), (1, weighted(s, abar), "neg")]

    def split_blocks(bl):
        r = [coeff_mul(x, i.coeff) for x, items, t in bl if t == "pos" for i in items]
        s = [coeff_mul(x, i.coeff) for x, items, t in bl if t == "neg" for i in items]
        return r, s

    def at_init(bl, tail):
        r, s = split_blocks(bl)
        inner = weaken_pairs(init(), a.arg, {0: (r, s)})
        return node([block_items(bl)], Rule(DIAMOND), (inner,))

    def at_diamond(dn, bl, tail):
        r, s = split_blocks(bl)
        inner = weaken_pairs(dn.premises[0], a.arg, {0: (r, s)})
        return node([list(dn.conclusion[0]) + block_items(bl)], Rule(DIAMOND), (inner,))

    return push_extras(d, blocks, [], at_init, at_diamond)


def weaken_with_pair(d, a, pairs):
    """Public entry: pairs maps canonical sequent index to (r, s) weight vectors."""
    pairs = {k: (list(r), list(s)) for k, (r, s) in dict(pairs).items()}
    for k in pairs:
        if not 0 <= k < len(d.conclusion):
            raise SideConditionViolated(f"sequent index {k} out of range")
    _check_pairs(pairs)
    return run_deep(weaken_pairs, d, a, pairs)


# ---------------------------------------------------------------- substitution


def _subst_seqs(hs, x, b):
    return [[WeightedTerm(i.coeff, substitute(i.term, x, b)) for i in seq] for seq in hs]


def _subst(d, x, b):
    seqs = _subst_seqs(d.conclusion, x, b)
    rule = d.rule
    if rule.tag == ID and rule.var == x:
        child = _subst(d.premises[0], x, b)
        (prem, seq_map, _), = premise_views(d)
        k = rule.seq
        q = next(p for p, src in enumerate(prem.seq_src) if src == [k])
        seq_map2, _ = align(_subst_seqs(d.premises[0].conclusion, x, b), child.conclusion)
        r = [d.conclusion[k][j].coeff for j in rule.items if isinstance(d.conclusion[k][j].term, Var)]
        s = [d.conclusion[k][j].coeff for j in rule.items if isinstance(d.conclusion[k][j].term, CoVar)]
        out = weaken_pairs(child, b, {seq_map2[seq_map[q]]: (r, s)})
        return expect(out, seqs)
    kids = tuple(_subst(p, x, b) for p in d.premises)
    if rule.tag == CAN:
        rule = replace(rule, term=substitute(rule.term, x, b))
    return node(seqs, rule, kids)


def subst_derivation(d, x, b):
    """A derivation of G[b/x] from one of G; an ID on x becomes a weakening by b."""
    if b == Var(x):
        return d
    return run_deep(_subst, d, x, b)
