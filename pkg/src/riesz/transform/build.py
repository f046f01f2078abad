"""Small derivation-building blocks shared by the transformers.

Everything here works top-down: a derivation of some premise is wrapped in
nodes whose positional conclusions are written out explicitly, and `node`
canonicalises each one.
"""
from __future__ import annotations

from collections import Counter
from fractions import Fraction

from ..calculus import C, M, S, T, W, Rule, init, node
from ..errors import TransformError
from ..hypersequents import WeightedTerm, canonicalize
from ..poly import coeff_mul


def key_of(seqs):
    return canonicalize([list(s) for s in seqs])[0].key()


def seq_key(seq):
    return tuple(sorted(i.key() for i in seq))


def expect(d, seqs):
    """Return d after checking that it concludes the positional `seqs`."""
    if d.conclusion.key() != key_of(seqs):
        want = canonicalize([list(s) for s in seqs])[0]
        raise TransformError(f"internal: built {d.conclusion}, expected {want}")
    return d


def vscale(vec, seq):
    """The sequent vec.seq: one scaled copy of seq per entry of vec."""
    return [i.scaled(a) for a in vec for i in seq]


def weighted(vec, term):
    return [WeightedTerm(a, term) for a in vec]


def outer(u, v):
    return [coeff_mul(a, b) for a in u for b in v]


def weaken_into(d, seqs):
    """Weaken d up to the positional hypersequent `seqs` (a super-multiset of its conclusion)."""
    need = Counter(s.key() for s in d.conclusion)
    keep, extra = [], []
    for k, s in enumerate(seqs):
        kk = seq_key(s)
        if need[kk] > 0:
            need[kk] -= 1
            keep.append(k)
        else:
            extra.append(k)
    if +need:
        raise TransformError("internal: weakening target misses sequents of the derivation")
    cur = [list(seqs[k]) for k in keep]
    for k in extra:
        cur = cur + [list(seqs[k])]
        d = node(cur, Rule(W, seq=len(cur) - 1), (d,))
    return d


def from_empty(seqs):
    """Any hypersequent containing the empty sequent, from INIT and W."""
    return weaken_into(init(), seqs)


def contract_into(d, seqs):
    """Contract duplicated sequents of d down to the positional `seqs`."""
    have = Counter(s.key() for s in d.conclusion)
    want = Counter(seq_key(s) for s in seqs)
    if +(want - have):
        raise TransformError("internal: contraction target has sequents the derivation lacks")
    surplus = have - want
    if any(want[k] == 0 for k in surplus):
        raise TransformError("internal: contraction would drop a sequent")
    cur = [list(s) for s in seqs]
    stack = []
    for kk, n in surplus.items():
        idx = next(p for p, s in enumerate(seqs) if seq_key(s) == kk)
        for _ in range(n):
            stack.append((list(cur), idx))
            cur = cur + [list(seqs[idx])]
    for concl, idx in reversed(stack):
        d = node(concl, Rule(C, seq=idx), (d,))
    return d


def gen_t(d, others, gamma, vec):
    """From d concluding others | vec.gamma derive others | gamma (C, T and S steps)."""
    vec = list(vec)
    if not vec:
        raise TransformError("internal: gen_t needs a non-empty vector")
    n = len(others)
    others = [list(s) for s in others]
    # S steps, top-down: split vec.gamma into its copies one at a time
    for i in range(len(vec) - 1):
        head = [vscale([vec[a]], gamma) for a in range(i + 1)]
        concl = others + head + [vscale(vec[i + 1:], gamma)]
        d = node(concl, Rule(S, seq=n + i, other=n + i + 1), (d,))
    # T steps
    scaled = [vscale([a], gamma) for a in vec]
    for i, a in enumerate(vec):
        if a == 1:
            continue
        concl = others + [list(gamma)] * (i + 1) + scaled[i + 1:]
        d = node(concl, Rule(T, seq=n + i, scalar=Fraction(a)), (d,))
    # C steps
    for m in range(len(vec) - 1, 0, -1):
        d = node(others + [list(gamma)] * m, Rule(C, seq=n), (d,))
    return d


def gen_t2(d, others, gamma, vec):
    """From d concluding others | gamma derive others | vec.gamma (M and T steps)."""
    vec = list(vec)
    others = [list(s) for s in others]
    n = len(others)
    if not vec:
        return from_empty(others + [[]])
    if len(vec) == 1:
        a = vec[0]
        if a == 1:
            return d
        return node(others + [vscale(vec, gamma)], Rule(T, seq=n, scalar=1 / Fraction(a)), (d,))
    left = gen_t2(d, others, gamma, vec[:1])
    right = gen_t2(d, others, gamma, vec[1:])
    first = vscale(vec[:1], gamma)
    concl = others + [first + vscale(vec[1:], gamma)]
    return node(concl, Rule(M, seq=n, items=tuple(range(len(first)))), (left, right))


def and_ab(g, gamma, u, v, x, y, d_x, d_y):
    """G | gamma,u.x,v.y from G | gamma,u.x,v.x and G | gamma,u.y,v.y (u, v non-empty)."""
    g = [list(s) for s in g]
    n = len(g)
    s0 = list(gamma) + weighted(u, x) + weighted(v, y)
    s1 = list(gamma) + weighted(u, x) + weighted(v, x)
    s2 = list(gamma) + weighted(u, y) + weighted(v, y)
    a = gen_t2(d_x, g, s1, u)
    b = gen_t2(d_y, g, s2, v)
    left = vscale(u, s1)
    mix = node(g + [left + vscale(v, s2)], Rule(M, seq=n, items=tuple(range(len(left)))), (a, b))
    us0, vs0 = vscale(u, s0), vscale(v, s0)
    d = node(g + [us0, vs0], Rule(S, seq=n, other=n + 1), (mix,))
    d = gen_t(d, g + [vs0], s0, u)
    d = gen_t(d, g + [s0], s0, v)
    return node(g + [s0], Rule(C, seq=n), (d,))


def or_ab(g, gamma, u, v, x, y, d):
    """G | S1 | S2 from G | S1 | S2 | S3 where S1 = gamma,u.x,v.x, S2 = gamma,u.y,v.y, S3 = gamma,u.x,v.y."""
    g = [list(s) for s in g]
    n = len(g)
    s1 = list(gamma) + weighted(u, x) + weighted(v, x)
    s2 = list(gamma) + weighted(u, y) + weighted(v, y)
    s3 = list(gamma) + weighted(u, x) + weighted(v, y)
    base = g + [s1, s2]
    a = gen_t2(d, base, s3, list(u) + list(v))
    us1, vs2 = vscale(u, s1), vscale(v, s2)
    e = node(base + [us1, vs2], Rule(S, seq=n + 2, other=n + 3), (a,))
    e = gen_t(e, base + [vs2], s1, u)
    e = gen_t(e, base + [s1], s2, v)
    e = node(base + [s1], Rule(C, seq=n + 1), (e,))
    return node(base, Rule(C, seq=n), (e,))
