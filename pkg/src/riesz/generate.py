"""Random terms, goals and derivations for property tests and corpora.

Derivations are grown from INIT downward: each step picks a rule and a
conclusion whose premise is the current derivation, so every output is valid
by construction.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .calculus import (C, CAN, DIAMOND, ID, JOIN, M, MEET, ONE, PLUS, S, T, TIMES, W, ZERO,
                       Rule, init, node, seqs_of)
from .hypersequents import WeightedTerm, canonicalize
from .terms import (ONE as ONE_TERM, ZERO as ZERO_TERM, CoOne, CoVar, Diamond, Join, Meet, One,
                    Plus, Scale, Var, has_modal)

SMALL = [Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3), Fraction(1, 3), Fraction(2, 3)]


@dataclass
class GrowConfig:
    steps: int = 8
    variables: tuple = ("x", "y", "z")
    modal: bool = False
    allow_t: bool = True
    allow_m: bool = True
    allow_can: bool = False
    term_depth: int = 2


def random_term(rng, depth=2, variables=("x", "y"), modal=False):
    if depth <= 0 or rng.random() < 0.3:
        roll = rng.random()
        if modal and roll < 0.15:
            return ONE_TERM if rng.random() < 0.5 else CoOne()
        if roll < 0.2:
            return ZERO_TERM
        x = rng.choice(variables)
        return Var(x) if rng.random() < 0.5 else CoVar(x)
    ops = ["plus", "join", "meet", "scale"] + (["diamond"] if modal else [])
    op = rng.choice(ops)
    if op == "scale":
        return Scale(rng.choice(SMALL[1:]), random_term(rng, depth - 1, variables, modal))
    if op == "diamond":
        return Diamond(random_term(rng, depth - 1, variables, modal))
    a = random_term(rng, depth - 1, variables, modal)
    b = random_term(rng, depth - 1, variables, modal)
    return {"plus": Plus, "join": Join, "meet": Meet}[op](a, b)


def random_hypersequent(rng, n_seqs=2, n_items=2, depth=1, variables=("x", "y"), modal=False):
    seqs = []
    for _ in range(rng.randint(1, n_seqs)):
        seqs.append([WeightedTerm(rng.choice(SMALL), random_term(rng, depth, variables, modal))
                     for _ in range(rng.randint(1, n_items))])
    return canonicalize(seqs)[0]


def random_atomic_hypersequent(rng, n_seqs=3, n_items=3, variables=("x", "y")):
    seqs = []
    for _ in range(rng.randint(1, n_seqs)):
        seq = []
        for _ in range(rng.randint(1, n_items)):
            x = rng.choice(variables)
            seq.append(WeightedTerm(rng.choice(SMALL), Var(x) if rng.random() < 0.5 else CoVar(x)))
        seqs.append(seq)
    return canonicalize(seqs)[0]


# ---------------------------------------------------------------- growing derivations


def _pairs_weaken(d, term, k, r, s):
    from .transform.weaken import weaken_pairs
    return weaken_pairs(d, term, {k: (r, s)})


def _balanced(rng):
    r = [rng.choice(SMALL) for _ in range(rng.randint(1, 2))]
    total = sum(r)
    if rng.random() < 0.5:
        return r, [total]
    a = total * Fraction(rng.randint(1, 3), 4)
    return r, [a, total - a]


class Grower:
    def __init__(self, rng, config=None):
        self.rng = rng
        self.cfg = config or GrowConfig()

    def term(self):
        return random_term(self.rng, self.cfg.term_depth, self.cfg.variables, self.cfg.modal)

    def grow(self, d=None, steps=None):
        d = d if d is not None else init()
        for _ in range(self.cfg.steps if steps is None else steps):
            d = self.step(d)
        return d

    def step(self, d):
        rng = self.rng
        moves = [self.w, self.s, self.id, self.id, self.plus, self.times, self.zero, self.join, self.meet, self.c]
        if self.cfg.allow_t:
            moves.append(self.t)
        if self.cfg.allow_m:
            moves += [self.m, self.m]
        if self.cfg.allow_can:
            moves += [self.can, self.can]
        if self.cfg.modal:
            moves += [self.one, self.diamond, self.diamond]
        for _ in range(10):
            out = rng.choice(moves)(d)
            if out is not None:
                return out
        return d

    # each move returns a derivation concluding something new, or None
    def w(self, d):
        if len(d.conclusion) >= 4:
            return None
        seq = [WeightedTerm(self.rng.choice(SMALL), self.term()) for _ in range(self.rng.randint(0, 2))]
        seqs = seqs_of(d) + [seq]
        return node(seqs, Rule(W, seq=len(seqs) - 1), (d,))

    def s(self, d):
        seqs = seqs_of(d)
        k = self.rng.randrange(len(seqs))
        if len(seqs[k]) < 2 or len(seqs) >= 4:
            return None
        items = list(seqs[k])
        self.rng.shuffle(items)
        cut_at = self.rng.randint(1, len(items) - 1)
        rest = [s for q, s in enumerate(seqs) if q != k]
        n = len(rest)
        return node(rest + [items[:cut_at], items[cut_at:]], Rule(S, seq=n, other=n + 1), (d,))

    def c(self, d):
        keys = [s.key() for s in d.conclusion]
        for k in range(len(keys) - 1):
            if keys[k] == keys[k + 1]:
                seqs = seqs_of(d)
                del seqs[k + 1]
                return node(seqs, Rule(C, seq=k), (d,))
        return None

    def t(self, d):
        seqs = seqs_of(d)
        k = self.rng.randrange(len(seqs))
        if not seqs[k]:
            return None
        c = self.rng.choice(SMALL[1:])
        seqs[k] = [i.scaled(1 / c) for i in seqs[k]]
        return node(seqs, Rule(T, seq=k, scalar=c), (d,))

    def id(self, d):
        seqs = seqs_of(d)
        k = self.rng.randrange(len(seqs))
        r, s = _balanced(self.rng)
        x = self.rng.choice(self.cfg.variables)
        n = len(seqs[k])
        seqs[k] = seqs[k] + [WeightedTerm(c, Var(x)) for c in r] + [WeightedTerm(c, CoVar(x)) for c in s]
        return node(seqs, Rule(ID, seq=k, items=tuple(range(n, n + len(r) + len(s))), var=x), (d,))

    def one(self, d):
        seqs = seqs_of(d)
        k = self.rng.randrange(len(seqs))
        r, s = _balanced(self.rng)
        if self.rng.random() < 0.5:
            r = r + [self.rng.choice(SMALL)]
        n = len(seqs[k])
        seqs[k] = seqs[k] + [WeightedTerm(c, ONE_TERM) for c in r] + [WeightedTerm(c, CoOne()) for c in s]
        return node(seqs, Rule(ONE, seq=k, items=tuple(range(n, n + len(r) + len(s)))), (d,))

    def zero(self, d):
        seqs = seqs_of(d)
        k = self.rng.randrange(len(seqs))
        seqs[k] = seqs[k] + [WeightedTerm(self.rng.choice(SMALL), ZERO_TERM)]
        return node(seqs, Rule(ZERO, seq=k, items=(len(seqs[k]) - 1,)), (d,))

    def _pick_item(self, d):
        seqs = seqs_of(d)
        cands = [(k, j) for k, s in enumerate(seqs) for j in range(len(s))]
        if not cands:
            return None
        return seqs, *self.rng.choice(cands)

    def plus(self, d):
        seqs = seqs_of(d)
        pairs = [(k, a, b) for k, s in enumerate(seqs) for a in range(len(s)) for b in range(len(s))
                 if a != b and s[a].coeff == s[b].coeff]
        if not pairs:
            return None
        k, a, b = self.rng.choice(pairs)
        c = seqs[k][a].coeff
        new = WeightedTerm(c, Plus(seqs[k][a].term, seqs[k][b].term))
        seqs[k] = [it for j, it in enumerate(seqs[k]) if j not in (a, b)] + [new]
        return node(seqs, Rule(PLUS, seq=k, items=(len(seqs[k]) - 1,)), (d,))

    def times(self, d):
        got = self._pick_item(d)
        if got is None:
            return None
        seqs, k, j = got
        a = self.rng.choice(SMALL[1:])
        it = seqs[k][j]
        seqs[k] = [x for q, x in enumerate(seqs[k]) if q != j] + [WeightedTerm(it.coeff / a, Scale(a, it.term))]
        return node(seqs, Rule(TIMES, seq=k, items=(len(seqs[k]) - 1,)), (d,))

    def join(self, d):
        got = self._pick_item(d)
        if got is None or len(d.conclusion) >= 4:
            return None
        seqs, k, j = got
        it = seqs[k][j]
        rest = [x for q, x in enumerate(seqs[k]) if q != j]
        b = self.term()
        wide = seqs + [rest + [WeightedTerm(it.coeff, b)]]
        dw = node(wide, Rule(W, seq=len(wide) - 1), (d,))
        jt = Join(b, it.term) if self.rng.random() < 0.5 else Join(it.term, b)
        seqs[k] = rest + [WeightedTerm(it.coeff, jt)]
        return node(seqs, Rule(JOIN, seq=k, items=(len(rest),)), (dw,))

    def meet(self, d):
        got = self._pick_item(d)
        if got is None:
            return None
        seqs, k, j = got
        it = seqs[k][j]
        rest = [x for q, x in enumerate(seqs[k]) if q != j]
        # a second premise for the variant A + 0 of A
        z = seqs_of(d)
        z[k] = rest + [it, WeightedTerm(it.coeff, ZERO_TERM)]
        d2 = node(z, Rule(ZERO, seq=k, items=(len(rest) + 1,)), (d,))
        z2 = seqs_of(d)
        z2[k] = rest + [WeightedTerm(it.coeff, Plus(it.term, ZERO_TERM))]
        d2 = node(z2, Rule(PLUS, seq=k, items=(len(rest),)), (d2,))
        variant = Plus(it.term, ZERO_TERM)
        kids, mt = ((d, d2), Meet(it.term, variant)) if self.rng.random() < 0.5 else ((d2, d), Meet(variant, it.term))
        seqs[k] = rest + [WeightedTerm(it.coeff, mt)]
        return node(seqs, Rule(MEET, seq=k, items=(len(rest),)), kids)

    def m(self, d):
        other = Grower(self.rng, GrowConfig(**{**self.cfg.__dict__, "steps": 3, "allow_m": False})).grow()
        s1, s2 = seqs_of(d), seqs_of(other)
        if len(s1) + len(s2) > 5:
            return None
        k1, k2 = self.rng.randrange(len(s1)), self.rng.randrange(len(s2))
        g = [s for q, s in enumerate(s1) if q != k1] + [s for q, s in enumerate(s2) if q != k2]
        from .transform.build import weaken_into
        p1 = weaken_into(d, g + [s1[k1]])
        p2 = weaken_into(other, g + [s2[k2]])
        n = len(g)
        return node(g + [s1[k1] + s2[k2]], Rule(M, seq=n, items=tuple(range(len(s1[k1])))), (p1, p2))

    def can(self, d):
        seqs = seqs_of(d)
        k = self.rng.randrange(len(seqs))
        a = self.term()
        r, s = _balanced(self.rng)
        prem = _pairs_weaken(d, a, k, r, s)
        return node(seqs, Rule(CAN, seq=k, term=a, r=tuple(r), s=tuple(s)), (prem,))

    def diamond(self, d):
        if len(d.conclusion) != 1:
            return None
        seq = list(d.conclusion[0])
        pos = sum(i.coeff for i in seq if isinstance(i.term, One))
        neg = sum(i.coeff for i in seq if isinstance(i.term, CoOne))
        if pos < neg:
            return None
        out = [i if isinstance(i.term, (One, CoOne)) else WeightedTerm(i.coeff, Diamond(i.term)) for i in seq]
        return node([out], Rule(DIAMOND), (d,))


def grow(seed, **kw):
    return Grower(random.Random(seed), GrowConfig(**kw)).grow()


def is_hr(hs):
    return not any(has_modal(i.term) for i in hs.items())

