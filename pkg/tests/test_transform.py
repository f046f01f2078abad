import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from riesz.calculus import (CAN, DIAMOND, HR, ID, JOIN, M, MEET, PLUS, T, Rule, check_derivation,
                            count, init, modal_depth, node, seqs_of)
from riesz.corpus import CorpusConfig, m_corpus
from riesz.decide import decide
from riesz.errors import NotCanFree, NotHR, NotRational, ShapeViolation, SideConditionViolated
from riesz.fixtures import join_plus_example
from riesz.generate import grow, random_term
from riesz.hypersequents import canonicalize, parse_hypersequent, wt
from riesz.terms import Diamond, Join, Meet, Plus, Scale, Var, Zero, negate_nnf, parse_nnf, substitute
from riesz.transform import (eliminate_can, eliminate_m, eliminate_t_rational, invert,
                             leaf_multipliers, subst_derivation, weaken_with_pair)
from riesz.transform.caninv import invert_with_can

P = parse_hypersequent
x, y = Var("x"), Var("y")


def _id(name, r=1):
    return node([[wt(r, name), wt(r, "-" + name)]], Rule(ID, seq=0, items=(0, 1), var=name), (init(),))


def _concludes(d, text):
    return d.conclusion == P(text)


# ---------------------------------------------------------------- weakening


def test_weaken_atom_is_an_id_step():
    d = weaken_with_pair(init(), x, {0: ([1], [1])})
    assert d.rule.tag == ID and _concludes(d, "|- 1.x, 1.-x")


def test_weaken_meet_with_split_weights():
    d = weaken_with_pair(init(), parse_nnf("x /\\ y"), {0: ([1], [Fraction(1, 2), Fraction(1, 2)])})
    assert check_derivation(d)
    assert _concludes(d, "|- 1.(x /\\ y), 1/2.(-x \\/ -y), 1/2.(-x \\/ -y)")


def test_weaken_meet_other_orientation():
    d = weaken_with_pair(init(), parse_nnf("x /\\ y"), {0: ([Fraction(1, 2), Fraction(1, 2)], [1])})
    assert check_derivation(d)
    assert _concludes(d, "|- 1/2.(x /\\ y), 1/2.(x /\\ y), 1.(-x \\/ -y)")


def test_weaken_diamond_goes_through_diamond_rule():
    d = weaken_with_pair(init(), parse_nnf("<>x"), {0: ([1], [1])})
    assert check_derivation(d)
    assert d.rule.tag == DIAMOND and d.premises[0].rule.tag == ID


def test_weaken_side_condition():
    with pytest.raises(SideConditionViolated):
        weaken_with_pair(init(), x, {0: ([1], [2])})


@given(st.integers(0, 10_000))
def test_weaken_grown_derivations(seed):
    rnd = random.Random(seed)
    modal = seed % 2 == 0
    d = grow(seed, modal=modal, steps=4, term_depth=1)
    if modal and len(d.conclusion) > 1:
        modal = False
    a = random_term(rnd, 2, modal=False)
    k = rnd.randrange(len(d.conclusion))
    r = [Fraction(rnd.randint(1, 4), rnd.randint(1, 3)) for _ in range(rnd.randint(1, 2))]
    out = weaken_with_pair(d, a, {k: (r, [sum(r)])})
    assert check_derivation(out)
    want = seqs_of(d)
    want[k] += [wt(c, a) for c in r] + [wt(sum(r), negate_nnf(a))]
    assert out.conclusion == canonicalize(want)[0]


# ---------------------------------------------------------------- substitution


def test_identity_substitution_is_unchanged():
    d = join_plus_example()
    assert subst_derivation(d, "x", x) == d


@pytest.mark.parametrize("b", ["y /\\ z", "-x", "<>y", "2 y + -z"])
def test_substitute_into_id(b):
    d = decide(P("|- 1.x, 1.(-x \\/ y)")).certificate
    out = subst_derivation(d, "x", parse_nnf(b))
    assert check_derivation(out)
    want = [[wt(it.coeff, substitute(it.term, "x", parse_nnf(b))) for it in seq] for seq in d.conclusion]
    assert out.conclusion == canonicalize(want)[0]


@given(st.integers(0, 10_000))
def test_substitution_on_grown_derivations(seed):
    rnd = random.Random(seed)
    d = grow(seed, modal=False, steps=5, term_depth=1)
    b = random_term(rnd, 2)
    out = subst_derivation(d, "x", b)
    assert check_derivation(out)
    assert count(out, CAN) == count(d, CAN)


# ---------------------------------------------------------------- inversion


def test_plus_inversion_of_join_plus_example():
    d = join_plus_example()
    below_join = invert(d, Rule(JOIN, seq=0, items=(0,)))[0]
    assert check_derivation(below_join, HR)
    k = next(i for i, s in enumerate(below_join.conclusion) if isinstance(s[0].term, Plus))
    (out,) = invert(below_join, Rule(PLUS, seq=k, items=(0,)))
    assert check_derivation(out, HR)


def test_meet_inversion_gives_both_premises():
    left = decide(P("|- 1.x | |- 1.-x | |- 1.-y")).certificate
    right = decide(P("|- 1.y | |- 1.-x | |- 1.-y")).certificate
    d = node([[wt(1, "x /\\ y")], [wt(1, "-x")], [wt(1, "-y")]], Rule(MEET, seq=0, items=(0,)), (left, right))
    assert check_derivation(d)
    k = next(i for i, s in enumerate(d.conclusion) if isinstance(s[0].term, Meet))
    outs = invert(d, Rule(MEET, seq=k, items=(0,)))
    assert [o.conclusion for o in outs] == [left.conclusion, right.conclusion]
    assert all(check_derivation(o) for o in outs)


def test_diamond_inversion():
    d = node([[wt(1, "<>x"), wt(1, "<>-x")]], Rule(DIAMOND), (_id("x"),))
    (out,) = invert(d, Rule(DIAMOND))
    assert _concludes(out, "|- 1.x, 1.-x") and check_derivation(out)


def test_inversion_errors():
    with pytest.raises(ShapeViolation):
        invert(_id("x"), Rule(PLUS, seq=0, items=(0,)))
    d = grow(3, steps=3, allow_can=True)
    while not count(d, CAN):
        d = grow(random.randrange(1000), steps=3, allow_can=True)
    with pytest.raises(NotCanFree):
        invert(d, Rule(DIAMOND))


_SHAPES = (Zero, Plus, Scale, Join, Meet)


@given(st.integers(0, 10_000))
def test_inversion_on_grown_derivations(seed):
    d = grow(seed, modal=seed % 2 == 0, steps=6, term_depth=1)
    spots = [(k, j, type(it.term)) for k, s in enumerate(d.conclusion) for j, it in enumerate(s)
             if isinstance(it.term, _SHAPES)]
    if not spots:
        return
    k, j, cls = random.Random(seed).choice(spots)
    tag = {Zero: "ZERO", Plus: PLUS, Scale: "TIMES", Join: JOIN, Meet: MEET}[cls]
    for out in invert(d, Rule(tag, seq=k, items=(j,))):
        assert check_derivation(out)
        assert count(out, CAN) == 0


# ---------------------------------------------------------------- M elimination


def test_m_free_input_is_unchanged():
    d = join_plus_example()
    assert eliminate_m(d) == d


def test_m_of_two_identities():
    left, right = _id("x"), _id("y")
    d = node([[wt(1, "x"), wt(1, "-x"), wt(1, "y"), wt(1, "-y")]], Rule(M, seq=0, items=(0, 1)), (left, right))
    assert check_derivation(d)
    out = eliminate_m(d)
    assert check_derivation(out) and count(out, M) == 0 and out.conclusion == d.conclusion


def test_m_elimination_keeps_modal_depth_bounded():
    for seed, d in m_corpus(CorpusConfig(n=40)):
        if seed % 2 == 0:
            continue
        out = eliminate_m(d)
        assert check_derivation(out) and count(out, M) == 0
        assert modal_depth(out) <= modal_depth(d)


def test_m_requires_can_free():
    d = node([[wt(1, "x"), wt(1, "-x")]], Rule(CAN, seq=0, term=y, r=(1,), s=(1,)),
             (weaken_with_pair(_id("x"), y, {0: ([1], [1])}),))
    assert check_derivation(d)
    with pytest.raises(NotCanFree):
        eliminate_m(d)


# ---------------------------------------------------------------- CAN elimination


def test_can_free_input_is_unchanged():
    d = join_plus_example()
    assert eliminate_can(d) == d


@pytest.mark.parametrize("text", ["|- 1.(x /\\ y), 1.(-x \\/ -y)", "|- 1.(x /\\ y) | |- 1.-x | |- 1.-y",
                                  "|- 2.(x /\\ y), 1.(-x \\/ -y), 1.(-y \\/ -x)"])
def test_can_from_meet_inversion(text):
    d = decide(P(text)).certificate
    k, j = next((k, j) for k, s in enumerate(d.conclusion) for j, it in enumerate(s) if isinstance(it.term, Meet))
    for inv in invert_with_can(d, k, j):
        assert count(inv, CAN) and check_derivation(inv)
        out = eliminate_can(inv)
        assert check_derivation(out) and count(out, CAN) == 0 and out.conclusion == inv.conclusion


def test_can_on_diamond_term_above_a_diamond_rule():
    inner = weaken_with_pair(_id("y"), x, {0: ([1], [1])})
    below = node([[wt(1, "<>y"), wt(1, "<>-y"), wt(1, "<>x"), wt(1, "<>-x")]], Rule(DIAMOND), (inner,))
    cut_term = Diamond(x)
    prem = weaken_with_pair(below, cut_term, {0: ([1], [1])})
    d = node(seqs_of(below), Rule(CAN, seq=0, term=cut_term, r=(1,), s=(1,)), (prem,))
    assert check_derivation(d)
    out = eliminate_can(d)
    assert check_derivation(out) and count(out, CAN) == 0 and out.conclusion == d.conclusion


# ---------------------------------------------------------------- T elimination


def test_t_free_input_is_unchanged():
    d = _id("x")
    assert eliminate_t_rational(d) is d


def test_t_over_id():
    d = node([[wt(1, "x"), wt(1, "-x")]], Rule(T, seq=0, scalar=Fraction(2)), (_id("x", 2),))
    assert check_derivation(d, HR)
    out = eliminate_t_rational(d)
    assert check_derivation(out, HR) and count(out, T) == 0 and out.conclusion == d.conclusion


def test_two_thirds_against_a_half_without_t(oracles):
    hs = P("|- 2/3.x | |- 1/2.-x")
    # a T-using derivation: scale both sequents to 2.x and 2.-x, merge, ID
    d = _id("x", 2)
    d = node([[wt(2, "x")], [wt(2, "-x")]], Rule("S", seq=0, other=1), (d,))
    d = node([[wt(Fraction(2, 3), "x")], [wt(2, "-x")]], Rule(T, seq=0, scalar=Fraction(3)), (d,))
    d = node([[wt(Fraction(2, 3), "x")], [wt(Fraction(1, 2), "-x")]], Rule(T, seq=1, scalar=Fraction(4)), (d,))
    assert d.conclusion == hs and check_derivation(d, HR)
    from riesz.decide import integer_multipliers
    assert integer_multipliers(leaf_multipliers(d)) == oracles["multipliers_two_thirds_half"]
    out = eliminate_t_rational(d)
    assert check_derivation(out, HR) and count(out, T) == 0 and out.conclusion == hs


def test_t_elimination_errors():
    modal = node([[wt(1, "<>x"), wt(1, "<>-x")]], Rule(DIAMOND), (_id("x"),))
    modal = node([[wt(1, "<>x"), wt(1, "<>-x")]], Rule(T, seq=0, scalar=Fraction(1)), (modal,))
    with pytest.raises(NotHR):
        eliminate_t_rational(modal)
    can = node([[wt(1, "x"), wt(1, "-x")]], Rule(CAN, seq=0, term=y, r=(1,), s=(1,)),
               (weaken_with_pair(_id("x"), y, {0: ([1], [1])}),))
    with pytest.raises(NotCanFree):
        eliminate_t_rational(can)
    from riesz.calculus import Derivation
    sym = Derivation(P("|- $a.x, $a.-x"), Rule(T, seq=0, scalar=Fraction(1)), (init(),))
    with pytest.raises(NotRational):
        eliminate_t_rational(sym)
