import random
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from riesz.calculus import (HMR, HR, JOIN, MEET, PLUS, TIMES, ZERO, Rule, check_derivation,
                            premise_layout)
from riesz.decide import decide
from riesz.errors import LeafMismatch
from riesz.generate import random_hypersequent
from riesz.hypersequents import canonicalize, classify, parse_hypersequent
from riesz.reduce import reassemble, reduce, trace_to_json
from riesz.terms import CoOne, CoVar, Diamond, Join, Meet, One, Plus, Scale, Var, Zero


def _leaf_text(hs):
    return sorted(sorted(f"{it.coeff}.{'-' if isinstance(it.term, CoVar) else ''}{it.term.name}" for it in s)
                  for s in hs)


def test_meet_gives_two_leaves(oracles):
    tr = reduce(parse_hypersequent("|- 1.(x /\\ y)"), HR)
    assert [_leaf_text(h) for h in tr.leaves] == oracles["leaves_meet"]


def test_join_plus_gives_one_leaf(oracles):
    tr = reduce(parse_hypersequent("|- 1.((2x + 2-y) \\/ (y + -x))"), HR)
    assert [_leaf_text(h) for h in tr.leaves] == oracles["leaves_join_plus"]


def test_basic_input_is_a_leaf():
    hs = parse_hypersequent("|- 1.<>(x \\/ y)")
    tr = reduce(hs, HMR)
    assert tr.leaves == [hs] and tr.steps == []


def test_modal_terms_rejected_in_hr():
    with pytest.raises(ValueError):
        reduce(parse_hypersequent("|- 1.<>x"), HR)


def test_reassemble_meet():
    tr = reduce(parse_hypersequent("|- 1.(x /\\ y) | |- 1.-x | |- 1.-y"), HR)
    leaves = [decide(h, HR).certificate for h in tr.leaves]
    d = reassemble(tr, leaves)
    assert check_derivation(d, HR)


def test_reassemble_without_steps_returns_the_leaf():
    hs = parse_hypersequent("|- 1.x, 1.-x")
    cert = decide(hs, HR).certificate
    assert reassemble(reduce(hs, HR), [cert]) is cert


def test_leaf_mismatch():
    tr = reduce(parse_hypersequent("|- 1.(x /\\ y)"), HR)
    other = decide(parse_hypersequent("|- 1.x, 1.-x"), HR).certificate
    with pytest.raises(LeafMismatch):
        reassemble(tr, [other, other])
    with pytest.raises(LeafMismatch):
        reassemble(tr, [other])


def test_trace_json_shape():
    js = trace_to_json(reduce(parse_hypersequent("|- 1.(x /\\ y)"), HR))
    assert [s["tag"] for s in js["steps"]] == [MEET] and len(js["leaves"]) == 2


_TAG = {Zero: ZERO, Plus: PLUS, Scale: TIMES, Join: JOIN, Meet: MEET}


def _random_order_leaves(hs, rnd, mode):
    """Leaves under a random admissible redex order."""
    out, stack = [], [hs]
    while stack:
        h = stack.pop()
        spots = [(k, j) for k, s in enumerate(h) for j, it in enumerate(s) if type(it.term) in _TAG]
        if not spots:
            out.append(h)
            continue
        k, j = rnd.choice(spots)
        rule = Rule(_TAG[type(h[k][j].term)], seq=k, items=(j,))
        stack.extend(canonicalize(p.seqs)[0] for p in premise_layout(list(h), rule))
    return out


def _multiset(leaves):
    return Counter(h.key() for h in leaves)


def _all_derivable(leaves, mode):
    return all(decide(h, mode) for h in leaves)


@given(st.integers(0, 10_000), st.booleans())
def test_redex_order_does_not_change_derivability(seed, modal):
    rnd = random.Random(seed)
    hs = random_hypersequent(rnd, n_seqs=2, n_items=2, depth=2, modal=modal)
    mode = HMR if modal else HR
    tr = reduce(hs, mode)
    other = _random_order_leaves(hs, rnd, mode)
    kinds = {classify(h) for h in tr.leaves + other}
    assert kinds <= ({"Atomic", "Basic"} if modal else {"Atomic"})
    assert _all_derivable(tr.leaves, mode) == _all_derivable(other, mode)


def test_leaf_multisets_can_differ_between_orders():
    # a JOIN reduced before a MEET of the same sequent copies the MEET into both components
    hs = parse_hypersequent("|- 1.(x \\/ y), 1.(x /\\ y)")
    join_first = reduce(hs, HR).leaves
    meet_first = [leaf for h in reduce(parse_hypersequent("|- 1.(x \\/ y), 1.x"), HR).leaves
                  + reduce(parse_hypersequent("|- 1.(x \\/ y), 1.y"), HR).leaves for leaf in [h]]
    assert len(join_first) == 4 and len(meet_first) == 2
    assert _all_derivable(join_first, HR) == _all_derivable(meet_first, HR)


@given(st.integers(0, 10_000), st.booleans())
def test_round_trip_through_leaf_certificates(seed, modal):
    rnd = random.Random(seed)
    hs = random_hypersequent(rnd, n_seqs=2, n_items=2, depth=2, modal=modal)
    mode = HMR if modal else HR
    tr = reduce(hs, mode)
    certs = []
    for leaf in tr.leaves:
        v = decide(leaf, mode)
        if not v:
            return
        certs.append(v.certificate)
    d = reassemble(tr, certs)
    assert d.conclusion == hs
    assert check_derivation(d, mode)


def test_termination_measure_decreases():
    hs = parse_hypersequent("|- 2.((x + y) /\\ (0 \\/ 3 -z)), 1.<>(x /\\ y)")

    def weight(h):
        def w(t):
            if isinstance(t, (Var, CoVar, One, CoOne, Diamond)):
                return 0
            if isinstance(t, Zero):
                return 1
            if isinstance(t, Scale):
                return 1 + w(t.arg)
            return 1 + w(t.left) + w(t.right)
        return sum(w(it.term) for it in h.items())

    tr = reduce(hs, HMR)
    stack = [tr.tree]
    while stack:
        nd = stack.pop()
        for c in nd.children:
            assert weight(c.hypersequent) < weight(nd.hypersequent)
            stack.append(c)
