import time
from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from conftest import envs, substochastic
from riesz.calculus import (CAN, DIAMOND, HR, ID, INIT, SHAPE, SIDE_CONDITION, WRONG_ARITY, W,
                            Derivation, Rule, check_derivation, check_step, count,
                            derivation_from_json, derivation_to_json, init, modal_depth, node,
                            rule_census)
from riesz.fixtures import join_plus_example, modal_depth_example
from riesz.generate import grow, is_hr
from riesz.hypersequents import interpretation, parse_hypersequent, wt
from riesz.terms import ModalModel, eval_modal


def _timed_check(d, system):
    t = time.perf_counter()
    res = check_derivation(d, system)
    return res, time.perf_counter() - t


def test_join_plus_derivation_checks():
    d = join_plus_example()
    res, dt = _timed_check(d, HR)
    assert res, str(res)
    assert dt < 0.05
    assert count(d, CAN) == 0


def test_modal_depth_derivation_checks():
    d = modal_depth_example()
    res, dt = _timed_check(d, "hmr")
    assert res, str(res)
    assert dt < 0.05
    assert modal_depth(d) == 2


def test_modal_rules_are_not_hr():
    assert not check_derivation(modal_depth_example(), HR)


def _id_x():
    return node([[wt(1, "x"), wt(1, "-x")]], Rule(ID, seq=0, items=(0, 1), var="x"), (init(),))


def test_diamond_step_with_no_units():
    conc = parse_hypersequent("|- 1.<>x, 1.<>-x")
    assert check_step(conc, Rule(DIAMOND), [_id_x().conclusion])


def test_id_side_condition():
    conc = parse_hypersequent("|- 1.x, 1/2.-x")
    res = check_step(conc, Rule(ID, seq=0, items=(0, 1), var="x"), [parse_hypersequent("|-")])
    assert not res and res.reason == SIDE_CONDITION


def test_diamond_needs_single_sequent():
    conc = parse_hypersequent("|- 1.<>x, 1.<>-x | |- 1.<>y")
    res = check_step(conc, Rule(DIAMOND), [_id_x().conclusion])
    assert not res and res.reason == SHAPE


def test_wrong_arity():
    conc = parse_hypersequent("|- 1.x, 1.-x")
    res = check_step(conc, Rule(ID, seq=0, items=(0, 1), var="x"), [])
    assert not res and res.reason == WRONG_ARITY


def test_single_node_trees_other_than_init_are_invalid():
    conc = parse_hypersequent("|- 1.x, 1.-x")
    assert not check_derivation(Derivation(conc, Rule(ID, seq=0, items=(0, 1), var="x")))
    assert not check_derivation(Derivation(parse_hypersequent("|-"), Rule(W, seq=0)))
    assert check_derivation(init())


def test_invalid_reports_path():
    bad_leaf = Derivation(parse_hypersequent("|-"), Rule(W, seq=0))
    bad = Derivation(parse_hypersequent("|- 1.x, 1.-x"), Rule(ID, seq=0, items=(0, 1), var="x"), (bad_leaf,))
    res = check_derivation(bad)
    assert not res and res.path == (0,)


def test_depth_and_census_small_cases():
    assert modal_depth(init()) == 0
    assert rule_census(init()) == {INIT: 1}
    d = node([[wt(1, "<>x"), wt(1, "<>-x")]], Rule(DIAMOND), (_id_x(),))
    d = node([[wt(1, "<><>x"), wt(1, "<><>-x")]], Rule(DIAMOND), (d,))
    assert check_derivation(d)
    assert modal_depth(d) == 2


def test_json_round_trip_of_fixtures():
    for d in (join_plus_example(), modal_depth_example()):
        assert derivation_from_json(derivation_to_json(d)) == d


@given(st.integers(0, 10_000))
def test_grown_derivations_are_valid(seed):
    d = grow(seed, modal=seed % 2 == 0, steps=6, allow_can=seed % 3 == 0)
    res = check_derivation(d)
    assert res, str(res)
    assert derivation_from_json(derivation_to_json(d)) == d


@given(st.integers(0, 10_000), envs())
def test_hr_soundness(seed, env):
    d = grow(seed, modal=False, steps=6, allow_can=seed % 2 == 0)
    assert is_hr(d.conclusion)
    val = eval_modal(interpretation(d.conclusion), ModalModel.scalar(0), env)
    assert val[0] >= 0


@given(st.integers(0, 10_000), st.integers(1, 4).flatmap(
    lambda n: st.tuples(substochastic(n), envs(n))))
def test_hmr_soundness(seed, model_env):
    model, env = model_env
    d = grow(seed, modal=True, steps=6, allow_can=seed % 2 == 0)
    val = eval_modal(interpretation(d.conclusion), model, env)
    assert all(v >= 0 for v in val)


@given(st.integers(0, 10_000))
def test_pruning_a_weakened_sequent(seed):
    """Dropping a W-added sequent from every node keeps the steps below it valid."""
    d = grow(seed, steps=5, allow_m=False)
    w = node([list(s) for s in d.conclusion] + [[wt(Fraction(1, 2), "y")]], Rule(W, seq=len(d.conclusion)), (d,))
    assert check_derivation(w)
    assert check_derivation(w.premises[0])
