"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

Run `python tests/test_acceptance.py` to get the lines without pytest.
"""
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from riesz import fo  # noqa: E402
from riesz.calculus import (CAN, HMR, HR, M, T, check_derivation, count,  # noqa: E402
                            modal_depth)
from riesz.cli import EXIT_NO, run  # noqa: E402
from riesz.corpus import CorpusConfig, can_corpus, m_corpus, t_corpus  # noqa: E402
from riesz.decide import (DecideConfig, Derivable, NotDerivable, Unknown, build_phi,  # noqa: E402
                          decide, decide_atomic_hr, decide_basic_hmr, emit_phi)
from riesz.fixtures import join_plus_example, modal_depth_example  # noqa: E402
from riesz.generate import grow, random_atomic_hypersequent  # noqa: E402
from riesz.hypersequents import (Hypersequent, WeightedTerm, interpretation,  # noqa: E402
                                 parse_hypersequent)
from riesz.poly import parse_polynomial  # noqa: E402
from riesz.reduce import reduce  # noqa: E402
from riesz.terms import (CoOne, CoVar, Diamond, Join, Meet, ModalModel, One, Plus, Var,  # noqa: E402
                         eval_modal, parse_nnf)
from riesz.transform import eliminate_can, eliminate_m, eliminate_t_rational  # noqa: E402

HAVE_SOLVER = fo.solver_available()
INTERNAL = DecideConfig(use_solver=False)


REPORT = []


def report(number, ok, detail):
    # printed after the run by the terminal-summary hook in conftest
    REPORT.append((number, f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"))
    return ok


def needs_solver(number):
    if not HAVE_SOLVER:
        report(number, False, "no SMT solver on PATH")
        pytest.skip("no SMT solver on PATH")


# ---------------------------------------------------------------- 1


def test_reference_derivations_check():
    results = []
    for name, d, system in (("join/plus", join_plus_example(), HR), ("modal depth 2", modal_depth_example(), HMR)):
        t = time.perf_counter()
        res = check_derivation(d, system)
        results.append((name, bool(res), (time.perf_counter() - t) * 1000))
    ok = all(valid and ms < 50 for _, valid, ms in results) and modal_depth(modal_depth_example()) == 2
    detail = ", ".join(f"{n} {'Valid' if v else 'Invalid'} in {ms:.1f} ms" for n, v, ms in results)
    assert report(1, ok, detail)


# ---------------------------------------------------------------- 2

AXIOMS = [
    "x + (y + z) == (x + y) + z",
    "x + y == y + x",
    "x + 0 == x",
    "x + -x == 0",
    "2 (1/3 x) == 2/3 x",
    "1 x == x",
    "3 (x + y) == 3 x + 3 y",
    "5/2 x == 2 x + 1/2 x",
    "x \\/ (y \\/ z) == (x \\/ y) \\/ z",
    "x /\\ (y /\\ z) == (x /\\ y) /\\ z",
    "z \\/ y == y \\/ z",
    "z /\\ y == y /\\ z",
    "z \\/ (z /\\ y) == z",
    "z /\\ (z \\/ y) == z",
    "(x /\\ y) + z <= y + z",
    "3/2 (x /\\ y) <= 3/2 y",
    "((x /\\ y) + z) /\\ (y + z) == (x /\\ y) + z",
    "0 <= 1",
    "<>(2 x + 1/3 y) == 2 <>x + 1/3 <>y",
    "0 <= <>(0 \\/ x)",
    "<> 1 <= 1",
]


def _axiom_goals(text):
    from riesz.cli import _goal
    op = "==" if "==" in text else "<="
    left, right = (parse_nnf(s) for s in text.split(op))
    return [_goal(left, right)] + ([_goal(right, left)] if op == "==" else [])


def test_axiom_suite():
    t = time.perf_counter()
    bad = []
    n_goals = 0
    for ax in AXIOMS:
        for hs in _axiom_goals(ax):
            n_goals += 1
            v = decide(hs, config=INTERNAL)
            if not (isinstance(v, Derivable) and check_derivation(v.certificate)):
                bad.append(ax)
    dt = time.perf_counter() - t
    ok = not bad and len(AXIOMS) >= 18 and dt < 10
    assert report(2, ok, f"{len(AXIOMS)} axioms ({n_goals} goals) derivable and checked in {dt:.2f} s"
                  + (f"; failing: {bad}" if bad else ""))


# ---------------------------------------------------------------- 3


def test_non_theorem_rejected():
    import io
    code = run(["prove-eq", "<> (x \\/ y)", "==", "<> x \\/ <> y", "--system", "hmr"], io.StringIO())
    model = ModalModel(2, [["1/3", "2/3"], ["0", "0"]], ["1", "1"])
    env = {"x": [1, 0], "y": [0, 1]}
    lhs = eval_modal(parse_nnf("<> (x \\/ y)"), model, env)
    rhs = eval_modal(parse_nnf("<> x \\/ <> y"), model, env)
    ok = code == EXIT_NO and lhs == (1, 0) and rhs == (Fraction(2, 3), 0)
    assert report(3, ok, f"prove-eq exit {code}; <>(a\\/b) = {_vec(lhs)}, <>a \\/ <>b = {_vec(rhs)}")


def _vec(v):
    return "(" + ", ".join(str(c) for c in v) + ")"


# ---------------------------------------------------------------- 4


def test_markov_values():
    model = ModalModel(2, [["1/3", "1/2"], ["1/3", "0"]], ["1", "1"])
    one = eval_modal(parse_nnf("<> 1"), model, {})
    two = eval_modal(parse_nnf("<> <> 1"), model, {})
    ok = one == (Fraction(5, 6), Fraction(1, 3)) and two == (Fraction(4, 9), Fraction(5, 18))
    assert report(4, ok, f"<>1 = {_vec(one)}, <><>1 = {_vec(two)}")


# ---------------------------------------------------------------- 5


def _variables(hs):
    out = set()
    for it in hs.items():
        stack = [it.term]
        while stack:
            t = stack.pop()
            if isinstance(t, (Var, CoVar)):
                out.add(t.name)
            for f in getattr(t, "fields", ()):
                v = getattr(t, f)
                if hasattr(v, "fields"):
                    stack.append(v)
    return sorted(out)


def _rat(rng, bound=5):
    return Fraction(rng.randint(-bound * 6, bound * 6), rng.randint(1, 6))


def _substochastic(rng, n):
    rows = []
    for _ in range(n):
        w = [rng.randint(0, 4) for _ in range(n + 1)]
        total = sum(w) or 1
        rows.append([Fraction(a, total) for a in w[:n]])
    unit = Fraction(rng.randint(0, 8), 4)
    return ModalModel(n, rows, [unit] * n)


def derivable_corpus(n_per_system=100, max_leaves=64):
    """Conclusions of grown derivations, confirmed by decide; bounded by reduction size."""
    goals = []
    for modal in (False, True):
        seed, got = 0, 0
        while got < n_per_system:
            g = grow(10_000 * modal + seed, modal=modal, steps=6, term_depth=1)
            seed += 1
            mode = HMR if modal else HR
            if len(reduce(g.conclusion, mode).leaves) > max_leaves:
                continue
            v = decide(g.conclusion, mode, INTERNAL)
            if isinstance(v, Derivable):
                goals.append((g.conclusion, modal))
                got += 1
    return goals


def test_soundness_fuzz():
    t = time.perf_counter()
    rng = random.Random(5)
    goals = derivable_corpus()
    samples = negatives = 0
    for hs, modal in goals:
        names = _variables(hs)
        term = interpretation(hs)
        for _ in range(100):
            c = Fraction(rng.randint(0, 4), 4)
            model = ModalModel.scalar(c, Fraction(rng.randint(0, 8), 4))
            env = {x: [_rat(rng)] for x in names}
            samples += 1
            negatives += eval_modal(term, model, env)[0] < 0
        for _ in range(20):
            model = _substochastic(rng, 3)
            env = {x: [_rat(rng) for _ in range(3)] for x in names}
            samples += 1
            negatives += any(v < 0 for v in eval_modal(term, model, env))
    dt = time.perf_counter() - t
    ok = len(goals) == 200 and negatives == 0 and dt < 60
    assert report(5, ok, f"{len(goals)} derivable goals, {samples} samples, {negatives} negative, {dt:.1f} s")


# ---------------------------------------------------------------- 6


def test_elimination_suite():
    t = time.perf_counter()
    cans = can_corpus(CorpusConfig(n=100))
    can_inputs = [o for _, _, outs in cans for o in outs]
    can_ok = sum(1 for o in can_inputs if _clean(o, eliminate_can(o), CAN))
    ms = m_corpus(CorpusConfig(n=100))
    m_ok = sum(1 for _, d in ms if _clean(d, eliminate_m(d), M, CAN))
    ts = t_corpus(CorpusConfig(n=50))
    t_ok = sum(1 for _, d in ts if _clean(d, eliminate_t_rational(d), T, CAN, system=HR))
    dt = time.perf_counter() - t
    ok = (len(cans) >= 100 and can_ok == len(can_inputs) and len(ms) >= 100 and m_ok == len(ms)
          and len(ts) >= 50 and t_ok == len(ts))
    assert report(6, ok, f"CAN {can_ok}/{len(can_inputs)} (from {len(cans)} certificates), M {m_ok}/{len(ms)}, "
                  f"T {t_ok}/{len(ts)}; {dt:.1f} s")


def _clean(before, after, *tags, system=HMR):
    return (after.conclusion == before.conclusion and bool(check_derivation(after, system))
            and all(count(after, tag) == 0 for tag in tags))


# ---------------------------------------------------------------- 7


def _solver_says(hs, mode):
    out = fo.solve_external(emit_phi(hs, mode))
    if isinstance(out, fo.Sat):
        return True
    if isinstance(out, fo.Unsat):
        return False
    return None


def _literal(rng):
    x = rng.choice("xy")
    roll = rng.random()
    if roll < 0.4:
        return Var(x)
    if roll < 0.8:
        return CoVar(x)
    return One() if roll < 0.9 else CoOne()


def random_basic(rng):
    """1-2 sequents of 1-3 items; a diamond wraps a literal, a diamond of one, or one connective."""
    seqs = []
    for _ in range(rng.randint(1, 2)):
        seq = []
        for _ in range(rng.randint(1, 3)):
            c = rng.choice([Fraction(1), Fraction(2), Fraction(1, 2), Fraction(1, 3), Fraction(3, 2)])
            if rng.random() < 0.4:
                t = _literal(rng)
            else:
                shape = rng.random()
                if shape < 0.4:
                    inner = _literal(rng)
                elif shape < 0.6:
                    inner = Diamond(_literal(rng))
                else:
                    inner = rng.choice([Join, Meet, Plus])(_literal(rng), _literal(rng))
                t = Diamond(inner)
            seq.append(WeightedTerm(c, t))
        seqs.append(seq)
    return Hypersequent(seqs)


def _depth(t):
    if isinstance(t, Diamond):
        return 1 + _depth(t.arg)
    return max((_depth(getattr(t, f)) for f in getattr(t, "fields", ()) if hasattr(getattr(t, f), "fields")),
               default=0)


def test_oracle_equivalence():
    needs_solver(7)
    t = time.perf_counter()
    rng = random.Random(7)
    hr_agree = 0
    for _ in range(300):
        hs = random_atomic_hypersequent(rng, variables=("x", "y", "z"))
        hr_agree += bool(decide_atomic_hr(hs)) == _solver_says(hs, HR)
    basic = agree = decided = positive = inconclusive = 0
    while basic < 50:
        hs = random_basic(rng)
        if max(_depth(it.term) for it in hs.items()) > 2:
            continue
        basic += 1
        v = decide(hs, HMR, INTERNAL)
        if isinstance(v, Unknown):
            continue
        decided += 1
        positive += bool(v)
        said = _solver_says(hs, HMR)
        # an inconclusive solver answer is neither agreement nor disagreement, and fails the criterion
        inconclusive += said is None
        agree += bool(v) == said
    dt = time.perf_counter() - t
    ok = hr_agree == 300 and agree == decided
    assert report(7, ok, f"atomic HR {hr_agree}/300 agree; basic HMR {agree}/{decided} agree "
                  f"({positive} derivable, {50 - decided} internal Unknown, {inconclusive} solver "
                  f"inconclusive); {dt:.1f} s")


# ---------------------------------------------------------------- 8


def test_symbolic_formula():
    needs_solver(8)
    import io
    out = io.StringIO()
    code = run(["emit-smt", "|- ($a^2 - $b).x, 1/2.-x, 1/2.-x"], out)
    res = fo.solve_external(out.getvalue())
    ok = code == 0 and isinstance(res, fo.Sat)
    value = None
    if ok:
        value = parse_polynomial("$a^2 - $b").evaluate(res.model)
        ok = value == 1
    assert report(8, ok, f"solver {type(res).__name__}; a = {res.model.get('a') if ok else '?'}, "
                  f"b = {res.model.get('b') if ok else '?'}, a^2 - b = {value}")


# ---------------------------------------------------------------- 9


def test_nested_family_scripts():
    needs_solver(9)
    a = Var("x")
    sizes, answers = [], []
    for n in range(3):
        hs = parse_hypersequent("|- 1.x") if n == 0 else Hypersequent([[WeightedTerm(1, a)]])
        script = fo.emit_smtlib(build_phi(hs, HMR))
        sizes.append(len(script))
        res = fo.solve_external(script, fo.SolverConfig(command=fo.load_solver_config().command, timeout_ms=60_000))
        answers.append(type(res).__name__)
        a = Join(Diamond(a), Diamond(a))
    ok = all(ans in ("Sat", "Unsat", "SolverUnknown") for ans in answers)
    assert report(9, ok, "A_0..A_2 script sizes " + ", ".join(map(str, sizes)) + "; solver: " + ", ".join(answers))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
