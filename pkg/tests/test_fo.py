from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from riesz import fo
from riesz.errors import ProtocolError, ShadowedBinder, SolverNotFound
from riesz.poly import Polynomial, parse_polynomial

needs_solver = pytest.mark.skipif(not fo.solver_available(), reason="no SMT solver on PATH")
a, b, c = Polynomial.var("a"), Polynomial.var("b"), Polynomial.var("c")
small = st.fractions(min_value=-4, max_value=4, max_denominator=5)


@st.composite
def polys(draw):
    out = Polynomial.const(draw(small))
    for _ in range(draw(st.integers(0, 3))):
        mono = Polynomial.const(draw(small))
        for v in draw(st.lists(st.sampled_from([a, b, c]), max_size=2)):
            mono = mono * v
        out = out + mono
    return out


values = st.fixed_dictionaries({"a": small, "b": small, "c": small})


@given(polys(), polys(), polys(), values)
def test_ring_laws_hold_pointwise(p, q, r, env):
    ev = lambda x: x.evaluate(env)  # noqa: E731
    assert ev(p * (q + r)) == ev(p) * ev(q) + ev(p) * ev(r)
    assert ev(p - p) == 0 and (p - p).is_zero()
    assert p * q == q * p


@given(polys())
def test_no_zero_coefficients(p):
    assert all(c != 0 for _, c in p.items())


def test_parse_polynomial():
    assert parse_polynomial("$a^2 - $b") == a * a - b


def test_rational_literals():
    assert fo.smt_rational(Fraction(1, 2)) == "(/ 1.0 2.0)"
    assert fo.smt_rational(3) == "3.0"
    assert fo.smt_rational(Fraction(-2, 3)) == "(- (/ 2.0 3.0))"


def test_true_skeleton():
    text = fo.emit_smtlib(fo.TRUE)
    assert "(assert true)" in text and text.rstrip().endswith("(check-sat)")


def _sample():
    body = fo.conj(fo.le(0, b), fo.Not(fo.eq(b, 0)), fo.eq(b * a, b))
    return fo.Exists(("b",), body)


def test_emission_is_deterministic():
    assert fo.emit_smtlib(_sample(), {"a": "positive"}) == fo.emit_smtlib(_sample(), {"a": "positive"})


def test_existential_is_hoisted():
    text = fo.emit_smtlib(_sample(), {"a": "positive"})
    assert text.startswith("(set-logic QF_NRA)")
    assert "(declare-const b Real)" in text and "(assert (> a 0.0))" in text
    nested = fo.emit_smtlib(fo.Not(_sample()))
    assert nested.startswith("(set-logic NRA)") and "exists" in nested


def test_shadowed_binder():
    f = fo.conj(fo.Exists(("b",), fo.eq(b, 1)), fo.Exists(("b",), fo.eq(b, 2)))
    with pytest.raises(ShadowedBinder):
        fo.emit_smtlib(f)
    with pytest.raises(ShadowedBinder):
        fo.emit_smtlib(fo.Exists(("a",), fo.eq(a, 1)), {"a": "positive"})


def test_simplify_folds_constants():
    f = fo.conj(fo.TRUE, fo.conj(fo.eq(a, a), fo.le(0, 1)))
    assert fo.simplify(f) == fo.TRUE
    assert fo.simplify(fo.disj(fo.FALSE, fo.eq(1, 2))) == fo.FALSE


def test_parse_model():
    out = """(
  (define-fun x () Real (/ 1.0 3.0))
  (define-fun y () Real (- 2.0))
  (define-fun z () Real (root-obj (+ (^ z 2) (- 2)) 1))
)"""
    model, odd = fo.parse_model(out)
    assert model == {"x": Fraction(1, 3), "y": Fraction(-2)}
    assert odd == {"z"}


def test_config_layers(tmp_path, monkeypatch):
    monkeypatch.delenv("RIESZ_SMT_CMD", raising=False)
    monkeypatch.delenv("RIESZ_SMT_TIMEOUT_MS", raising=False)
    (tmp_path / "riesz.toml").write_text('[solver]\ncommand = "cvc5 --lang smt2"\ntimeout_ms = 500\n')
    cfg = fo.load_solver_config(tmp_path)
    assert cfg.command == ["cvc5", "--lang", "smt2"] and cfg.timeout_ms == 500
    monkeypatch.setenv("RIESZ_SMT_TIMEOUT_MS", "42")
    assert fo.load_solver_config(tmp_path).timeout_ms == 42


def test_missing_solver():
    with pytest.raises(SolverNotFound):
        fo.solve_external("(assert true)", fo.SolverConfig(command=["no-such-solver-binary"]))


def test_garbage_solver_output():
    with pytest.raises(ProtocolError):
        fo.solve_external("(assert true)", fo.SolverConfig(command=["cat"]))


@needs_solver
def test_solver_basics():
    assert isinstance(fo.solve_external("(assert false)"), fo.Unsat)
    out = fo.solve_external("(declare-const x Real)\n(assert (> x 0.0))")
    assert isinstance(out, fo.Sat) and out.model["x"] > 0


@needs_solver
def test_sample_formula_is_sat_with_a_equal_one():
    out = fo.solve_external(fo.emit_smtlib(_sample(), {"a": "positive"}, get_model=True))
    assert isinstance(out, fo.Sat) and out.model["a"] == 1


@needs_solver
def test_square_minus_fragment():
    s, t = Fraction(1, 2), Fraction(1, 2)
    g = Polynomial.var("g")
    f = fo.eq(a * a - g, s + t)
    out = fo.solve_external(fo.emit_smtlib(f, guards=[a * a - g], get_model=True))
    assert isinstance(out, fo.Sat)
    assert (a * a - g).evaluate(out.model) == 1
