import json
import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from riesz.terms import (ONE, ZERO, CoOne, CoVar, Diamond, Join, Meet, ModalModel, Plus, Scale,
                         Var)

settings.register_profile(
    "riesz", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("riesz")

DATA = Path(__file__).parent / "data"
NAMES = ("x", "y", "z")

positive = st.sampled_from([Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(1),
                            Fraction(3, 2), Fraction(2), Fraction(3)])
rational = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def literals(modal):
    base = [st.sampled_from(NAMES).map(Var), st.sampled_from(NAMES).map(CoVar), st.just(ZERO)]
    if modal:
        base += [st.just(ONE), st.just(CoOne())]
    return st.one_of(*base)


def nnf_terms(modal=False, max_leaves=8):
    def extend(children):
        ops = [
            st.builds(Plus, children, children),
            st.builds(Join, children, children),
            st.builds(Meet, children, children),
            st.builds(Scale, positive, children),
        ]
        if modal:
            ops.append(st.builds(Diamond, children))
        return st.one_of(*ops)

    return st.recursive(literals(modal), extend, max_leaves=max_leaves)


def envs(n=1):
    return st.fixed_dictionaries({x: st.lists(rational, min_size=n, max_size=n) for x in NAMES})


@st.composite
def substochastic(draw, n):
    rows = []
    for _ in range(n):
        weights = draw(st.lists(st.integers(0, 4), min_size=n + 1, max_size=n + 1))
        total = sum(weights) or 1
        # the extra slack column keeps row sums at most 1
        rows.append([Fraction(w, total) for w in weights[:n]])
    # a constant unit vector is never increased by a substochastic matrix
    unit = draw(st.fractions(min_value=0, max_value=2, max_denominator=4))
    return ModalModel(n, rows, [unit] * n)


@pytest.fixture(scope="session")
def oracles():
    return json.loads((DATA / "oracles.json").read_text())


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "REPORT", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
