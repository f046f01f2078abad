"""Hand-written reference derivations used by tests and scripts."""
from fractions import Fraction

from .calculus import (DIAMOND, ID, JOIN, MEET, PLUS, S, T, TIMES, W, Rule, init, node)
from .hypersequents import wt


def join_plus_example():
    """Derivation of |- 1.((2x + 2-y) \\/ (y + -x)) through T(2) and S."""
    d = init()
    d = node([[wt(2, "y"), wt(2, "-y")]], Rule(ID, seq=0, items=(0, 1), var="y"), (d,))
    seq = [wt(2, "x"), wt(2, "y"), wt(2, "-x"), wt(2, "-y")]
    d = node([seq], Rule(ID, seq=0, items=(0, 2), var="x"), (d,))
    left = [wt(2, "x"), wt(2, "-y")]
    d = node([left, [wt(2, "y"), wt(2, "-x")]], Rule(S, seq=0, other=1), (d,))
    d = node([left, [wt(1, "y"), wt(1, "-x")]], Rule(T, seq=1, scalar=Fraction(2)), (d,))
    right = [wt(1, "y + -x")]
    d = node([left, right], Rule(PLUS, seq=1, items=(0,)), (d,))
    d = node([[wt(2, "x"), wt(1, "2*-y")], right], Rule(TIMES, seq=0, items=(1,)), (d,))
    d = node([[wt(1, "2*x"), wt(1, "2*-y")], right], Rule(TIMES, seq=0, items=(0,)), (d,))
    d = node([[wt(1, "2*x + 2*-y")], right], Rule(PLUS, seq=0, items=(0,)), (d,))
    return node([[wt(1, "(2x + 2-y) \\/ (y + -x)")]], Rule(JOIN, seq=0, items=(0,)), (d,))


def modal_depth_example():
    """Depth-2 derivation of |- 1.(<>x /\\ <><>x) | |- 1.<>-x | |- 1.<><>-x."""
    idx = node([[wt(1, "x"), wt(1, "-x")]], Rule(ID, seq=0, items=(0, 1), var="x"), (init(),))
    # left branch: drop <><>-x, merge, strip one diamond
    a = node([[wt(1, "<>x"), wt(1, "<>-x")]], Rule(DIAMOND), (idx,))
    a = node([[wt(1, "<>x")], [wt(1, "<>-x")]], Rule(S, seq=0, other=1), (a,))
    a = node([[wt(1, "<>x")], [wt(1, "<>-x")], [wt(1, "<><>-x")]], Rule(W, seq=2), (a,))
    # right branch: drop <>-x, merge, strip two diamonds
    b = node([[wt(1, "<>x"), wt(1, "<>-x")]], Rule(DIAMOND), (idx,))
    b = node([[wt(1, "<><>x"), wt(1, "<><>-x")]], Rule(DIAMOND), (b,))
    b = node([[wt(1, "<><>x")], [wt(1, "<><>-x")]], Rule(S, seq=0, other=1), (b,))
    b = node([[wt(1, "<><>x")], [wt(1, "<>-x")], [wt(1, "<><>-x")]], Rule(W, seq=1), (b,))
    goal = [[wt(1, "<>x /\\ <><>x")], [wt(1, "<>-x")], [wt(1, "<><>-x")]]
    return node(goal, Rule(MEET, seq=0, items=(0,)), (a, b))
