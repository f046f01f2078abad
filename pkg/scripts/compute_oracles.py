"""Compute reference values with tools independent of the riesz solvers and freeze them.

Usage: python3 scripts/compute_oracles.py [--out tests/data/oracles.json]

Needs scipy and sympy (not runtime dependencies of the package).  Goals are
generated from a fixed seed and written as text, so the frozen file can be
checked without rerunning this script.
"""
from __future__ import annotations

import argparse
import json
import random
from fractions import Fraction
from pathlib import Path

import sympy
from scipy.optimize import linprog

COEFFS = [Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(1),
          Fraction(3, 2), Fraction(2), Fraction(3), Fraction(4)]


def frac_text(c):
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


# ---------------------------------------------------------------- atomic goals by float LP


def random_atomic(rng, max_seqs=3, max_items=3, names=("x", "y", "z")):
    seqs = []
    for _ in range(rng.randint(1, max_seqs)):
        seq = []
        for _ in range(rng.randint(1, max_items)):
            seq.append((rng.choice(COEFFS), rng.choice(names), rng.random() < 0.5))
        seqs.append(seq)
    return seqs


def balanced_atomic(rng):
    """A goal made cancellable by appending compensating atoms to its last sequent."""
    seqs = random_atomic(rng, max_items=2)
    t = [rng.choice(COEFFS) for _ in seqs]
    net = {}
    for ti, seq in zip(t, seqs):
        for c, x, pos in seq:
            net[x] = net.get(x, 0) + ti * (c if pos else -c)
    for x, v in sorted(net.items()):
        if v:
            seqs[-1].append((abs(v) / t[-1], x, v < 0))
    return seqs


def atomic_text(seqs):
    parts = []
    for seq in seqs:
        items = [f"{frac_text(c)}.{'' if pos else '-'}{x}" for c, x, pos in seq]
        parts.append("|- " + ", ".join(items))
    return " | ".join(parts)


def lp_derivable(seqs):
    """Is there t >= 0, sum t = 1, with every variable cancelling?"""
    names = sorted({x for seq in seqs for _, x, _ in seq})
    rows = []
    for x in names:
        rows.append([float(sum((c if pos else -c) for c, y, pos in seq if y == x)) for seq in seqs])
    m = len(seqs)
    a_eq = rows + [[1.0] * m]
    b_eq = [0.0] * len(rows) + [1.0]
    res = linprog(c=[0.0] * m, A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * m, method="highs")
    return res.status == 0


def atomic_corpus(seed=20260, n=120):
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        seqs = balanced_atomic(rng) if rng.random() < 0.5 else random_atomic(rng)
        out.append({"goal": atomic_text(seqs), "derivable": lp_derivable(seqs)})
    return out


# ---------------------------------------------------------------- exact multipliers by nullspace


def integer_multipliers_2_3():
    """|- 2/3.x | |- 1/2.-x: the balancing vector (t1, t2) with 2/3 t1 = 1/2 t2."""
    mat = sympy.Matrix([[sympy.Rational(2, 3), -sympy.Rational(1, 2)]])
    (vec,) = mat.nullspace()
    den = sympy.ilcm(*[v.q for v in vec])
    ints = [int(v * den) for v in vec]
    g = sympy.igcd(*ints)
    return [i // g for i in ints]


# ---------------------------------------------------------------- a separate reducer


def _neg(t):
    tag = t[0]
    if tag == "var":
        return ("covar", t[1])
    if tag == "covar":
        return ("var", t[1])
    if tag == "scale":
        return ("scale", t[1], _neg(t[2]))
    if tag == "plus":
        return ("plus", _neg(t[1]), _neg(t[2]))
    if tag == "join":
        return ("meet", _neg(t[1]), _neg(t[2]))
    if tag == "meet":
        return ("join", _neg(t[1]), _neg(t[2]))
    return t


def _reduce(hs):
    """Leaves of the invertible-rule reduction; hs is a list of lists of (coeff, term)."""
    for k, seq in enumerate(hs):
        for j, (c, t) in enumerate(seq):
            if t[0] in ("var", "covar"):
                continue
            rest = seq[:j] + seq[j + 1:]
            others = hs[:k] + hs[k + 1:]
            if t[0] == "zero":
                return _reduce(others + [rest])
            if t[0] == "scale":
                return _reduce(others + [rest + [(c * t[1], t[2])]])
            if t[0] == "plus":
                return _reduce(others + [rest + [(c, t[1]), (c, t[2])]])
            if t[0] == "join":
                return _reduce(others + [rest + [(c, t[1])], rest + [(c, t[2])]])
            if t[0] == "meet":
                return _reduce(others + [rest + [(c, t[1])]]) + _reduce(others + [rest + [(c, t[2])]])
    return [hs]


def _leaf_text(hs):
    seqs = []
    for seq in hs:
        items = sorted(f"{frac_text(c)}.{'-' if t[0] == 'covar' else ''}{t[1]}" for c, t in seq)
        seqs.append(items)
    return sorted(seqs)


def join_plus_leaves():
    x, y = ("var", "x"), ("var", "y")
    goal = ("join", ("plus", ("scale", Fraction(2), x), ("scale", Fraction(2), _neg(y))),
            ("plus", y, _neg(x)))
    return [_leaf_text(h) for h in _reduce([[(Fraction(1), goal)]])]


def meet_leaves():
    goal = ("meet", ("var", "x"), ("var", "y"))
    return [_leaf_text(h) for h in _reduce([[(Fraction(1), goal)]])]


# ---------------------------------------------------------------- model evaluation by sympy


def markov_values():
    m = sympy.Matrix([[sympy.Rational(1, 3), sympy.Rational(1, 2)], [sympy.Rational(1, 3), 0]])
    u = sympy.Matrix([1, 1])
    one = m * u
    two = m * one
    return {"diamond_one": [str(v) for v in one], "diamond_diamond_one": [str(v) for v in two]}


def counterexample_values():
    m = sympy.Matrix([[sympy.Rational(1, 3), sympy.Rational(2, 3)], [0, 0]])
    a, b = sympy.Matrix([1, 0]), sympy.Matrix([0, 1])
    join = sympy.Matrix([max(p, q) for p, q in zip(a, b)])
    lhs = m * join
    ma, mb = m * a, m * b
    rhs = sympy.Matrix([max(p, q) for p, q in zip(ma, mb)])
    return {"diamond_of_join": [str(v) for v in lhs], "join_of_diamonds": [str(v) for v in rhs]}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "tests" / "data" / "oracles.json"))
    args = ap.parse_args()
    data = {
        "atomic_hr": atomic_corpus(),
        "multipliers_two_thirds_half": integer_multipliers_2_3(),
        "leaves_join_plus": join_plus_leaves(),
        "leaves_meet": meet_leaves(),
        "markov": markov_values(),
        "counterexample": counterexample_values(),
    }
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(json.dumps(data, indent=1) + "\n")
    n_yes = sum(e["derivable"] for e in data["atomic_hr"])
    print(f"wrote {args.out}: {len(data['atomic_hr'])} atomic goals ({n_yes} derivable)")


if __name__ == "__main__":
    main()
