"""Decision procedures for HR and HMR with certificate reconstruction.

Atomic HR goals reduce to one homogeneous linear system over sequent
multipliers.  Basic HMR goals add a 1/co-1 inequality and a recursive
condition on the single sequent left after cancelling atoms and stripping
one layer of diamonds.  When every leaf met on the way down is a single
sequent, that recursive condition is itself linear in the outer multipliers
and one LP decides the goal.  Otherwise candidate multipliers are tried and,
failing that, the question goes to an external SMT solver.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm

from . import fo
from .calculus import (C, DIAMOND, HMR, HR, ID, INIT, ONE, S, T, W, LayoutError, Rule, init, node,
                       premise_layout)
from .errors import InvalidWitness, SolverNotFound, SymbolicCoefficient
from .hypersequents import ATOMIC, Hypersequent, WeightedTerm, classify
from .linear import solve_lp
from .poly import Polynomial, coeff_add, coeff_mul, is_concrete
from .reduce import default_mode, reassemble, reduce
from .terms import CoOne, CoVar, Diamond, One, Scale, Var, scalar_variables

INTERNAL_INFEASIBLE = "InternalInfeasible"
SOLVER_UNSAT = "SolverUnsat"
SOLVER_TIMEOUT = "SolverTimeout"
NON_RATIONAL = "NonRationalModel"
SOLVER_UNAVAILABLE = "SolverUnavailable"
BUDGET_EXHAUSTED = "BudgetExhausted"


@dataclass
class DecideConfig:
    max_subsets: int = 256       # subset branches tried per basic goal
    max_candidates: int = 8      # multiplier points tried per subset when nonlinear
    use_solver: bool = True
    solver: fo.SolverConfig | None = None
    integer_limit: int = 64      # largest total copy count for the T-free C/S scheme


@dataclass
class Derivable:
    certificate: object
    multipliers: list = field(default_factory=list)

    def __bool__(self):
        return True


@dataclass
class NotDerivable:
    evidence: str = INTERNAL_INFEASIBLE

    def __bool__(self):
        return False


@dataclass
class Unknown:
    reason: str = SOLVER_TIMEOUT

    def __bool__(self):
        return False


# ---------------------------------------------------------------- helpers

def _profile(seq):
    """(net atom weights, net unit weight, items of the sequent under one diamond)."""
    atoms, ones, inner = {}, Fraction(0), []
    for item in seq:
        t, c = item.term, item.coeff
        if isinstance(t, Var):
            atoms[t.name] = coeff_add(atoms.get(t.name, Fraction(0)), c)
        elif isinstance(t, CoVar):
            atoms[t.name] = coeff_add(atoms.get(t.name, Fraction(0)), coeff_mul(-1, c))
        elif isinstance(t, One):
            ones = coeff_add(ones, c)
            inner.append(item)
        elif isinstance(t, CoOne):
            ones = coeff_add(ones, coeff_mul(-1, c))
            inner.append(item)
        elif isinstance(t, Diamond):
            inner.append(WeightedTerm(c, t.arg))
        else:
            raise ValueError(f"sequent is not basic: {seq}")
    return atoms, ones, inner


def _has_diamond(seq):
    return any(isinstance(i.term, Diamond) for i in seq)


def _inner_items(profiles, mult, keep=None):
    out = []
    for i, (_, _, inner) in enumerate(profiles):
        if keep is not None and i not in keep:
            continue
        for item in inner:
            out.append(WeightedTerm(coeff_mul(mult[i], item.coeff), item.term))
    return out


def _require_concrete(hs):
    for item in hs.items():
        if not is_concrete(item.coeff) or scalar_variables(item.term):
            raise SymbolicCoefficient("decision needs concrete rational coefficients")


def _subsets(m):
    """Proper subsets of range(m) by increasing size."""
    for k in range(m):
        yield from itertools.combinations(range(m), k)


def integer_multipliers(ts):
    """Smallest positive integer vector proportional to the rational vector ts."""
    ts = [Fraction(t) for t in ts]
    den = lcm(*(t.denominator for t in ts)) if ts else 1
    ns = [int(t * den) for t in ts]
    g = 0
    for n in ns:
        g = gcd(g, n)
    return [n // g for n in ns] if g else ns


# ---------------------------------------------------------------- reconstruction

class _Chain:
    """A linear stack of single-premise rules built from the goal upwards."""

    def __init__(self, seqs):
        self.cur = [list(s) for s in seqs]
        self.steps = []

    def apply(self, rule):
        try:
            prem = premise_layout(self.cur, rule)
        except LayoutError as exc:
            raise InvalidWitness(f"{rule.tag}: {exc.detail}") from None
        self.steps.append((self.cur, rule))
        self.cur = [list(s) for s in prem[0].seqs]

    def close(self, leaf):
        d = leaf
        for seqs, rule in reversed(self.steps):
            d = node(seqs, rule, (d,))
        return d


def _weigh_and_merge(hs, mult, integer_limit):
    """W away zero multipliers, scale (C copies or T), merge with S, cancel atoms with ID."""
    mult = [Fraction(t) for t in mult]
    if len(mult) != len(hs):
        raise InvalidWitness("one multiplier per sequent is needed")
    if any(t < 0 for t in mult) or not any(mult):
        raise InvalidWitness("multipliers must be non-negative and not all zero")
    ch = _Chain(hs)
    for i in reversed(range(len(mult))):
        if mult[i] == 0:
            ch.apply(Rule(W, seq=i))
    ws = [t for t in mult if t != 0]
    ns = integer_multipliers(ws)
    if sum(ns) <= integer_limit:
        for idx, n in enumerate(ns):
            for _ in range(n - 1):
                ch.apply(Rule(C, seq=idx))
    else:
        for idx, w in enumerate(ws):
            if w != 1:
                ch.apply(Rule(T, seq=idx, scalar=w))
    while len(ch.cur) > 1:
        ch.apply(Rule(S, seq=0, other=1))
    names = sorted({i.term.name for i in ch.cur[0] if isinstance(i.term, (Var, CoVar))})
    for x in names:
        idx = tuple(j for j, i in enumerate(ch.cur[0])
                    if isinstance(i.term, (Var, CoVar)) and i.term.name == x)
        ch.apply(Rule(ID, seq=0, var=x, items=idx))
    return ch


def reconstruct_atomic_derivation(hs, mult, integer_limit=64):
    """Derivation of an atomic hypersequent from multipliers solving its linear system."""
    ch = _weigh_and_merge(hs, mult, integer_limit)
    if ch.cur != [[]]:
        raise InvalidWitness("multipliers leave atoms uncancelled")
    return ch.close(init())


def reconstruct_basic_derivation(hs, mult, below, integer_limit=64):
    """Derivation of a basic hypersequent.

    below(H) must return a derivation of the single-sequent hypersequent H
    left after the diamond rule.
    """
    ch = _weigh_and_merge(hs, mult, integer_limit)
    seq = ch.cur[0]
    if any(isinstance(i.term, (Var, CoVar)) for i in seq):
        raise InvalidWitness("multipliers leave atoms uncancelled")
    if _has_diamond(seq):
        ch.apply(Rule(DIAMOND))
        return ch.close(below(Hypersequent(ch.cur)))
    if seq:
        ch.apply(Rule(ONE, seq=0, items=tuple(range(len(seq)))))
    return ch.close(init())


# ---------------------------------------------------------------- atomic HR

def atomic_system(hs):
    """Rows of the homogeneous equality system, one per variable."""
    names = sorted({i.term.name for i in hs.items()})
    rows = []
    for x in names:
        row = []
        for seq in hs:
            net = Fraction(0)
            for i in seq:
                if i.term.name == x:
                    net += i.coeff if isinstance(i.term, Var) else -i.coeff
            row.append(net)
        rows.append(row)
    return rows


def decide_atomic_hr(hs, config=None):
    config = config or DecideConfig()
    _require_concrete(hs)
    if classify(hs) != ATOMIC:
        raise ValueError("decide_atomic_hr needs an atomic hypersequent")
    rows = atomic_system(hs)
    m = len(hs)
    for k in range(m):
        pin = [Fraction(int(i == k)) for i in range(m)]
        res = solve_lp(m, rows + [pin], [0] * len(rows) + [1])
        if res.x is not None:
            d = reconstruct_atomic_derivation(hs, res.x, config.integer_limit)
            return Derivable(d, [tuple(res.x)])
    return NotDerivable(INTERNAL_INFEASIBLE)


# ---------------------------------------------------------------- basic HMR

def _row(c, names):
    """Linear polynomial in the multiplier names -> (coefficient vector, constant)."""
    p = Polynomial.lift(c)
    vec = [Fraction(0)] * len(names)
    const = Fraction(0)
    pos = {n: k for k, n in enumerate(names)}
    for mono, a in p.items():
        if not mono:
            const = a
        elif len(mono) == 1 and mono[0] in pos:
            vec[pos[mono[0]]] = a
        else:
            raise ValueError("constraint is not linear in the multipliers")
    return vec, const


def _collect(items, names, eqs, ges):
    """Linear conditions for |- items to be derivable; False if some leaf needs its own multipliers."""
    if not items:
        return True
    linear = True
    for leaf in reduce(Hypersequent([items]), HMR).leaves:
        if len(leaf) > 1:
            linear = False
            continue
        atoms, ones, inner = _profile(leaf[0])
        eqs.extend(_row(c, names) for c in atoms.values())
        ges.append(_row(ones, names))
        if _has_diamond(leaf[0]):
            linear = _collect(inner, names, eqs, ges) and linear
    return linear


class _System:
    """Relaxed linear system over the outer multipliers of a basic hypersequent."""

    def __init__(self, hs):
        self.m = m = len(hs)
        self.names = names = [f"t{i}" for i in range(m)]
        self.profiles = [_profile(s) for s in hs]
        beta = [Polynomial.var(n) for n in names]
        eqs, ges = [], []
        for x in sorted({x for p in self.profiles for x in p[0]}):
            total = sum((beta[i] * Polynomial.lift(p[0].get(x, 0)) for i, p in enumerate(self.profiles)),
                        Polynomial())
            eqs.append(_row(total, names))
        ones = sum((beta[i] * Polynomial.lift(p[1]) for i, p in enumerate(self.profiles)), Polynomial())
        ges.append(_row(ones, names))
        self.linear = _collect(_inner_items(self.profiles, beta), names, eqs, ges)
        self.eqs, self.ges = eqs, ges

    def lp(self, zero, objective=None):
        a_eq = [v for v, _ in self.eqs] + [[Fraction(1)] * self.m]
        b_eq = [-c for _, c in self.eqs] + [Fraction(1)]
        for i in zero:
            a_eq.append([Fraction(int(j == i)) for j in range(self.m)])
            b_eq.append(Fraction(0))
        a_ub = [[-a for a in v] for v, _ in self.ges]
        b_ub = [c for _, c in self.ges]
        return solve_lp(self.m, a_eq, b_eq, a_ub, b_ub, objective=objective, maximize=True)

    def candidates(self, zero, limit):
        pts = []
        for i in range(self.m):
            if i in zero:
                continue
            res = self.lp(zero, [Fraction(int(j == i)) for j in range(self.m)])
            if res.x is not None and res.x not in pts:
                pts.append(res.x)
        if len(pts) > 1:
            avg = [sum(col) / len(pts) for col in zip(*pts)]
            if avg not in pts:
                pts.insert(0, avg)
        return pts[:limit]

    def inner(self, mult):
        return Hypersequent([_inner_items(self.profiles, mult)])


def _try_multipliers(hs, system, mult, config):
    """Derivable verdict for concrete multipliers, or None."""
    below_cache = {}

    def below(h):
        v = decide(h, HMR, config)
        if not isinstance(v, Derivable):
            raise InvalidWitness("inner sequent is not derivable")
        below_cache["v"] = v
        return v.certificate

    try:
        d = reconstruct_basic_derivation(hs, mult, below, config.integer_limit)
    except InvalidWitness:
        return None
    inner = below_cache.get("v")
    return Derivable(d, [tuple(mult)] + (inner.multipliers if inner else []))


def decide_basic_hmr(hs, config=None):
    config = config or DecideConfig()
    _require_concrete(hs)
    if len(hs) == 1 and not hs[0]:
        return Derivable(init(), [])
    if classify(hs) == ATOMIC:
        return decide_atomic_hr(hs, config)
    system = _System(hs)
    tried = 0
    for zero in _subsets(system.m):
        if tried >= config.max_subsets:
            break
        tried += 1
        res = system.lp(zero)
        if res.x is None:
            if not zero:
                # the relaxation is infeasible for every subset at once
                return NotDerivable(INTERNAL_INFEASIBLE)
            continue
        if system.linear:
            v = _try_multipliers(hs, system, res.x, config)
            if v is not None:
                return v
            continue
        for mult in system.candidates(zero, config.max_candidates):
            v = _try_multipliers(hs, system, mult, config)
            if v is not None:
                return v
    if system.linear and tried >= 1:
        # exact characterization; the empty subset already covers all supports
        return NotDerivable(INTERNAL_INFEASIBLE)
    v = _solver_stage(hs, system, config)
    if isinstance(v, Unknown) and v.reason == SOLVER_UNAVAILABLE and tried >= config.max_subsets:
        return Unknown(BUDGET_EXHAUSTED)
    return v


def _solver_stage(hs, system, config):
    if not config.use_solver:
        return Unknown(SOLVER_UNAVAILABLE)
    scfg = config.solver or fo.load_solver_config()
    if not fo.solver_available(scfg):
        return Unknown(SOLVER_UNAVAILABLE)
    namer = _Namer()
    names = [namer() for _ in range(system.m)]
    beta = [Polynomial.var(n) for n in names]
    seen = set()
    for zero in _subsets(system.m):
        f = _subset_condition(hs, beta, zero, HMR, namer)
        script = fo.emit_smtlib(fo.simplify(f), get_model=True)
        try:
            out = fo.solve_external(script, scfg)
        except SolverNotFound:
            return Unknown(SOLVER_UNAVAILABLE)
        if isinstance(out, fo.Unsat):
            continue
        if isinstance(out, fo.SolverUnknown):
            seen.add(SOLVER_TIMEOUT)
            continue
        if any(n in out.nonrational for n in names):
            seen.add(NON_RATIONAL)
            continue
        mult = [out.model.get(n, Fraction(0)) for n in names]
        v = _try_multipliers(hs, system, mult, config)
        if v is not None:
            return v
        seen.add(NON_RATIONAL)
    if not seen:
        return NotDerivable(SOLVER_UNSAT)
    return Unknown(NON_RATIONAL if NON_RATIONAL in seen else SOLVER_TIMEOUT)


# ---------------------------------------------------------------- top level

def decide(hs, mode=None, config=None):
    config = config or DecideConfig()
    _require_concrete(hs)
    mode = mode or default_mode(hs)
    trace = reduce(hs, mode)
    certs, mults, unknown = [], [], None
    for leaf in trace.leaves:
        v = decide_atomic_hr(leaf, config) if mode == HR else decide_basic_hmr(leaf, config)
        if isinstance(v, NotDerivable):
            return v
        if isinstance(v, Unknown):
            unknown = unknown or v
            continue
        certs.append(v.certificate)
        mults.extend(v.multipliers)
    if unknown is not None:
        return unknown
    return Derivable(reassemble(trace, certs), mults)


# ---------------------------------------------------------------- formula construction

class _Namer:
    def __init__(self, prefix="b!"):
        self.prefix = prefix
        self.n = 0

    def __call__(self):
        self.n += 1
        return f"{self.prefix}{self.n}"


def _net(seq, pred):
    out = Polynomial()
    for item in seq:
        if pred(item.term):
            out = out + Polynomial.lift(item.coeff)
    return out


def _subset_condition(leaf, beta, zero, mode, namer):
    """Z, NZ, A (and for HMR: O and the inner formula) for one subset of zeroed multipliers."""
    parts = []
    for i, b in enumerate(beta):
        if i in zero:
            parts.append(fo.eq(b, 0))
        else:
            parts += [fo.le(0, b), fo.Not(fo.eq(b, 0))]
    names = sorted({i.term.name for i in leaf.items() if isinstance(i.term, (Var, CoVar))})
    for x in names:
        lhs = sum((b * _net(s, lambda t: isinstance(t, Var) and t.name == x) for b, s in zip(beta, leaf)),
                  Polynomial())
        rhs = sum((b * _net(s, lambda t: isinstance(t, CoVar) and t.name == x) for b, s in zip(beta, leaf)),
                  Polynomial())
        parts.append(fo.eq(lhs, rhs))
    if mode == HMR:
        ones = sum((b * _net(s, lambda t: isinstance(t, One)) for b, s in zip(beta, leaf)), Polynomial())
        coones = sum((b * _net(s, lambda t: isinstance(t, CoOne)) for b, s in zip(beta, leaf)), Polynomial())
        parts.append(fo.le(coones, ones))
        kept = [s for i, s in enumerate(leaf) if i not in zero]
        # without diamonds the ONE rule closes the branch once O holds
        if any(_has_diamond(s) for s in kept):
            inner = []
            for i, s in enumerate(leaf):
                if i not in zero:
                    inner += [WeightedTerm(coeff_mul(beta[i], it.coeff), it.term) for it in _profile(s)[2]]
            parts.append(_phi(Hypersequent([inner]), mode, namer))
    return fo.And(tuple(parts))


def _phi_leaf(leaf, mode, namer):
    if mode == HMR and len(leaf) == 1 and not leaf[0]:
        return fo.TRUE
    m = len(leaf)
    out = []
    for zero in _subsets(m):
        names = tuple(namer() for _ in range(m))
        beta = [Polynomial.var(n) for n in names]
        out.append(fo.Exists(names, _subset_condition(leaf, beta, zero, mode, namer)))
    return fo.Or(tuple(out))


def _phi(hs, mode, namer):
    return fo.And(tuple(_phi_leaf(leaf, mode, namer) for leaf in reduce(hs, mode).leaves))


def build_phi(hs, mode=None, simplify=True):
    """Formula over the scalar-variables of hs that holds exactly when hs is derivable.

    Only meaningful under the guards returned by guard_polynomials(hs).
    """
    mode = mode or default_mode(hs)
    f = _phi(hs, mode, _Namer())
    return fo.simplify(f) if simplify else f


def guard_polynomials(hs):
    """Non-constant coefficient polynomials of hs; each must be positive for hs to make sense."""
    out = []

    def add(c):
        if not is_concrete(c) and c not in out:
            out.append(c)

    def walk(t):
        if isinstance(t, Scale):
            add(t.coeff)
        for f in getattr(t, "fields", ()):
            v = getattr(t, f)
            if hasattr(v, "key") and not isinstance(v, Polynomial):
                walk(v)

    for item in hs.items():
        add(item.coeff)
        walk(item.term)
    return out


def emit_phi(hs, mode=None):
    """SMT-LIB2 script for build_phi(hs) with coefficient guards."""
    return fo.emit_smtlib(build_phi(hs, mode), guards=guard_polynomials(hs))
