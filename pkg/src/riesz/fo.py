"""First-order real-arithmetic formulas, SMT-LIB2 emission and an external solver client."""
from __future__ import annotations

import os
import re
import shlex
import shutil
import subprocess
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import ProtocolError, ShadowedBinder, SolverNotFound
from .poly import Polynomial

# ---------------------------------------------------------------- formulas


class FoFormula:
    __slots__ = ()


@dataclass(frozen=True)
class Truth(FoFormula):
    value: bool

    def __bool__(self):
        return self.value


TRUE, FALSE = Truth(True), Truth(False)


@dataclass(frozen=True)
class Eq(FoFormula):
    lhs: Polynomial
    rhs: Polynomial


@dataclass(frozen=True)
class Le(FoFormula):
    lhs: Polynomial
    rhs: Polynomial


@dataclass(frozen=True)
class Not(FoFormula):
    arg: FoFormula


@dataclass(frozen=True)
class And(FoFormula):
    args: tuple


@dataclass(frozen=True)
class Or(FoFormula):
    args: tuple


@dataclass(frozen=True)
class Exists(FoFormula):
    names: tuple
    body: FoFormula


def eq(a, b):
    return Eq(Polynomial.lift(a), Polynomial.lift(b))


def le(a, b):
    return Le(Polynomial.lift(a), Polynomial.lift(b))


def conj(*args):
    return And(tuple(args))


def disj(*args):
    return Or(tuple(args))


def free_variables(f):
    out = set()

    def go(g, bound):
        if isinstance(g, (Eq, Le)):
            out.update(v for v in g.lhs.variables() + g.rhs.variables() if v not in bound)
        elif isinstance(g, Not):
            go(g.arg, bound)
        elif isinstance(g, (And, Or)):
            for a in g.args:
                go(a, bound)
        elif isinstance(g, Exists):
            go(g.body, bound | set(g.names))
    go(f, frozenset())
    return out


def simplify(f):
    """Constant folding and flattening; preserves the meaning over the reals."""
    if isinstance(f, (Eq, Le)):
        diff = f.rhs - f.lhs
        if diff.is_constant():
            v = diff.constant_value()
            return TRUE if (v == 0 if isinstance(f, Eq) else v >= 0) else FALSE
        if isinstance(f, Eq) and f.lhs.sort_key() > f.rhs.sort_key():
            return Eq(f.rhs, f.lhs)
        return f
    if isinstance(f, Not):
        a = simplify(f.arg)
        if isinstance(a, Truth):
            return FALSE if a.value else TRUE
        if isinstance(a, Not):
            return a.arg
        return Not(a)
    if isinstance(f, (And, Or)):
        unit, zero = (TRUE, FALSE) if isinstance(f, And) else (FALSE, TRUE)
        out, seen = [], set()
        for a in f.args:
            a = simplify(a)
            if a == zero:
                return zero
            if a == unit:
                continue
            parts = a.args if type(a) is type(f) else (a,)
            for p in parts:
                if p not in seen:
                    seen.add(p)
                    out.append(p)
        if not out:
            return unit
        return out[0] if len(out) == 1 else type(f)(tuple(out))
    if isinstance(f, Exists):
        body = simplify(f.body)
        if isinstance(body, Truth):
            return body
        used = free_variables(body)
        names = tuple(n for n in f.names if n in used)
        return Exists(names, body) if names else body
    return f


def purely_existential(f, positive=True):
    if isinstance(f, Exists):
        return positive and purely_existential(f.body, positive)
    if isinstance(f, Not):
        return purely_existential(f.arg, not positive)
    if isinstance(f, (And, Or)):
        return all(purely_existential(a, positive) for a in f.args)
    return True


def _check_binders(f, free):
    seen = set(free)

    def go(g):
        if isinstance(g, Exists):
            for n in g.names:
                if n in seen:
                    raise ShadowedBinder(f"binder {n} is not fresh")
                seen.add(n)
            go(g.body)
        elif isinstance(g, Not):
            go(g.arg)
        elif isinstance(g, (And, Or)):
            for a in g.args:
                go(a)
    go(f)


# ---------------------------------------------------------------- emission

_SIMPLE = re.compile(r"^[A-Za-z_~!@$%^&*+=<>.?/-][A-Za-z0-9_~!@$%^&*+=<>.?/-]*$")


def smt_symbol(name):
    return name if _SIMPLE.match(name) else f"|{name}|"


def smt_rational(c):
    c = Fraction(c)
    mag = abs(c)
    text = f"{mag.numerator}.0" if mag.denominator == 1 else f"(/ {mag.numerator}.0 {mag.denominator}.0)"
    return f"(- {text})" if c < 0 else text


def smt_poly(p):
    terms = []
    for mono, c in p.items():
        factors = [smt_symbol(v) for v in mono]
        if not factors:
            terms.append(smt_rational(c))
        elif c == 1:
            terms.append(factors[0] if len(factors) == 1 else f"(* {' '.join(factors)})")
        else:
            terms.append(f"(* {smt_rational(c)} {' '.join(factors)})")
    if not terms:
        return "0.0"
    return terms[0] if len(terms) == 1 else f"(+ {' '.join(terms)})"


def smt_formula(f, hoist=False):
    if isinstance(f, Truth):
        return "true" if f.value else "false"
    if isinstance(f, Eq):
        return f"(= {smt_poly(f.lhs)} {smt_poly(f.rhs)})"
    if isinstance(f, Le):
        return f"(<= {smt_poly(f.lhs)} {smt_poly(f.rhs)})"
    if isinstance(f, Not):
        return f"(not {smt_formula(f.arg, hoist)})"
    if isinstance(f, (And, Or)):
        if not f.args:
            return "true" if isinstance(f, And) else "false"
        op = "and" if isinstance(f, And) else "or"
        return f"({op} {' '.join(smt_formula(a, hoist) for a in f.args)})"
    if isinstance(f, Exists):
        if hoist:
            return smt_formula(f.body, hoist)
        binders = " ".join(f"({smt_symbol(n)} Real)" for n in f.names)
        return f"(exists ({binders}) {smt_formula(f.body, hoist)})"
    raise TypeError(f"not a formula: {f!r}")


def _binders(f):
    out = []

    def go(g):
        if isinstance(g, Exists):
            out.extend(g.names)
            go(g.body)
        elif isinstance(g, Not):
            go(g.arg)
        elif isinstance(g, (And, Or)):
            for a in g.args:
                go(a)
    go(f)
    return out


def emit_smtlib(f, free_var_bounds=None, guards=(), get_model=False):
    """SMT-LIB2 script asserting f.

    free_var_bounds maps a free variable to "positive" or "unconstrained";
    unlisted free variables are unconstrained.  Each guard polynomial is
    asserted strictly positive.  Existentials in positive position are
    hoisted to declared constants, which gives a quantifier-free script.
    """
    bounds = dict(free_var_bounds or {})
    free = set(free_variables(f)) | set(bounds)
    for g in guards:
        free.update(Polynomial.lift(g).variables())
    _check_binders(f, free)
    hoist = purely_existential(f)
    consts = sorted(free) + (_binders(f) if hoist else [])
    lines = [f"(set-logic {'QF_NRA' if hoist else 'NRA'})"]
    lines += [f"(declare-const {smt_symbol(v)} Real)" for v in consts]
    for v in sorted(free):
        if bounds.get(v, "unconstrained") == "positive":
            lines.append(f"(assert (> {smt_symbol(v)} 0.0))")
    for g in guards:
        g = Polynomial.lift(g)
        if not g.is_constant():
            lines.append(f"(assert (> {smt_poly(g)} 0.0))")
    lines.append(f"(assert {smt_formula(f, hoist)})")
    lines.append("(check-sat)")
    if get_model:
        lines.append("(get-model)")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- solver client

@dataclass
class SolverConfig:
    command: list = field(default_factory=lambda: ["z3", "-in", "-smt2"])
    timeout_ms: int = 10000


def load_solver_config(cwd=None):
    """Defaults, then riesz.toml ([solver] command/timeout_ms), then environment."""
    cfg = SolverConfig()
    path = Path(cwd or os.getcwd()) / "riesz.toml"
    if path.is_file():
        try:
            import tomllib
        except ImportError:  # Python 3.10
            import tomli as tomllib
        data = tomllib.loads(path.read_text()).get("solver", {})
        if "command" in data:
            cmd = data["command"]
            cfg.command = shlex.split(cmd) if isinstance(cmd, str) else list(cmd)
        if "timeout_ms" in data:
            cfg.timeout_ms = int(data["timeout_ms"])
    if os.environ.get("RIESZ_SMT_CMD"):
        cfg.command = shlex.split(os.environ["RIESZ_SMT_CMD"])
    if os.environ.get("RIESZ_SMT_TIMEOUT_MS"):
        cfg.timeout_ms = int(os.environ["RIESZ_SMT_TIMEOUT_MS"])
    return cfg


def solver_available(config=None):
    config = config or load_solver_config()
    return bool(config.command) and shutil.which(config.command[0]) is not None


@dataclass
class Sat:
    model: dict
    nonrational: tuple = ()


@dataclass
class Unsat:
    pass


@dataclass
class SolverUnknown:
    reason: str = "unknown"


def solve_external(script, config=None):
    config = config or load_solver_config()
    if not config.command or shutil.which(config.command[0]) is None:
        raise SolverNotFound(f"solver command not found: {' '.join(config.command)}")
    if "(check-sat)" not in script:
        script = script + "\n(check-sat)\n"
    if "(get-model)" not in script:
        script = script + "(get-model)\n"
    try:
        proc = subprocess.run(config.command, input=script, capture_output=True, text=True,
                              timeout=config.timeout_ms / 1000)
    except subprocess.TimeoutExpired:
        return SolverUnknown("timeout")
    out = proc.stdout
    first = out.strip().split("\n", 1)[0].strip() if out.strip() else ""
    if first == "unsat":
        return Unsat()
    if first == "unknown":
        return SolverUnknown("unknown")
    if first != "sat":
        raise ProtocolError("unexpected solver output", out + proc.stderr)
    model, odd = parse_model(out.strip().split("\n", 1)[1] if "\n" in out.strip() else "")
    return Sat(model, tuple(sorted(odd)))


def _sexprs(text):
    tokens = re.findall(r'\(|\)|\|[^|]*\||"[^"]*"|[^\s()]+', text)
    stack, top = [], []
    for tok in tokens:
        if tok == "(":
            stack.append(top)
            top = []
        elif tok == ")":
            if not stack:
                raise ProtocolError("unbalanced model output", text)
            done = top
            top = stack.pop()
            top.append(done)
        else:
            top.append(tok)
    if stack:
        raise ProtocolError("unbalanced model output", text)
    return top


def _value(e):
    if isinstance(e, str):
        try:
            return Fraction(e)
        except ValueError:
            return None
    if not e:
        return None
    op, args = e[0], [_value(a) for a in e[1:]]
    if any(a is None for a in args):
        return None
    if op == "-" and len(args) == 1:
        return -args[0]
    if op == "-":
        return args[0] - sum(args[1:])
    if op == "+":
        return sum(args, Fraction(0))
    if op == "*":
        out = Fraction(1)
        for a in args:
            out *= a
        return out
    if op == "/" and len(args) == 2 and args[1] != 0:
        return args[0] / args[1]
    return None


def parse_model(text):
    """(rational bindings, names bound to something non-rational)."""
    model, odd = {}, set()
    for top in _sexprs(text):
        if not isinstance(top, list):
            continue
        defs = top[1:] if top and top[0] == "model" else top
        for d in defs:
            if isinstance(d, list) and len(d) == 5 and d[0] == "define-fun" and d[2] == []:
                name = d[1].strip("|")
                v = _value(d[4])
                if v is None:
                    odd.add(name)
                else:
                    model[name] = v
    return model, odd
