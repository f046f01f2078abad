"""Terms of (modal) Riesz spaces: syntax, negation normal form, evaluation."""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import (DimensionMismatch, InvalidModel, NonPositiveScalar, SymbolicCoefficient,
                     TermSyntaxError, UnboundVariable)
from .poly import Polynomial, coeff_key, coeff_mul, is_concrete, normalize_coeff, parse_polynomial


class Term:
    """Immutable term node. Equality and hashing go through a structural key."""

    __slots__ = ("_key", "_hash")
    TAG = -1
    fields = ()

    def __init__(self):
        self._key = None
        self._hash = None

    def _make_key(self):
        raise NotImplementedError

    def key(self):
        if self._key is None:
            self._key = self._make_key()
        return self._key

    def __eq__(self, other):
        return self is other or (isinstance(other, Term) and self.key() == other.key())

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __lt__(self, other):
        return self.key() < other.key()

    def __repr__(self):
        return f"{type(self).__name__}({', '.join(repr(getattr(self, f)) for f in self.fields)})"

    def __str__(self):
        return term_str(self)


class Var(Term):
    __slots__ = ("name",)
    TAG = 0
    fields = ("name",)

    def __init__(self, name):
        super().__init__()
        self.name = name

    def _make_key(self):
        return (0, self.name)


class CoVar(Term):
    __slots__ = ("name",)
    TAG = 1
    fields = ("name",)

    def __init__(self, name):
        super().__init__()
        self.name = name

    def _make_key(self):
        return (1, self.name)


class Zero(Term):
    __slots__ = ()
    TAG = 2

    def _make_key(self):
        return (2,)


class One(Term):
    __slots__ = ()
    TAG = 3

    def _make_key(self):
        return (3,)


class CoOne(Term):
    __slots__ = ()
    TAG = 4

    def _make_key(self):
        return (4,)


class Neg(Term):
    __slots__ = ("arg",)
    TAG = 5
    fields = ("arg",)

    def __init__(self, arg):
        super().__init__()
        self.arg = arg

    def _make_key(self):
        return (5, self.arg.key())


class Scale(Term):
    __slots__ = ("coeff", "arg")
    TAG = 6
    fields = ("coeff", "arg")

    def __init__(self, coeff, arg):
        super().__init__()
        coeff = normalize_coeff(coeff)
        if is_concrete(coeff) and coeff <= 0:
            raise NonPositiveScalar("scalar must be strictly positive")
        self.coeff = coeff
        self.arg = arg

    def _make_key(self):
        return (6, self.arg.key(), coeff_key(self.coeff))


class _Binary(Term):
    __slots__ = ("left", "right")
    fields = ("left", "right")

    def __init__(self, left, right):
        super().__init__()
        self.left = left
        self.right = right

    def _make_key(self):
        return (self.TAG, self.left.key(), self.right.key())


class Plus(_Binary):
    __slots__ = ()
    TAG = 7


class Join(_Binary):
    __slots__ = ()
    TAG = 8


class Meet(_Binary):
    __slots__ = ()
    TAG = 9


class Diamond(Term):
    __slots__ = ("arg",)
    TAG = 10
    fields = ("arg",)

    def __init__(self, arg):
        super().__init__()
        self.arg = arg

    def _make_key(self):
        return (10, self.arg.key())


ZERO, ONE, COONE = Zero(), One(), CoOne()


def is_nnf(t):
    if isinstance(t, Neg):
        return False
    if isinstance(t, (Scale, Diamond)):
        return is_nnf(t.arg)
    if isinstance(t, _Binary):
        return is_nnf(t.left) and is_nnf(t.right)
    return True


def is_literal(t):
    return isinstance(t, (Var, CoVar))


def has_modal(t):
    """True if the term mentions the unit or the modality (outside HR)."""
    if isinstance(t, (One, CoOne, Diamond)):
        return True
    if isinstance(t, (Scale, Neg)):
        return has_modal(t.arg)
    if isinstance(t, _Binary):
        return has_modal(t.left) or has_modal(t.right)
    return False


def variables(t):
    out = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, (Var, CoVar)):
            out.add(u.name)
        elif isinstance(u, (Scale, Neg, Diamond)):
            stack.append(u.arg)
        elif isinstance(u, _Binary):
            stack.extend((u.left, u.right))
    return out


def scalar_variables(t):
    out = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Scale):
            if isinstance(u.coeff, Polynomial):
                out.update(u.coeff.variables())
            stack.append(u.arg)
        elif isinstance(u, (Neg, Diamond)):
            stack.append(u.arg)
        elif isinstance(u, _Binary):
            stack.extend((u.left, u.right))
    return out


def connective_count(t):
    if isinstance(t, (Scale, Neg, Diamond)):
        return 1 + connective_count(t.arg)
    if isinstance(t, _Binary):
        return 1 + connective_count(t.left) + connective_count(t.right)
    return 0


# ---------------------------------------------------------------- NNF

def to_nnf(t):
    return _nnf(t, False)


def _nnf(t, neg):
    if isinstance(t, Var):
        return CoVar(t.name) if neg else t
    if isinstance(t, CoVar):
        return Var(t.name) if neg else t
    if isinstance(t, Zero):
        return ZERO
    if isinstance(t, One):
        return COONE if neg else ONE
    if isinstance(t, CoOne):
        return ONE if neg else COONE
    if isinstance(t, Neg):
        return _nnf(t.arg, not neg)
    if isinstance(t, Scale):
        return Scale(t.coeff, _nnf(t.arg, neg))
    if isinstance(t, Plus):
        return Plus(_nnf(t.left, neg), _nnf(t.right, neg))
    if isinstance(t, Join):
        cls = Meet if neg else Join
        return cls(_nnf(t.left, neg), _nnf(t.right, neg))
    if isinstance(t, Meet):
        cls = Join if neg else Meet
        return cls(_nnf(t.left, neg), _nnf(t.right, neg))
    if isinstance(t, Diamond):
        return Diamond(_nnf(t.arg, neg))
    raise TypeError(f"not a term: {t!r}")


def negate_nnf(t):
    """The syntactic negation (bar) of an NNF term."""
    if isinstance(t, Neg):
        raise ValueError("negate_nnf expects a term in negation normal form")
    return _nnf(t, True)


def embed(t):
    """View an NNF term as a raw term (CoVar -> Neg Var, CoOne -> Neg One)."""
    if isinstance(t, CoVar):
        return Neg(Var(t.name))
    if isinstance(t, CoOne):
        return Neg(ONE)
    if isinstance(t, Scale):
        return Scale(t.coeff, embed(t.arg))
    if isinstance(t, Diamond):
        return Diamond(embed(t.arg))
    if isinstance(t, _Binary):
        return type(t)(embed(t.left), embed(t.right))
    return t


def substitute(t, x, b):
    """Replace x by b and the co-variable of x by bar(b)."""
    bbar = None

    def go(u):
        nonlocal bbar
        if isinstance(u, Var):
            return b if u.name == x else u
        if isinstance(u, CoVar):
            if u.name != x:
                return u
            if bbar is None:
                bbar = negate_nnf(b)
            return bbar
        if isinstance(u, Scale):
            return Scale(u.coeff, go(u.arg))
        if isinstance(u, (Diamond, Neg)):
            return type(u)(go(u.arg))
        if isinstance(u, _Binary):
            return type(u)(go(u.left), go(u.right))
        return u

    return go(t)


def scale_coefficients(t, env):
    """Instantiate symbolic scalars of t under env (name -> rational)."""
    if isinstance(t, Scale):
        c = t.coeff
        if isinstance(c, Polynomial):
            c = normalize_coeff(c.substitute(env))
        return Scale(c, scale_coefficients(t.arg, env))
    if isinstance(t, (Diamond, Neg)):
        return type(t)(scale_coefficients(t.arg, env))
    if isinstance(t, _Binary):
        return type(t)(scale_coefficients(t.left, env), scale_coefficients(t.right, env))
    return t


# ---------------------------------------------------------------- evaluation

@dataclass(frozen=True)
class ModalModel:
    """R^n with a substochastic matrix for the modality and a unit vector."""

    n: int
    matrix: tuple
    unit: tuple

    def __post_init__(self):
        if self.n < 1:
            raise InvalidModel("dimension must be positive")
        mat = tuple(tuple(Fraction(v) for v in row) for row in self.matrix)
        unit = tuple(Fraction(v) for v in self.unit)
        if len(mat) != self.n or any(len(row) != self.n for row in mat) or len(unit) != self.n:
            raise InvalidModel("matrix/unit shape does not match dimension")
        for row in mat:
            if any(v < 0 for v in row) or sum(row) > 1:
                raise InvalidModel("matrix must be substochastic")
        if any(v < 0 for v in unit):
            raise InvalidModel("unit must be non-negative")
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "unit", unit)
        if any(a > b for a, b in zip(self.apply(unit), unit)):
            raise InvalidModel("the modality must not increase the unit")

    @classmethod
    def scalar(cls, c=1, unit=1):
        """One-dimensional model where the modality multiplies by c."""
        return cls(1, ((c,),), (unit,))

    @classmethod
    def from_json(cls, data):
        return cls(int(data["n"]), data["matrix"], data.get("unit", ["1"] * int(data["n"])))

    def apply(self, v):
        return tuple(sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in self.matrix)


def eval_modal(t, model, env):
    """Evaluate t pointwise in the model; env maps names to rational vectors."""
    n = model.n
    vecs = {}
    for name, val in env.items():
        if isinstance(val, (list, tuple)):
            vec = tuple(Fraction(v) for v in val)
        else:
            vec = (Fraction(val),) * 1
        if len(vec) != n:
            raise DimensionMismatch(f"variable {name} has dimension {len(vec)}, model has {n}")
        vecs[name] = vec
    zero = (Fraction(0),) * n

    def go(u):
        if isinstance(u, Var):
            if u.name not in vecs:
                raise UnboundVariable(u.name)
            return vecs[u.name]
        if isinstance(u, CoVar):
            if u.name not in vecs:
                raise UnboundVariable(u.name)
            return tuple(-a for a in vecs[u.name])
        if isinstance(u, Zero):
            return zero
        if isinstance(u, One):
            return model.unit
        if isinstance(u, CoOne):
            return tuple(-a for a in model.unit)
        if isinstance(u, Neg):
            return tuple(-a for a in go(u.arg))
        if isinstance(u, Scale):
            if not is_concrete(u.coeff):
                raise SymbolicCoefficient(str(u.coeff))
            c = u.coeff
            return tuple(c * a for a in go(u.arg))
        if isinstance(u, Plus):
            return tuple(a + b for a, b in zip(go(u.left), go(u.right)))
        if isinstance(u, Join):
            return tuple(max(a, b) for a, b in zip(go(u.left), go(u.right)))
        if isinstance(u, Meet):
            return tuple(min(a, b) for a, b in zip(go(u.left), go(u.right)))
        if isinstance(u, Diamond):
            return model.apply(go(u.arg))
        raise TypeError(f"not a term: {u!r}")

    return go(t)


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<svar>\$[A-Za-z_][A-Za-z0-9_]*)|(?P<spoly>\$\()"
    r"|(?P<var>[a-z][a-zA-Z0-9_]*)|(?P<op><>|\\/|/\\|[-+*()]))"
)


def _tokenize(text):
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            nxt = len(text) - len(text[pos:].lstrip())
            raise TermSyntaxError("unexpected character", nxt, "term")
        kind = m.lastgroup
        start = m.start(kind)
        if kind == "spoly":
            depth = 1
            j = m.end()
            while j < len(text) and depth:
                depth += {"(": 1, ")": -1}.get(text[j], 0)
                j += 1
            if depth:
                raise TermSyntaxError("unbalanced scalar polynomial", start, ")")
            toks.append(("spoly", text[m.end():j - 1], start))
            pos = j
            continue
        toks.append((kind, m.group(kind), start))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


_OPERAND_START = {"num", "svar", "spoly", "var"}


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def starts_operand(self, tok):
        kind, val, _ = tok
        return kind in _OPERAND_START or (kind == "op" and val in ("(", "-", "<>", "*"))

    def parse(self):
        t = self.lattice()
        kind, val, pos = self.peek()
        if kind != "end":
            raise TermSyntaxError(f"unexpected {val!r}", pos, "end of term")
        return t

    def lattice(self):
        t = self.sum()
        op_seen = None
        while self.peek()[0] == "op" and self.peek()[1] in ("\\/", "/\\"):
            _, op, pos = self.take()
            if op_seen is not None and op != op_seen:
                raise TermSyntaxError("mixing \\/ and /\\ needs parentheses", pos, op_seen)
            op_seen = op
            rhs = self.sum()
            t = Join(t, rhs) if op == "\\/" else Meet(t, rhs)
        return t

    def sum(self):
        t = self.scaled()
        while self.peek()[0] == "op" and self.peek()[1] == "+":
            self.take()
            t = Plus(t, self.scaled())
        return t

    def scalar_value(self, tok):
        kind, val, pos = tok
        if kind == "num":
            return Fraction(val)
        if kind == "svar":
            return Polynomial.var(val[1:])
        return normalize_coeff(parse_polynomial(val, pos + 2))

    def scaled(self):
        kind, val, pos = self.peek()
        if kind in ("num", "svar", "spoly"):
            nxt = self.peek(1)
            if self.starts_operand(nxt):
                self.take()
                c = self.scalar_value((kind, val, pos))
                if is_concrete(c) and c <= 0:
                    raise NonPositiveScalar("scalar must be strictly positive", pos, "positive scalar")
                if nxt[0] == "op" and nxt[1] == "*":
                    self.take()
                return Scale(c, self.scaled())
            if kind == "num":
                self.take()
                if Fraction(val) == 0:
                    return ZERO
                if Fraction(val) == 1:
                    return ONE
                raise TermSyntaxError("scalar without operand", nxt[2], "operand")
            raise TermSyntaxError("scalar-variable without operand", nxt[2], "operand")
        return self.unary()

    def unary(self):
        kind, val, pos = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return Neg(self.scaled())
        if kind == "op" and val == "<>":
            self.take()
            return Diamond(self.scaled())
        return self.atom()

    def atom(self):
        kind, val, pos = self.take()
        if kind == "var":
            return Var(val)
        if kind == "op" and val == "(":
            t = self.lattice()
            k2, v2, p2 = self.take()
            if not (k2 == "op" and v2 == ")"):
                raise TermSyntaxError("expected closing parenthesis", p2, ")")
            return t
        expected = "variable, constant or ("
        raise TermSyntaxError(f"unexpected {val!r}" if val else "unexpected end", pos, expected)


def parse_term(text):
    """Parse surface syntax into a raw term (negation is a node)."""
    return _Parser(text).parse()


def parse_nnf(text):
    return to_nnf(parse_term(text))


# ---------------------------------------------------------------- printing

def _scalar_text(c):
    if isinstance(c, Polynomial):
        vs = c.variables()
        if len(vs) == 1 and c == Polynomial.var(vs[0]):
            return f"${vs[0]}"
        return f"$({c})"
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def term_str(t):
    """Render t in the parseable surface syntax."""
    return _render(t)


def _render(t):
    if isinstance(t, Var):
        return t.name
    if isinstance(t, CoVar):
        return f"-{t.name}"
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, One):
        return "1"
    if isinstance(t, CoOne):
        return "-1"
    if isinstance(t, (Neg, Diamond)):
        prefix = "-" if isinstance(t, Neg) else "<>"
        return prefix + _at_scaled(t.arg)
    if isinstance(t, Scale):
        return f"{_scalar_text(t.coeff)}*{_at_scaled(t.arg)}"
    if isinstance(t, Plus):
        left = _render(t.left) if not isinstance(t.left, (Join, Meet)) else f"({_render(t.left)})"
        right = _at_scaled(t.right)
        return f"{left} + {right}"
    if isinstance(t, (Join, Meet)):
        op = "\\/" if isinstance(t, Join) else "/\\"
        left = _render(t.left)
        if isinstance(t.left, (Join, Meet)) and type(t.left) is not type(t):
            left = f"({left})"
        right = _render(t.right)
        if isinstance(t.right, (Join, Meet)):
            right = f"({right})"
        return f"{left} {op} {right}"
    raise TypeError(f"not a term: {t!r}")


def _at_scaled(t):
    s = _render(t)
    return f"({s})" if isinstance(t, (Plus, Join, Meet)) else s


def term_size(t):
    if isinstance(t, (Scale, Neg, Diamond)):
        return 1 + term_size(t.arg)
    if isinstance(t, _Binary):
        return 1 + term_size(t.left) + term_size(t.right)
    return 1
