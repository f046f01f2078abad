"""Multivariate polynomials with exact rational coefficients.

Scalar-variables are plain names (the `$` sigil is surface syntax only).
A monomial is a sorted tuple of names with repetition, so `a^2 b` is
`("a", "a", "b")`.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .errors import ParseError


def _mono_mul(m1, m2):
    return tuple(sorted(m1 + m2))


def _mono_key(m):
    return (len(m), m)


class Polynomial:
    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        clean = {}
        for mono, c in (terms or {}).items():
            c = Fraction(c)
            if c != 0:
                mono = tuple(sorted(mono))
                clean[mono] = clean.get(mono, Fraction(0)) + c
                if clean[mono] == 0:
                    del clean[mono]
        self._terms = tuple(sorted(clean.items(), key=lambda kv: _mono_key(kv[0])))
        self._hash = None

    @classmethod
    def const(cls, c):
        return cls({(): Fraction(c)})

    @classmethod
    def var(cls, name):
        return cls({(name,): Fraction(1)})

    @staticmethod
    def lift(x):
        return x if isinstance(x, Polynomial) else Polynomial.const(x)

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms

    def is_zero(self):
        return not self._terms

    def is_constant(self):
        return all(m == () for m, _ in self._terms)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._terms[0][1] if self._terms else Fraction(0)

    def variables(self):
        return sorted({v for m, _ in self._terms for v in m})

    def degree(self):
        return max((len(m) for m, _ in self._terms), default=0)

    def __add__(self, other):
        if not isinstance(other, (Polynomial, int, Fraction)):
            return NotImplemented
        other = Polynomial.lift(other)
        acc = dict(self._terms)
        for m, c in other._terms:
            acc[m] = acc.get(m, Fraction(0)) + c
        return Polynomial(acc)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({m: -c for m, c in self._terms})

    def __sub__(self, other):
        if not isinstance(other, (Polynomial, int, Fraction)):
            return NotImplemented
        return self + (-Polynomial.lift(other))

    def __rsub__(self, other):
        return Polynomial.lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, (Polynomial, int, Fraction)):
            return NotImplemented
        other = Polynomial.lift(other)
        acc = {}
        for m1, c1 in self._terms:
            for m2, c2 in other._terms:
                m = _mono_mul(m1, m2)
                acc[m] = acc.get(m, Fraction(0)) + c1 * c2
        return Polynomial(acc)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        out = Polynomial.const(1)
        for _ in range(n):
            out = out * self
        return out

    def evaluate(self, env):
        total = Fraction(0)
        for m, c in self._terms:
            v = c
            for name in m:
                v *= Fraction(env[name])
            total += v
        return total

    def substitute(self, env):
        """Partially evaluate: names bound in env are replaced by constants."""
        out = Polynomial()
        for m, c in self._terms:
            term = Polynomial.const(c)
            for name in m:
                term = term * (Polynomial.const(env[name]) if name in env else Polynomial.var(name))
            out = out + term
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(other)
        return isinstance(other, Polynomial) and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(("poly", self._terms))
        return self._hash

    def sort_key(self):
        return tuple((_mono_key(m), c) for m, c in self._terms)

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for m, c in self._terms:
            mono = _mono_str(m)
            mag = abs(c)
            if not mono:
                body = _frac_str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{_frac_str(mag)}*{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"Polynomial({str(self)!r})"


def _frac_str(c):
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _mono_str(m):
    out = []
    i = 0
    while i < len(m):
        j = i
        while j < len(m) and m[j] == m[i]:
            j += 1
        out.append(f"${m[i]}" + (f"^{j - i}" if j - i > 1 else ""))
        i = j
    return "*".join(out)


# Coefficients are either positive Fractions or non-constant Polynomials.

def normalize_coeff(c):
    if isinstance(c, Polynomial):
        return c.constant_value() if c.is_constant() else c
    return Fraction(c)


def is_concrete(c):
    return not isinstance(c, Polynomial)


def coeff_mul(a, b):
    if is_concrete(a) and is_concrete(b):
        return a * b
    return normalize_coeff(Polynomial.lift(a) * Polynomial.lift(b))


def coeff_add(a, b):
    if is_concrete(a) and is_concrete(b):
        return a + b
    return normalize_coeff(Polynomial.lift(a) + Polynomial.lift(b))


def coeff_sum(cs):
    total = Fraction(0)
    for c in cs:
        total = coeff_add(total, c)
    return total


def coeff_key(c):
    if isinstance(c, Polynomial):
        return (1, c.sort_key())
    # floats compare fast and preserve value order; exact parts break ties
    return (0, float(c), c.numerator, c.denominator)


def coeff_str(c):
    """Surface form used inside hypersequent text (`coeff.term`)."""
    if isinstance(c, Polynomial):
        vs = c.variables()
        if c == Polynomial.var(vs[0]) and len(vs) == 1:
            return f"${vs[0]}"
        return f"({c})"
    return _frac_str(c)


_POLY_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|\$(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^()²]))")


def parse_polynomial(text, offset=0):
    """Parse `$a^2 - 3/2*$b + 1` style text into a Polynomial."""
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _POLY_TOKEN.match(text, pos)
        if not m:
            raise ParseError("bad polynomial token", offset + pos, "number, $name or operator")
        kind = "num" if m.group("num") else "name" if m.group("name") else "op"
        tokens.append((kind, m.group(kind), offset + m.start(kind)))
        pos = m.end()
    tokens.append(("end", None, offset + len(text)))
    i = 0

    def peek():
        return tokens[i]

    def take():
        nonlocal i
        i += 1
        return tokens[i - 1]

    def expr():
        out = term()
        while peek()[1] in ("+", "-") and peek()[0] == "op":
            op = take()[1]
            rhs = term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term():
        out = factor()
        while True:
            k, v, _ = peek()
            if k == "op" and v == "*":
                take()
                out = out * factor()
            elif k in ("num", "name") or (k == "op" and v == "("):
                out = out * factor()
            else:
                return out

    def factor():
        base = unary()
        k, v, p = peek()
        if k == "op" and v == "^":
            take()
            k2, v2, p2 = take()
            if k2 != "num" or "/" in v2:
                raise ParseError("exponent must be a natural number", p2, "integer")
            return base ** int(v2)
        if k == "op" and v == "²":
            take()
            return base ** 2
        return base

    def unary():
        k, v, p = peek()
        if k == "op" and v == "-":
            take()
            return -unary()
        return atom()

    def atom():
        k, v, p = take()
        if k == "num":
            return Polynomial.const(Fraction(v))
        if k == "name":
            return Polynomial.var(v)
        if k == "op" and v == "(":
            out = expr()
            k2, v2, p2 = take()
            if v2 != ")":
                raise ParseError("unbalanced parenthesis", p2, ")")
            return out
        raise ParseError("unexpected token in polynomial", p, "number, $name or (")

    result = expr()
    if peek()[0] != "end":
        raise ParseError("trailing input in polynomial", peek()[2], "end of polynomial")
    return result
