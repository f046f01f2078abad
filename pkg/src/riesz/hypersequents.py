"""Weighted terms, sequents and hypersequents in canonical multiset form."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import EmptyHypersequent, NonPositiveScalar, ParseError, TermSyntaxError
from .poly import Polynomial, coeff_key, coeff_str, is_concrete, normalize_coeff, parse_polynomial
from .terms import (ZERO, CoOne, CoVar, Diamond, Join, One, Plus, Scale, Term, Var, parse_nnf,
                    term_str, to_nnf)


class WeightedTerm:
    __slots__ = ("coeff", "term", "_key")

    def __init__(self, coeff, term):
        if type(coeff) is not Fraction:
            coeff = normalize_coeff(coeff)
        if type(coeff) is Fraction and coeff <= 0:
            raise NonPositiveScalar("weights must be strictly positive")
        self.coeff = coeff
        self.term = term
        self._key = None

    def key(self):
        if self._key is None:
            self._key = (self.term.key(), coeff_key(self.coeff))
        return self._key

    def __eq__(self, other):
        return isinstance(other, WeightedTerm) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __lt__(self, other):
        return self.key() < other.key()

    def scaled(self, r):
        from .poly import coeff_mul
        return WeightedTerm(coeff_mul(r, self.coeff), self.term)

    def __repr__(self):
        return f"WeightedTerm({self.coeff!r}, {self.term!r})"

    def __str__(self):
        return f"{coeff_str(self.coeff)}.{_item_term_text(self.term)}"


def wt(coeff, term):
    """Convenience constructor accepting term text."""
    if isinstance(term, str):
        term = parse_nnf(term)
    if isinstance(coeff, str):
        coeff = Fraction(coeff)
    return WeightedTerm(coeff, term)


def _item_term_text(t):
    s = term_str(t)
    return s if isinstance(t, (Var, CoVar, One, CoOne)) or t == ZERO else f"({s})"


class Sequent(tuple):
    """A canonical (sorted) tuple of weighted terms."""

    __slots__ = ()

    def __new__(cls, items=()):
        return super().__new__(cls, sorted(items, key=WeightedTerm.key))

    def key(self):
        return tuple(i.key() for i in self)

    def __str__(self):
        return "|- " + ", ".join(str(i) for i in self) if self else "|-"


class Hypersequent(tuple):
    """A canonical non-empty tuple of sequents."""

    __slots__ = ()

    def __new__(cls, sequents):
        seqs = [s if isinstance(s, Sequent) else Sequent(s) for s in sequents]
        if not seqs:
            raise EmptyHypersequent("a hypersequent needs at least one sequent")
        seqs.sort(key=Sequent.key)
        return super().__new__(cls, seqs)

    @property
    def sequents(self):
        return tuple(self)

    def key(self):
        return tuple(s.key() for s in self)

    def __str__(self):
        return " | ".join(str(s) for s in self)

    def is_concrete(self):
        return all(is_concrete(i.coeff) and not _has_symbolic(i.term) for s in self for i in s)

    def items(self):
        for s in self:
            yield from s


def _has_symbolic(t):
    from .terms import scalar_variables
    return bool(scalar_variables(t))


def canonicalize(seqs):
    """Canonical hypersequent of a positional list of sequents plus index maps.

    Returns (hs, seq_map, item_maps) where seq_map[p] is the canonical index of
    positional sequent p and item_maps[p][j] the canonical position of its item j.
    """
    keyed = []
    for p, seq in enumerate(seqs):
        order = sorted(range(len(seq)), key=lambda j: seq[j].key())
        item_map = [0] * len(seq)
        for rank, j in enumerate(order):
            item_map[j] = rank
        sorted_seq = tuple.__new__(Sequent, [seq[j] for j in order])
        keyed.append((sorted_seq.key(), p, sorted_seq, item_map))
    if not keyed:
        raise EmptyHypersequent("a hypersequent needs at least one sequent")
    keyed.sort(key=lambda e: (e[0], e[1]))
    seq_map = [0] * len(seqs)
    item_maps = [None] * len(seqs)
    ordered = []
    for rank, (_, p, sseq, imap) in enumerate(keyed):
        seq_map[p] = rank
        item_maps[p] = imap
        ordered.append(sseq)
    return tuple.__new__(Hypersequent, ordered), seq_map, item_maps


def align(seqs, hs):
    """Map a positional sequent list onto an equal canonical hypersequent.

    Returns (seq_map, item_maps) as in canonicalize; raises ValueError if the
    multisets differ.
    """
    canon, seq_map, item_maps = canonicalize(seqs)
    if canon.key() != hs.key():
        raise ValueError("positional hypersequent does not match canonical one")
    return seq_map, item_maps


# ---------------------------------------------------------------- parsing

_SEQ_SPLIT = re.compile(r"\|(?!-)")


def _split_top(text, sep, base):
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == sep and depth == 0:
            parts.append((text[start:i], base + start))
            start = i + 1
    parts.append((text[start:], base + start))
    return parts


_NUM = re.compile(r"\s*(\d+(?:/\d+)?)\s*\.")
_SVAR = re.compile(r"\s*\$([A-Za-z_][A-Za-z0-9_]*)\s*\.")


def _parse_item(text, base):
    num, svar = _NUM.match(text), _SVAR.match(text)
    if num is not None:
        coeff = Fraction(num.group(1))
        rest, off = text[num.end():], base + num.end()
    elif svar is not None:
        m = svar
        coeff = Polynomial.var(m.group(1))
        rest, off = text[m.end():], base + m.end()
    else:
        stripped = text.lstrip()
        lead = len(text) - len(stripped)
        if not stripped.startswith("("):
            raise TermSyntaxError("expected a coefficient", base + lead, "coeff.term")
        depth = 0
        for j, ch in enumerate(stripped):
            depth += {"(": 1, ")": -1}.get(ch, 0)
            if depth == 0:
                break
        if depth:
            raise TermSyntaxError("unbalanced coefficient", base + lead, ")")
        coeff = normalize_coeff(parse_polynomial(stripped[1:j], base + lead + 1))
        after = stripped[j + 1:]
        dot = after.lstrip()
        if not dot.startswith("."):
            raise TermSyntaxError("expected '.' after coefficient", base + lead + j + 1, ".")
        skip = len(after) - len(dot) + 1
        rest, off = after[skip:], base + lead + j + 1 + skip
    if is_concrete(coeff) and coeff <= 0:
        raise NonPositiveScalar("weights must be strictly positive", base, "positive weight")
    if not rest.strip():
        raise TermSyntaxError("missing term after coefficient", off, "term")
    try:
        term = parse_nnf(rest)
    except ParseError as exc:
        pos = None if exc.position is None else exc.position + off
        raise type(exc)(str(exc).split(" at ")[0], pos, exc.expected) from None
    return WeightedTerm(coeff, term)


def parse_hypersequent(text):
    """Parse `|- c.A, c.B | |- ...` into a canonical Hypersequent."""
    seqs = []
    for chunk, base in _chunks(text):
        body = chunk.strip()
        if not body:
            raise EmptyHypersequent("empty component between separators", base)
        if not body.startswith("|-"):
            raise TermSyntaxError("sequent must start with |-", base, "|-")
        inner_off = base + (len(chunk) - len(chunk.lstrip())) + 2
        inner = body[2:]
        items = []
        if inner.strip():
            for part, pbase in _split_top(inner, ",", inner_off):
                if not part.strip():
                    raise TermSyntaxError("empty item", pbase, "coeff.term")
                items.append(_parse_item(part, pbase))
        seqs.append(items)
    return Hypersequent(seqs)


def _chunks(text):
    out, start = [], 0
    for m in _SEQ_SPLIT.finditer(text):
        out.append((text[start:m.start()], start))
        start = m.end()
    out.append((text[start:], start))
    return out


# ---------------------------------------------------------------- JSON

def coeff_to_json(c):
    if isinstance(c, Polynomial):
        return f"({c})"
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def coeff_from_json(s):
    s = str(s).strip()
    if s.startswith("(") or "$" in s:
        body = s[1:-1] if s.startswith("(") else s
        return normalize_coeff(parse_polynomial(body))
    return Fraction(s)


def hypersequent_to_json(hs):
    return {"sequents": [[{"coeff": coeff_to_json(i.coeff), "term": term_str(i.term)} for i in s]
                         for s in hs]}


def hypersequent_from_json(data):
    if isinstance(data, str):
        data = json.loads(data)
    seqs = []
    for s in data["sequents"]:
        seqs.append([WeightedTerm(coeff_from_json(i["coeff"]), parse_nnf(i["term"])) for i in s])
    return Hypersequent(seqs)


# ---------------------------------------------------------------- semantics

def sequent_interpretation(seq):
    out = None
    for item in seq:
        t = Scale(item.coeff, item.term)
        out = t if out is None else Plus(out, t)
    return ZERO if out is None else out


def interpretation(hs):
    """Join over sequents of the sum of their weighted terms."""
    out = None
    for seq in hs:
        t = sequent_interpretation(seq)
        out = t if out is None else Join(out, t)
    return out


ATOMIC, BASIC, COMPLEX = "Atomic", "Basic", "Complex"


def classify(hs):
    kind = ATOMIC
    for item in hs.items():
        t = item.term
        if isinstance(t, (Var, CoVar)):
            continue
        if isinstance(t, (One, CoOne, Diamond)):
            kind = BASIC
            continue
        return COMPLEX
    return kind


def single(items):
    """Hypersequent with one sequent."""
    return Hypersequent([items])


EMPTY = Hypersequent([[]])
