"""Rules of HR/HMR, derivation trees and the exact checker.

Every rule instance addresses its active sequents and items by index into the
(canonical) conclusion.  `premise_layout` computes the premises positionally
from a conclusion and records where each premise item came from; the checker
compares those premises with the recorded ones as multisets, and the
transformers use the provenance to carry annotations upward.
"""
from __future__ import annotations

import json
import sys
import threading
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .hypersequents import (Hypersequent, WeightedTerm, align, canonicalize, coeff_from_json,
                            coeff_to_json, hypersequent_from_json, hypersequent_to_json)
from .poly import coeff_mul, coeff_sum, is_concrete
from .terms import (CoOne, CoVar, Diamond, Join, Meet, One, Plus, Scale, Var, Zero, negate_nnf,
                    parse_nnf, scalar_variables, term_str)

HR, HMR = "hr", "hmr"

INIT, W, C, S, M, T, ID = "INIT", "W", "C", "S", "M", "T", "ID"
ZERO, PLUS, TIMES, JOIN, MEET, CAN, ONE, DIAMOND = (
    "ZERO", "PLUS", "TIMES", "JOIN", "MEET", "CAN", "ONE", "DIAMOND")
TAGS = (INIT, W, C, S, M, T, ID, ZERO, PLUS, TIMES, JOIN, MEET, CAN, ONE, DIAMOND)
LOGICAL = (ZERO, PLUS, TIMES, JOIN, MEET)
ARITY = {INIT: 0, MEET: 2, M: 2}

WRONG_ARITY = "WrongArity"
SIDE_CONDITION = "SideConditionViolated"
SHAPE = "ShapeViolation"
FORMULA = "FormulaMismatch"


@dataclass(frozen=True)
class Rule:
    """A rule instance; indices refer to the conclusion it is attached to."""

    tag: str
    seq: int | None = None
    other: int | None = None
    items: tuple = ()
    scalar: Fraction | None = None
    var: str | None = None
    term: object = None
    r: tuple = ()
    s: tuple = ()


@dataclass(frozen=True)
class Derivation:
    conclusion: Hypersequent
    rule: Rule
    premises: tuple = ()


@dataclass
class Valid:
    def __bool__(self):
        return True

    def __str__(self):
        return "Valid"


@dataclass
class Invalid:
    reason: str
    detail: str = ""
    path: tuple = ()

    def __bool__(self):
        return False

    def __str__(self):
        where = "/".join(map(str, self.path)) or "root"
        return f"Invalid({self.reason}) at {where}: {self.detail}"


class LayoutError(Exception):
    def __init__(self, reason, detail):
        self.reason = reason
        self.detail = detail
        super().__init__(f"{reason}: {detail}")


@dataclass
class Premise:
    """Positional premise with provenance.

    item_src[p][j] is (conclusion seq, conclusion item) or None for an item
    created by the rule; seq_src[p] lists conclusion sequents merged into p
    and seq_scale[p] the factor applied to them (T rule).
    """

    seqs: list
    item_src: list
    seq_src: list
    seq_scale: list = field(default_factory=list)


def _copy_premise(seqs, skip=()):
    out = Premise([], [], [], [])
    for k, seq in enumerate(seqs):
        if k in skip:
            continue
        out.seqs.append(list(seq))
        out.item_src.append([(k, j) for j in range(len(seq))])
        out.seq_src.append([k])
        out.seq_scale.append(Fraction(1))
    return out


def _check_index(seqs, k):
    if not isinstance(k, int) or not 0 <= k < len(seqs):
        raise LayoutError(SHAPE, f"sequent index {k} out of range")


def _check_items(seqs, k, items, allow_empty=False):
    _check_index(seqs, k)
    if not items and not allow_empty:
        raise LayoutError(SHAPE, "rule needs at least one active item")
    if len(set(items)) != len(items):
        raise LayoutError(SHAPE, "repeated item index")
    for j in items:
        if not isinstance(j, int) or not 0 <= j < len(seqs[k]):
            raise LayoutError(SHAPE, f"item index {j} out of range in sequent {k}")


def _replace_seq(seqs, k, items, new_items):
    """Premise equal to the conclusion except that seq k loses `items` and gains `new_items`."""
    prem = _copy_premise(seqs)
    keep = [j for j in range(len(seqs[k])) if j not in set(items)]
    prem.seqs[k] = [seqs[k][j] for j in keep] + list(new_items)
    prem.item_src[k] = [(k, j) for j in keep] + [None] * len(new_items)
    return prem


def _same_principal(seqs, k, items, cls):
    terms = {seqs[k][j].term for j in items}
    if len(terms) != 1:
        raise LayoutError(FORMULA, "vector instance mixes different principal formulas")
    t = next(iter(terms))
    if not isinstance(t, cls):
        raise LayoutError(FORMULA, f"expected {cls.__name__} principal formula, got {term_str(t)}")
    return t


def premise_layout(seqs, rule):
    """Positional premises of `rule` applied to the positional conclusion `seqs`."""
    tag = rule.tag
    n = len(seqs)
    if tag == INIT:
        if n != 1 or len(seqs[0]) != 0:
            raise LayoutError(SHAPE, "INIT concludes exactly the empty sequent")
        return []
    if tag == W:
        _check_index(seqs, rule.seq)
        if n < 2:
            raise LayoutError(SHAPE, "W needs a non-empty remaining hypersequent")
        return [_copy_premise(seqs, skip={rule.seq})]
    if tag == C:
        _check_index(seqs, rule.seq)
        prem = _copy_premise(seqs)
        k = rule.seq
        prem.seqs.append(list(seqs[k]))
        prem.item_src.append([(k, j) for j in range(len(seqs[k]))])
        prem.seq_src.append([k])
        prem.seq_scale.append(Fraction(1))
        return [prem]
    if tag == S:
        i, j = rule.seq, rule.other
        _check_index(seqs, i)
        _check_index(seqs, j)
        if i == j:
            raise LayoutError(SHAPE, "S needs two distinct sequents")
        prem = _copy_premise(seqs, skip={i, j})
        prem.seqs.append(list(seqs[i]) + list(seqs[j]))
        prem.item_src.append([(i, a) for a in range(len(seqs[i]))] + [(j, b) for b in range(len(seqs[j]))])
        prem.seq_src.append([i, j])
        prem.seq_scale.append(Fraction(1))
        return [prem]
    if tag == M:
        k = rule.seq
        _check_items(seqs, k, rule.items, allow_empty=True)
        left = set(rule.items)
        right = [j for j in range(len(seqs[k])) if j not in left]
        lp = _replace_seq(seqs, k, right, [])
        rp = _replace_seq(seqs, k, sorted(left), [])
        return [lp, rp]
    if tag == T:
        _check_index(seqs, rule.seq)
        r = rule.scalar
        if r is None or not is_concrete(r) or r <= 0:
            raise LayoutError(SIDE_CONDITION, "T needs a strictly positive rational scalar")
        prem = _copy_premise(seqs)
        prem.seqs[rule.seq] = [i.scaled(r) for i in seqs[rule.seq]]
        prem.seq_scale[rule.seq] = Fraction(r)
        return [prem]
    if tag == ID:
        k = rule.seq
        _check_items(seqs, k, rule.items)
        pos, neg = [], []
        for j in rule.items:
            t = seqs[k][j].term
            if isinstance(t, Var) and t.name == rule.var:
                pos.append(seqs[k][j].coeff)
            elif isinstance(t, CoVar) and t.name == rule.var:
                neg.append(seqs[k][j].coeff)
            else:
                raise LayoutError(FORMULA, f"ID on {rule.var} applied to {term_str(t)}")
        if coeff_sum(pos) != coeff_sum(neg):
            raise LayoutError(SIDE_CONDITION, "ID needs equal weights on the variable and its negation")
        return [_replace_seq(seqs, k, rule.items, [])]
    if tag == ONE:
        k = rule.seq
        _check_items(seqs, k, rule.items)
        pos, neg = [], []
        for j in rule.items:
            t = seqs[k][j].term
            if isinstance(t, One):
                pos.append(seqs[k][j].coeff)
            elif isinstance(t, CoOne):
                neg.append(seqs[k][j].coeff)
            else:
                raise LayoutError(FORMULA, f"ONE applied to {term_str(t)}")
        if coeff_sum(pos) < coeff_sum(neg):
            raise LayoutError(SIDE_CONDITION, "ONE needs at least as much 1 as its negation")
        return [_replace_seq(seqs, k, rule.items, [])]
    if tag == ZERO:
        k = rule.seq
        _check_items(seqs, k, rule.items)
        _same_principal(seqs, k, rule.items, Zero)
        return [_replace_seq(seqs, k, rule.items, [])]
    if tag == PLUS:
        k = rule.seq
        _check_items(seqs, k, rule.items)
        t = _same_principal(seqs, k, rule.items, Plus)
        cs = [seqs[k][j].coeff for j in rule.items]
        new = [WeightedTerm(c, t.left) for c in cs] + [WeightedTerm(c, t.right) for c in cs]
        return [_replace_seq(seqs, k, rule.items, new)]
    if tag == TIMES:
        k = rule.seq
        _check_items(seqs, k, rule.items)
        t = _same_principal(seqs, k, rule.items, Scale)
        new = [WeightedTerm(coeff_mul(seqs[k][j].coeff, t.coeff), t.arg) for j in rule.items]
        return [_replace_seq(seqs, k, rule.items, new)]
    if tag in (JOIN, MEET):
        k = rule.seq
        _check_items(seqs, k, rule.items)
        t = _same_principal(seqs, k, rule.items, Join if tag == JOIN else Meet)
        cs = [seqs[k][j].coeff for j in rule.items]
        a = _replace_seq(seqs, k, rule.items, [WeightedTerm(c, t.left) for c in cs])
        b = _replace_seq(seqs, k, rule.items, [WeightedTerm(c, t.right) for c in cs])
        if tag == MEET:
            return [a, b]
        a.seqs.append(b.seqs[k])
        a.item_src.append(b.item_src[k])
        a.seq_src.append([k])
        a.seq_scale.append(Fraction(1))
        return [a]
    if tag == CAN:
        k = rule.seq
        _check_index(seqs, k)
        if rule.term is None:
            raise LayoutError(SHAPE, "CAN needs a cut formula")
        if coeff_sum(rule.r) != coeff_sum(rule.s):
            raise LayoutError(SIDE_CONDITION, "CAN needs equal weight sums")
        if any(not is_concrete(c) or c <= 0 for c in tuple(rule.r) + tuple(rule.s)):
            raise LayoutError(SIDE_CONDITION, "CAN weights must be positive rationals")
        bar = negate_nnf(rule.term)
        new = [WeightedTerm(c, rule.term) for c in rule.r] + [WeightedTerm(c, bar) for c in rule.s]
        return [_replace_seq(seqs, k, (), new)]
    if tag == DIAMOND:
        if n != 1:
            raise LayoutError(SHAPE, "DIAMOND concludes a single sequent")
        pos, neg = [], []
        new = []
        for item in seqs[0]:
            t = item.term
            if isinstance(t, Diamond):
                new.append(WeightedTerm(item.coeff, t.arg))
            elif isinstance(t, One):
                pos.append(item.coeff)
                new.append(item)
            elif isinstance(t, CoOne):
                neg.append(item.coeff)
                new.append(item)
            else:
                raise LayoutError(SHAPE, f"DIAMOND conclusion contains {term_str(t)}")
        if coeff_sum(pos) < coeff_sum(neg):
            raise LayoutError(SIDE_CONDITION, "DIAMOND needs at least as much 1 as its negation")
        prem = _copy_premise(seqs)
        prem.seqs[0] = new
        return [prem]
    raise LayoutError(SHAPE, f"unknown rule {tag}")


def _symbolic(hs):
    for item in hs.items():
        if not is_concrete(item.coeff) or scalar_variables(item.term):
            return True
    return False


def check_step(conclusion, rule, premise_conclusions, system=HMR):
    if system == HR and rule.tag in (ONE, DIAMOND):
        return Invalid(SHAPE, f"{rule.tag} is not a rule of HR")
    if _symbolic(conclusion):
        return Invalid(SIDE_CONDITION, "symbolic coefficients cannot be checked")
    try:
        layout = premise_layout(list(conclusion), rule)
    except LayoutError as exc:
        return Invalid(exc.reason, exc.detail)
    if len(layout) != len(premise_conclusions):
        return Invalid(WRONG_ARITY, f"{rule.tag} expects {len(layout)} premises, got {len(premise_conclusions)}")
    for idx, (prem, got) in enumerate(zip(layout, premise_conclusions)):
        try:
            expected = canonicalize(prem.seqs)[0]
        except Exception as exc:  # an empty premise hypersequent
            return Invalid(SHAPE, str(exc))
        if expected.key() != got.key():
            return Invalid(FORMULA, f"premise {idx} is {got}, rule yields {expected}")
    return Valid()


def check_derivation(d, system=HMR):
    stack = [(d, ())]
    while stack:
        node, path = stack.pop()
        res = check_step(node.conclusion, node.rule, [p.conclusion for p in node.premises], system)
        if not res:
            res.path = path
            return res
        for i in range(len(node.premises) - 1, -1, -1):
            stack.append((node.premises[i], path + (i,)))
    return Valid()


def iter_nodes(d):
    stack = [d]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.premises))


def rule_census(d):
    return dict(Counter(node.rule.tag for node in iter_nodes(d)))


def count(d, tag):
    return sum(1 for node in iter_nodes(d) if node.rule.tag == tag)


def modal_depth(d):
    depth = {}
    order = list(iter_nodes(d))
    for node in reversed(order):
        below = max((depth[id(p)] for p in node.premises), default=0)
        depth[id(node)] = below + (1 if node.rule.tag == DIAMOND else 0)
    return depth[id(d)]


def size(d):
    return sum(1 for _ in iter_nodes(d))


# ---------------------------------------------------------------- construction

def remap_rule(rule, seq_map, item_maps):
    """Translate a positional rule to the canonical indices of its conclusion."""
    kw = {}
    if rule.seq is not None:
        kw["seq"] = seq_map[rule.seq]
        if rule.items:
            kw["items"] = tuple(sorted(item_maps[rule.seq][j] for j in rule.items))
    if rule.other is not None:
        kw["other"] = seq_map[rule.other]
    if not kw:
        return rule
    from dataclasses import replace
    return replace(rule, **kw)


_DEBUG_CHECK = False


def set_debug_check(flag):
    """Validate every node as it is built (slow; for tests)."""
    global _DEBUG_CHECK
    _DEBUG_CHECK = flag


def node(seqs, rule, premises=()):
    """Build a canonical derivation node from a positional conclusion."""
    hs, seq_map, item_maps = canonicalize([list(s) for s in seqs])
    d = Derivation(hs, remap_rule(rule, seq_map, item_maps), tuple(premises))
    if _DEBUG_CHECK:
        res = check_step(d.conclusion, d.rule, [p.conclusion for p in d.premises], HMR)
        if not res:
            raise AssertionError(f"built invalid node {d.rule.tag}: {res}")
    return d


def init():
    return Derivation(Hypersequent([[]]), Rule(INIT))


def seqs_of(d):
    return [list(s) for s in d.conclusion]


def premise_views(d):
    """For each premise: (positional layout, seq_map, item_maps) onto the child's canonical form.

    The result is cached on the node; callers must not mutate it.
    """
    cached = d.__dict__.get("_views")
    if cached is not None:
        return cached
    out = []
    for prem, child in zip(premise_layout(seqs_of(d), d.rule), d.premises):
        seq_map, item_maps = align(prem.seqs, child.conclusion)
        out.append((prem, seq_map, item_maps))
    object.__setattr__(d, "_views", out)
    return out


def cut(g_seqs, gamma, delta, a, r, s, d_left, d_right):
    """CUT as M followed by CAN.

    d_left concludes G | |- gamma, r.A and d_right concludes G | |- delta, s.bar(A).
    """
    bar = negate_nnf(a)
    ra = [WeightedTerm(c, a) for c in r]
    sb = [WeightedTerm(c, bar) for c in s]
    merged = list(gamma) + list(delta) + ra + sb
    k = len(g_seqs)
    left_items = tuple(range(len(gamma))) + tuple(range(len(gamma) + len(delta), len(gamma) + len(delta) + len(ra)))
    mix = node(list(g_seqs) + [merged], Rule(M, seq=k, items=left_items), (d_left, d_right))
    return node(list(g_seqs) + [list(gamma) + list(delta)], Rule(CAN, seq=k, term=a, r=tuple(r), s=tuple(s)), (mix,))


# ---------------------------------------------------------------- JSON

def rule_to_json(rule):
    out = {"tag": rule.tag}
    if rule.seq is not None:
        out["seq"] = rule.seq
    if rule.other is not None:
        out["other"] = rule.other
    if rule.items:
        out["items"] = list(rule.items)
    if rule.scalar is not None:
        out["scalar"] = coeff_to_json(rule.scalar)
    if rule.var is not None:
        out["var"] = rule.var
    if rule.term is not None:
        out["term"] = term_str(rule.term)
    if rule.tag == CAN:
        out["r"] = [coeff_to_json(c) for c in rule.r]
        out["s"] = [coeff_to_json(c) for c in rule.s]
    return out


def rule_from_json(data):
    return Rule(
        tag=data["tag"],
        seq=data.get("seq"),
        other=data.get("other"),
        items=tuple(data.get("items", ())),
        scalar=coeff_from_json(data["scalar"]) if "scalar" in data else None,
        var=data.get("var"),
        term=parse_nnf(data["term"]) if "term" in data else None,
        r=tuple(coeff_from_json(c) for c in data.get("r", ())),
        s=tuple(coeff_from_json(c) for c in data.get("s", ())),
    )


def derivation_to_json(d):
    memo = {}
    for nd in reversed(list(iter_nodes(d))):
        memo[id(nd)] = {
            "conclusion": hypersequent_to_json(nd.conclusion),
            "rule": rule_to_json(nd.rule),
            "premises": [memo[id(p)] for p in nd.premises],
        }
    return memo[id(d)]


def derivation_from_json(data):
    if isinstance(data, str):
        data = json.loads(data)
    # explicit post-order to support deep trees
    stack = [(data, False)]
    built = []
    while stack:
        nd, done = stack.pop()
        if done:
            prem = [built.pop() for _ in nd["premises"]][::-1]
            built.append(Derivation(hypersequent_from_json(nd["conclusion"]), rule_from_json(nd["rule"]), tuple(prem)))
        else:
            stack.append((nd, True))
            for p in reversed(nd["premises"]):
                stack.append((p, False))
    return built[0]


def dumps(d):
    return json.dumps(derivation_to_json(d))


_deep = threading.local()


def run_deep(fn, *args, **kwargs):
    """Run fn in a thread with a large stack and recursion limit."""
    if getattr(_deep, "active", False):
        return fn(*args, **kwargs)
    result, error = [], []

    def target():
        _deep.active = True
        try:
            result.append(fn(*args, **kwargs))
        except BaseException as exc:  # re-raised in the caller
            error.append(exc)

    old_limit = sys.getrecursionlimit()
    old_size = threading.stack_size()
    sys.setrecursionlimit(max(old_limit, 200000))
    threading.stack_size(512 * 1024 * 1024)
    try:
        th = threading.Thread(target=target)
        th.start()
        th.join()
    finally:
        threading.stack_size(old_size)
        sys.setrecursionlimit(old_limit)
    if error:
        raise error[0]
    return result[0]


def pretty(d, indent=0):
    """Indented text rendering, conclusion first."""
    lines = []
    stack = [(d, 0)]
    while stack:
        nd, depth = stack.pop()
        lines.append("  " * depth + f"[{nd.rule.tag}] {nd.conclusion}")
        for p in reversed(nd.premises):
            stack.append((p, depth + 1))
    return "\n".join(lines)
