"""Reduction of a hypersequent to atomic/basic leaves by invertible logical rules."""
from __future__ import annotations

from dataclasses import dataclass, field

from .calculus import (HMR, HR, JOIN, MEET, PLUS, TIMES, ZERO, Derivation, Rule,
                       premise_layout)
from .errors import LeafMismatch
from .hypersequents import canonicalize
from .terms import CoOne, CoVar, Diamond, Join, Meet, One, Plus, Scale, Var, Zero, has_modal

_RULE_OF = {Zero: ZERO, Plus: PLUS, Scale: TIMES, Join: JOIN, Meet: MEET}


@dataclass
class TraceNode:
    hypersequent: object
    rule: Rule | None = None
    children: list = field(default_factory=list)


@dataclass
class ReductionTrace:
    root: object
    steps: list
    leaves: list
    tree: TraceNode


def redex(hs, mode):
    """Leftmost-outermost reducible item: (seq, item, tag) or None."""
    for k, seq in enumerate(hs):
        for j, item in enumerate(seq):
            t = item.term
            if isinstance(t, (Var, CoVar)):
                continue
            if isinstance(t, (One, CoOne, Diamond)):
                if mode == HR:
                    raise ValueError("modal or unit terms are outside HR")
                continue
            return k, j, _RULE_OF[type(t)]
    return None


def reduce(hs, mode=HMR):
    root = TraceNode(hs)
    steps, leaves = [], []
    stack = [root]
    while stack:
        nd = stack.pop()
        found = redex(nd.hypersequent, mode)
        if found is None:
            leaves.append(nd.hypersequent)
            continue
        k, j, tag = found
        nd.rule = Rule(tag, seq=k, items=(j,))
        steps.append((tag, (k, j)))
        for prem in premise_layout(list(nd.hypersequent), nd.rule):
            nd.children.append(TraceNode(canonicalize(prem.seqs)[0]))
        stack.extend(reversed(nd.children))
    return ReductionTrace(hs, steps, leaves, root)


def reassemble(trace, leaf_derivations):
    leaf_derivations = list(leaf_derivations)
    if len(leaf_derivations) != len(trace.leaves):
        raise LeafMismatch(f"expected {len(trace.leaves)} leaf derivations, got {len(leaf_derivations)}")
    it = iter(leaf_derivations)
    # iterative to keep deep traces safe
    out = {}
    order = []
    stack = [trace.tree]
    while stack:
        nd = stack.pop()
        order.append(nd)
        stack.extend(reversed(nd.children))
    for nd in order:
        if nd.rule is None:
            d = next(it)
            if d.conclusion.key() != nd.hypersequent.key():
                raise LeafMismatch(f"leaf derivation concludes {d.conclusion}, expected {nd.hypersequent}")
            out[id(nd)] = d
    for nd in reversed(order):
        if nd.rule is not None:
            out[id(nd)] = Derivation(nd.hypersequent, nd.rule, tuple(out[id(c)] for c in nd.children))
    return out[id(trace.tree)]


def trace_to_json(trace):
    from .hypersequents import hypersequent_to_json
    return {
        "root": hypersequent_to_json(trace.root),
        "steps": [{"tag": tag, "seq": k, "item": j} for tag, (k, j) in trace.steps],
        "leaves": [hypersequent_to_json(h) for h in trace.leaves],
    }


def default_mode(hs):
    return HMR if any(has_modal(i.term) for i in hs.items()) else HR
