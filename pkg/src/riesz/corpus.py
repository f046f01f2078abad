"""Deterministic derivation corpora for the elimination passes.

Every corpus is drawn from a fixed seed range and filtered by structural
bounds only (derivation size, number of reduction leaves), never by running
time, so the same inputs come out on every machine.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .calculus import CAN, M, T, count, seqs_of, size
from .decide import Derivable, decide
from .generate import grow
from .reduce import reduce
from .terms import Join, Meet, Plus, Scale, Zero

INVERTIBLE = (Zero, Plus, Scale, Join, Meet)


@dataclass
class CorpusConfig:
    n: int = 100
    steps: int = 6
    term_depth: int = 1
    max_size: int = 60
    max_leaves: int = 16
    max_seed: int = 5000


def _seeds(cfg):
    return range(cfg.max_seed)


def can_corpus(cfg=None):
    """(seed, input, output_list) triples where each output contains CAN.

    Inputs are decide certificates of grown goals (every third seed modal);
    one invertible occurrence is picked per input and inverted with the
    CAN-introducing schemes.
    """
    from .transform.caninv import invert_with_can
    cfg = cfg or CorpusConfig()
    out = []
    for seed in _seeds(cfg):
        if len(out) >= cfg.n:
            break
        g = grow(seed, modal=seed % 3 == 2, steps=cfg.steps, term_depth=cfg.term_depth)
        v = decide(g.conclusion)
        if not isinstance(v, Derivable) or size(v.certificate) > cfg.max_size:
            continue
        d = v.certificate
        seqs = seqs_of(d)
        spots = [(k, j) for k, s in enumerate(seqs) for j, it in enumerate(s)
                 if isinstance(it.term, INVERTIBLE)]
        if not spots:
            continue
        k, j = random.Random(seed).choice(spots)
        outs = [o for o in invert_with_can(d, k, j) if count(o, CAN)]
        if outs:
            out.append((seed, d, outs))
    return out


def m_corpus(cfg=None):
    """(seed, derivation) pairs of grown CAN-free derivations using M."""
    cfg = cfg or CorpusConfig()
    out = []
    for seed in _seeds(cfg):
        if len(out) >= cfg.n:
            break
        d = grow(seed, modal=seed % 2 == 1, steps=cfg.steps, term_depth=cfg.term_depth)
        if count(d, M) and size(d) <= cfg.max_size:
            out.append((seed, d))
    return out


def t_corpus(cfg=None):
    """(seed, derivation) pairs of grown HR derivations using T.

    The conclusion must reduce to at most max_leaves leaves, since
    T-elimination rebuilds one atomic derivation per leaf.
    """
    cfg = cfg or CorpusConfig(n=50)
    out = []
    for seed in _seeds(cfg):
        if len(out) >= cfg.n:
            break
        d = grow(seed, modal=False, steps=cfg.steps, term_depth=cfg.term_depth)
        if not count(d, T) or size(d) > cfg.max_size:
            continue
        if len(reduce(d.conclusion, "hr").leaves) <= cfg.max_leaves:
            out.append((seed, d))
    return out
