"""Run the elimination passes over the fixed corpora and print size statistics.

Usage: python3 scripts/run_corpus.py [--n 100] [--which can,m,t]
"""
from __future__ import annotations

import argparse
import statistics
import time

from riesz.calculus import CAN, M, T, check_derivation, count, size
from riesz.corpus import CorpusConfig, can_corpus, m_corpus, t_corpus
from riesz.transform import eliminate_can, eliminate_m, eliminate_t_rational


def _pairs(which, n):
    if which == "can":
        for seed, _, outs in can_corpus(CorpusConfig(n=n)):
            for d in outs:
                yield seed, d
    elif which == "m":
        yield from m_corpus(CorpusConfig(n=n))
    else:
        yield from t_corpus(CorpusConfig(n=max(1, n // 2)))


PASSES = {"can": (eliminate_can, CAN), "m": (eliminate_m, M), "t": (eliminate_t_rational, T)}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--which", default="can,m,t")
    args = ap.parse_args()
    for which in args.which.split(","):
        fn, rule = PASSES[which]
        t0 = time.perf_counter()
        growth, bad = [], []
        for seed, d in _pairs(which, args.n):
            out = fn(d)
            ok = bool(check_derivation(out)) and count(out, rule) == 0 and out.conclusion == d.conclusion
            if not ok:
                bad.append(seed)
            growth.append(size(out) / size(d))
        dt = time.perf_counter() - t0
        print(f"{which}: {len(growth)} cases, {len(bad)} failures {bad[:5]}, size ratio median "
              f"{statistics.median(growth):.2f} max {max(growth):.2f}, {dt:.1f} s")


if __name__ == "__main__":
    main()
