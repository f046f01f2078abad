"""Command-line interface.

Exit codes: 0 success / Derivable / Valid, 1 NotDerivable / Invalid /
transformation refused, 2 Unknown, 64 usage error, 65 unreadable input.
"""
from __future__ import annotations

import argparse
import re
import json
import sys

from . import fo
from .calculus import HMR, HR, check_derivation, derivation_from_json, derivation_to_json
from .decide import DecideConfig, Derivable, NotDerivable, decide, emit_phi
from .errors import ParseError, RieszError, TransformError
from .hypersequents import WeightedTerm, canonicalize, parse_hypersequent
from .poly import coeff_str
from .reduce import default_mode
from .terms import ModalModel, eval_modal, negate_nnf, parse_nnf

EXIT_OK, EXIT_NO, EXIT_UNKNOWN, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 64, 65


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parser():
    p = _Parser(prog="riesz", description="Prover, checker and transformer for HR and HMR.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    pr = sub.add_parser("prove", help="decide a hypersequent")
    pr.add_argument("hypersequent")
    pr.add_argument("--system", choices=[HR, HMR])
    pr.add_argument("--certificate", help="write the derivation here as JSON")

    ch = sub.add_parser("check", help="check a JSON derivation")
    ch.add_argument("derivation")
    ch.add_argument("--system", choices=[HR, HMR], default=HMR)

    el = sub.add_parser("eliminate", help="rewrite a JSON derivation")
    el.add_argument("derivation")
    el.add_argument("--pass", dest="which", choices=["can", "m", "t"], required=True)
    el.add_argument("--output", "-o", help="write here instead of stdout")

    em = sub.add_parser("emit-smt", help="print the SMT-LIB2 derivability formula")
    em.add_argument("hypersequent")
    em.add_argument("--system", choices=[HR, HMR])

    ev = sub.add_parser("eval", help="evaluate a term in a finite model")
    ev.add_argument("term")
    ev.add_argument("--model", required=True)
    ev.add_argument("--env")

    eq = sub.add_parser("prove-eq", help="decide A == B or A <= B")
    eq.add_argument("relation", nargs="+", metavar="TERM")
    eq.add_argument("--system", choices=[HR, HMR])
    return p


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None


def _verdict_line(v):
    if isinstance(v, Derivable):
        return "Derivable"
    if isinstance(v, NotDerivable):
        return f"NotDerivable ({v.evidence})"
    return f"Unknown ({v.reason})"


def _status(v):
    if isinstance(v, Derivable):
        return EXIT_OK
    return EXIT_NO if isinstance(v, NotDerivable) else EXIT_UNKNOWN


def _decide(hs, system):
    cfg = DecideConfig(solver=fo.load_solver_config())
    return decide(hs, system or default_mode(hs), cfg)


def cmd_prove(args, out):
    hs = parse_hypersequent(args.hypersequent)
    v = _decide(hs, args.system)
    print(_verdict_line(v), file=out)
    if isinstance(v, Derivable) and args.certificate:
        with open(args.certificate, "w") as fh:
            json.dump(derivation_to_json(v.certificate), fh)
    return _status(v)


def cmd_check(args, out):
    d = derivation_from_json(_read_json(args.derivation))
    res = check_derivation(d, args.system)
    if res:
        print("Valid", file=out)
        return EXIT_OK
    print("Invalid", file=out)
    print(str(res), file=sys.stderr)
    return EXIT_NO


def cmd_eliminate(args, out):
    from .transform import eliminate_can, eliminate_m, eliminate_t_rational
    d = derivation_from_json(_read_json(args.derivation))
    fn = {"can": eliminate_can, "m": eliminate_m, "t": eliminate_t_rational}[args.which]
    res = fn(d)
    text = json.dumps(derivation_to_json(res))
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        print(text, file=out)
    return EXIT_OK


def cmd_emit(args, out):
    hs = parse_hypersequent(args.hypersequent)
    out.write(emit_phi(hs, args.system))
    return EXIT_OK


def _vector_text(vec):
    return "(" + ", ".join(coeff_str(c) for c in vec) + ")"


def cmd_eval(args, out):
    t = parse_nnf(args.term)
    model = ModalModel.from_json(_read_json(args.model))
    env = _read_json(args.env) if args.env else {}
    print(_vector_text(eval_modal(t, model, env)), file=out)
    return EXIT_OK


def _goal(a, b):
    """|- 1.negate(a), 1.b, i.e. a <= b."""
    return canonicalize([[WeightedTerm(1, negate_nnf(a)), WeightedTerm(1, b)]])[0]


def cmd_prove_eq(args, out):
    # the relation may come as one quoted word or as separate words
    parts = re.split(r"(==|<=)", " ".join(args.relation))
    if len(parts) != 3:
        raise UsageError("expected TERM == TERM or TERM <= TERM")
    left, op, right = (p.strip() for p in parts)
    if not left or not right:
        raise UsageError("both sides of the relation are needed")
    a, b = parse_nnf(left), parse_nnf(right)
    goals = [("<=", _goal(a, b))] + ([(">=", _goal(b, a))] if op == "==" else [])
    verdicts = []
    for name, hs in goals:
        v = _decide(hs, args.system)
        verdicts.append(v)
        print(f"{name} {hs}: {_verdict_line(v)}", file=out)
    if any(isinstance(v, NotDerivable) for v in verdicts):
        return EXIT_NO
    return EXIT_OK if all(isinstance(v, Derivable) for v in verdicts) else EXIT_UNKNOWN


COMMANDS = {"prove": cmd_prove, "check": cmd_check, "eliminate": cmd_eliminate,
            "emit-smt": cmd_emit, "eval": cmd_eval, "prove-eq": cmd_prove_eq}


def run(argv=None, out=None):
    out = out or sys.stdout
    try:
        args = _parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except TransformError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NO
    except (RieszError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA


def main():
    sys.exit(run())
