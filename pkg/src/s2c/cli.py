"""Command line interface.

Exit status is 0 for a positive verdict, 1 for a negative one (with a JSON
report on stdout) and 2 for usage or parse errors.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import io
from .corpus import CORPUS
from .decide import check_clip_bounded, check_ctp_bounded, decide_sequentiality
from .determinize import CtpViolation, InconclusiveCap, build_sequential
from .loops import class_to_json, classify_first_stage, enumerate_lassos
from .machine import (
    check_functional_bounded,
    eval_machine,
    has_errors,
    is_unambiguous,
    trim,
    validate,
)
from .oracle import oracle_equiv
from .words import dist_f, dist_p

OK, NEGATIVE, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False))


def _load(path):
    try:
        return io.load(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except io.MachineFormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _check_word(m, u: str) -> str:
    bad = sorted(set(u) - set(m.input_alphabet))
    if bad:
        raise UsageError(f"word {u!r} uses undeclared input symbols {bad}")
    return u


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


# ------------------------------------------------------------- subcommands

def cmd_eval(args) -> int:
    m = _load(args.file)
    outs = sorted(eval_machine(m, _check_word(m, args.word)))
    if not outs:
        _emit({"word": args.word, "defined": False, "outputs": []})
        return NEGATIVE
    for w in outs:
        print(w)
    return OK


def cmd_validate(args) -> int:
    m = _load(args.file)
    diags = validate(m)
    if has_errors(diags):
        _emit({"valid": False,
               "diagnostics": [{"severity": d.severity, "message": d.message} for d in diags]})
        return NEGATIVE
    for d in diags:
        print(f"{d.severity}: {d.message}")
    print("valid")
    return OK


def cmd_trim(args) -> int:
    m = trim(_load(args.file))
    _write(args.output, io.dumps(m))
    return OK


def cmd_functional(args) -> int:
    m = _load(args.file)
    v = check_functional_bounded(m, args.max_len)
    report = {"functional": v.functional, "max_len": v.max_len}
    if not v.functional:
        report.update(word=v.word, outputs=list(v.outputs))
        _emit(report)
        return NEGATIVE
    _emit(report)
    return OK


def _require_functional(m) -> dict | None:
    """None when ``m`` looks functional, otherwise a negative report."""
    if is_unambiguous(m):
        return None
    v = check_functional_bounded(m, 6)
    if v.functional:
        return None
    return {"error": "not-functional", "word": v.word, "outputs": list(v.outputs)}


def cmd_decide(args) -> int:
    m = trim(_load(args.file))
    bad = _require_functional(m)
    if bad is not None:
        _emit(bad)
        return NEGATIVE
    report = decide_sequentiality(m).to_json()
    if args.report:
        _write(args.report, json.dumps(report, indent=2, sort_keys=True) + "\n")
    _emit(report)
    return OK if report["sequentializable"] else NEGATIVE


def cmd_determinize(args) -> int:
    m = trim(_load(args.file))
    bad = _require_functional(m)
    if bad is not None:
        _emit(bad)
        return NEGATIVE
    try:
        d = build_sequential(m, safety_cap=args.cap)
    except (CtpViolation, InconclusiveCap) as exc:
        _emit(exc.to_json())
        return NEGATIVE
    _write(args.output, io.dumps(d.machine))
    _emit({"states": len(d.machine.states), "transitions": len(d.machine.transitions),
           "output": args.output})
    return OK


def cmd_equiv(args) -> int:
    v = oracle_equiv(_load(args.a), _load(args.b), args.max_len)
    _emit(v.to_json())
    return OK if v.equivalent else NEGATIVE


def cmd_dist(args) -> int:
    fn = dist_p if args.kind == "p" else dist_f
    print(fn(args.u, args.v))
    return OK


def cmd_lasso(args) -> int:
    m = _load(args.file)
    _check_word(m, args.stem)
    _check_word(m, args.loop)
    if not args.loop:
        raise UsageError("the loop word must be nonempty")
    if not 1 <= args.k <= max(len(m.states), 1):
        raise UsageError(f"--k must be between 1 and {max(len(m.states), 1)}")
    found = []
    for lasso in enumerate_lassos(m, m.init, args.k, len(args.stem), len(args.loop)):
        if lasso.stem.word != args.stem or lasso.loop.word != args.loop:
            continue
        item = lasso.to_json()
        if args.classify:
            item["classification"] = class_to_json(classify_first_stage(lasso))
        found.append(item)
    _emit({"k": args.k, "stem": args.stem, "loop": args.loop, "lassos": found})
    return OK if found else NEGATIVE


def cmd_clip(args) -> int:
    v = check_clip_bounded(_load(args.file), args.K, args.max_len)
    _emit(v.to_json())
    return OK if v.holds else NEGATIVE


def cmd_ctp(args) -> int:
    v = check_ctp_bounded(_load(args.file), args.L, args.pump_max, args.len_max)
    _emit(v.to_json())
    return OK if v.holds else NEGATIVE


def cmd_corpus(args) -> int:
    if args.name is None:
        for name in CORPUS:
            print(name)
        return OK
    if args.name not in CORPUS:
        raise UsageError(f"unknown corpus machine {args.name!r}; choose from {sorted(CORPUS)}")
    text = io.dumps(CORPUS[args.name]())
    if args.output:
        _write(args.output, text)
    else:
        sys.stdout.write(text)
    return OK


# ------------------------------------------------------------------ parser

def _nonneg(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="s2c", description="String-to-context transducer toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("eval", help="print the outputs of a machine on a word")
    s.add_argument("file")
    s.add_argument("word")
    s.set_defaults(fn=cmd_eval)

    s = sub.add_parser("validate", help="check a machine document")
    s.add_argument("file")
    s.set_defaults(fn=cmd_validate)

    s = sub.add_parser("trim", help="drop useless states")
    s.add_argument("file")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(fn=cmd_trim)

    s = sub.add_parser("functional", help="bounded functionality check")
    s.add_argument("file")
    s.add_argument("--max-len", type=_nonneg, default=6)
    s.set_defaults(fn=cmd_functional)

    s = sub.add_parser("decide", help="decide whether a sequential equivalent exists")
    s.add_argument("file")
    s.add_argument("--report")
    s.set_defaults(fn=cmd_decide)

    s = sub.add_parser("determinize", help="build a sequential equivalent")
    s.add_argument("file")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--cap", type=_nonneg, default=None, help="safety cap on the state count")
    s.set_defaults(fn=cmd_determinize)

    s = sub.add_parser("equiv", help="compare two machines on all words up to a length")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--max-len", type=_nonneg, required=True)
    s.set_defaults(fn=cmd_equiv)

    s = sub.add_parser("dist", help="prefix (p) or factor (f) distance of two words")
    s.add_argument("kind", choices=("p", "f"))
    s.add_argument("u")
    s.add_argument("v")
    s.set_defaults(fn=cmd_dist)

    s = sub.add_parser("lasso", help="list (and classify) the lassos on a stem and loop word")
    s.add_argument("file")
    s.add_argument("--k", type=_nonneg, required=True)
    s.add_argument("--stem", required=True)
    s.add_argument("--loop", required=True)
    s.add_argument("--classify", action="store_true")
    s.set_defaults(fn=cmd_lasso)

    s = sub.add_parser("clip", help="sampled contextual Lipschitz check")
    s.add_argument("file")
    s.add_argument("--K", type=_nonneg, default=None)
    s.add_argument("--max-len", type=_nonneg, default=6)
    s.set_defaults(fn=cmd_clip)

    s = sub.add_parser("ctp", help="sampled contextual twinning check")
    s.add_argument("file")
    s.add_argument("--L", type=_nonneg, default=None)
    s.add_argument("--pump-max", type=_nonneg, default=5)
    s.add_argument("--len-max", type=_nonneg, default=3)
    s.set_defaults(fn=cmd_ctp)

    s = sub.add_parser("corpus", help="list the named machines or print one as JSON")
    s.add_argument("name", nargs="?")
    s.add_argument("-o", "--output")
    s.set_defaults(fn=cmd_corpus)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"s2c: error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
