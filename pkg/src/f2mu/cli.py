"""Command-line driver.

    f2mu check <file>    elaborate and check every declaration
    f2mu run <file>      the same, then run the file's commands
    f2mu tree <file> --depth N --term T
    f2mu inner <file> --depth N --term T

Exit codes: 0 success, 1 parse error, 2 kind error, 3 resolution or scope
error, 4 proof-check failure, 5 unfolding failure.
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence

from .dynamics import DEFAULT_FUEL, DEFAULT_PRODUCTIVITY_DEPTH
from .errors import F2MuError
from .parser import parse_term
from .pipeline import Options, run_program, standalone_command
from .program import FullTree, InnerTrace
from .report import render_report


def _positive(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError(f"{text} is negative")
    return n


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="f2mu", description="Check and unfold nontermination evidence for rewrite systems.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_text in (("check", "elaborate and proof-check a file"),
                            ("run", "check a file and run its step/tree/trace commands")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file")
        p.add_argument("--fuel", type=_positive, default=DEFAULT_FUEL,
                       help="head-reduction steps allowed per trace element")
        p.add_argument("--trace-steps", type=_positive, default=0,
                       help="also list this many evidence-trace elements per lemma")
        p.add_argument("--productivity-depth", type=_positive, default=DEFAULT_PRODUCTIVITY_DEPTH,
                       help="depth of the bounded productivity check")
        p.add_argument("--strict-names", action="store_true",
                       help="print only the sections of the reference layout")
        p.add_argument("--check-only", action="store_true",
                       help="proof-check annotated declarations without elaborating")
        p.add_argument("--backtrack-existentials", action="store_true",
                       help="treat scope errors as failures to backtrack over")
    for name, help_text in (("tree", "draw the full reduction tree of a term"),
                            ("inner", "print the leftmost-innermost trace of a term")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file")
        p.add_argument("--depth", type=_positive, required=True)
        p.add_argument("--term", required=True)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        print(f"f2mu: {err}", file=sys.stderr)
        return 1
    if args.command in ("tree", "inner"):
        try:
            term = parse_term(args.term)
            cmd = FullTree(args.depth, term) if args.command == "tree" else InnerTrace(args.depth, term)
            out = standalone_command(text, cmd)
        except F2MuError as err:
            print(f"f2mu: {err}", file=sys.stderr)
            return err.exit_code
        sys.stdout.write("\n".join(out.lines) + "\n")
        return 0
    opts = Options(fuel=args.fuel, trace_steps=args.trace_steps,
                   productivity_depth=args.productivity_depth, strict_names=args.strict_names,
                   check_only=args.check_only, backtrack_existentials=args.backtrack_existentials,
                   run_commands=args.command == "run")
    result = run_program(text, opts)
    sys.stdout.write(render_report(result, strict=opts.strict_names))
    if result.error is not None:
        print(f"f2mu: {result.error}", file=sys.stderr)
    return result.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
