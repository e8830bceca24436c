"""Command-line interface: ``rplhorn {check,eval,solve,freehom,oracle}``.

Exit codes: 0 success or agreement, 1 semantic failure, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import oracle as orc
from .algebra import decimal_rendering, format_degree
from .parser import ParseError, parse_formula, parse_structure, parse_theory, print_atom, print_formula
from .semantics import EvaluationError, truth_value
from .syntax import FormulaError, classify_horn, free_vars, rank, universal_closure
from .term_model import (
    NotHornError,
    PreconditionError,
    TermModelError,
    free_homomorphism,
    render_term_structure,
    solve,
)

OK, FAIL, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class Output:
    def __init__(self, path: Optional[str], quiet: bool):
        self.lines: list[str] = []
        self.path = path
        self.quiet = quiet

    def emit(self, text: str = "") -> None:
        self.lines.append(text)

    def note(self, text: str) -> None:
        if not self.quiet:
            print(text, file=sys.stderr)

    def flush(self) -> None:
        text = "\n".join(self.lines) + ("\n" if self.lines else "")
        if self.path:
            Path(self.path).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)


def _read(path: Optional[str], what: str) -> str:
    if not path:
        raise UsageError(f"--{what} is required")
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_theory(args):
    return parse_theory(_read(args.theory, "theory"))


def _generators(args) -> dict[str, str]:
    out = {}
    for item in args.generator or ():
        name, sep, value = item.partition("=")
        if not name:
            raise UsageError(f"bad --generator {item!r}")
        out[name] = value if sep else ""
    return out


def cmd_check(args, out: Output) -> int:
    theory = _load_theory(args)
    status = OK
    for label, f, line in zip(theory.labels, theory.formulas, theory.lines):
        c = classify_horn(f, args.weak)
        loose = sorted(free_vars(f))
        out.emit(f"{label} (line {line}): {print_formula(f)}")
        out.emit(f"  class: {c.kind}")
        out.emit(f"  rank: {rank(f)}")
        out.emit(f"  free variables: {{{', '.join(loose)}}}")
        if not c.is_horn:
            status = FAIL
            pos = ".".join(map(str, c.position)) or "root"
            out.emit(f"  reason: {c.reason} at {pos}: {print_formula(c.offending)}")
        elif loose:
            closure = universal_closure(f)
            if classify_horn(closure, args.weak).is_horn:
                out.emit(f"  closed over {{{', '.join(loose)}}}: {print_formula(closure)}")
    return status


def cmd_eval(args, out: Output) -> int:
    sf = parse_structure(_read(args.structure, "structure"))
    if not args.formula:
        raise UsageError("--formula is required")
    f = parse_formula(args.formula, sf.structure.signature)
    value = truth_value(sf.structure, f)
    out.emit(f"{format_degree(value)}  ({decimal_rendering(value)})")
    return OK


def _solve(args, theory):
    gens = _generators(args)
    sig = theory.signature
    if not sig.constants and not gens:
        sig.declare_function("c0", 0)
    sol = solve(theory.formulas, sig, args.depth, tuple(gens), args.weak)
    return sol, gens


def cmd_solve(args, out: Output) -> int:
    theory = _load_theory(args)
    sol, _ = _solve(args, theory)
    for label, closed in zip(theory.labels, sol.closed):
        if closed:
            out.note(f"{label}: closed over {{{', '.join(closed)}}}")
    checks = sol.verify()
    out.emit(f"# term structure, depth {args.depth}, {len(sol.universe)} ground terms")
    for name, report in checks.items():
        verdict = "yes" if report else f"NO ({getattr(report, 'violation', '') or ''})"
        out.emit(f"# {name}: {verdict}")
    if sol.term_structure.boundary:
        out.emit(f"# {len(sol.term_structure.boundary)} compositions saturated at the depth bound")
    if args.probe_depth:
        deeper, _ = _solve(argparse.Namespace(**{**vars(args), "depth": args.depth + 1}), theory)
        changed = [a for a, r in sol.degrees.items() if deeper.degrees.get(a, r) != r]
        if changed:
            out.emit(f"# depth {args.depth + 1} changes {len(changed)} degrees, e.g. "
                     f"{print_atom(changed[0])}")
        else:
            out.emit(f"# depth {args.depth + 1} leaves every degree unchanged")
    out.emit(render_term_structure(sol.term_structure).rstrip("\n"))
    return OK if all(checks.values()) else FAIL


def cmd_freehom(args, out: Output) -> int:
    theory = _load_theory(args)
    target = parse_structure(_read(args.structure, "structure")).structure
    sol, gens = _solve(args, theory)
    for name, value in gens.items():
        if value not in target.domain:
            raise UsageError(f"generator {name} needs a target element (--generator {name}=ELEM)")
    try:
        fh = free_homomorphism(sol.term_structure, target, gens, sol.sentences)
    except PreconditionError as exc:
        out.emit(f"rejected: {exc.check}: {exc.detail}")
        return FAIL
    for cls, value in fh.mapping.items():
        out.emit(f"g({cls}) = {value}")
    verdict = "pass" if fh.homomorphism else f"FAIL {fh.homomorphism.violation}"
    out.emit(f"homomorphism: {verdict}")
    if fh.exempt:
        out.emit(f"# {len(fh.exempt)} saturated compositions exempt from condition (1)")
    return OK if fh.homomorphism else FAIL


def cmd_oracle(args, out: Output) -> int:
    theory = _load_theory(args)
    sol, _ = _solve(args, theory)
    D = args.grid or sol.grid
    grid = orc.Grid(D)
    if not grid.admits(sol.sentences):
        raise UsageError(f"grid 1/{D} cannot represent the theory's degrees (need a multiple of {sol.grid})")
    try:
        best = orc.oracle_min_model(sol.sentences, sol.universe, grid, args.cap)
    except orc.CapExceeded as exc:
        raise UsageError(f"cap: {exc}") from None
    agree = True
    u = sol.universe
    for atom in sorted(best, key=lambda a: (a.pred, [u.index[t] for t in a.args])):
        fx, oc = sol.degrees[atom], best[atom]
        mark = "=" if fx == oc else "!="
        agree &= fx == oc
        out.emit(f"{print_atom(atom)}: fixpoint {format_degree(fx)} {mark} oracle {format_degree(oc)}")
    out.emit(f"{'AGREE' if agree else 'DISAGREE'} (grid 1/{D}, {len(best)} atoms)")
    return OK if agree else FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--theory", help="theory file")
    common.add_argument("--structure", help="structure file")
    common.add_argument("--formula", help="formula text")
    common.add_argument("--depth", type=int, default=2, help="Herbrand depth bound (default 2)")
    common.add_argument("--grid", type=int, default=None, help="oracle grid denominator")
    common.add_argument("--out", help="write the report to this file")
    common.add_argument("--quiet", action="store_true", help="suppress notices on stderr")
    common.add_argument("--weak", action="store_true", help="weak-conjunction Horn clauses")
    common.add_argument("--generator", action="append", metavar="NAME[=ELEM]",
                        help="free generator variable (and its image for freehom)")

    p = argparse.ArgumentParser(prog="rplhorn", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="classify formulas of a theory")
    sub.add_parser("eval", parents=[common], help="evaluate a formula in a structure")
    s = sub.add_parser("solve", parents=[common], help="build the term structure")
    s.add_argument("--probe-depth", action="store_true",
                   help="re-solve at depth+1 and report changed degrees")
    sub.add_parser("freehom", parents=[common], help="free homomorphism into a model")
    o = sub.add_parser("oracle", parents=[common], help="cross-check against brute force")
    o.add_argument("--cap", type=int, default=orc.DEFAULT_CAP)
    return p


COMMANDS = {"check": cmd_check, "eval": cmd_eval, "solve": cmd_solve,
            "freehom": cmd_freehom, "oracle": cmd_oracle}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    if args.depth < 0 or (args.grid is not None and args.grid < 1):
        print("error: --depth must be >= 0 and --grid >= 1", file=sys.stderr)
        return USAGE
    out = Output(args.out, args.quiet)
    try:
        status = COMMANDS[args.command](args, out)
    except (UsageError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except NotHornError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAIL
    except (FormulaError, EvaluationError, TermModelError, orc.OracleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAIL
    out.flush()
    return status


if __name__ == "__main__":
    sys.exit(main())
