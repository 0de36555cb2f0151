"""Command-line interface: `svr check`, `svr run` and `svr equiv`.

Exit status: 0 when every item is ok (or assumes totality, or the answer is
merely unknown / out of fuel), 1 on any failure, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import syntax as S
from .checker import derivation_text
from .driver import ASSUMES_TOTALITY, OK, RuntimeError_, elaborate, parse_in_scope, runtime_term
from .equivalence import Budget, Proved, Refuted, Unknown, decide, verdict_json, verdict_name
from .machine import Converged, Halted, OutOfFuel, describe_blocked, outcome_json, run, trace_rules, trace_text
from .surface.desugar import DesugarError
from .surface.parser import ParseError

SCHEMA = 1
DEFAULT_FUEL = 100_000
BUDGET_ENV = "SVR_BUDGET"


class UsageError(Exception):
    pass


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return n


def _default_budget() -> int | None:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return None
    try:
        return _positive(raw)
    except argparse.ArgumentTypeError as e:
        raise UsageError(f"{BUDGET_ENV}: {e}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="svr", description="Check, run and compare programs written in .svr files.")
    sub = p.add_subparsers(dest="command", required=True)

    def budget_flags(sp):
        sp.add_argument("--budget", type=_positive, default=None,
                        help=f"rewrite/probe fuel for the equivalence procedure (default 10000, or ${BUDGET_ENV})")
        sp.add_argument("--depth", type=_positive, default=3, help="stack-context depth of the search (default 3)")
        sp.add_argument("--subst-size", type=_positive, default=3, help="size bound on substituted values (default 3)")
        sp.add_argument("--delta-index", type=_positive, default=2, help="δ stratification index (default 2)")
        sp.add_argument("--json", action="store_true", help="print a machine-readable report")

    c = sub.add_parser("check", help="check every declaration of a file")
    c.add_argument("file")
    budget_flags(c)
    c.add_argument("--emit-derivations", action="store_true", help="include derivation trees")

    r = sub.add_parser("run", help="evaluate a definition on the abstract machine")
    r.add_argument("file")
    r.add_argument("--main", required=True, help="name of the definition to run")
    r.add_argument("--fuel", type=_positive, default=DEFAULT_FUEL, help="maximum machine steps (default 100000)")
    r.add_argument("--trace", action="store_true", help="print every machine state")
    r.add_argument("--json", action="store_true", help="print a machine-readable report")

    e = sub.add_parser("equiv", help="decide an equivalence in the scope of a file")
    e.add_argument("file")
    e.add_argument("--lhs", required=True)
    e.add_argument("--rhs", required=True)
    e.add_argument("--neq", action="store_true", help="ask for inequivalence instead")
    budget_flags(e)
    return p


def _budget(args) -> Budget:
    fuel = args.budget if args.budget is not None else _default_budget()
    kw = {"depth": args.depth, "subst_size": args.subst_size, "delta_index": args.delta_index}
    if fuel is not None:
        kw["fuel"] = fuel
    return Budget(**kw)


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror or e}") from None
    except UnicodeDecodeError:
        raise UsageError(f"{path} is not UTF-8 text") from None


def _emit(report: dict, as_json: bool, lines: list[str], out) -> None:
    if as_json:
        out.write(json.dumps(report, ensure_ascii=False, indent=2, sort_keys=True) + "\n")
    else:
        out.write("\n".join(lines) + "\n")


def _diag_lines(path, diags) -> list[str]:
    return [f"{path}:{d}" for d in diags]


def cmd_check(args, out) -> int:
    t0 = time.perf_counter()
    el = elaborate(_read(args.file), _budget(args))
    lines = _diag_lines(args.file, el.diagnostics)
    for it in el.items:
        lines.append(f"{args.file}:{it.line}: {it.summary()}")
        for n in it.notes:
            lines.append(f"    note: {n}")
        if it.verdict is not None and not isinstance(it.verdict, Unknown):
            lines.append(f"    {verdict_name(it.verdict)}: {json.dumps(verdict_json(it.verdict)['certificate'], ensure_ascii=False)}")
        if args.emit_derivations and it.derivation is not None:
            lines.append(derivation_text(it.derivation, 2))
    status = "ok" if el.ok else "failed"
    lines.append(status)
    report = {
        "schema": SCHEMA, "command": "check", "file": args.file, "status": status,
        "items": [it.to_json(args.emit_derivations) for it in el.items],
        "diagnostics": [d.to_json() for d in el.diagnostics],
        "timing": {"seconds": round(time.perf_counter() - t0, 6)},
    }
    _emit(report, args.json, lines, out)
    return el.exit_code


def cmd_run(args, out) -> int:
    t0 = time.perf_counter()
    el = elaborate(_read(args.file))
    if el.diagnostics:
        lines = _diag_lines(args.file, el.diagnostics)
        report = {"schema": SCHEMA, "command": "run", "file": args.file, "status": "failed",
                  "diagnostics": [d.to_json() for d in el.diagnostics],
                  "timing": {"seconds": round(time.perf_counter() - t0, 6)}}
        _emit(report, args.json, lines, out)
        return 1
    if args.main not in el.globals:
        raise UsageError(f"no definition named {args.main}")
    with S.fresh_names():
        try:
            term = runtime_term(el, args.main, args.fuel)
        except RuntimeError_ as e:
            raise UsageError(str(e)) from None
        p = S.Process(term, S.SVar("α"))
        outcome = run(p, args.fuel)
        states = trace_rules(p, args.fuel) if args.trace else None
    lines = [trace_text(states)] if states is not None else []
    match outcome:
        case Converged(v, _, n):
            status, code = "converged", 0
            lines.append(f"converged after {n} steps: {S.pretty(v)}")
        case OutOfFuel(_, n):
            status, code = "out-of-fuel", 0
            lines.append(f"out of fuel after {n} steps")
        case Halted(cls, n):
            status, code = "halted", 1
            lines.append(f"halted after {n} steps: {describe_blocked(cls)}")
    report = {"schema": SCHEMA, "command": "run", "file": args.file, "main": args.main,
              "status": status, "result": outcome_json(outcome),
              "timing": {"seconds": round(time.perf_counter() - t0, 6)}}
    if states is not None:
        report["trace"] = [{"term": S.pretty(q.term), "stack": S.pretty(q.stack), "rule": r} for q, r in states]
    _emit(report, args.json, lines, out)
    return code


def cmd_equiv(args, out) -> int:
    t0 = time.perf_counter()
    budget = _budget(args)
    el = elaborate(_read(args.file), budget)
    if el.diagnostics:
        _emit({"schema": SCHEMA, "command": "equiv", "status": "failed",
               "diagnostics": [d.to_json() for d in el.diagnostics],
               "timing": {"seconds": round(time.perf_counter() - t0, 6)}},
              args.json, _diag_lines(args.file, el.diagnostics), out)
        return 1
    with S.fresh_names():
        try:
            lhs, rhs = parse_in_scope(el, args.lhs), parse_in_scope(el, args.rhs)
        except (ParseError, DesugarError) as e:
            raise UsageError(f"bad expression: {e}") from None
        v = decide(el.equational, lhs, rhs, not args.neq, budget)
    rel = "≢" if args.neq else "≡"
    name = verdict_name(v)
    lines = [f"{S.pretty(lhs)} {rel} {S.pretty(rhs)}: {name}"]
    if isinstance(v, Unknown):
        lines.append(f"    {v.reason}")
    else:
        lines.append("    certificate: " + json.dumps(v.certificate, ensure_ascii=False))
    report = {"schema": SCHEMA, "command": "equiv", "file": args.file,
              "lhs": S.pretty(lhs), "rhs": S.pretty(rhs), "relation": rel, "status": name,
              **verdict_json(v), "timing": {"seconds": round(time.perf_counter() - t0, 6)}}
    _emit(report, args.json, lines, out)
    return 1 if isinstance(v, Refuted) else 0


COMMANDS = {"check": cmd_check, "run": cmd_run, "equiv": cmd_equiv}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as e:
        print(f"svr: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
