"""Command-line interface.

Exit codes: 0 success / equilibrium, 1 not an equilibrium, 2 the two
equilibrium verdicts disagree, 3 counterexample reproduction failed,
64 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .core import ParseError, Profile, format_rat, intervals, make_profile, parse_profile
from .dynamics import OffGridError, run_dynamics
from .equilibrium import (
    DisagreementError,
    check_necessary,
    cross_validate,
    cross_validate_many,
    deviation_sup,
)
from .payoff import payoff_closed_form, payoff_numeric
from .synthesis import InfeasibleError, canonical_equilibrium, sample_equilibria

SCHEMA = "v1"
EXIT_OK, EXIT_NOT_EQ, EXIT_DISAGREE, EXIT_REPRO, EXIT_USAGE = 0, 1, 2, 3, 64

COUNTEREXAMPLE = ("1/10", "1/10", "3/10", "3/10", "7/10", "7/10", "9/10", "9/10")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def max_denominator() -> int:
    raw = os.environ.get("HOTELLING_MAX_DENOM", "")
    if not raw:
        return 10**9
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"HOTELLING_MAX_DENOM must be an integer, got {raw!r}")


def _profile(text: str) -> Profile:
    try:
        return parse_profile(text, max_denominator())
    except (ParseError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _read_profiles(args) -> list[Profile]:
    if args.file:
        try:
            with open(args.file) as fh:
                lines = [ln.strip() for ln in fh]
        except OSError as exc:
            raise UsageError(str(exc)) from None
        return [_profile(ln) for ln in lines if ln and not ln.startswith("#")]
    if not args.profile:
        raise UsageError("give a profile such as 1/4,1/4,3/4,3/4 or --file PATH")
    return [_profile(args.profile)]


def _report(command: str, **fields) -> dict:
    return {"schema": SCHEMA, "command": command, **fields}


def _emit(args, report: dict, text_lines: list[str]) -> None:
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        print("\n".join(text_lines))


# ---------------------------------------------------------------------------

def cmd_eval(args) -> int:
    if args.oracle is not None and args.oracle < 1:
        raise UsageError("--oracle needs at least 1 cell")
    results = []
    lines = []
    for p in _read_profiles(args):
        pay = payoff_closed_form(p)
        entry = {"input": p.to_strings(), "payoffs": pay.to_strings()}
        lines.append(f"profile {p}")
        if args.oracle:
            numeric = [payoff_numeric(p, k, args.oracle) for k in range(1, p.n + 1)]
            gap = max(abs(a - b) for a, b in zip(numeric, pay))
            entry["oracle"] = {
                "cells": args.oracle,
                "payoffs": [format_rat(v) for v in numeric],
                "max_discrepancy": format_rat(gap),
                "bound": format_rat(Fraction(p.n, args.oracle)),
            }
            for k, (f, g) in enumerate(zip(pay, numeric), 1):
                lines.append(f"  f_{k} = {format_rat(f)}    midpoint({args.oracle}) = {format_rat(g)}")
            lines.append(f"  max discrepancy {format_rat(gap)} (bound {format_rat(Fraction(p.n, args.oracle))})")
        else:
            lines.extend(f"  f_{k} = {format_rat(f)}" for k, f in enumerate(pay, 1))
        results.append(entry)
    _emit(args, _report("eval", results=results), lines)
    return EXIT_OK


def _verify_lines(rec, necessary) -> list[str]:
    p = rec.profile
    lines = [f"profile {p}"]
    d, t = rec.definition, rec.theorem
    lines.append(f"  definition: {'equilibrium' if d else 'not an equilibrium'}")
    lines.extend(f"    {r.message}" for r in d.reasons)
    lines.append(f"  conditions: {'equilibrium' if t else 'not an equilibrium'}")
    lines.extend(f"    [{r.tag}] {r.message}" for r in t.reasons)
    if necessary:
        lines.append("  necessary conditions violated:")
        lines.extend(f"    [{f.tag}] {f.message}" for f in necessary)
    else:
        lines.append("  necessary conditions: all hold")
    lines.append(f"  verdicts agree: {'yes' if rec.agree else 'NO'}")
    return lines


def cmd_verify(args) -> int:
    profiles = _read_profiles(args)
    try:
        records = cross_validate_many(profiles, workers=args.workers)
    except DisagreementError as exc:
        dump = _report("verify", disagreement=exc.record.to_dict())
        print(json.dumps(dump, indent=2), file=sys.stderr)
        return EXIT_DISAGREE
    results, lines = [], []
    for rec in records:
        necessary = check_necessary(rec.profile)
        entry = rec.to_dict()
        entry["necessary"] = [f.to_dict() for f in necessary]
        entry["deviations"] = [deviation_sup(rec.profile, k).to_dict()
                               for k in range(1, rec.profile.n + 1)]
        results.append(entry)
        lines.extend(_verify_lines(rec, necessary))
    _emit(args, _report("verify", results=results), lines)
    return EXIT_OK if all(r.definition.equilibrium for r in records) else EXIT_NOT_EQ


def cmd_synth(args) -> int:
    n = args.n
    if n == 3:
        raise UsageError("no equilibrium exists for n=3")
    if n == 2:
        raise UsageError("for n=2 the unique equilibrium is 1/2,1/2; synthesis covers n >= 4")
    if n < 2:
        raise UsageError(f"need at least 2 vendors, got n={n}")
    try:
        if args.canonical:
            profiles = [canonical_equilibrium(n)]
        else:
            profiles = sample_equilibria(n, args.count, args.seed, grid=args.grid or 840)
    except (InfeasibleError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    try:
        records = cross_validate_many(profiles)
    except DisagreementError as exc:
        print(json.dumps(_report("synth", disagreement=exc.record.to_dict()), indent=2), file=sys.stderr)
        return EXIT_DISAGREE
    results = []
    lines = []
    for rec in records:
        entry = rec.to_dict()
        entry["lengths"] = [format_rat(x) for x in intervals(rec.profile)]
        results.append(entry)
        status = "verified" if rec.definition and rec.theorem else "NOT verified"
        lines.append(f"{rec.profile}  {status}")
    _emit(args, _report("synth", n=n, seed=None if args.canonical else args.seed, results=results), lines)
    ok = all(r.definition.equilibrium and r.theorem.equilibrium for r in records)
    return EXIT_OK if ok else EXIT_NOT_EQ


def cmd_dynamics(args) -> int:
    p = _profile(args.profile)
    if args.grid is None:
        raise UsageError("--grid M is required")
    try:
        trace = run_dynamics(p, args.grid, args.steps, seed=args.seed)
    except (OffGridError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write(trace.to_csv())
    lines = [f"start {p} on grid 1/{args.grid}"]
    for i, s in enumerate(trace.steps, 1):
        lines.append(f"  {i:4d}: vendor {s.vendor} {format_rat(s.source)} -> {format_rat(s.target)}"
                     f"  ({format_rat(s.payoff_before)} -> {format_rat(s.payoff_after)})")
    tail = f"outcome {trace.outcome}"
    if trace.period:
        tail += f" (period {trace.period})"
    tail += f", final {trace.final}"
    if trace.exact_equilibrium is not None:
        tail += f", exact equilibrium: {'yes' if trace.exact_equilibrium else 'no'}"
    lines.append(tail)
    _emit(args, _report("dynamics", input=p.to_strings(), trace=trace.to_dict()), lines)
    return EXIT_OK


def repro_checks() -> list[dict]:
    """Assertions reproducing the eight-vendor counterexample."""
    p = make_profile(COUNTEREXAMPLE)
    pay = payoff_closed_form(p)
    edge, inner = Fraction(1, 10), Fraction(3, 20)
    moved = payoff_closed_form(p.replace(3, Fraction(1, 2))).f(3)
    rec = cross_validate(p)
    checks = [
        ("edge_payoffs", [format_rat(edge)] * 4, [format_rat(pay.f(k)) for k in (1, 2, 7, 8)]),
        ("interior_payoffs", [format_rat(inner)] * 4, [format_rat(pay.f(k)) for k in (3, 4, 5, 6)]),
        ("necessary_conditions_hold", [], [f.tag for f in check_necessary(p)]),
        ("vendor3_to_half_payoff", "1/5", format_rat(moved)),
        ("vendor3_sup", "1/5", format_rat(deviation_sup(p, 3).sup)),
        ("not_equilibrium_by_definition", False, rec.definition.equilibrium),
        ("not_equilibrium_by_conditions", False, rec.theorem.equilibrium),
    ]
    return [{"name": name, "expected": exp, "actual": act, "ok": exp == act}
            for name, exp, act in checks]


def cmd_repro(args) -> int:
    checks = repro_checks()
    failed = [c for c in checks if not c["ok"]]
    lines = [f"{'PASS' if c['ok'] else 'FAIL'}  {c['name']}: expected {c['expected']}, got {c['actual']}"
             for c in checks]
    if failed:
        lines.append(f"first failing assertion: {failed[0]['name']}")
    report = _report("repro", input=list(COUNTEREXAMPLE), assertions=checks,
                     first_failure=failed[0]["name"] if failed else None)
    _emit(args, report, lines)
    return EXIT_REPRO if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hotelling", description="Exact equilibrium tools for the linear-city location game.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, profile=True):
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        if profile:
            sp.add_argument("profile", nargs="?", help="comma-separated rationals, e.g. 1/4,1/4,3/4,3/4")
            sp.add_argument("--file", help="one profile per line")

    sp = sub.add_parser("eval", help="payoffs of every vendor")
    common(sp)
    sp.add_argument("--oracle", type=int, metavar="M", help="add a midpoint-rule check with M cells")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("verify", help="equilibrium verdicts and their agreement")
    common(sp)
    sp.add_argument("--workers", type=int, default=1, help="processes for --file batches")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("synth", help="construct equilibria for n >= 4")
    common(sp, profile=False)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--canonical", action="store_true", help="evenly spaced singles between the outer pairs")
    sp.add_argument("--grid", type=int, help="sampling denominator (default 840)")
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("dynamics", help="best-response dynamics on a grid")
    common(sp, profile=False)
    sp.add_argument("profile")
    sp.add_argument("--grid", type=int, help="grid size M: positions k/M")
    sp.add_argument("--steps", type=int, default=10_000)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--csv", metavar="PATH", help="also write the trace as CSV")
    sp.set_defaults(func=cmd_dynamics)

    sp = sub.add_parser("repro", help="reproduce the eight-vendor counterexample")
    common(sp, profile=False)
    sp.set_defaults(func=cmd_repro)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"hotelling {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
