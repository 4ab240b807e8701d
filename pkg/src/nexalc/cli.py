"""Command-line front end: ``nexalc sat|valid|oracle|crisp``.

Exit codes: 0 SAT / VALID / AGREE, 1 UNSAT / INVALID / no model found /
DISAGREE, 2 bad input, 3 oracle budget exhausted, 4 extracted model failed
verification.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from .grid import compute_grid
from .model import ModelError, extract_model
from .oracle import Outcome, brute_force_sat, classical_brute_force, classical_decide, crispify
from .parser import parse_assertion, parse_kb
from .solver import is_satisfiable, is_valid, solve_on_the_fly
from .syntax import KB, SyntaxErrorAt, fmt_rational
from .tableau import RulePolicy

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_ABORTED = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read_kb(path: Optional[str]) -> KB:
    if path is None:
        return KB()
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror or e}") from None
    try:
        return parse_kb(text)
    except SyntaxErrorAt as e:
        raise InputError(f"{path}: {e}") from None


def _policy(name: str) -> RulePolicy:
    return RulePolicy(name)


def _emit_json(out, title: str, data) -> None:
    out.write(f"{title}:\n{json.dumps(data, indent=2, sort_keys=True)}\n")


def _grid_block(grid) -> dict:
    return {
        "step": fmt_rational(grid.step),
        "epsilon": fmt_rational(grid.epsilon),
        "Z": [fmt_rational(z) for z in grid.Z],
        "Zprime_size": len(grid.Zprime),
    }


def _write_model(ex, dest: str, out) -> None:
    data = ex.interpretation.to_json()
    data["designated"] = ex.designated
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if dest == "-":
        out.write("model:\n" + text)
    else:
        Path(dest).write_text(text)
        out.write(f"model written to {dest}\n")


def cmd_sat(args, out) -> int:
    tkb = _read_kb(args.tbox)
    qkb = _read_kb(args.query)
    akb = _read_kb(args.abox) if args.abox else qkb
    tbox = tkb.tbox + (qkb.tbox if args.query != args.tbox else ())
    abox = akb.abox if akb.abox else None
    gamma = qkb.query
    if args.print_grid:
        _emit_json(out, "grid", _grid_block(compute_grid(tbox, gamma, abox)))
    solve = solve_on_the_fly if args.on_the_fly else is_satisfiable
    res = solve(gamma, tbox, abox, policy=_policy(args.policy))
    out.write(("SAT" if res.sat else "UNSAT") + "\n")
    if res.sat:
        ex = extract_model(res)
        if args.model:
            _write_model(ex, args.model, out)
    if args.stats:
        _emit_json(out, "stats", res.stats())
    if args.dump_graph:
        Path(args.dump_graph).write_text(res.graph.dump() + "\n")
    return EXIT_OK if res.sat else EXIT_NO


def cmd_valid(args, out) -> int:
    tbox = _read_kb(args.tbox).tbox
    try:
        a = parse_assertion(args.assertion)
    except SyntaxErrorAt as e:
        raise InputError(f"assertion: {e}") from None
    if args.print_grid:
        _emit_json(out, "grid", _grid_block(compute_grid(tbox, [a])))
    ok, res = is_valid(a, tbox, on_the_fly=not args.batch, policy=_policy(args.policy))
    out.write(("VALID" if ok else "INVALID") + "\n")
    if not ok and args.model:
        # the model of the negated assertion is a countermodel
        _write_model(extract_model(res), args.model, out)
    if args.stats:
        _emit_json(out, "stats", res.stats())
    if args.dump_graph:
        Path(args.dump_graph).write_text(res.graph.dump() + "\n")
    return EXIT_OK if ok else EXIT_NO


def cmd_oracle(args, out) -> int:
    tkb = _read_kb(args.tbox)
    qkb = _read_kb(args.query)
    akb = _read_kb(args.abox) if args.abox else qkb
    tbox = tkb.tbox + (qkb.tbox if args.query != args.tbox else ())
    abox = akb.abox if akb.abox else None
    if args.max_domain < 1:
        raise InputError("--max-domain must be at least 1")
    r = brute_force_sat(qkb.query, tbox, args.max_domain, abox=abox, budget=args.budget)
    out.write(str(r) + "\n")
    if r.sat and args.model:
        data = r.model.to_json()
        data["designated"] = r.designated
        _emit_json(out, "model", data)
    if r.outcome is Outcome.SAT:
        return EXIT_OK
    return EXIT_ABORTED if r.outcome is Outcome.ABORTED else EXIT_NO


def cmd_crisp(args, out) -> int:
    kb = _read_kb(args.kb)
    query, tbox = crispify(kb)
    fuzzy = is_satisfiable(query, tbox).sat
    classical = classical_decide(kb)
    brute = classical_brute_force(kb, args.max_domain)
    out.write(f"fuzzy: {'SAT' if fuzzy else 'UNSAT'}\n")
    out.write(f"classical: {'SAT' if classical else 'UNSAT'}\n")
    out.write(f"classical brute force: {brute}\n")
    agree = fuzzy == classical and (not brute.sat or classical)
    out.write(("AGREE" if agree else "DISAGREE") + "\n")
    return EXIT_OK if agree else EXIT_NO


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nexalc", description="Decision procedure for non-expansive fuzzy ALC.")
    sub = ap.add_subparsers(dest="command", required=True)
    policies = [p.value for p in RulePolicy]

    p = sub.add_parser("sat", help="satisfiability of a query (and ABox) under a TBox")
    p.add_argument("--tbox", help="file with GCIs")
    p.add_argument("--query", required=True, help="file with query assertions")
    p.add_argument("--abox", help="file with ABox assertions")
    p.add_argument("--on-the-fly", action="store_true", help="decide while building the tableau")
    p.add_argument("--model", metavar="FILE", help="write the verified model as JSON ('-' for stdout)")
    p.add_argument("--stats", action="store_true")
    p.add_argument("--dump-graph", metavar="FILE")
    p.add_argument("--print-grid", action="store_true")
    p.add_argument("--policy", choices=policies, default=RulePolicy.COMPRESSED.value)
    p.set_defaults(func=cmd_sat)

    p = sub.add_parser("valid", help="validity of one assertion under a TBox")
    p.add_argument("--tbox", help="file with GCIs")
    p.add_argument("--assertion", required=True)
    p.add_argument("--batch", action="store_true", help="build the whole tableau before deciding")
    p.add_argument("--model", metavar="FILE", help="write a countermodel when invalid")
    p.add_argument("--stats", action="store_true")
    p.add_argument("--dump-graph", metavar="FILE")
    p.add_argument("--print-grid", action="store_true")
    p.add_argument("--policy", choices=policies, default=RulePolicy.COMPRESSED.value)
    p.set_defaults(func=cmd_valid)

    p = sub.add_parser("oracle", help="brute-force search for a small grid model")
    p.add_argument("--tbox")
    p.add_argument("--query", required=True)
    p.add_argument("--abox")
    p.add_argument("--max-domain", type=int, default=3)
    p.add_argument("--budget", type=int, default=200_000, help="search-node cap before giving up")
    p.add_argument("--model", action="store_true", help="print the model found")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("crisp", help="compare a classical KB's fuzzy and classical verdicts")
    p.add_argument("--kb", required=True)
    p.add_argument("--max-domain", type=int, default=3, help="domain bound for the classical enumeration")
    p.set_defaults(func=cmd_crisp)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return args.func(args, out)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ModelError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
