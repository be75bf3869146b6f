"""``autcsp`` command line.

Machine output is JSON on stdout (keys sorted, no timing unless asked);
a one-line human summary goes to stderr.  Exit codes: 0 sat / in P,
1 unsat / NP-complete, 2 usage or input error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
import time
from pathlib import Path

from autcsp import affine, nu, oracle, semilattice, width1
from autcsp.automaton import Automaton, Domain, parse_automaton
from autcsp.errors import AutCSPError, BudgetExceeded, NotPolymorphism
from autcsp.fixtures import FIXTURES
from autcsp.generate import nae_reduction, random_automaton, random_instance, random_nae_formula
from autcsp.instance import Instance, parse_instance, verify
from autcsp.operations import (
    SCHAEFER_OPS,
    OperationTable,
    PolymorphismVerdict,
    affine_op,
    check_user_table,
    classify_dichotomy,
    is_polymorphism,
    parse_operation,
    schaefer_op,
)

log = logging.getLogger("autcsp")

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(AutCSPError):
    pass


# -- I/O helpers -----------------------------------------------------------------


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def load_automaton(path: str) -> Automaton:
    return parse_automaton(_read(path))


def load_instance(path: str, a: Automaton) -> Instance:
    return parse_instance(_read(path), a)


def load_table(path: str, a: Automaton | None = None) -> OperationTable:
    table = parse_operation(_read(path))
    table.name = table.name or Path(path).stem
    if a is not None and table.domain != a.domain:
        raise UsageError(f"{path}: table alphabet differs from the automaton's")
    return table


def verdict_json(v: PolymorphismVerdict, domain: Domain) -> dict:
    out: dict = {"holds": v.holds}
    if not v.holds:
        out["counterexample"] = [domain.format(w) for w in v.counterexample]
    return out


def emit(report: dict, summary: str, args) -> None:
    if not getattr(args, "timing", False):
        report.pop("seconds", None)
    json.dump(report, sys.stdout, sort_keys=True, indent=2)
    sys.stdout.write("\n")
    print(summary, file=sys.stderr)


def _solution_report(instance: Instance, method: str, phi, extra: dict | None = None) -> tuple[dict, int]:
    report: dict = {"method": method, **(extra or {})}
    if phi is None:
        report["status"] = "unsat"
        return report, EXIT_NO
    # fail closed: nothing unverified is ever reported as a solution
    if not verify(instance, phi):
        raise AssertionError(f"{method} returned an assignment that does not verify")
    report["status"] = "sat"
    report["assignment"] = instance.format_assignment(phi)
    return report, EXIT_OK


# -- classify --------------------------------------------------------------------


def cmd_classify(args) -> int:
    a = load_automaton(args.automaton)
    start = time.perf_counter()
    report: dict = {"status": "classified", "states": a.num_states, "alphabet": list(a.domain.symbols)}
    tables = [load_table(p, a) for p in args.table or ()]
    if tables:
        report["tables"] = {t.name: verdict_json(check_user_table(a, t), a.domain) for t in tables}
    if a.domain.size == 2:
        verdict = classify_dichotomy(a)
        report["classification"] = verdict.classification
        report["tractable_ops"] = list(verdict.tractable_ops)
        report["verdicts"] = {n: verdict_json(v, a.domain) for n, v in verdict.verdicts.items()}
        if not verdict.tractable:
            report["witness_arities"] = verdict.witness_arities
        code = EXIT_OK if verdict.tractable else EXIT_NO
        summary = f"{args.automaton}: {verdict.classification}"
        if verdict.tractable:
            summary += " via " + ", ".join(verdict.tractable_ops)
    else:
        report["classification"] = "partial"
        report["note"] = "dichotomy classification needs a two-symbol alphabet; only supplied tables were checked"
        code = EXIT_OK
        summary = f"{args.automaton}: partial report over |D| = {a.domain.size}"
    report["seconds"] = round(time.perf_counter() - start, 6)
    emit(report, summary, args)
    return code


# -- solve -----------------------------------------------------------------------


def _constant_solve(instance: Instance, d: int):
    """All-``d`` assignment: a solution whenever every used relation is nonempty
    and the unary domains admit ``d``.  Returns (decided, assignment)."""
    a = instance.automaton
    for n in sorted({c.arity for c in instance.constraints}):
        if a.word_of_length(n) is None:
            return True, None
    phi = {x: d for x in instance.variables}
    if verify(instance, phi):
        return True, phi
    return False, None


def _nu_table(args, a: Automaton, k: int) -> OperationTable:
    if args.table:
        g = load_table(args.table, a)
        if g.arity != k:
            raise UsageError(f"table has arity {g.arity}, method asked for {k}")
        return g
    if a.domain.size != 2:
        raise UsageError("near-unanimity methods over non-Boolean alphabets need --table")
    maj = schaefer_op("maj", a.domain)
    if k == 3:
        return maj
    # majority of the first three arguments is near-unanimous at every arity >= 3
    return OperationTable.from_function(a.domain, k, lambda *xs: maj(*xs[:3]), f"nu{k}")


def _solve_with(method: str, instance: Instance, args) -> tuple[dict, int]:
    a = instance.automaton
    check = not args.no_check
    if method == "and":
        return _solution_report(instance, method, semilattice.solve_and(instance, check))
    if method == "or":
        return _solution_report(instance, method, semilattice.solve_or(instance, check))
    if method.startswith("affine:"):
        try:
            q = int(method.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad field size in {method!r}") from None
        return _solution_report(instance, method, affine.solve_affine(instance, q, check))
    if method == "width1":
        if not args.assume_width1:
            raise UsageError("--method width1 decides only under a width-1 promise; pass --assume-width1")
        m = width1.one_minimize(instance)
        report = {"method": method, "promise": "width1"}
        if m.refuted:
            report["status"] = "unsat"
            return report, EXIT_NO
        report["status"] = "consistent"
        report["domains"] = {x: [a.domain.symbols[d] for d in sorted(p)] for x, p in m.domains.items()}
        return report, EXIT_OK
    if method == "semilattice":
        if not args.meet:
            raise UsageError("--method semilattice needs --meet TABLE")
        meet = load_table(args.meet, a)
        return _solution_report(instance, method, width1.solve_semilattice_general(instance, meet, check))
    if method == "majority":
        g = _nu_table(args, a, 3)
        if not g.is_majority():
            raise UsageError("table is not a majority operation")
        return _solution_report(instance, method, nu.solve_majority(instance, g, check))
    if method.startswith("nu:"):
        try:
            k = int(method.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad arity in {method!r}") from None
        if k < 3:
            raise UsageError("near-unanimity needs arity at least 3")
        g = _nu_table(args, a, k)
        if not g.is_near_unanimity():
            raise UsageError("table is not a near-unanimity operation")
        return _solution_report(instance, method, nu.solve_nu(instance, g, check))
    if method == "brute":
        return _solution_report(instance, method, oracle.brute_solve(instance, args.budget))
    raise UsageError(f"unknown method {method!r}")


def _auto(instance: Instance, args) -> tuple[dict, int]:
    a = instance.automaton
    if a.domain.size != 2:
        report, code = _solve_with("brute", instance, args)
        report["warnings"] = ["no dichotomy for alphabets beyond two symbols; solved by exhaustive search"]
        return report, code
    verdict = classify_dichotomy(a)
    ops = verdict.tractable_ops
    base = {"classification": verdict.classification, "tractable_ops": list(ops)}
    for const, d in (("const0", 0), ("const1", 1)):
        if const in ops:
            decided, phi = _constant_solve(instance, d)
            if decided:
                return _solution_report(instance, const, phi, base)
    routes = {"and": "and", "or": "or", "minor": "affine:2", "maj": "majority"}
    for op, method in routes.items():
        if op not in ops:
            continue
        if method == "affine:2" and not a.domain.is_numeric():
            continue
        if any(not schaefer_op(op, a.domain).preserves(p) for p in instance.domains.values()):
            continue
        args.no_check = True  # classification already verified the polymorphism
        report, code = _solve_with(method, instance, args)
        return {**base, **report}, code
    report, code = _solve_with("brute", instance, args)
    report.update(base)
    if verdict.tractable:
        report["warnings"] = ["domain constraints fall outside the tractable case; solved by exhaustive search"]
    else:
        report["warnings"] = ["NP-complete language; solved by exhaustive search"]
    return report, code


def cmd_solve(args) -> int:
    a = load_automaton(args.aut)
    instance = load_instance(args.instance, a)
    start = time.perf_counter()
    try:
        if args.method == "auto":
            report, code = _auto(instance, args)
        else:
            report, code = _solve_with(args.method, instance, args)
    except NotPolymorphism as exc:
        exc.domain = a.domain
        raise
    report["seconds"] = round(time.perf_counter() - start, 6)
    for w in report.get("warnings", ()):
        print(f"warning: {w}", file=sys.stderr)
    emit(report, f"{args.instance}: {report['status']} ({report['method']})", args)
    return code


# -- check-poly ------------------------------------------------------------------


def _op_from_args(args, a: Automaton) -> OperationTable:
    if bool(args.op) == bool(args.table):
        raise UsageError("give exactly one of --op or --table")
    if args.op:
        return schaefer_op(args.op, a.domain)
    return load_table(args.table, a)


def cmd_check_poly(args) -> int:
    a = load_automaton(args.automaton)
    f = _op_from_args(args, a)
    verdict = is_polymorphism(a, f)
    report = {"operation": f.name, "arity": f.arity, **verdict_json(verdict, a.domain)}
    summary = f"{f.name}: {'polymorphism' if verdict.holds else 'refuted'}"
    emit(report, summary, args)
    return EXIT_OK if verdict.holds else EXIT_NO


# -- translate -------------------------------------------------------------------


def cmd_translate(args) -> int:
    a = load_automaton(args.aut)
    instance = load_instance(args.instance, a)
    try:
        return _translate(args, a, instance)
    except NotPolymorphism as exc:
        exc.domain = a.domain
        raise


def _translate(args, a: Automaton, instance: Instance) -> int:
    check = not args.no_check
    if args.affine is not None:
        q = args.affine
        affine.check_field(q)
        if check:
            verdict = is_polymorphism(a, affine_op(q)) if a.domain == Domain.range(q) else None
            if verdict is not None and not verdict.holds:
                raise NotPolymorphism(f"affine{q}", verdict)
        per = {}
        for n in sorted({c.arity for c in instance.constraints}):
            system = affine.extract_linear_system(a, n, q)
            per[str(n)] = system.to_json() if system else None
        report = {"kind": "affine", "relations": per, "global": affine.assemble_global_system(instance, q).to_json(),
                  "variables": list(instance.variables)}
        summary = f"affine systems over GF({q}) for {len(per)} arities"
    elif args.majority:
        g = load_table(args.majority, a)
        net = nu.translate_majority(instance, g, check)
        report = {"kind": "majority", "network": net.to_json(a.domain.symbols)}
        summary = f"binary network over {len(instance.variables)} variables"
    else:
        g = load_table(args.nu, a)
        net = nu.translate_nu(instance, g, check)
        report = {"kind": "nu", "network": net.to_json(a.domain.symbols)}
        summary = f"{net.width}-ary network over {len(instance.variables)} variables"
    emit(report, summary, args)
    return EXIT_OK


# -- minimize --------------------------------------------------------------------


def cmd_minimize(args) -> int:
    a = load_automaton(args.aut)
    instance = load_instance(args.instance, a)
    m = width1.one_minimize(instance)
    out = m.to_instance()
    if args.emit_instance:
        sys.stdout.write(out.to_text())
        print(f"{args.instance}: {'refuted' if m.refuted else '1-minimal'}", file=sys.stderr)
        return EXIT_NO if m.refuted else EXIT_OK
    sym = a.domain.symbols
    report = {
        "status": "refuted" if m.refuted else "minimal",
        "instance": out.to_text(),
        "domains": {x: [sym[d] for d in sorted(p)] for x, p in m.domains.items()},
        "trace": [
            {"var": x, "old": [sym[d] for d in sorted(old)], "new": [sym[d] for d in sorted(new)]}
            for x, old, new in m.trace
        ],
    }
    emit(report, f"{args.instance}: {report['status']} after {len(m.trace)} updates", args)
    return EXIT_NO if m.refuted else EXIT_OK


# -- oracle ----------------------------------------------------------------------


def cmd_oracle(args) -> int:
    a = load_automaton(args.automaton if args.action != "solve" else args.aut)
    if args.action == "enumerate":
        if args.n is None:
            raise UsageError("oracle enumerate needs -n")
        words = oracle.enumerate_relation(a, args.n, args.budget)
        report = {"n": args.n, "count": len(words), "tuples": [a.domain.format(w) for w in words]}
        emit(report, f"|R_{args.n}| = {len(words)}", args)
        return EXIT_OK
    if args.action == "solve":
        instance = load_instance(args.automaton, a)
        report, code = _solution_report(instance, "brute", oracle.brute_solve(instance, args.budget))
        emit(report, f"{args.automaton}: {report['status']} (brute)", args)
        return code
    f = _op_from_args(args, a)
    verdict = oracle.brute_is_polymorphism(a, f, args.max_len, args.budget)
    report = {"operation": f.name, "max_len": args.max_len, **verdict_json(verdict, a.domain)}
    emit(report, f"{f.name}: {'holds' if verdict.holds else 'refuted'} up to length {args.max_len}", args)
    return EXIT_OK if verdict.holds else EXIT_NO


# -- fixtures / generate ---------------------------------------------------------


def cmd_fixtures(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, build in FIXTURES.items():
        path = out / f"{name}.aut"
        path.write_text(build().to_text(), encoding="utf-8")
        written.append(path.name)
    emit({"directory": str(out), "files": written}, f"wrote {len(written)} fixtures to {out}", args)
    return EXIT_OK


def _write_pair(args, instance: Instance, report: dict) -> None:
    report["instance"] = instance.to_text()
    report["automaton"] = instance.automaton.to_text()
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{args.name}.inst").write_text(report["instance"], encoding="utf-8")
        (out / f"{args.name}.aut").write_text(report["automaton"], encoding="utf-8")
        report["files"] = [f"{args.name}.inst", f"{args.name}.aut"]


def cmd_generate(args) -> int:
    rng = random.Random(args.seed)
    if args.kind == "nae":
        if args.clauses < 1:
            raise UsageError("--clauses must be at least 1")
        clauses = random_nae_formula(rng, args.clauses, args.vars)
        instance = nae_reduction(clauses)
        report = {"kind": "nae", "seed": args.seed, "clauses": [list(c) for c in clauses]}
    else:
        domain = Domain.range(args.alphabet)
        a = random_automaton(rng, domain, max_states=args.states)
        instance = random_instance(rng, a, max_vars=args.vars, max_constraints=args.constraints, max_arity=args.max_arity)
        report = {"kind": "random", "seed": args.seed}
    _write_pair(args, instance, report)
    emit(report, f"generated {args.kind} instance (seed {args.seed})", args)
    return EXIT_OK


# -- entry point -----------------------------------------------------------------


def _common_options(p: argparse.ArgumentParser, prefix: str) -> argparse.ArgumentParser:
    p.add_argument("-v", "--verbose", dest=prefix + "verbose", action="store_true", help="debug logging on stderr")
    p.add_argument("--timing", dest=prefix + "timing", action="store_true", help="include wall-clock seconds in the JSON")
    p.add_argument("--budget", dest=prefix + "budget", type=int, help="oracle budget (overrides AUTCSP_BUDGET)")
    return p


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="autcsp", description="Automatic constraint satisfaction toolkit")
    _common_options(p, "")
    sub = p.add_subparsers(dest="command", required=True)
    _add_parser = sub.add_parser

    def add_parser(name, **kw):
        # shared options are accepted after the subcommand as well
        return _common_options(_add_parser(name, **kw), "sub_")

    sub.add_parser = add_parser

    s = sub.add_parser("classify", help="Schaefer dichotomy for a Boolean automaton")
    s.add_argument("automaton")
    s.add_argument("--table", action="append", help="also check this operation table (repeatable)")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("solve", help="solve an instance")
    s.add_argument("instance")
    s.add_argument("--aut", required=True)
    s.add_argument("--method", default="auto",
                   help="auto | and | or | affine:q | width1 | semilattice | majority | nu:k | brute")
    s.add_argument("--meet", help="semilattice table for --method semilattice")
    s.add_argument("--table", help="near-unanimity table for majority / nu:k")
    s.add_argument("--assume-width1", action="store_true")
    s.add_argument("--no-check", action="store_true", help="skip the polymorphism precondition check")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("check-poly", help="decide whether an operation is a polymorphism")
    s.add_argument("automaton")
    s.add_argument("--op", choices=list(SCHAEFER_OPS))
    s.add_argument("--table")
    s.set_defaults(func=cmd_check_poly)

    s = sub.add_parser("translate", help="emit linear systems or constraint networks")
    s.add_argument("instance")
    s.add_argument("--aut", required=True)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--affine", type=int, metavar="Q")
    g.add_argument("--majority", metavar="TABLE")
    g.add_argument("--nu", metavar="TABLE")
    s.add_argument("--no-check", action="store_true")
    s.set_defaults(func=cmd_translate)

    s = sub.add_parser("minimize", help="1-minimize an instance")
    s.add_argument("instance")
    s.add_argument("--aut", required=True)
    s.add_argument("--emit-instance", action="store_true", help="print the instance file instead of JSON")
    s.set_defaults(func=cmd_minimize)

    s = sub.add_parser("oracle", help="brute-force ground truth")
    s.add_argument("action", choices=["enumerate", "solve", "checkpoly"])
    s.add_argument("automaton", help="automaton file (instance file for 'solve')")
    s.add_argument("--aut", help="automaton file for 'solve'")
    s.add_argument("-n", type=int)
    s.add_argument("--op", choices=list(SCHAEFER_OPS))
    s.add_argument("--table")
    s.add_argument("--max-len", type=int, default=6)
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("fixtures", help="write the named example automata")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_fixtures)

    s = sub.add_parser("generate", help="seeded instance generators")
    s.add_argument("kind", choices=["nae", "random"])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--clauses", type=int, default=3)
    s.add_argument("--vars", type=int, default=4)
    s.add_argument("--constraints", type=int, default=4)
    s.add_argument("--max-arity", type=int, default=4)
    s.add_argument("--states", type=int, default=4)
    s.add_argument("--alphabet", type=int, default=2)
    s.add_argument("--out")
    s.add_argument("--name", default="generated")
    s.set_defaults(func=cmd_generate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    args.verbose = args.verbose or args.sub_verbose
    args.timing = args.timing or args.sub_timing
    args.budget = args.sub_budget if args.sub_budget is not None else args.budget
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    if args.command == "oracle" and args.action == "solve" and not args.aut:
        print("error: oracle solve needs --aut", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        emit({"status": "error", "error": str(exc), "kind": "budget"}, f"error: {exc}", args)
        return EXIT_BUDGET
    except NotPolymorphism as exc:
        report = {"status": "error", "error": str(exc), "kind": "precondition"}
        domain = getattr(exc, "domain", None)
        if exc.verdict.counterexample is not None and domain is not None:
            report["counterexample"] = [domain.format(w) for w in exc.verdict.counterexample]
        emit(report, f"error: {exc}", args)
        return EXIT_USAGE
    except (AutCSPError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        emit({"status": "error", "error": str(msg), "kind": "input"}, f"error: {msg}", args)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
