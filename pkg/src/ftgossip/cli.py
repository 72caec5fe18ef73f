"""Command line front end: ``ftgossip <command> ...``.

Exit codes: 0 success, 1 a verification came out negative, 2 bad usage or
unreadable input.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Callable, List, Optional, Sequence

from .core import (
    ScheduleError,
    apply_step,
    check_invariants,
    format_schedule,
    is_consensus_matrix,
    node_update_cost,
    parse_schedule,
    parse_state,
    product,
)
from .exact import Dyadic, format_rational

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _exact(q, approx: bool) -> str:
    s = format_rational(q)
    if approx:
        f = q.to_fraction() if isinstance(q, Dyadic) else Fraction(q)
        s += f" (~{float(f):.6g})"
    return s


def _read(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _emit(args, command: str, params: dict, results: dict, human: Callable[[], List[str]], t0: float):
    if args.json:
        report = {
            "command": command,
            "parameters": params,
            "results": results,
            "seconds": round(time.perf_counter() - t0, 6),
        }
        print(json.dumps(report, indent=2))
    else:
        for line in human():
            print(line)


# commands ----------------------------------------------------------------------

def cmd_build(args) -> int:
    from .schedules import build_asymmetric, build_hypercube

    if args.type == "hypercube":
        if args.m is None or args.n is not None:
            raise UsageError("--type hypercube takes --m only")
        if args.m < 0:
            raise UsageError("--m must be nonnegative")
        sched = build_hypercube(args.m)
    else:
        if args.n is None or args.m is not None:
            raise UsageError("--type asym takes --n only")
        if args.n < 1:
            raise UsageError("--n must be positive")
        sched = build_asymmetric(args.n)
    steps, updates = len(sched), node_update_cost(sched)
    text = format_schedule(sched, [f"steps: {steps}", f"updates: {updates}"])
    if args.output:
        Path(args.output).write_text(text)
    if args.json:
        print(json.dumps({"n": sched.n, "steps": steps, "updates": updates,
                          "schedule": [str(s) for s in sched]}, indent=2))
    elif args.output:
        print(f"steps: {steps}")
        print(f"updates: {updates}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args, t0) -> int:
    try:
        sched = parse_schedule(_read(args.schedule))
    except ScheduleError as exc:
        raise UsageError(f"{args.schedule}: {exc}") from None
    beta = is_consensus_matrix(product(sched))
    inv = check_invariants(sched)
    results = {
        "consensus": beta is not None,
        "beta": [format_rational(b) for b in beta] if beta else None,
        "updates": node_update_cost(sched),
        "steps": len(sched),
        "invariants": {
            "prefixes": inv.prefixes,
            "row_sums": inv.row_sums,
            "diagonal_bound": inv.diagonal_bound,
            "column_sums": inv.column_sums,
            "rank_dichotomy": inv.rank_dichotomy,
            "failures": inv.failures,
        },
    }

    def human():
        out = [f"n: {sched.n}", f"steps: {len(sched)}", f"updates: {results['updates']}",
               f"consensus: {'yes' if beta else 'no'}"]
        if beta:
            out.append("beta: " + " ".join(_exact(b, args.approx) for b in beta))
        for name in ("row_sums", "diagonal_bound", "column_sums", "rank_dichotomy"):
            out.append(f"{name}: {'pass' if getattr(inv, name) else 'FAIL'}")
        out.extend(inv.failures)
        return out

    _emit(args, "verify", {"schedule": args.schedule}, results, human, t0)
    return EXIT_OK if beta is not None and inv.ok else EXIT_FAIL


def cmd_simulate(args, t0) -> int:
    try:
        sched = parse_schedule(_read(args.schedule))
        x = parse_state(_read(args.state))
    except ScheduleError as exc:
        raise UsageError(str(exc)) from None
    if len(x) != sched.n:
        raise UsageError(f"state has {len(x)} values but the schedule has n={sched.n}")
    states = [x]
    for step in sched:
        x = apply_step(x, step)
        states.append(x)
    first = next((k for k, s in enumerate(states) if len(set(s)) <= 1), None)
    results = {
        "final": [format_rational(v) for v in states[-1]],
        "consensus_step": first,
    }
    if args.trace:
        results["trace"] = [[format_rational(v) for v in s] for s in states]

    def human():
        out = []
        if args.trace:
            for k, s in enumerate(states):
                out.append(f"{k}: " + " ".join(_exact(v, args.approx) for v in s))
        out.append("final: " + " ".join(_exact(v, args.approx) for v in states[-1]))
        out.append(f"consensus at step: {first if first is not None else 'never'}")
        return out

    _emit(args, "simulate", {"schedule": args.schedule, "state": args.state}, results, human, t0)
    return EXIT_OK


def cmd_search(args, t0) -> int:
    from .search import min_updates

    if args.n < 2:
        raise UsageError("--n must be at least 2")
    if args.budget is not None and args.budget < 0:
        raise UsageError("--budget must be nonnegative")
    res = min_updates(args.n, args.mode, args.budget, prune=not args.no_prune)
    results = res.to_dict()
    if not args.witnesses:
        results.pop("witnesses")

    def human():
        out = [f"n: {res.n}", f"mode: {res.mode.value}", f"budget: {res.budget}",
               f"min_updates: {res.min_updates if res.min_updates is not None else 'none within budget'}",
               f"explored: {res.explored}", f"backend: {res.backend}"]
        if args.witnesses:
            for w in res.witnesses:
                out.append("witness: " + ", ".join(str(s) for s in w))
        return out

    _emit(args, "search", {"n": args.n, "mode": args.mode, "budget": res.budget}, results, human, t0)
    return EXIT_OK


def cmd_lemma_f(args, t0) -> int:
    from .combinatorics import min_chi

    if args.n < 1:
        raise UsageError("--n must be positive")
    if args.max_exp is not None and args.max_exp < 0:
        raise UsageError("--max-exp must be nonnegative")
    res = min_chi(args.n, args.max_exp)
    results = {
        "n": res.n, "m": res.m, "r": res.r, "max_exp": res.max_exp,
        "min": res.value,
        "expected": res.expected,
        "witness": [format_rational(p) for p in res.witness.parts] if res.witness else None,
        "optimizers": len(res.optimizers),
    }

    def human():
        return [f"n: {res.n} (m={res.m}, r={res.r})", f"max exponent: {res.max_exp}",
                f"min chi sum: {res.value}", f"mn + 2r: {res.expected}",
                "witness: " + (" ".join(_exact(p, args.approx) for p in res.witness.parts) if res.witness else "-"),
                f"optimizers: {len(res.optimizers)}"]

    _emit(args, "lemma-f", {"n": args.n, "max_exp": res.max_exp}, results, human, t0)
    return EXIT_OK


def _parse_swaps(text: str) -> List[tuple]:
    swaps = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].replace(",", " ").strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise UsageError(f"swaps line {lineno}: expected 'i j'")
        try:
            swaps.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise UsageError(f"swaps line {lineno}: not integers") from None
    return swaps


def cmd_quantum(args, t0) -> int:
    from . import quantum as q

    cap = q.HARD_MAX_QUBITS if args.allow_4 else q.DEFAULT_MAX_QUBITS
    if not 1 <= args.n <= cap:
        raise UsageError(f"--n must be in 1..{cap}")
    chosen = sum(bool(x) for x in (args.components, args.simulate, args.impossibility))
    if chosen != 1:
        raise UsageError("choose exactly one of --components, --simulate, --impossibility")
    if args.components:
        table = q.orbit_decompose(args.n)
        results = table.to_dict()
        results["components"] = len(q.component_partition(args.n))
        results["diagonal_sector_sizes"] = q.diagonal_sector_sizes(table)

        def human():
            out = [f"n: {args.n}", f"tau0 (orbits): {table.tau0}",
                   f"components (graph): {results['components']}",
                   "diagonal sector sizes: " + " ".join(map(str, results["diagonal_sector_sizes"]))]
            for t, s in zip(table.types, table.sizes):
                out.append(f"  type {t}: size {s}")
            return out

        _emit(args, "quantum", {"n": args.n, "components": True}, results, human, t0)
        return EXIT_OK
    if args.simulate:
        if not args.rho:
            raise UsageError("--simulate needs --rho")
        swaps = _parse_swaps(_read(args.simulate))
        try:
            rho0 = q.parse_rho(args.rho, args.n)
            rho = q.quantum_simulate(args.n, swaps, rho0)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        results = {
            "rho": [{"element": str(b), "re": format_rational(re), "im": format_rational(im)}
                    for b, re, im in rho.terms()],
            "trace": format_rational(rho.trace()[0]),
            "steps": len(swaps),
        }
        _emit(args, "quantum", {"n": args.n, "simulate": args.simulate, "rho": args.rho}, results,
              lambda: [f"rho: {q.format_rho(rho)}", f"trace: {results['trace']}"], t0)
        return EXIT_OK
    rep = q.impossibility_report(args.n, args.confirm_depth)
    results = {
        "sector_sizes": rep.sector_sizes,
        "flagged": rep.flagged,
        "obstructed": rep.obstructed,
        "conclusion": rep.conclusion,
        "certificates": [
            {"size": c.n, "depth": c.depth, "no_consensus": c.exhaustive_none,
             "required_value": format_rational(c.required_value), "dyadic": c.required_dyadic}
            for c in rep.certificates
        ],
    }
    _emit(args, "quantum", {"n": args.n, "impossibility": True}, results,
          lambda: ["sector sizes: " + " ".join(map(str, rep.sector_sizes)),
                   "flagged: " + (" ".join(map(str, rep.flagged)) or "none"), rep.conclusion], t0)
    return EXIT_OK


def cmd_beta_report(args, t0) -> int:
    from .schedules import beta_report

    if args.n < 1:
        raise UsageError("--n must be positive")
    rep = beta_report(args.n)
    a = args.approx
    results = {
        "n": rep.n, "m": rep.m, "r": rep.r,
        "beta": [format_rational(b) for b in rep.beta],
        "l1": format_rational(rep.l1),
        "l2_squared": format_rational(rep.l2_squared),
        "linf": format_rational(rep.linf),
        "closed_form": format_rational(rep.closed_form),
        "half_step": format_rational(rep.half_step),
        "linf_below_half_step_below_1_over_n": rep.inequality_holds,
    }

    def human():
        return [f"n: {rep.n} (m={rep.m}, r={rep.r})",
                "beta: " + " ".join(_exact(b, a) for b in rep.beta),
                f"l1: {_exact(rep.l1, a)}", f"l2^2: {_exact(rep.l2_squared, a)}",
                f"linf: {_exact(rep.linf, a)}", f"closed form: {_exact(rep.closed_form, a)}",
                f"linf < 1/2^(m+1) < 1/n: {'yes' if rep.inequality_holds else 'no'}"]

    _emit(args, "beta-report", {"n": args.n}, results, human, t0)
    return EXIT_OK if rep.inequality_holds else EXIT_FAIL


# parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--approx", action="store_true", help="append decimal approximations")

    p = argparse.ArgumentParser(prog="ftgossip", description="Exact finite-time gossip toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", parents=[common], help="emit a constructive schedule")
    b.add_argument("--type", choices=["hypercube", "asym"], required=True)
    b.add_argument("--m", type=int)
    b.add_argument("--n", type=int)
    b.add_argument("-o", "--output", help="write the schedule here instead of stdout")

    v = sub.add_parser("verify", parents=[common], help="product, consensus and invariants of a schedule")
    v.add_argument("schedule", help="schedule file, or - for stdin")

    s = sub.add_parser("simulate", parents=[common], help="run a schedule on an initial state")
    s.add_argument("schedule")
    s.add_argument("state", help="one rational per line")
    s.add_argument("--trace", action="store_true", help="print every intermediate state")

    se = sub.add_parser("search", parents=[common], help="least node updates by exhaustive search")
    se.add_argument("--n", type=int, required=True)
    se.add_argument("--mode", choices=["sym", "asym"], default="sym")
    se.add_argument("--budget", type=int)
    se.add_argument("--witnesses", action="store_true")
    se.add_argument("--no-prune", action="store_true", help="disable the lower-bound pruning")

    lf = sub.add_parser("lemma-f", parents=[common], help="minimum chi sum over dyadic splittings of 1")
    lf.add_argument("--n", type=int, required=True)
    lf.add_argument("--max-exp", type=int)

    q = sub.add_parser("quantum", parents=[common], help="swap gossip on qubits")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--components", action="store_true", help="orbit table and graph components")
    q.add_argument("--simulate", metavar="SWAPS", help="file with one 'i j' swap per line")
    q.add_argument("--rho", help="state literal, e.g. mixed or diag:|01><01|")
    q.add_argument("--impossibility", action="store_true")
    q.add_argument("--confirm-depth", type=int, help="exhaustive depth for flagged components")
    q.add_argument("--allow-4", action="store_true", help="lift the qubit cap to 4")

    br = sub.add_parser("beta-report", parents=[common], help="consensus weights of the mixed schedule")
    br.add_argument("--n", type=int, required=True)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    t0 = time.perf_counter()
    handlers = {
        "verify": cmd_verify,
        "simulate": cmd_simulate,
        "search": cmd_search,
        "lemma-f": cmd_lemma_f,
        "quantum": cmd_quantum,
        "beta-report": cmd_beta_report,
    }
    try:
        if args.command == "build":
            return cmd_build(args)
        return handlers[args.command](args, t0)
    except UsageError as exc:
        print(f"ftgossip {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
