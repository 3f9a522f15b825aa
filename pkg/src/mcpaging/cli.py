"""Command-line front end.

Exit codes: 0 when a verdict or result was produced (whatever it says),
1 for usage and input errors, 2 when a scan would exceed its budget.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from . import __version__
from .adversary import gen_lower_shared, gen_lru_hass, ratio_curve, sequential_fif
from .analysis import (bijective_relation, cost_table, cyclic_relation, enumerate_universe,
                       verify_pi_surjection)
from .engine import round_robin_order, sequential_order, simulate_explicit, simulate_free
from .io import (InputFormatError, cost_summary, costs_csv, dump_input, event_log,
                 load_concave, load_input, trace_table)
from .locality import (ConcaveFunction, WindowBudgetError, check_local_order, is_consistent,
                       validate_concave, window_profile)
from .measures import BudgetError, CostMeasure, bounded_shared_cost_check
from .model import SimParams
from .policies import make_policy

EXIT_OK, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with 2, which we reserve for budgets
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(obj, out: Optional[str]) -> None:
    text = obj if isinstance(obj, str) else json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _f_from_args(args, p: int) -> Optional[ConcaveFunction]:
    if getattr(args, "f_file", None):
        return load_concave(args.f_file)
    if getattr(args, "f", None):
        try:
            table = [float(x) if "." in x else int(x) for x in args.f.split(",")]
        except ValueError:
            raise UsageError(f"--f expects comma-separated numbers, got {args.f!r}") from None
        return ConcaveFunction(table, p)
    return None


def _params(args, file_params: Optional[SimParams], p: int) -> SimParams:
    k = args.k if args.k is not None else (file_params.k if file_params else None)
    tau = args.tau if args.tau is not None else (file_params.tau if file_params else None)
    if k is None or tau is None:
        raise UsageError("k and tau are needed (flags or the input file's params)")
    return SimParams(k, tau, p)


def _policy(name: str, inp=None):
    try:
        return make_policy(name, inp)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _run(inp, policy_name: str, params: SimParams, mode: str, record: bool = False):
    pol = _policy(policy_name, inp)
    if mode == "free":
        return simulate_free(inp, pol, params, record_states=record)
    order = sequential_order(inp) if mode == "sequential" else round_robin_order(inp)
    return simulate_explicit(inp, order, pol, params)


# ------------------------------------------------------------ commands

def cmd_simulate(args) -> int:
    inp, _, fp, aliases = load_input(args.input)
    params = _params(args, fp, inp.p)
    res = _run(inp, args.policy, params, args.mode, record=args.format == "text")
    if args.format == "json":
        _emit(event_log(res), args.out)
    else:
        text = trace_table(res, aliases) if res.mode == "free" else ""
        summary = cost_summary(res)
        text += "".join(f"{key}: {val}\n" for key, val in summary.items())
        _emit(text, args.out)
    return EXIT_OK


def cmd_trace(args) -> int:
    inp, _, fp, aliases = load_input(args.input)
    params = _params(args, fp, inp.p)
    res = _run(inp, args.policy, params, "free", record=True)
    _emit(trace_table(res, aliases), args.out)
    return EXIT_OK


def cmd_gen_adversary(args) -> int:
    if args.family == "lru-hass":
        inp = gen_lru_hass(args.k, args.p, args.ell)
        universe = max(inp.pages(), default=0) + 1
        extra = {"family": "lru-hass", "ell": args.ell}
    else:
        if args.p != 2:
            raise UsageError("the lower-shared family is defined for p=2")
        target = lambda: _policy(args.policy)
        g = gen_lower_shared(args.k, args.tau, args.ell, args.phi, target)
        inp, universe = g.inp, 2 * args.k
        extra = {"family": "lower-shared", "ell": args.ell, "phi": args.phi, "target": args.policy,
                 "construction": {key: val for key, val in g.summary().items() if key != "input"}}
    _emit(dump_input(inp, universe, SimParams(args.k, args.tau, inp.p), extra=extra) + "\n", args.out)
    return EXIT_OK


def _scan_args(args, f=None):
    bounds = args.max_len
    return enumerate_universe(args.universe, args.p, bounds, f, max_total=args.max_total)


def cmd_check_relation(args) -> int:
    if args.max_len is None and args.max_total is None:
        raise UsageError("give --max-len and/or --max-total")
    params = SimParams(args.k, args.tau, args.p)
    for name in (args.a, args.b):
        _policy(name)
    f = _f_from_args(args, args.p)
    scan = _scan_args(args, f)
    table = cost_table(args.a, args.b, scan, args.measure, params, jobs=args.jobs)
    report = {"config": {"A": args.a, "B": args.b, "measure": table.measure, "k": args.k,
                         "tau": args.tau, "scan": scan.describe()}}
    if args.kind in ("bijective", "both"):
        report["bijective"] = bijective_relation(table).to_dict()
    if args.kind in ("cyclic", "both"):
        try:
            report["cyclic"] = cyclic_relation(table, args.ceiling).to_dict()
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(costs_csv(table.inputs, {f"{table.name_a}:{table.measure}": table.a,
                                              f"{table.name_b}:{table.measure}": table.b}))
    _emit(report, args.out)
    return EXIT_OK


def cmd_check_locality(args) -> int:
    inp, _, fp, _ = load_input(args.input)
    f = _f_from_args(args, inp.p)
    if f is None:
        raise UsageError("give --f or --f-file")
    verdict = validate_concave(f, strict_concave=args.strict_concave)
    cons = is_consistent(inp, f, aligned=args.aligned)
    report = {
        "config": {"input": inp.to_lists(), "f": f.to_dict(), "aligned": args.aligned},
        "f_valid": verdict.ok,
        "f_problems": [list(x) for x in verdict.problems],
        "consistent": cons.ok,
        "witness": None if cons.ok else {"width": cons.width, "offsets": list(cons.offsets),
                                         "distinct": cons.distinct, "bound": cons.bound},
    }
    if args.profile:
        report["profile"] = {str(w): d for w, d in window_profile(inp, aligned=args.aligned).items()}
    if args.local_order:
        j, beta, delta = args.local_order
        params = _params(args, fp, inp.p)
        lo = check_local_order(inp, _policy(args.policy, inp), params, f, j, beta, delta,
                               aligned=args.aligned)
        report["local_order"] = lo.to_dict()
    _emit(report, args.out)
    return EXIT_OK


def cmd_check_bounded(args) -> int:
    params = SimParams(args.k, args.tau, args.p)
    _policy(args.policy)
    rep = bounded_shared_cost_check(args.measure, lambda: make_policy(args.policy), args.universe,
                                    params, args.c, args.p, budget=args.budget)
    out = rep.to_dict()
    out["config"] = {"policy": args.policy, "universe": args.universe, "p": args.p,
                     "k": args.k, "tau": args.tau, "c": args.c}
    _emit(out, args.out)
    return EXIT_OK


def cmd_check_pi(args) -> int:
    params = SimParams(args.k, args.tau, args.p)
    f = _f_from_args(args, args.p)
    if f is None:
        raise UsageError("check-pi needs --f or --f-file")
    _policy(args.base)
    scan = _scan_args(args, f)
    base = lambda: make_policy(args.base)
    if args.j:
        js = args.j
    else:
        horizon = max((simulate_free(R, base(), params).horizon for R in scan), default=1)
        js = list(range(1, horizon))
    reports = [verify_pi_surjection(scan, j, params, base, f, args.measure).to_dict(args.pairs)
               for j in js]
    ok = all(not r["cost_violations"] and not r["check_failures"]
             and all(int(m) <= 2 for m in r["multiplicity"]) for r in reports)
    _emit({"config": {"base": args.base, "k": args.k, "tau": args.tau, "measure": args.measure,
                      "scan": scan.describe()},
           "verdict": "pass" if ok else "fail", "per_j": reports}, args.out)
    return EXIT_OK


def cmd_ratio_curve(args) -> int:
    params = SimParams(args.k, args.tau, args.p)
    _policy(args.policy)
    sizes = _parse_sizes(args.sizes)
    if args.family == "lru-hass":
        gen = lambda ell: gen_lru_hass(args.k, args.p, ell)
    else:
        if args.p != 2:
            raise UsageError("the lower-shared family is defined for p=2")
        gen = lambda ell: gen_lower_shared(args.k, args.tau, ell, args.phi,
                                           lambda: make_policy(args.policy)).inp
    curve = ratio_curve(gen, lambda: make_policy(args.policy), sequential_fif, sizes, params,
                        args.measure)
    if args.csv:
        lines = ["size,n,cost_online,cost_baseline,ratio"]
        lines += [f"{r.size},{r.n},{r.cost_online},{r.cost_baseline},{float(r.ratio):.6f}"
                  for r in curve.rows]
        with open(args.csv, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    out = curve.to_dict()
    out["config"] = {"family": args.family, "policy": args.policy, "k": args.k, "p": args.p,
                     "tau": args.tau, "sizes": sizes, "baseline": "sequential FIF"}
    _emit(out, args.out)
    return EXIT_OK


def _parse_sizes(text: str) -> List[int]:
    out: List[int] = []
    try:
        for part in text.split(","):
            if "-" in part:
                a, b = part.split("-")
                out.extend(range(int(a), int(b) + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise UsageError(f"bad --sizes {text!r}; use e.g. 1-8 or 2,4,6") from None
    return out


# ------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="mcpaging", description="Multicore paging simulator and analysis checks.")
    ap.add_argument("--version", action="version", version=f"mcpaging {__version__}")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes for universe scans")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common_out(p):
        p.add_argument("--out", help="write the report here instead of stdout")

    def kt(p, required=False):
        p.add_argument("--k", type=int, required=required)
        p.add_argument("--tau", type=int, required=required)

    def scan(p):
        p.add_argument("--universe", type=int, required=True)
        p.add_argument("--p", type=int, default=2)
        p.add_argument("--max-len", type=int, help="per-core length cap")
        p.add_argument("--max-total", type=int, help="cap on total requests")
        p.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="worker processes")

    def fopts(p):
        p.add_argument("--f", help="concave table, e.g. 2,2,3,4")
        p.add_argument("--f-file", help="JSON file {\"p\": .., \"f\": [..]}")

    s = sub.add_parser("simulate", help="run a policy on an input file")
    s.add_argument("input")
    s.add_argument("--policy", default="lru")
    s.add_argument("--mode", choices=["free", "sequential", "round-robin"], default="free")
    s.add_argument("--format", choices=["text", "json"], default="text")
    kt(s); common_out(s)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("trace", help="timestep table of a free-interleaving run")
    s.add_argument("input")
    s.add_argument("--policy", default="lru")
    kt(s); common_out(s)
    s.set_defaults(func=cmd_trace)

    s = sub.add_parser("gen-adversary", help="emit a lower-bound input")
    s.add_argument("--family", choices=["lru-hass", "lower-shared"], required=True)
    s.add_argument("--p", type=int, default=2)
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--phi", type=int, default=1)
    s.add_argument("--policy", default="lru", help="target policy for the adaptive family")
    kt(s, required=True); common_out(s)
    s.set_defaults(func=cmd_gen_adversary)

    s = sub.add_parser("check-relation", help="bijective / cyclic comparison of two policies")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--measure", default="total-time")
    s.add_argument("--kind", choices=["bijective", "cyclic", "both"], default="both")
    s.add_argument("--ceiling", type=int, help="cost ceiling for the cyclic check")
    s.add_argument("--csv", help="also write per-input costs here")
    scan(s); fopts(s); kt(s, required=True); common_out(s)
    s.set_defaults(func=cmd_check_relation)

    s = sub.add_parser("check-locality", help="consistency, window profile and local-order checks")
    s.add_argument("input")
    s.add_argument("--profile", action="store_true")
    s.add_argument("--aligned", action="store_true", help="one shared window offset for all cores")
    s.add_argument("--strict-concave", action="store_true")
    s.add_argument("--local-order", nargs=3, type=int, metavar=("J", "BETA", "DELTA"))
    s.add_argument("--policy", default="lru")
    fopts(s); kt(s); common_out(s)
    s.set_defaults(func=cmd_check_locality)

    s = sub.add_parser("check-bounded", help="bounded-shared-cost check for one measure")
    s.add_argument("--measure", required=True)
    s.add_argument("--policy", default="lru")
    s.add_argument("--universe", type=int, required=True)
    s.add_argument("--p", type=int, default=1)
    s.add_argument("--c", type=int, required=True, help="cost threshold")
    s.add_argument("--budget", type=int, default=200_000)
    kt(s, required=True); common_out(s)
    s.set_defaults(func=cmd_check_bounded)

    s = sub.add_parser("check-pi", help="audit the four-case input map over a scan")
    s.add_argument("--base", default="fifo")
    s.add_argument("--j", type=int, nargs="*", help="split points (default: all)")
    s.add_argument("--measure", default="total-time")
    s.add_argument("--pairs", action="store_true", help="include every mapped pair")
    scan(s); fopts(s); kt(s, required=True); common_out(s)
    s.set_defaults(func=cmd_check_pi)

    s = sub.add_parser("ratio-curve", help="online/offline cost ratio over generated sizes")
    s.add_argument("--family", choices=["lru-hass", "lower-shared"], default="lru-hass")
    s.add_argument("--policy", default="lru")
    s.add_argument("--p", type=int, default=2)
    s.add_argument("--phi", type=int, default=1)
    s.add_argument("--sizes", default="1-8")
    s.add_argument("--measure", default="total-time")
    s.add_argument("--csv")
    kt(s, required=True); common_out(s)
    s.set_defaults(func=cmd_ratio_curve)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if hasattr(args, "measure"):
            args.measure = CostMeasure.parse(args.measure).value
        return args.func(args)
    except (BudgetError, WindowBudgetError) as exc:
        print(f"mcpaging: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, InputFormatError, ValueError, FileNotFoundError, KeyError) as exc:
        print(f"mcpaging: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
