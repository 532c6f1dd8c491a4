"""Command line entry point: ``twovrp {solve,generate,oracle,compare,bench}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from ..dp_core import DEFAULT_CAP, SolverError, solve_exact
from ..model import Instance, to_int
from ..oracle import ORACLE_CAP, brute_force
from ..two_period import TwoPeriodInstance, build_instance, check_balance, extract_tours, tour_length
from .generate import generate_instance
from .io import ParseError, parse_instance, write_instance
from .multistart import SolverParams, multistart_solve
from .report import appendix_text, compare_report, load_baselines, natural_key, read_results

log = logging.getLogger("twovrp")


def heuristic(text: str) -> tuple[int, int]:
    try:
        s, l = (int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected S,L (e.g. 3,1), got {text!r}") from None
    if s < 1 or l < 1:
        raise argparse.ArgumentTypeError("S and L must be >= 1")
    return s, l


def _as_vrp(obj) -> tuple[Instance, TwoPeriodInstance | None]:
    if isinstance(obj, TwoPeriodInstance):
        return build_instance(obj), obj
    return obj, None


def _solution_record(inst: Instance, tp, sol) -> dict:
    rec = {"cost": to_int(sol.cost), "loads": list(sol.loads), "visits": [list(v) for v in sol.visits]}
    if tp is not None:
        tours = extract_tours(sol, tp)
        rec["tours"] = [list(t) for t in tours]
        rec["tour_lengths"] = [tour_length(t, tp) for t in tours]
        rec["balanced_ok"] = check_balance(tours) if tp.balanced else None
    return rec


def _solve(inst: Instance, args, s: int, l: int, on_restart=None):
    p = SolverParams(s=s, l=l, restarts=args.restarts, seed=args.seed, dp_cap=args.dp_cap,
                     time_limit=getattr(args, "time_limit", None), parallel_restarts=args.parallel)
    return multistart_solve(inst, p, on_restart)


def cmd_solve(args) -> int:
    inst, tp = _as_vrp(parse_instance(args.instance))
    s, l = args.heuristic
    trace = open(args.trace, "w") if args.trace else None

    def on_restart(r):
        if trace is not None:
            trace.write(json.dumps({
                "restart": r.index, "initial": to_int(r.initial_cost), "cost": to_int(r.solution.cost),
                "rounds": r.rounds, "sweeps": r.stats.sweeps, "small_solves": r.stats.small_solves,
                "accepted": r.stats.accepted,
            }, sort_keys=True) + "\n")
            trace.flush()

    try:
        res = _solve(inst, args, s, l, on_restart)
    finally:
        if trace is not None:
            trace.close()
    out = {
        "instance": inst.name or Path(args.instance).stem,
        "heuristic": f"H({s},{l})",
        "restarts": len(res.restarts),
        "seed": args.seed,
        "best_restart": res.best_restart,
        "restart_costs": [to_int(r.solution.cost) for r in res.restarts],
        **_solution_record(inst, tp, res.best),
    }
    text = json.dumps(out, sort_keys=True, indent=1) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    print(f"{out['instance']}: {out['heuristic']} cost {out['cost']} ({res.seconds:.1f}s)", file=sys.stderr)
    if not args.out:
        sys.stdout.write(text)
    return 0


def cmd_generate(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for k in range(args.count):
        seed = args.seed + k
        tp = generate_instance(args.n, args.m, seed, args.coord_range)
        path = out / f"{tp.name}.txt"
        write_instance(tp, path)
        print(path)
    return 0


def cmd_oracle(args) -> int:
    inst, _ = _as_vrp(parse_instance(args.instance))
    if inst.n > ORACLE_CAP:
        print(f"oracle limited to {ORACLE_CAP} customers, instance has {inst.n}", file=sys.stderr)
        return 2
    bf = brute_force(inst)
    dp = solve_exact(inst)
    print(json.dumps({"oracle": to_int(bf.cost), "dp": to_int(dp.cost), "oracle_visits": [list(v) for v in bf.visits],
                      "agree": to_int(bf.cost) == to_int(dp.cost)}, sort_keys=True))
    return 0 if bf.cost == dp.cost else 1


def cmd_compare(args) -> int:
    baselines = load_baselines(args.baseline)
    rep = compare_report(read_results(args.results), baselines, args.label)
    text = rep.to_text(include_time=not args.omit_time)
    sys.stdout.write(text)
    if args.out:
        Path(args.out).write_text(rep.to_csv(include_time=not args.omit_time))
    return 0


def _label(s, l):
    return f"H({s},{l})"


def cmd_bench(args) -> int:
    files = sorted((p for p in Path(args.directory).iterdir() if p.is_file()), key=lambda p: natural_key(p.name))
    if not files:
        print(f"no instance files in {args.directory}", file=sys.stderr)
        return 2
    baselines = load_baselines(args.baseline)
    heuristics = args.heuristic or [(3, 1)]
    results = {_label(*h): [] for h in heuristics}
    n_total = None
    for path in files:
        obj = parse_instance(path)
        inst, tp = _as_vrp(obj)
        name = inst.name or path.stem
        m = tp.m if tp is not None else None
        if tp is not None:
            n_total = tp.m + tp.n
        for s, l in heuristics:
            t0 = time.perf_counter()
            res = _solve(inst, args, s, l)
            secs = time.perf_counter() - t0
            results[_label(s, l)].append({"instance": name, "ours": to_int(res.best.cost), "time_s": secs, "m": m})
            print(f"{name} {_label(s, l)}: {to_int(res.best.cost)} ({secs:.1f}s)", file=sys.stderr)
    reports = {lab: compare_report(rows, baselines, lab) for lab, rows in results.items()}
    text = appendix_text(reports, include_time=not args.omit_time, n_total=n_total)
    sys.stdout.write(text)
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.txt").write_text(text)
        for (s, l), lab in zip(heuristics, reports):
            (out / f"H{s}_{l}.csv").write_text(reports[lab].to_csv(include_time=not args.omit_time))
    return 0


def _solver_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--restarts", type=int, default=48)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dp-cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--parallel", type=int, default=1, help="restarts run concurrently")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="twovrp", description="Two-vehicle routing by sliding-subsets dynamic programming")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="multistart H(s,l) on one instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--heuristic", type=heuristic, default=(3, 1), metavar="S,L")
    _solver_args(p)
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--out", help="write the result JSON here")
    p.add_argument("--trace", help="write per-restart JSON lines here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("generate", help="random 2-period instances")
    p.add_argument("--n", type=int, default=48, help="customer points besides the depot")
    p.add_argument("--m", type=int, default=8, help="points visited in both periods")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--coord-range", type=int, default=10000)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("oracle", help="brute force and exact DP on a tiny instance")
    p.add_argument("--instance", required=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("compare", help="compare a results CSV with baselines")
    p.add_argument("--results", required=True)
    p.add_argument("--baseline", help="baseline CSV (default: packaged published values)")
    p.add_argument("--label", default="ours")
    p.add_argument("--out", help="write the CSV report here")
    p.add_argument("--omit-time", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", help="solve every instance in a directory and report")
    p.add_argument("directory")
    p.add_argument("--heuristic", type=heuristic, action="append", metavar="S,L",
                   help="repeatable; default 3,1")
    _solver_args(p)
    p.add_argument("--baseline", help="baseline CSV (default: packaged published values)")
    p.add_argument("--out-dir")
    p.add_argument("--omit-time", action="store_true", help="leave timings out for byte-stable reports")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ParseError, SolverError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
