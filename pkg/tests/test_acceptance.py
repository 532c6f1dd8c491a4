"""Acceptance criteria, one test per criterion; each records a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the verdicts are printed in the
"acceptance criteria" section at the end of the run. Criterion 5b (H(6,3) at
desk scale) is marked slow; deselect it with ``-m "not slow"``.
"""

import itertools
import time

import numpy as np
import pytest

from twovrp.aggregation import Disassembler, lift_solution
from twovrp.dp_core import InfeasibleError, SolverError, solve_exact
from twovrp.harness.cli import main
from twovrp.harness.generate import generate_instance
from twovrp.harness.io import write_instance
from twovrp.harness.multistart import SolverParams, multistart_solve, random_solution
from twovrp.model import INF, check_feasibility, make_solution
from twovrp.oracle import brute_force
from twovrp.sliding_search import DisassemblyConfig, SearchStats, improve, sweep_positions
from twovrp.two_period import TwoPeriodInstance, build_instance, check_balance, euclidean_distances, extract_tours

from instances import random_instance, random_tsp_vrp, random_two_period


def _outcome(fn, inst):
    """Optimal cost, or the kind of failure (no capacity split / no finite route)."""
    try:
        return fn(inst).cost
    except SolverError as exc:
        return type(exc).__name__


def test_criterion_1_oracle_equivalence(record_criterion):
    rng = np.random.default_rng(20240601)
    kinds = list(itertools.product((True, False), (True, False), (0.0, 0.15), (0.0, 0.3), (True, False)))
    total = agree = feasible = 0
    t0 = time.perf_counter()
    for k in range(240):
        symmetric, segments, inf_prob, fixed_prob, tight = kinds[k % len(kinds)]
        n = 1 + k % 8
        inst = random_instance(rng, n, symmetric, segments, inf_prob, fixed_prob, tight)
        dp = _outcome(solve_exact, inst)
        bf = _outcome(brute_force, inst)
        total += 1
        agree += dp == bf
        feasible += not isinstance(bf, str)
    seconds = time.perf_counter() - t0
    ok = agree == total and seconds <= 120
    record_criterion("1", ok, f"{agree}/{total} instances agree ({feasible} feasible), {seconds:.1f}s (limit 120s)")
    assert ok


def test_criterion_2_aggregation_identity(record_criterion):
    rng = np.random.default_rng(777)
    solutions = checks = exact = sized = 0
    while solutions < 100:
        n = int(rng.integers(20, 49))
        if solutions % 2:
            inst = random_instance(rng, n, segments=True, fixed_prob=0.1)
        else:
            inst = random_tsp_vrp(rng, n - n // 6, n // 6)
        try:
            sol = random_solution(inst, rng)
        except InfeasibleError:
            continue
        if not check_feasibility(inst, sol) or sol.cost == INF:
            continue
        solutions += 1
        s = 1 + solutions % 6
        dis = Disassembler(inst, sol)
        for pos1, pos2 in sweep_positions(dis.index.k1, dis.index.k2, DisassemblyConfig(s, 1)):
            d = dis.disassemble(s, pos1, pos2)
            small = d.small_instance
            lifted = lift_solution(d, make_solution(small, d.identity))
            checks += 1
            exact += lifted.cost == sol.cost and lifted.visits == sol.visits
            sized += small.n + 1 == 2 * s + 6
    ok = exact == checks == sized and checks > 0
    record_criterion("2", ok, f"{solutions} solutions, {checks} position pairs, {exact} exact lifts, {sized} of size 2s+6")
    assert ok


def test_criterion_3_monotone_improvement(record_criterion):
    rng = np.random.default_rng(31)
    runs = worse = small_gain = not_fixpoint = infeasible = 0
    for k in range(24):
        s, l = 1 + k % 4, 1 + k % 3
        if k % 3 == 2:
            inst = random_instance(rng, int(rng.integers(14, 22)), segments=True, fixed_prob=0.2)
        else:
            inst = random_tsp_vrp(rng, int(rng.integers(16, 34)), int(rng.integers(0, 6)))
        try:
            sol = random_solution(inst, rng)
        except InfeasibleError:
            continue
        if sol.cost == INF:
            continue
        cfg = DisassemblyConfig(s, l)
        stats = SearchStats()
        out = improve(inst, sol, cfg, restart_on_improve=bool(k % 2), stats=stats)
        again = improve(inst, out, cfg)
        runs += 1
        worse += out.cost > sol.cost
        small_gain += any(g < 1 for g in stats.gains) or sol.cost - out.cost != sum(stats.gains)
        not_fixpoint += again.cost != out.cost
        infeasible += not check_feasibility(inst, out)
    ok = runs >= 20 and worse == small_gain == not_fixpoint == infeasible == 0
    record_criterion("3", ok, f"{runs} runs: {worse} worse, {small_gain} bad gains, "
                            f"{not_fixpoint} non-fixpoints, {infeasible} infeasible")
    assert ok


def _exhaustive_equivalence(n: int, m: int) -> bool:
    pts = np.random.default_rng(n * 10 + m).integers(0, 100, size=(n + m + 1, 2))
    tp = TwoPeriodInstance(0, frozenset(range(1, m + 1)), frozenset(range(m + 1, n + m + 1)), euclidean_distances(pts))
    inst = build_instance(tp)
    singles = [c.id for c in inst.customers if c.fixed_to is None]
    copies1 = [c.id for c in inst.customers if c.fixed_to == 1]
    copies2 = [c.id for c in inst.customers if c.fixed_to == 2]
    for bits in itertools.product((0, 1), repeat=n):
        first = [i for i, b in zip(singles, bits) if b]
        second = [i for i, b in zip(singles, bits) if not b]
        if not (first or copies1) or not (second or copies2):
            continue
        visits = [(c, 0) for c in first + copies1] + [(0, 0)] + [(c, 0) for c in copies2 + second]
        sol = make_solution(inst, visits)
        tours = extract_tours(sol, tp)
        balanced = check_balance(tours)
        if check_feasibility(inst, sol).feasible != balanced:
            return False
        if balanced and any(tours[0].count(v) != 1 or tours[1].count(v) != 1 for v in tp.both_periods):
            return False
    return True


def test_criterion_4_balance_encoding(record_criterion):
    rng = np.random.default_rng(404)
    solved = balanced = twice = 0
    for k in range(50):
        n_total = 10 + (k * 30) // 49
        m = int(rng.integers(0, n_total // 4 + 1))
        tp = random_two_period(rng, n_total, m)
        res = multistart_solve(build_instance(tp), SolverParams(s=3, l=1, restarts=1, seed=k))
        tours = extract_tours(res.best, tp)
        solved += 1
        balanced += check_balance(tours)
        twice += all(tours[0].count(v) == 1 and tours[1].count(v) == 1 for v in tp.both_periods)
    equivalent = all(_exhaustive_equivalence(n, m) for n in range(1, 7) for m in range(0, 3))
    ok = solved == balanced == twice == 50 and equivalent
    record_criterion("4", ok, f"{balanced}/{solved} balanced, {twice}/{solved} with both-period customers twice, "
                            f"exhaustive equivalence n<=6 {'holds' if equivalent else 'FAILS'}")
    assert ok


def _desk_scale(s: int, l: int):
    inst = build_instance(generate_instance(48, 8, seed=0))
    t0 = time.perf_counter()
    res = multistart_solve(inst, SolverParams(s=s, l=l, restarts=48, seed=0))
    return res, time.perf_counter() - t0


def test_criterion_5_performance_h31(record_criterion):
    res, seconds = _desk_scale(3, 1)
    ok = seconds <= 300
    record_criterion("5a", ok, f"H(3,1), 48 restarts on G48_8_0: {seconds:.0f}s (limit 300s), best {res.best.cost}")
    assert ok


@pytest.mark.slow
def test_criterion_5_performance_h63(record_criterion):
    res, seconds = _desk_scale(6, 3)
    ok = seconds <= 5400
    record_criterion("5b", ok, f"H(6,3), 48 restarts on G48_8_0: {seconds:.0f}s (limit 5400s), best {res.best.cost}")
    assert ok


def test_criterion_6_quality(record_criterion):
    restarts = 3
    lines = []
    ok = True
    for m in (8, 16, 24):
        wins = 0
        margins = []
        for seed in range(10):
            inst = build_instance(generate_instance(48, m, seed=seed))
            ours = multistart_solve(inst, SolverParams(s=3, l=1, restarts=restarts, seed=seed)).best.cost
            base = multistart_solve(inst, SolverParams(restarts=restarts, seed=seed, sliding=False)).best.cost
            wins += ours < base
            margins.append(100.0 * (base - ours) / base)
        ok &= wins >= 9
        lines.append(f"m={m}: {wins}/10 better, mean margin {np.mean(margins):.2f}%")
    record_criterion("6", ok, "; ".join(lines))
    assert ok


def _bench(src, out):
    assert main(["bench", str(src), "--restarts", "2", "--heuristic", "2,1", "--heuristic", "3,1",
                 "--seed", "5", "--omit-time", "--out-dir", str(out)]) == 0
    return {p.name: p.read_bytes() for p in sorted(out.iterdir())}


def test_criterion_7_determinism(tmp_path, record_criterion):
    src = tmp_path / "inst"
    src.mkdir()
    for seed in range(3):
        write_instance(generate_instance(20, 4, seed=seed), src / f"G{seed}.txt")
    first, second = _bench(src, tmp_path / "a"), _bench(src, tmp_path / "b")
    solves = []
    for k in range(2):
        out = tmp_path / f"solve{k}.json"
        main(["solve", "--instance", str(src / "G0.txt"), "--restarts", "3", "--seed", "2", "--out", str(out)])
        solves.append(out.read_bytes())
    ok = first == second and solves[0] == solves[1] and len(first) == 3
    record_criterion("7", ok, f"bench files {sorted(first)} and solve JSON byte-identical across two runs: {ok}")
    assert ok


def test_criterion_8_bench_layout(tmp_path, record_criterion):
    # The published instances are not distributed with the package; stand-ins
    # named after them exercise the same layout and comparison columns.
    src = tmp_path / "inst"
    src.mkdir()
    for seed, name in enumerate(("I29", "I21", "I64")):
        m = 8 if name in ("I29", "I21") else 16
        write_instance(generate_instance(48, m, seed=seed, name=name), src / f"{name}.txt")
    out = tmp_path / "out"
    assert main(["bench", str(src), "--restarts", "1", "--heuristic", "3,1", "--omit-time", "--out-dir", str(out)]) == 0
    text = (out / "report.txt").read_text()
    rows = (out / "H3_1.csv").read_text().splitlines()
    checks = [
        "Results for instances with 8 out of 48 nodes visited in two periods" in text,
        "Results for instances with 16 out of 48 nodes visited in two periods" in text,
        all(label in text for label in ("Mean %", "Best %", "Worst %", "Improved #")),
        rows[0] == "instance,baseline_pc,baseline_manual,ours,time_s,delta_pc_percent",
        any(r.startswith("I29,26890,26466,") for r in rows),
        any(r.startswith("I21,25217,24937,") for r in rows),
    ]
    ok = all(checks)
    record_criterion("8", ok, f"appendix layout and I29 PC 26890 / PC+manual 26466 columns: {sum(checks)}/{len(checks)} "
                            "checks (stand-in instances; originals not supplied)")
    assert ok
