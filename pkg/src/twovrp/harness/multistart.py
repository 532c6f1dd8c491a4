"""Multistart driver: random partitions polished by tour search and H(s, l)."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..dp_core import DEFAULT_CAP, InfeasibleError
from ..model import Instance, TwoRouteSolution, make_solution, to_int
from ..sliding_search import DisassemblyConfig, SearchStats, improve
from ..tour_improvement import improve_routes

log = logging.getLogger(__name__)

ALLOCATION_RETRIES = 100


@dataclass
class SolverParams:
    s: int = 3
    l: int = 1
    restarts: int = 48
    seed: int = 0
    dp_cap: int = DEFAULT_CAP
    time_limit: float | None = None
    parallel_restarts: int = 1
    restart_on_improve: bool = True
    allow_empty: bool = False
    sliding: bool = True  # False: random partition + tour search only

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        DisassemblyConfig(self.s, self.l)

    @property
    def config(self) -> DisassemblyConfig:
        return DisassemblyConfig(self.s, self.l)


@dataclass
class RestartResult:
    index: int
    solution: TwoRouteSolution
    initial_cost: float
    rounds: int
    stats: SearchStats
    seconds: float


@dataclass
class MultistartResult:
    best: TwoRouteSolution
    best_restart: int
    restarts: list[RestartResult] = field(default_factory=list)
    seconds: float = 0.0

    def trace_records(self) -> list[dict]:
        return [
            {
                "restart": r.index,
                "initial": r.initial_cost,
                "cost": r.solution.cost,
                "rounds": r.rounds,
                "sweeps": r.stats.sweeps,
                "small_solves": r.stats.small_solves,
                "accepted": r.stats.accepted,
            }
            for r in self.restarts
        ]


def restart_seeds(seed: int, restarts: int) -> list[np.random.SeedSequence]:
    """Per-restart streams; identical whether restarts run serially or in parallel."""
    return np.random.SeedSequence(seed).spawn(restarts)


def _cheapest_insertion(inst: Instance, route: list, cid: int, vehicle: int, start: int, end: int) -> None:
    c = inst.customer(cid)
    arr = inst.costs.array[vehicle - 1]
    t = inst.table
    nodes_out = [start] + [int(t.right[i] if o == 0 else t.left[i]) for i, o in route]
    nodes_in = [int(t.left[i] if o == 0 else t.right[i]) for i, o in route] + [end]
    best, where = None, None
    for pos in range(len(route) + 1):
        u, v = nodes_out[pos], nodes_in[pos]
        for o in (0, 1):
            delta = int(arr[u, c.entry(o)]) + to_int(c.traversal(vehicle, o)) + int(arr[c.exit(o), v]) - int(arr[u, v])
            if best is None or delta < best:
                best, where = delta, (pos, o)
    route.insert(where[0], (cid, where[1]))


def random_solution(inst: Instance, rng: np.random.Generator, allow_empty: bool = False) -> TwoRouteSolution:
    """Random partition of the free customers, then cheapest insertion of fixed ones."""
    w1, w2 = inst.fleet.capacity
    free = [c for c in inst.customers if c.fixed_to is None]
    fixed = [c for c in inst.customers if c.fixed_to is not None]
    base = [w1 - sum(c.demand for c in fixed if c.fixed_to == 1),
            w2 - sum(c.demand for c in fixed if c.fixed_to == 2)]
    if min(base) < 0:
        raise InfeasibleError("fixed customers alone exceed a vehicle capacity")

    routes = None
    for _ in range(ALLOCATION_RETRIES):
        room = list(base)
        r = ([], [])
        ok = True
        for k in rng.permutation(len(free)):
            c = free[k]
            options = [m for m in (0, 1) if room[m] >= c.demand]
            if not options:
                ok = False
                break
            m = options[int(rng.integers(len(options)))]
            room[m] -= c.demand
            r[m].append((c.id, int(rng.integers(2))))
        if ok:
            routes = r
            break
    if routes is None:
        routes = _first_fit_decreasing(free, base)
        if routes is None:
            raise InfeasibleError("no capacity-feasible allocation found")

    route1, route2 = list(routes[0]), list(routes[1])
    sw = inst.switch
    order = rng.permutation(len(fixed))
    for k in order:
        c = fixed[k]
        if c.fixed_to == 1:
            _cheapest_insertion(inst, route1, c.id, 1, inst.fleet.v1_start, sw.left)
        else:
            _cheapest_insertion(inst, route2, c.id, 2, sw.right, inst.fleet.v2_end)
    if not allow_empty and (not route1 or not route2):
        longer = route1 if len(route1) > len(route2) else route2
        shorter = route2 if longer is route1 else route1
        # the empty vehicle has its whole capacity free
        room = inst.fleet.capacity[0 if shorter is route1 else 1]
        movable = [v for v in longer if inst.customer(v[0]).fixed_to is None and inst.customer(v[0]).demand <= room]
        if not movable:
            raise InfeasibleError("cannot give both vehicles a customer")
        v = movable[-1]
        longer.remove(v)
        shorter.append(v)
    return make_solution(inst, route1 + [(0, 0)] + route2, allow_empty)


def _first_fit_decreasing(free, base):
    room = list(base)
    r = ([], [])
    for c in sorted(free, key=lambda c: (-c.demand, c.id)):
        m = 0 if room[0] >= room[1] else 1
        if room[m] < c.demand:
            m = 1 - m
        if room[m] < c.demand:
            return None
        room[m] -= c.demand
        r[m].append((c.id, 0))
    return r


def run_restart(inst: Instance, p: SolverParams, index: int, seed_seq: np.random.SeedSequence) -> RestartResult:
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed_seq)
    sol = random_solution(inst, rng, p.allow_empty)
    initial = sol.cost
    sol = improve_routes(inst, sol, p.allow_empty)
    stats = SearchStats()
    rounds = 0
    if p.sliding:
        cfg = p.config
        while True:
            rounds += 1
            before = to_int(sol.cost)
            sol = improve(inst, sol, cfg, p.dp_cap, p.restart_on_improve, p.allow_empty, stats)
            sol = improve_routes(inst, sol, p.allow_empty)
            if to_int(sol.cost) >= before:
                break
    return RestartResult(index, sol, initial, rounds, stats, time.perf_counter() - t0)


def _run_restart_args(args):
    return run_restart(*args)


def multistart_solve(inst: Instance, p: SolverParams, on_restart=None) -> MultistartResult:
    """Best solution over ``p.restarts`` independent restarts, ties broken by restart index."""
    t0 = time.perf_counter()
    seeds = restart_seeds(p.seed, p.restarts)
    results: list[RestartResult] = []

    def _done(r: RestartResult):
        results.append(r)
        log.info("restart %d: %s -> %s (%.2fs)", r.index, r.initial_cost, r.solution.cost, r.seconds)
        if on_restart is not None:
            on_restart(r)

    def _out_of_time():
        return p.time_limit is not None and time.perf_counter() - t0 > p.time_limit

    if p.parallel_restarts > 1:
        with ProcessPoolExecutor(max_workers=p.parallel_restarts) as pool:
            jobs = [(inst, p, i, seeds[i]) for i in range(p.restarts)]
            for r in pool.map(_run_restart_args, jobs):
                _done(r)
    else:
        for i in range(p.restarts):
            if results and _out_of_time():
                log.info("time limit reached after %d restarts", len(results))
                break
            _done(run_restart(inst, p, i, seeds[i]))

    results.sort(key=lambda r: r.index)
    best = min(results, key=lambda r: (to_int(r.solution.cost), r.index))
    return MultistartResult(best.solution, best.index, results, time.perf_counter() - t0)


__all__ = [
    "MultistartResult",
    "RestartResult",
    "SolverParams",
    "multistart_solve",
    "random_solution",
    "restart_seeds",
    "run_restart",
]
