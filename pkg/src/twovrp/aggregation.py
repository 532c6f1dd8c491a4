"""Collapse sub-paths of a solution into synthetic customers.

A disassembly frees the switch customer and two windows of ``s`` consecutive
customers; every remaining maximal run of the tour becomes one aggregated
customer whose left/right traversal costs are the run's directed lengths.
The small instance always holds ``2s + 6`` customers (switch included):
``2s`` window customers, the switch and five runs.  Runs never straddle the
vehicle switch; when fewer than five runs exist the longest one is split off
at its last node until there are five.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numba as nb
import numpy as np

from .model import (
    FROM_LEFT,
    INF_INT,
    Instance,
    ModelError,
    SegmentCustomer,
    TwoRouteSolution,
    Visit,
    make_solution,
    to_cost,
)

N_RUNS = 5


class AggregationError(ModelError):
    pass


class DisassemblyError(ValueError):
    pass


def expand(members: Sequence[Visit], orientation: int) -> list[Visit]:
    """Member visits of an aggregated customer visited in ``orientation``."""
    if orientation == FROM_LEFT:
        return list(members)
    return [(cid, 1 - o) for cid, o in reversed(members)]


def aggregate_subpath(inst: Instance, path: Sequence[Visit], new_id: int = 1) -> SegmentCustomer:
    """Replace a directed sub-path by one segment customer with equal path costs."""
    if not path:
        raise AggregationError("cannot aggregate an empty path")
    custs = [inst.customer(cid) for cid, _ in path]
    if any(c.id == 0 for c in custs):
        raise AggregationError("the switch customer cannot be aggregated")
    fixed = {c.fixed_to for c in custs} - {None}
    if len(fixed) > 1:
        raise AggregationError("path mixes customers fixed to different vehicles")
    costs = inst.costs
    trav = []
    for m in (1, 2):
        fwd = sum(c.traversal(m, o) for c, (_, o) in zip(custs, path))
        rev = sum(c.traversal(m, 1 - o) for c, (_, o) in zip(custs, path))
        for k in range(len(path) - 1):
            a, oa = custs[k], path[k][1]
            b, ob = custs[k + 1], path[k + 1][1]
            fwd += costs.cost(m, a.exit(oa), b.entry(ob))
            rev += costs.cost(m, b.entry(ob), a.exit(oa))
        trav.append((fwd, rev))
    members: list[Visit] = []
    for c, (_, o) in zip(custs, path):
        members += expand(c.members, o)
    return SegmentCustomer(
        id=new_id,
        left=custs[0].entry(path[0][1]),
        right=custs[-1].exit(path[-1][1]),
        traverse=(trav[0], trav[1]),
        demand=sum(c.demand for c in custs),
        fixed_to=fixed.pop() if fixed else None,
        members=tuple(members),
    )


class TourIndex:
    """Prefix sums over a solution's tour with the switch removed.

    Positions are 0-based here; the public position arguments are 1-based.
    """

    def __init__(self, inst: Instance, sol: TwoRouteSolution):
        self.inst = inst
        self.sol = sol
        k = sol.switch_index
        tour = [v for v in sol.visits if v[0] != 0]
        self.k1 = k
        self.k2 = len(tour) - k
        self.switch_orientation = sol.visits[k][1]
        ids = np.array([cid for cid, _ in tour], dtype=np.int64)
        ors = np.array([o for _, o in tour], dtype=np.int64)
        self.ids, self.ors = ids, ors
        t = inst.table
        C = inst.costs.array
        self.entry = np.where(ors == FROM_LEFT, t.left[ids], t.right[ids])
        self.exit = np.where(ors == FROM_LEFT, t.right[ids], t.left[ids])
        zero = np.zeros((2, 1), dtype=np.int64)
        trav_f = t.trav[:, ors, ids]
        trav_r = t.trav[:, 1 - ors, ids]
        arc_f = C[:, self.exit[:-1], self.entry[1:]]
        arc_r = C[:, self.entry[1:], self.exit[:-1]]
        self.pt_f = np.concatenate([zero, np.cumsum(trav_f, axis=1)], axis=1)
        self.pt_r = np.concatenate([zero, np.cumsum(trav_r, axis=1)], axis=1)
        self.pa_f = np.concatenate([zero, np.cumsum(arc_f, axis=1)], axis=1)
        self.pa_r = np.concatenate([zero, np.cumsum(arc_r, axis=1)], axis=1)
        self.pw = np.concatenate([[0], np.cumsum(t.demand[ids])])
        fixed = t.fixed[ids]
        self.pf1 = np.concatenate([[0], np.cumsum(fixed == 1)])
        self.pf2 = np.concatenate([[0], np.cumsum(fixed == 2)])

    @property
    def length(self) -> int:
        return self.k1 + self.k2


def legal(k1: int, k2: int, s: int, pos1: int, pos2: int) -> bool:
    """Whether 1-based window starts are admissible."""
    K = k1 + k2
    if s < 1 or pos1 < 1 or pos2 < pos1 + s or pos2 + s - 1 > K:
        return False
    if k1 and pos1 > k1:
        return False
    if k2 and pos2 + s - 1 < k1 + 1:
        return False
    return True


@nb.njit(cache=True)
def _pieces(k1, K, s, p1, p2):
    """Tour pieces of a disassembly as rows (first, last, kind), kind 0 = window customer, 1 = run.

    Runs are cut at the switch; while fewer than N_RUNS exist the longest
    (earliest on ties) loses its last customer to a new run.
    """
    runs = np.empty((N_RUNS, 2), dtype=np.int64)
    n_runs = 0
    for span in range(3):
        if span == 0:
            a, b = 0, p1 - 1
        elif span == 1:
            a, b = p1 + s, p2 - 1
        else:
            a, b = p2 + s, K - 1
        if a > b:
            continue
        if a < k1 <= b:
            runs[n_runs, 0], runs[n_runs, 1] = a, k1 - 1
            runs[n_runs + 1, 0], runs[n_runs + 1, 1] = k1, b
            n_runs += 2
        else:
            runs[n_runs, 0], runs[n_runs, 1] = a, b
            n_runs += 1
    while n_runs < N_RUNS:
        k = 0
        for r in range(1, n_runs):
            if runs[r, 1] - runs[r, 0] > runs[k, 1] - runs[k, 0]:
                k = r
        a, b = runs[k, 0], runs[k, 1]
        if a == b:
            raise ValueError("too few customers outside the windows")
        for r in range(n_runs, k + 1, -1):
            runs[r, 0], runs[r, 1] = runs[r - 1, 0], runs[r - 1, 1]
        runs[k, 1] = b - 1
        runs[k + 1, 0], runs[k + 1, 1] = b, b
        n_runs += 1

    out = np.empty((2 * s + N_RUNS, 3), dtype=np.int64)
    n = 0
    r = 0
    for q in range(K):
        if p1 <= q < p1 + s or p2 <= q < p2 + s:
            out[n, 0], out[n, 1], out[n, 2] = q, q, 0
            n += 1
        elif r < N_RUNS and runs[r, 0] == q:
            out[n, 0], out[n, 1], out[n, 2] = runs[r, 0], runs[r, 1], 1
            n += 1
            r += 1
    return out


@nb.njit(cache=True)
def _build(ids, ors, entry, exit_, pt_f, pt_r, pa_f, pa_r, pw, pf1, pf2,
           t_left, t_right, t_trav, t_demand, t_fixed, k1, K, s, p1, p2):
    """Small-instance arrays for 0-based window starts p1, p2; item 0 is the switch."""
    pieces = _pieces(k1, K, s, p1, p2)
    N = pieces.shape[0] + 1
    left = np.empty(N, dtype=np.int64)
    right = np.empty(N, dtype=np.int64)
    trav = np.empty((2, 2, N), dtype=np.int64)
    demand = np.empty(N, dtype=np.int64)
    fixed = np.empty(N, dtype=np.int64)
    left[0], right[0] = t_left[0], t_right[0]
    for m in range(2):
        for o in range(2):
            trav[m, o, 0] = t_trav[m, o, 0]
    demand[0] = 0
    fixed[0] = 0
    for i in range(1, N):
        a, b, kind = pieces[i - 1, 0], pieces[i - 1, 1], pieces[i - 1, 2]
        if kind == 0:
            cid = ids[a]
            left[i], right[i] = t_left[cid], t_right[cid]
            for m in range(2):
                for o in range(2):
                    trav[m, o, i] = t_trav[m, o, cid]
            demand[i] = t_demand[cid]
            fixed[i] = t_fixed[cid]
        else:
            left[i], right[i] = entry[a], exit_[b]
            for m in range(2):
                fwd = pt_f[m, b + 1] - pt_f[m, a] + pa_f[m, b] - pa_f[m, a]
                rev = pt_r[m, b + 1] - pt_r[m, a] + pa_r[m, b] - pa_r[m, a]
                trav[m, 0, i] = min(fwd, INF_INT)
                trav[m, 1, i] = min(rev, INF_INT)
            demand[i] = pw[b + 1] - pw[a]
            f1 = pf1[b + 1] - pf1[a]
            f2 = pf2[b + 1] - pf2[a]
            if f1 > 0 and f2 > 0:
                raise ValueError("run mixes customers fixed to different vehicles")
            fixed[i] = 1 if f1 > 0 else (2 if f2 > 0 else 0)
    return left, right, trav, demand, fixed, pieces


@dataclass
class Disassembly:
    """The small instance of one disassembly step plus the way back."""

    origin: TwoRouteSolution
    full_instance: Instance
    s: int
    positions: tuple[int, int]
    mapping: tuple[tuple[Visit, ...], ...]  # index = small customer id; 0 is the switch
    left: np.ndarray
    right: np.ndarray
    trav: np.ndarray  # (2, 2, N)
    demand: np.ndarray
    fixed: np.ndarray
    identity: tuple[Visit, ...]

    @property
    def size(self) -> int:
        return len(self.mapping)

    @cached_property
    def small_instance(self) -> Instance:
        full = self.full_instance
        customers = []
        for i in range(1, self.size):
            customers.append(SegmentCustomer(
                id=i,
                left=int(self.left[i]),
                right=int(self.right[i]),
                traverse=tuple(tuple(to_cost(int(self.trav[m, o, i])) for o in (0, 1)) for m in (0, 1)),
                demand=int(self.demand[i]),
                fixed_to=int(self.fixed[i]) or None,
                members=self.mapping[i],
            ))
        return Instance(full.fleet, full.costs, tuple(customers), name=f"{full.name}:{self.positions}")


class Disassembler:
    """Builds disassemblies of one fixed solution; reuse it across window positions."""

    def __init__(self, inst: Instance, sol: TwoRouteSolution):
        self.inst = inst
        self.sol = sol
        self.index = TourIndex(inst, sol)

    def arrays(self, s: int, pos1: int, pos2: int):
        ix = self.index
        t = self.inst.table
        return _build(
            ix.ids, ix.ors, ix.entry, ix.exit, ix.pt_f, ix.pt_r, ix.pa_f, ix.pa_r, ix.pw, ix.pf1, ix.pf2,
            t.left, t.right, t.trav, t.demand, t.fixed, ix.k1, ix.length, s, pos1 - 1, pos2 - 1,
        )

    def disassemble(self, s: int, pos1: int, pos2: int) -> Disassembly:
        ix = self.index
        check_positions(ix.k1, ix.k2, s, pos1, pos2)
        try:
            left, right, trav, demand, fixed, pieces = self.arrays(s, pos1, pos2)
        except ValueError as exc:
            raise AggregationError(str(exc)) from exc
        mapping: list[tuple[Visit, ...]] = [((0, FROM_LEFT),)]
        identity: list[Visit] = []
        for i, (a, b, kind) in enumerate(pieces.tolist(), start=1):
            if a == ix.k1:
                identity.append((0, ix.switch_orientation))
            if kind == 0:
                mapping.append(((int(ix.ids[a]), FROM_LEFT),))
                identity.append((i, int(ix.ors[a])))
            else:
                mapping.append(tuple((int(ix.ids[q]), int(ix.ors[q])) for q in range(a, b + 1)))
                identity.append((i, FROM_LEFT))
        if ix.k1 == ix.length:
            identity.append((0, ix.switch_orientation))
        return Disassembly(
            origin=self.sol,
            full_instance=self.inst,
            s=s,
            positions=(pos1, pos2),
            mapping=tuple(mapping),
            left=left,
            right=right,
            trav=trav,
            demand=demand,
            fixed=fixed,
            identity=tuple(identity),
        )


def check_positions(k1: int, k2: int, s: int, pos1: int, pos2: int) -> None:
    K = k1 + k2
    if K < 2 * s + N_RUNS:
        raise DisassemblyError(f"tour of {K} customers too short for windows of size {s}")
    if not legal(k1, k2, s, pos1, pos2):
        raise DisassemblyError(f"illegal window positions ({pos1}, {pos2}) for s={s}, k1={k1}, k2={k2}")


def disassemble(sol: TwoRouteSolution, inst: Instance, s: int, pos1: int, pos2: int) -> Disassembly:
    return Disassembler(inst, sol).disassemble(s, pos1, pos2)


def lift_visits(d: Disassembly, small_visits: Sequence[Visit]) -> list[Visit]:
    out: list[Visit] = []
    for i, o in small_visits:
        if i == 0:
            out.append((0, o))
        else:
            out += expand(d.mapping[i], o)
    return out


def lift_solution(d: Disassembly, small_sol: TwoRouteSolution, allow_empty: bool = False) -> TwoRouteSolution:
    """Expand a small-instance solution back to the full instance (same cost)."""
    return make_solution(d.full_instance, lift_visits(d, small_sol.visits), allow_empty)
