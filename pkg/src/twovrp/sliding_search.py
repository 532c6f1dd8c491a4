"""Sliding-subsets improvement H(s, l).

Two windows of ``s`` consecutive customers slide along the tour (switch
removed).  For every window pair the rest of the tour is aggregated, the
resulting small problem is solved exactly and a strictly cheaper answer
replaces the current solution.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numba as nb
import numpy as np

from .aggregation import N_RUNS, Disassembler, _build, legal, lift_visits
from .dp_core import DEFAULT_CAP, SolverError, _best_start, _fill, _walk, solve_exact
from .model import INF_INT, Instance, TwoRouteSolution, make_solution, to_int

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DisassemblyConfig:
    s: int
    l: int

    def __post_init__(self):
        if self.s < 1 or self.l < 1:
            raise ValueError(f"H({self.s},{self.l}): s and l must be >= 1")

    @property
    def small_size(self) -> int:
        return 2 * self.s + 1 + N_RUNS

    def __str__(self):
        return f"H({self.s},{self.l})"


@dataclass
class SearchStats:
    sweeps: int = 0
    small_solves: int = 0
    accepted: int = 0
    exact_fallback: int = 0
    effective_s: int | None = None
    gains: list[int] = field(default_factory=list)


# receives one dict per evaluated window pair: pos1, pos2, small_cost, current, accepted
TraceFn = Callable[[dict], None]


def sweep_positions(k1: int, k2: int, cfg: DisassemblyConfig) -> list[tuple[int, int]]:
    """1-based (pos1, pos2) window starts in sweep order."""
    s, step = cfg.s, cfg.l
    K = k1 + k2
    out = []
    pos1 = 1
    while pos1 + s - 1 <= K and (not k1 or pos1 <= k1):
        first2 = max(pos1 + s, k1 + 2 - s if k2 else 1)
        pos2 = first2
        while pos2 + s - 1 <= K:
            if legal(k1, k2, s, pos1, pos2):
                out.append((pos1, pos2))
            pos2 += step
        pos1 += step
    return out


@nb.njit(cache=True)
def _scan(C, ids, ors, entry, exit_, pt_f, pt_r, pa_f, pa_r, pw, pf1, pf2,
          t_left, t_right, t_trav, t_demand, t_fixed, k1, K, s, positions, first,
          cur_cost, w1, w2, start_node, end_node, allow_empty, values):
    """Solve small problems in sweep order from ``first``; stop at the first strict improvement."""
    for idx in range(first, positions.shape[0]):
        left, right, trav, demand, fixed, pieces = _build(
            ids, ors, entry, exit_, pt_f, pt_r, pa_f, pa_r, pw, pf1, pf2,
            t_left, t_right, t_trav, t_demand, t_fixed, k1, K, s, positions[idx, 0] - 1, positions[idx, 1] - 1,
        )
        value, parent = _fill(C, left, right, trav, demand, fixed, w1, w2, end_node, allow_empty)
        best, e = _best_start(C, value, left, right, start_node, allow_empty)
        values[idx] = best
        if e >= 0 and best < cur_cost:
            return idx, best, _walk(parent, left.shape[0], e)
    return -1, INF_INT, np.empty(0, dtype=np.int64)


def improve(
    inst: Instance,
    sol: TwoRouteSolution,
    cfg: DisassemblyConfig,
    dp_cap: int = DEFAULT_CAP,
    restart_on_improve: bool = True,
    allow_empty: bool = False,
    stats: SearchStats | None = None,
    trace: TraceFn | None = None,
) -> TwoRouteSolution:
    """Apply H(s, l) until a full sweep finds no strictly cheaper small solution."""
    stats = stats if stats is not None else SearchStats()
    if inst.n + 1 <= cfg.small_size:
        # whole instance fits in one small problem
        stats.exact_fallback += 1
        if inst.n > dp_cap:
            raise SolverError(f"instance of {inst.n} customers exceeds dp cap {dp_cap}")
        best = solve_exact(inst, dp_cap, allow_empty)
        return best if to_int(best.cost) < to_int(sol.cost) else sol

    s = cfg.s
    if 2 * s + 1 + N_RUNS > dp_cap + 1:
        raise SolverError(f"{cfg} needs {cfg.small_size} customers, above dp cap {dp_cap}")
    stats.effective_s = s
    C = inst.costs.array
    t = inst.table
    fleet = inst.fleet
    cur = sol
    cur_cost = to_int(cur.cost)
    after = None
    dirty = False
    while True:
        stats.sweeps += 1
        dis = Disassembler(inst, cur)
        ix = dis.index
        pairs = sweep_positions(ix.k1, ix.k2, cfg)
        positions = np.array(pairs, dtype=np.int64).reshape(-1, 2)
        first = 0
        if after is not None:
            first = next((k for k, p in enumerate(pairs) if p > after), len(pairs))
        values = np.full(len(pairs), INF_INT, dtype=np.int64)
        idx, value, seq = _scan(
            C, ix.ids, ix.ors, ix.entry, ix.exit, ix.pt_f, ix.pt_r, ix.pa_f, ix.pa_r, ix.pw, ix.pf1, ix.pf2,
            t.left, t.right, t.trav, t.demand, t.fixed, ix.k1, ix.length, s, positions, first,
            cur_cost, fleet.capacity[0], fleet.capacity[1], fleet.v1_start, fleet.v2_end, allow_empty, values,
        )
        stop = len(pairs) if idx < 0 else idx + 1
        stats.small_solves += stop - first
        if trace is not None:
            for k in range(first, stop):
                v = int(values[k])
                trace({"pos1": pairs[k][0], "pos2": pairs[k][1], "small_cost": v if v < INF_INT else None,
                       "current": cur_cost, "accepted": k == idx})
        if idx >= 0:
            pos1, pos2 = pairs[idx]
            d = dis.disassemble(s, pos1, pos2)
            small_visits = [(int(e) // 2, int(e) % 2) for e in seq]
            new = make_solution(inst, lift_visits(d, small_visits), allow_empty)
            if to_int(new.cost) != value:
                raise SolverError(f"lifted cost {new.cost} differs from small optimum {value}")
            stats.accepted += 1
            stats.gains.append(cur_cost - int(value))
            log.debug("%s accepted at (%d, %d): %d -> %d", cfg, pos1, pos2, cur_cost, value)
            cur, cur_cost = new, int(value)
            dirty = True
            after = None if restart_on_improve else (pos1, pos2)
            continue
        if restart_on_improve or not dirty:
            return cur
        # positions after the last acceptance are exhausted; confirm with a clean sweep
        after = None
        dirty = False
