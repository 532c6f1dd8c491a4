"""Exact two-vehicle solver: Held-Karp subset recursion over segment customers.

State ``(i, o, J)``: the route enters customer ``i`` in orientation ``o``,
traverses it, then visits every customer of ``J`` and ends at the vehicle 2
terminal depot.  While the switch customer 0 is still in ``J`` the route is
driven by vehicle 1, afterwards by vehicle 2.  Vehicle 2 capacity is gated on
every vehicle 2 state, vehicle 1 capacity on the switch state, where the
vehicle 1 customer set is known.

Item ``e = 2 * i + o`` encodes customer ``i`` visited in orientation ``o``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba as nb
import numpy as np

from .model import (
    FROM_LEFT,
    INF,
    INF_INT,
    Cost,
    Instance,
    TwoRouteSolution,
    Visit,
    make_solution,
)

DEFAULT_CAP = 20


class SolverError(RuntimeError):
    pass


class SizeError(SolverError):
    pass


class InfeasibleError(SolverError):
    """No assignment of customers to vehicles satisfies capacities and fixed items."""


class UnreachableError(SolverError):
    """Assignments exist, but every route uses a forbidden (infinite) move."""


@nb.njit(cache=True)
def _fill(C, left, right, trav, demand, fixed, w1, w2, end_node, allow_empty):
    n_items = left.shape[0]
    n_masks = 1 << n_items
    n_e = 2 * n_items
    value = np.full((n_masks, n_e), INF_INT, dtype=np.int64)
    parent = np.full((n_masks, n_e), -1, dtype=np.int8)

    entry = np.empty(n_e, dtype=np.int64)
    exit_ = np.empty(n_e, dtype=np.int64)
    for i in range(n_items):
        entry[2 * i] = left[i]
        exit_[2 * i] = right[i]
        entry[2 * i + 1] = right[i]
        exit_[2 * i + 1] = left[i]
    # T[m, e, e2]: arc from the exit of e to the entry of e2
    T = np.empty((2, n_e, n_e), dtype=np.int64)
    term = np.empty((2, n_e), dtype=np.int64)
    for m in range(2):
        for e in range(n_e):
            term[m, e] = C[m, exit_[e], end_node]
            for e2 in range(n_e):
                T[m, e, e2] = C[m, exit_[e], entry[e2]]

    wsum = np.zeros(n_masks, dtype=np.int64)
    for mask in range(1, n_masks):
        low = mask & -mask
        b = 0
        while (1 << b) != low:
            b += 1
        wsum[mask] = wsum[mask ^ low] + demand[b]
    total = wsum[n_masks - 1]

    fixed1 = 0
    fixed2 = 0
    for i in range(n_items):
        if fixed[i] == 1:
            fixed1 |= 1 << i
        elif fixed[i] == 2:
            fixed2 |= 1 << i

    succ_e = np.empty(n_e, dtype=np.int64)
    succ_v = np.empty(n_e, dtype=np.int64)
    for mask in range(n_masks):
        has_switch = mask & 1
        if has_switch:
            # everything outside the mask rides vehicle 1
            if total - wsum[mask] > w1 or fixed2 & ~mask:
                continue
        elif wsum[mask] > w2 or mask & fixed1:
            continue
        # finite successor states (e2, value of the rest) for this mask
        n_succ = 0
        for j in range(n_items):
            jb = 1 << j
            if mask & jb:
                sub = mask ^ jb
                for o2 in range(2):
                    e2 = 2 * j + o2
                    vv = value[sub, e2]
                    if vv < INF_INT:
                        succ_e[n_succ] = e2
                        succ_v[n_succ] = vv
                        n_succ += 1
        if mask != 0 and n_succ == 0:
            continue
        for i in range(n_items):
            bit = 1 << i
            if mask & bit:
                continue
            if i == 0:
                # switch: vehicle 1 served everything outside mask
                if wsum[mask] > w2 or total - wsum[mask] > w1:
                    continue
                if mask & fixed1:
                    continue
                if mask == 0 and not allow_empty:
                    continue
                m = 1
            elif has_switch:
                if fixed[i] == 2:
                    continue
                m = 0
            else:
                if wsum[mask] + demand[i] > w2:
                    continue
                if (mask | bit) & fixed1:
                    continue
                m = 1
            shared = left[i] == right[i]
            best = INF_INT
            arg = -1
            for o in range(2):
                t = trav[m, o, i]
                if t >= INF_INT:
                    continue
                e = 2 * i + o
                if mask == 0:
                    v = t + term[m, e]
                    if v > INF_INT:
                        v = INF_INT
                    value[mask, e] = v
                    continue
                if not (shared and o == 1 and trav[m, 0, i] < INF_INT):
                    best = INF_INT
                    arg = -1
                    row = T[m, e]
                    for k in range(n_succ):
                        cand = row[succ_e[k]] + succ_v[k]
                        if cand < best:
                            best = cand
                            arg = succ_e[k]
                if arg >= 0:
                    v = t + best
                    if v > INF_INT:
                        v = INF_INT
                    value[mask, e] = v
                    parent[mask, e] = arg
    return value, parent


@nb.njit(cache=True)
def _best_start(C, value, left, right, start_node, allow_empty):
    n_items = left.shape[0]
    full = (1 << n_items) - 1
    best = INF_INT
    arg = -1
    for i in range(n_items):
        if i == 0 and not allow_empty:
            continue
        for o in range(2):
            e = 2 * i + o
            vv = value[full ^ (1 << i), e]
            if vv >= INF_INT:
                continue
            node = left[i] if o == 0 else right[i]
            cand = C[0, start_node, node] + vv
            if cand < best:
                best = cand
                arg = e
    if best > INF_INT:
        best = INF_INT
    return best, arg


@nb.njit(cache=True)
def _walk(parent, n_items, first):
    out = np.empty(n_items, dtype=np.int64)
    mask = ((1 << n_items) - 1) ^ (1 << (first // 2))
    e = first
    out[0] = e
    k = 1
    while mask:
        e = parent[mask, e]
        if e < 0:
            return out[:0]
        out[k] = e
        k += 1
        mask ^= 1 << (e // 2)
    return out


def solve_arrays(C, left, right, trav, demand, fixed, capacity, start_node, end_node, allow_empty=False):
    """Solve the recursion on raw arrays; returns (cost_int, [e...]) or (INF_INT, None).

    Item 0 must be the switch customer.  Used directly by the sliding search.
    """
    value, parent = _fill(C, left, right, trav, demand, fixed, capacity[0], capacity[1], end_node, allow_empty)
    best, first = _best_start(C, value, left, right, start_node, allow_empty)
    if first < 0:
        return INF_INT, None
    seq = _walk(parent, left.shape[0], first)
    if seq.shape[0] != left.shape[0]:
        raise SolverError("corrupt parent chain")
    return int(best), seq


@dataclass
class DpTables:
    """value/parent are indexed [subset mask, 2 * customer + orientation]."""

    value: np.ndarray
    parent: np.ndarray
    n_items: int

    def get(self, i: int, orientation: int, subset: int) -> Cost:
        v = int(self.value[subset, 2 * i + orientation])
        return INF if v >= INF_INT else v


def _check_size(inst: Instance, cap: int) -> None:
    if inst.n > cap:
        raise SizeError(f"{inst.n} customers exceed the exact solver cap of {cap}")


def compute_tables(inst: Instance, cap: int = DEFAULT_CAP, allow_empty: bool = False) -> DpTables:
    _check_size(inst, cap)
    t = inst.table
    value, parent = _fill(
        inst.costs.array, t.left, t.right, t.trav, t.demand, t.fixed,
        inst.fleet.capacity[0], inst.fleet.capacity[1], inst.fleet.v2_end, allow_empty,
    )
    return DpTables(value, parent, inst.n + 1)


def best_start(tables: DpTables, inst: Instance, allow_empty: bool = False) -> tuple[Cost, Visit | None]:
    """Minimise depot arc plus table value over first customers (never 0 unless allowed)."""
    t = inst.table
    best, e = _best_start(inst.costs.array, tables.value, t.left, t.right, inst.fleet.v1_start, allow_empty)
    if e < 0:
        return INF, None
    return int(best), (e // 2, e % 2)


def reconstruct(tables: DpTables, inst: Instance, start: Visit, allow_empty: bool = False) -> TwoRouteSolution:
    e = 2 * start[0] + start[1]
    seq = _walk(tables.parent, tables.n_items, e)
    if seq.shape[0] != tables.n_items:
        raise SolverError("corrupt parent chain")
    return make_solution(inst, [(int(x) // 2, int(x) % 2) for x in seq], allow_empty)


def transition_cost(inst: Instance, frm: Visit, to: Visit, vehicle: int) -> Cost:
    """Traverse ``frm`` then drive to the entry of ``to`` with the given vehicle."""
    a = inst.customer(frm[0])
    b = inst.customer(to[0])
    return a.traversal(vehicle, frm[1]) + inst.costs.cost(vehicle, a.exit(frm[1]), b.entry(to[1]))


def has_feasible_partition(inst: Instance, allow_empty: bool = False) -> bool:
    """Whether some vehicle assignment meets capacities and fixed items (routing ignored)."""
    n = inst.n
    demand = np.array([c.demand for c in inst.customers], dtype=np.int64)
    fixed = np.array([c.fixed_to or 0 for c in inst.customers])
    masks = np.arange(1 << n, dtype=np.int64)  # bit set -> vehicle 1
    bits = (masks[:, None] >> np.arange(n)) & 1
    w1 = bits @ demand
    ok = (w1 <= inst.fleet.capacity[0]) & (demand.sum() - w1 <= inst.fleet.capacity[1])
    if n:
        ok &= ((bits == 1) | (fixed != 1)).all(axis=1)
        ok &= ((bits == 0) | (fixed != 2)).all(axis=1)
    if not allow_empty:
        ok &= (masks != 0) & (masks != (1 << n) - 1)
    return bool(ok.any())


def solve_exact(inst: Instance, cap: int = DEFAULT_CAP, allow_empty: bool = False) -> TwoRouteSolution:
    """Minimum-cost feasible solution of ``inst`` (at most ``cap`` customers besides 0)."""
    tables = compute_tables(inst, cap, allow_empty)
    cost, start = best_start(tables, inst, allow_empty)
    if start is None:
        if not has_feasible_partition(inst, allow_empty):
            raise InfeasibleError("no vehicle assignment satisfies capacities and fixed items")
        raise UnreachableError("every feasible route uses a forbidden move")
    sol = reconstruct(tables, inst, start, allow_empty)
    if sol.cost != cost:
        raise SolverError(f"reconstructed cost {sol.cost} differs from table optimum {cost}")
    return sol
