"""Intra-route local search: 2-opt segment reversal and Or-opt relocation.

Reversing a stretch of segment customers flips every orientation in it, so
reversal deltas use the reversed arcs and the opposite traversal costs; no
symmetry is assumed.  Routes never lose or gain customers here.
"""

from __future__ import annotations

import numba as nb
import numpy as np

from .model import Instance, TwoRouteSolution, make_solution

MAX_OR_SEGMENT = 3


@nb.njit(cache=True)
def _prefix(C, ids, ors, left, right, trav):
    n = ids.shape[0]
    ent = np.empty(n, dtype=np.int64)
    ext = np.empty(n, dtype=np.int64)
    for k in range(n):
        if ors[k] == 0:
            ent[k], ext[k] = left[ids[k]], right[ids[k]]
        else:
            ent[k], ext[k] = right[ids[k]], left[ids[k]]
    pt = np.zeros(n + 1, dtype=np.int64)
    ptr = np.zeros(n + 1, dtype=np.int64)
    pa = np.zeros(n + 1, dtype=np.int64)
    par = np.zeros(n + 1, dtype=np.int64)
    for k in range(n):
        pt[k + 1] = pt[k] + trav[ors[k], ids[k]]
        ptr[k + 1] = ptr[k] + trav[1 - ors[k], ids[k]]
        if k + 1 < n:
            pa[k + 1] = pa[k] + C[ext[k], ent[k + 1]]
            par[k + 1] = par[k] + C[ent[k + 1], ext[k]]
        else:
            pa[k + 1] = pa[k]
            par[k + 1] = par[k]
    return ent, ext, pt, ptr, pa, par


@nb.njit(cache=True)
def _try_two_opt(C, start, end, ent, ext, pt, ptr, pa, par, n):
    for a in range(n):
        p = start if a == 0 else ext[a - 1]
        for b in range(a, n):
            q = end if b == n - 1 else ent[b + 1]
            old = C[p, ent[a]] + (pt[b + 1] - pt[a]) + (pa[b] - pa[a]) + C[ext[b], q]
            new = C[p, ext[b]] + (ptr[b + 1] - ptr[a]) + (par[b] - par[a]) + C[ent[a], q]
            if new < old:
                return a, b
    return -1, -1


@nb.njit(cache=True)
def _try_or_opt(C, start, end, ent, ext, pt, ptr, pa, par, n, max_len):
    for length in range(1, max_len + 1):
        for a in range(0, n - length + 1):
            b = a + length - 1
            p = start if a == 0 else ext[a - 1]
            q = end if b == n - 1 else ent[b + 1]
            gain = C[p, ent[a]] + C[ext[b], q] - C[p, q]
            internal_change = (ptr[b + 1] - ptr[a]) + (par[b] - par[a]) - (pt[b + 1] - pt[a]) - (pa[b] - pa[a])
            for t in range(-1, n):
                if a - 1 <= t <= b:
                    continue
                u = start if t == -1 else ext[t]
                v = end if t == n - 1 else ent[t + 1]
                base = C[u, v]
                fwd = C[u, ent[a]] + C[ext[b], v] - base
                if fwd < gain:
                    return a, b, t, 0
                rev = C[u, ext[b]] + C[ent[a], v] - base + internal_change
                if rev < gain:
                    return a, b, t, 1
    return -1, -1, -1, -1


@nb.njit(cache=True)
def _local_search(C, ids, ors, left, right, trav, start, end, max_len):
    ids = ids.copy()
    ors = ors.copy()
    n = ids.shape[0]
    moves = 0
    while n > 0:
        ent, ext, pt, ptr, pa, par = _prefix(C, ids, ors, left, right, trav)
        a, b = _try_two_opt(C, start, end, ent, ext, pt, ptr, pa, par, n)
        if a >= 0:
            ids[a:b + 1] = ids[a:b + 1][::-1].copy()
            ors[a:b + 1] = 1 - ors[a:b + 1][::-1]
            moves += 1
            continue
        a, b, t, rev = _try_or_opt(C, start, end, ent, ext, pt, ptr, pa, par, n, max_len)
        if a < 0:
            break
        seg_ids = ids[a:b + 1].copy()
        seg_ors = ors[a:b + 1].copy()
        if rev:
            seg_ids = seg_ids[::-1].copy()
            seg_ors = 1 - seg_ors[::-1]
        new_ids = np.empty(n, dtype=np.int64)
        new_ors = np.empty(n, dtype=np.int64)
        k = 0
        if t == -1:
            for r in range(seg_ids.shape[0]):
                new_ids[k], new_ors[k] = seg_ids[r], seg_ors[r]
                k += 1
        for pos in range(n):
            if a <= pos <= b:
                continue
            new_ids[k], new_ors[k] = ids[pos], ors[pos]
            k += 1
            if pos == t:
                for r in range(seg_ids.shape[0]):
                    new_ids[k], new_ors[k] = seg_ids[r], seg_ors[r]
                    k += 1
        ids, ors = new_ids, new_ors
        moves += 1
    return ids, ors, moves


def route_endpoints(inst: Instance, sol: TwoRouteSolution, vehicle: int) -> tuple[int, int]:
    sw = inst.switch
    o0 = sol.visits[sol.switch_index][1]
    if vehicle == 1:
        return inst.fleet.v1_start, sw.entry(o0)
    return sw.exit(o0), inst.fleet.v2_end


def improve_route(
    inst: Instance, sol: TwoRouteSolution, vehicle: int, max_segment: int = MAX_OR_SEGMENT,
    allow_empty: bool = False,
) -> TwoRouteSolution:
    """2-opt + Or-opt local optimum of one vehicle's route; the other route is untouched."""
    route = sol.route(vehicle)
    if not route:
        return sol
    t = inst.table
    start, end = route_endpoints(inst, sol, vehicle)
    ids = np.array([cid for cid, _ in route], dtype=np.int64)
    ors = np.array([o for _, o in route], dtype=np.int64)
    new_ids, new_ors, moves = _local_search(
        inst.costs.array[vehicle - 1], ids, ors, t.left, t.right, t.trav[vehicle - 1], start, end, max_segment
    )
    if moves == 0:
        return sol
    new_route = [(int(i), int(o)) for i, o in zip(new_ids, new_ors)]
    k = sol.switch_index
    if vehicle == 1:
        visits = new_route + list(sol.visits[k:])
    else:
        visits = list(sol.visits[:k + 1]) + new_route
    new = make_solution(inst, visits, allow_empty)
    return new if new.cost <= sol.cost else sol


def improve_routes(inst: Instance, sol: TwoRouteSolution, allow_empty: bool = False) -> TwoRouteSolution:
    sol = improve_route(inst, sol, 1, allow_empty=allow_empty)
    return improve_route(inst, sol, 2, allow_empty=allow_empty)


def route_cost(inst: Instance, route, vehicle: int, start: int, end: int):
    """Cost of an open route under one vehicle (public-cost arithmetic)."""
    node = start
    total = 0
    for cid, o in route:
        c = inst.customer(cid)
        total += inst.costs.cost(vehicle, node, c.entry(o)) + c.traversal(vehicle, o)
        node = c.exit(o)
    return total + inst.costs.cost(vehicle, node, end)

