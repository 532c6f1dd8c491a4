"""Exhaustive reference solver for small instances.

Enumerates every vehicle assignment, every visiting order and every
orientation.  Route costs are accumulated directly from the instance data,
so nothing here depends on the subset recursion in ``dp_core``; the winning
sequence is re-scored with ``evaluate_solution`` before it is returned.
"""

from __future__ import annotations

import numba as nb
import numpy as np

from .dp_core import InfeasibleError, SizeError, UnreachableError
from .model import INF_INT, Instance, TwoRouteSolution, make_solution

ORACLE_CAP = 9


@nb.njit(cache=True)
def _all_routes(C, left, right, trav, m, start_node, end_node):
    """Cheapest open route for every subset of customers 1..n, by full enumeration.

    Returns best[mask] and the visit codes (2 * k + o, k = customer - 1) of an argmin.
    """
    n = left.shape[0] - 1
    n_masks = 1 << n
    best = np.full(n_masks, INF_INT, dtype=np.int64)
    best_seq = np.full((n_masks, max(n, 1)), -1, dtype=np.int64)
    best[0] = min(C[m, start_node, end_node], INF_INT)

    node = np.empty(n + 1, dtype=np.int64)
    acc = np.empty(n + 1, dtype=np.int64)
    nxt = np.zeros(n + 1, dtype=np.int64)
    seq = np.empty(max(n, 1), dtype=np.int64)
    node[0] = start_node
    acc[0] = 0
    used = 0
    d = 0
    while True:
        if nxt[d] >= 2 * n:
            if d == 0:
                break
            d -= 1
            used ^= 1 << (seq[d] // 2)
            continue
        c = nxt[d]
        k = c // 2
        if (used >> k) & 1:
            nxt[d] = 2 * k + 2  # skip both orientations
            continue
        nxt[d] += 1
        o = c % 2
        cust = k + 1
        if o == 0:
            enter, leave = left[cust], right[cust]
        else:
            enter, leave = right[cust], left[cust]
        a = acc[d] + C[m, node[d], enter] + trav[m, o, cust]
        if a > INF_INT:
            a = INF_INT
        seq[d] = c
        used |= 1 << k
        d += 1
        acc[d] = a
        node[d] = leave
        nxt[d] = 0
        total = a + C[m, leave, end_node]
        if total > INF_INT:
            total = INF_INT
        if total < best[used]:
            best[used] = total
            for t in range(d):
                best_seq[used, t] = seq[t]
            for t in range(d, n):
                best_seq[used, t] = -1
    return best, best_seq


def brute_force(inst: Instance, cap: int = ORACLE_CAP, allow_empty: bool = False) -> TwoRouteSolution:
    """Exact optimum by exhaustive enumeration (at most ``cap`` customers besides 0)."""
    n = inst.n
    if n > cap:
        raise SizeError(f"{n} customers exceed the oracle cap of {cap}")
    t = inst.table
    C = inst.costs.array
    fleet = inst.fleet
    sw = inst.switch
    n_masks = 1 << n
    full = n_masks - 1

    demand = t.demand[1:]
    fixed = t.fixed[1:]
    masks = np.arange(n_masks, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(n)) & 1
    w1 = bits @ demand if n else np.zeros(1, dtype=np.int64)
    ok = (w1 <= fleet.capacity[0]) & (demand.sum() - w1 <= fleet.capacity[1])
    if n:
        ok &= ((bits == 1) | (fixed != 1)).all(axis=1)
        ok &= ((bits == 0) | (fixed != 2)).all(axis=1)
    if not allow_empty:
        ok &= (masks != 0) & (masks != full)
    if not ok.any():
        raise InfeasibleError("no vehicle assignment satisfies capacities and fixed items")

    best_total = INF_INT
    best_choice = None
    for o0 in (0, 1):
        t0 = int(t.trav[1, o0, 0])
        if t0 >= INF_INT:
            continue
        r1, s1 = _all_routes(C, t.left, t.right, t.trav, 0, fleet.v1_start, sw.entry(o0))
        r2, s2 = _all_routes(C, t.left, t.right, t.trav, 1, sw.exit(o0), fleet.v2_end)
        totals = np.minimum(r1 + t0 + r2[full ^ masks], INF_INT)
        totals[~ok] = INF_INT
        a = int(np.argmin(totals))
        if totals[a] < best_total:
            best_total = int(totals[a])
            best_choice = (o0, s1[a], s2[full ^ a])
    if best_choice is None or best_total >= INF_INT:
        raise UnreachableError("every feasible route uses a forbidden move")

    o0, seq1, seq2 = best_choice
    visits = [(int(c) // 2 + 1, int(c) % 2) for c in seq1 if c >= 0]
    visits.append((0, o0))
    visits += [(int(c) // 2 + 1, int(c) % 2) for c in seq2 if c >= 0]
    sol = make_solution(inst, visits, allow_empty)
    assert sol.cost == best_total, (sol.cost, best_total)
    return sol
