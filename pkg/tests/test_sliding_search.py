import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twovrp.aggregation import legal
from twovrp.dp_core import SolverError, solve_exact
from twovrp.harness.multistart import random_solution
from twovrp.model import check_feasibility, make_solution
from twovrp.sliding_search import DisassemblyConfig, SearchStats, improve, sweep_positions

from instances import line_instance, random_instance, random_tsp_vrp


def test_config():
    cfg = DisassemblyConfig(3, 1)
    assert cfg.small_size == 12
    assert str(cfg) == "H(3,1)"
    with pytest.raises(ValueError):
        DisassemblyConfig(0, 1)


def test_line_instance_improves_to_optimum():
    inst = line_instance()
    start = make_solution(inst, [(1, 0), (2, 0), (0, 0), (3, 0)])
    assert start.cost == 10
    out = improve(inst, start, DisassemblyConfig(1, 1))
    assert out.cost == 8


def test_optimum_unchanged():
    inst = random_instance(np.random.default_rng(4), 7)
    opt = solve_exact(inst)
    assert improve(inst, opt, DisassemblyConfig(1, 1)) == opt


def test_first_pair_straddles_switch():
    assert sweep_positions(5, 5, DisassemblyConfig(2, 2))[0] == (1, 5)


def test_big_step_single_pair():
    assert len(sweep_positions(5, 5, DisassemblyConfig(2, 10))) == 1


@pytest.mark.parametrize("k1,k2,s,l", [(5, 5, 2, 1), (10, 14, 3, 1), (10, 14, 3, 2), (20, 4, 6, 3), (3, 21, 3, 1), (24, 0, 2, 1)])
def test_sweep_matches_grid(k1, k2, s, l):
    pairs = sweep_positions(k1, k2, DisassemblyConfig(s, l))
    K = k1 + k2
    assert len(pairs) == len(set(pairs)) <= K * K
    assert all(legal(k1, k2, s, a, b) for a, b in pairs)
    assert pairs == sorted(pairs)
    # pos1 walks 1, 1 + l, ...; for each pos1, pos2 walks from its first legal value in steps of l
    for a in {p[0] for p in pairs}:
        assert (a - 1) % l == 0
        row = [b for p, b in pairs if p == a]
        assert all(y - x == l for x, y in zip(row, row[1:]))
        assert not legal(k1, k2, s, a, row[-1] + l)
    grid_firsts = [a for a in range(1, K + 1, l) if any(legal(k1, k2, s, a, b) for b in range(1, K + 1))]
    assert sorted({p[0] for p in pairs}) == grid_firsts


def test_dp_cap_check():
    rng = np.random.default_rng(0)
    inst = random_tsp_vrp(rng, 40, 0)
    sol = random_solution(inst, rng)
    with pytest.raises(SolverError):
        improve(inst, sol, DisassemblyConfig(8, 1), dp_cap=20)


def test_trace_and_stats():
    rng = np.random.default_rng(7)
    inst = random_tsp_vrp(rng, 20, 3)
    sol = random_solution(inst, rng)
    records = []
    stats = SearchStats()
    out = improve(inst, sol, DisassemblyConfig(2, 1), stats=stats, trace=records.append)
    assert len(records) == stats.small_solves
    assert sum(r["accepted"] for r in records) == stats.accepted == len(stats.gains)
    assert all(g >= 1 for g in stats.gains)
    assert sol.cost - out.cost == sum(stats.gains)
    for r in records:
        if r["accepted"]:
            assert r["small_cost"] < r["current"]
        elif r["small_cost"] is not None:
            assert r["small_cost"] >= r["current"]


@settings(max_examples=12, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n_total=st.integers(14, 26), m=st.integers(0, 5),
       s=st.integers(1, 3), l=st.integers(1, 2), restart=st.booleans())
def test_monotone_fixpoint_feasible(seed, n_total, m, s, l, restart):
    rng = np.random.default_rng(seed)
    inst = random_tsp_vrp(rng, n_total, m)
    sol = random_solution(inst, rng)
    cfg = DisassemblyConfig(s, l)
    stats = SearchStats()
    out = improve(inst, sol, cfg, restart_on_improve=restart, stats=stats)
    assert out.cost <= sol.cost
    assert check_feasibility(inst, out)
    assert all(g >= 1 for g in stats.gains)
    again = SearchStats()
    assert improve(inst, out, cfg, stats=again).cost == out.cost
    assert again.accepted == 0


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(12, 16))
def test_segment_instances(seed, n):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, n, segments=True, fixed_prob=0.2, inf_prob=0.02)
    sol = random_solution(inst, rng)
    if not check_feasibility(inst, sol) or sol.cost == float("inf"):
        return
    out = improve(inst, sol, DisassemblyConfig(2, 1))
    assert out.cost <= sol.cost
    assert check_feasibility(inst, out)
