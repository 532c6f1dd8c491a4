import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twovrp.dp_core import InfeasibleError, SizeError, UnreachableError
from twovrp.model import CostModel, Fleet, Instance, SegmentCustomer, check_feasibility, evaluate_solution
from twovrp.oracle import ORACLE_CAP, brute_force

from instances import line_instance, literal_optimum, random_instance


def test_line_instance():
    sol = brute_force(line_instance())
    assert sol.cost == 8
    assert sol.loads in ((1, 2), (2, 1))


def test_all_zero_costs():
    C = np.zeros((4, 4), dtype=np.int64)
    inst = Instance(Fleet.single_depot(0, 2, 2), CostModel(C), [SegmentCustomer.point(i, i, 1) for i in (1, 2, 3)])
    sol = brute_force(inst)
    assert sol.cost == 0
    assert check_feasibility(inst, sol)


def test_oversized_demand_is_infeasible():
    C = [[0, 1, 1], [1, 0, 1], [1, 1, 0]]
    cs = [SegmentCustomer.point(1, 1, 3), SegmentCustomer.point(2, 2, 0)]
    inst = Instance(Fleet.single_depot(0, 2, 2), CostModel(C), cs)
    with pytest.raises(InfeasibleError):
        brute_force(inst)


def test_cap():
    inst = random_instance(np.random.default_rng(1), ORACLE_CAP + 1)
    with pytest.raises(SizeError):
        brute_force(inst)


def test_winner_reevaluates():
    inst = random_instance(np.random.default_rng(5), 6, segments=True, fixed_prob=0.3)
    sol = brute_force(inst)
    assert evaluate_solution(inst, sol.visits) == (sol.cost, sol.loads)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 4), inf_prob=st.sampled_from([0.0, 0.15]),
       fixed_prob=st.sampled_from([0.0, 0.4]))
def test_agrees_with_literal_enumeration(seed, n, inf_prob, fixed_prob):
    # the kernel enumeration must equal plain evaluate_solution over every sequence
    inst = random_instance(np.random.default_rng(seed), n, inf_prob=inf_prob, fixed_prob=fixed_prob, tight=True)
    expected = literal_optimum(inst)
    try:
        got = brute_force(inst).cost
    except (InfeasibleError, UnreachableError):
        got = None
    assert got == expected
