import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from twovrp.harness.multistart import random_solution
from twovrp.model import CostModel, Fleet, Instance, SegmentCustomer, evaluate_solution, make_solution
from twovrp.tour_improvement import improve_route, improve_routes, route_cost, route_endpoints
from twovrp.two_period import euclidean_distances

from instances import random_instance, random_tsp_vrp


def _square():
    # depot at the origin, customers on the corners of a square
    coords = [(0, 0), (0, 100), (100, 100), (100, 0), (50, -50)]
    C = euclidean_distances(coords)
    cs = [SegmentCustomer.point(i, i, 1) for i in range(1, 5)]
    return Instance(Fleet.single_depot(0, 4, 4), CostModel(C), cs)


def test_crossing_removed():
    inst = _square()
    # 1 -> 3 -> 2 -> 4 crosses itself
    sol = make_solution(inst, [(1, 0), (3, 0), (2, 0), (4, 0), (0, 0)], allow_empty=True)
    better = improve_route(inst, sol, 1, allow_empty=True)
    assert better.cost < sol.cost
    assert [c for c, _ in better.route(1)] in ([1, 2, 3, 4], [4, 3, 2, 1])


def test_local_optimum_unchanged():
    inst = _square()
    sol = make_solution(inst, [(1, 0), (2, 0), (3, 0), (4, 0), (0, 0)], allow_empty=True)
    assert improve_route(inst, sol, 1, allow_empty=True) == sol


def test_empty_route_is_noop():
    inst = _square()
    sol = make_solution(inst, [(0, 0), (1, 0), (2, 0), (3, 0), (4, 0)], allow_empty=True)
    assert improve_route(inst, sol, 1, allow_empty=True) is sol


def test_reversal_uses_flipped_traversal():
    # one long segment whose cheap direction is right-to-left
    C = np.zeros((4, 4), dtype=np.int64)
    C[0, 1] = C[2, 0] = 50
    C[0, 2] = C[1, 0] = 1
    seg = SegmentCustomer(1, 1, 2, ((100, 3), (100, 3)))
    other = SegmentCustomer.point(2, 3)
    inst = Instance(Fleet.single_depot(0, 0, 0), CostModel(C), [seg, other])
    sol = make_solution(inst, [(1, 0), (0, 0), (2, 0)])
    out = improve_route(inst, sol, 1)
    assert out.route(1) == ((1, 1),)
    assert out.cost == sol.cost - (50 + 100 + 50) + (1 + 3 + 1)


def _neighbours(route):
    n = len(route)
    for a in range(n):
        for b in range(a, n):
            yield route[:a] + [(c, 1 - o) for c, o in reversed(route[a:b + 1])] + route[b + 1:]
    for length in (1, 2, 3):
        for a in range(n - length + 1):
            seg = route[a:a + length]
            rest = route[:a] + route[a + length:]
            for pos in range(len(rest) + 1):
                if pos == a:
                    continue
                yield rest[:pos] + seg + rest[pos:]
                yield rest[:pos] + [(c, 1 - o) for c, o in reversed(seg)] + rest[pos:]


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(4, 12))
def test_result_is_two_opt_or_opt_optimal(seed, n):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, n, symmetric=bool(seed % 2), segments=bool(seed % 3))
    sol = random_solution(inst, rng)
    out = improve_routes(inst, sol)
    assert out.cost <= sol.cost
    assert evaluate_solution(inst, out.visits)[0] == out.cost
    for vehicle in (1, 2):
        route = list(out.route(vehicle))
        assert sorted(c for c, _ in route) == sorted(c for c, _ in sol.route(vehicle))
        start, end = route_endpoints(inst, out, vehicle)
        base = route_cost(inst, route, vehicle, start, end)
        for cand in _neighbours(route):
            assert route_cost(inst, cand, vehicle, start, end) >= base


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_other_route_untouched(seed):
    rng = np.random.default_rng(seed)
    inst = random_tsp_vrp(rng, 24, 4)
    sol = random_solution(inst, rng)
    out = improve_route(inst, sol, 2)
    assert out.route(1) == sol.route(1)
    assert out.cost <= sol.cost


def test_asymmetric_with_infinite_arcs_never_worse():
    rng = np.random.default_rng(9)
    for _ in range(30):
        inst = random_instance(rng, 9, inf_prob=0.1)
        sol = random_solution(inst, rng)
        out = improve_routes(inst, sol)
        assert out.cost <= sol.cost
