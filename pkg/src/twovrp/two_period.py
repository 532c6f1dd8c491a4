"""The 2-period (balanced) TSP as a two-vehicle instance.

Customers visited in both periods are duplicated; one copy is fixed to each
vehicle.  Balance is encoded through unit demands on the single-period
customers and equal capacities ``ceil(n / 2)``: loads then always come out as
``floor(n/2)`` and ``ceil(n/2)``, so period visit counts differ by at most one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import CostModel, Fleet, Instance, ModelError, SegmentCustomer, TwoRouteSolution


@dataclass(frozen=True)
class TwoPeriodInstance:
    depot: int
    both_periods: frozenset[int]
    single_period: frozenset[int]
    distances: CostModel
    balanced: bool = True
    name: str = field(default="", compare=False)
    coords: tuple[tuple[int, int], ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "both_periods", frozenset(int(i) for i in self.both_periods))
        object.__setattr__(self, "single_period", frozenset(int(i) for i in self.single_period))
        if not isinstance(self.distances, CostModel):
            object.__setattr__(self, "distances", CostModel(self.distances))
        if self.both_periods & self.single_period:
            raise ModelError("a customer cannot be both single- and two-period")
        nodes = self.both_periods | self.single_period
        if self.depot in nodes:
            raise ModelError("the depot cannot also be a customer")
        dim = self.distances.dimension
        if any(not 0 <= v < dim for v in nodes | {self.depot}):
            raise ModelError("customer node outside the distance matrix")

    @property
    def m(self) -> int:
        return len(self.both_periods)

    @property
    def n(self) -> int:
        return len(self.single_period)

    def node_of(self) -> list[int]:
        """Distance-matrix node of each 2VRP customer id (index 0 is the depot/switch)."""
        singles = sorted(self.single_period)
        both = sorted(self.both_periods)
        return [self.depot] + singles + both + both


def build_instance(tp: TwoPeriodInstance) -> Instance:
    singles = sorted(tp.single_period)
    both = sorted(tp.both_periods)
    unit = 1 if tp.balanced else 0
    customers = [SegmentCustomer.point(i, v, unit) for i, v in enumerate(singles, start=1)]
    k = len(customers)
    customers += [SegmentCustomer.point(k + i, v, 0, 1) for i, v in enumerate(both, start=1)]
    k = len(customers)
    customers += [SegmentCustomer.point(k + i, v, 0, 2) for i, v in enumerate(both, start=1)]
    w = -(-tp.n // 2) if tp.balanced else 0
    return Instance(Fleet.single_depot(tp.depot, w, w), tp.distances, tuple(customers), name=tp.name)


def extract_tours(sol: TwoRouteSolution, tp: TwoPeriodInstance) -> tuple[list[int], list[int]]:
    """Closed node tours (depot first and last) for period 1 and period 2."""
    node = tp.node_of()
    k = sol.switch_index
    first = [tp.depot] + [node[cid] for cid, _ in sol.visits[:k]] + [tp.depot]
    second = [tp.depot] + [node[cid] for cid, _ in sol.visits[k + 1:]] + [tp.depot]
    return first, second


def tour_length(tour: list[int], tp: TwoPeriodInstance) -> int:
    d = tp.distances.array[0]
    return int(sum(d[a, b] for a, b in zip(tour, tour[1:])))


def check_balance(tours, tp: TwoPeriodInstance | None = None) -> bool:
    """Period visit counts (depot excluded) differ by at most one."""
    counts = [len(t) - 2 if len(t) >= 2 else 0 for t in tours]
    return abs(counts[0] - counts[1]) <= 1


def period_counts(tours) -> tuple[int, int]:
    return tuple(max(len(t) - 2, 0) for t in tours)


def euclidean_distances(coords) -> np.ndarray:
    """Nearest-integer Euclidean distance matrix."""
    xy = np.asarray(coords, dtype=np.float64)
    diff = xy[:, None, :] - xy[None, :, :]
    return np.floor(np.sqrt((diff ** 2).sum(-1)) + 0.5).astype(np.int64)
