"""Domain types for two-vehicle routing instances and solutions.

A customer is a segment with a left and a right entry node.  Visiting it
"from the left" enters at ``left``, pays the vehicle's left traversal cost
and leaves through ``right``; visiting it "from the right" does the opposite.

Both vehicle routes are concatenated into one sequence separated by the
switch customer 0: everything before 0 is driven by vehicle 1, everything
after it by vehicle 2.

Costs are nonnegative integers.  ``INF`` (``math.inf``) marks forbidden
moves; inside numpy arrays the same role is played by ``INF_INT``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence, Union

import numpy as np

Cost = Union[int, float]

INF = math.inf
# Array sentinel; large enough for real costs, small enough that a few hundred
# sentinels summed in int64 cannot overflow.
INF_INT = 1 << 44

FROM_LEFT = 0
FROM_RIGHT = 1

Visit = tuple[int, int]


class ModelError(ValueError):
    """Invalid instance data."""


class StructureError(ModelError):
    """A visit sequence that is not a valid two-route sequence."""


def flip(orientation: int) -> int:
    return 1 - orientation


def to_cost(value) -> Cost:
    """Normalise an int/float/sentinel into a public cost value."""
    if value is None:
        raise ModelError("missing cost")
    if isinstance(value, (float, np.floating)) and math.isinf(value):
        if value < 0:
            raise ModelError("negative infinite cost")
        return INF
    if int(value) >= INF_INT:
        return INF
    if value < 0:
        raise ModelError(f"negative cost {value}")
    if int(value) != value:
        raise ModelError(f"non-integer cost {value}")
    return int(value)


def to_int(cost: Cost) -> int:
    """Public cost -> array value."""
    return INF_INT if cost == INF else int(cost)


@dataclass(frozen=True)
class SegmentCustomer:
    id: int
    left: int
    right: int
    # traverse[vehicle - 1][orientation]
    traverse: tuple[tuple[Cost, Cost], tuple[Cost, Cost]]
    demand: int = 0
    fixed_to: int | None = None
    members: tuple[Visit, ...] = ()

    def __post_init__(self):
        trav = tuple(tuple(to_cost(c) for c in row) for row in self.traverse)
        if len(trav) != 2 or any(len(row) != 2 for row in trav):
            raise ModelError(f"customer {self.id}: traverse must be 2x2")
        object.__setattr__(self, "traverse", trav)
        if self.demand < 0:
            raise ModelError(f"customer {self.id}: negative demand")
        if self.fixed_to not in (None, 1, 2):
            raise ModelError(f"customer {self.id}: fixed_to must be 1, 2 or None")
        if not self.members:
            object.__setattr__(self, "members", ((self.id, FROM_LEFT),))
        else:
            object.__setattr__(self, "members", tuple((int(i), int(o)) for i, o in self.members))

    @classmethod
    def point(cls, id: int, node: int, demand: int = 0, fixed_to: int | None = None) -> "SegmentCustomer":
        """A plain node customer: L = R, zero traversal cost."""
        return cls(id, node, node, ((0, 0), (0, 0)), demand, fixed_to)

    def traversal(self, vehicle: int, orientation: int) -> Cost:
        return self.traverse[vehicle - 1][orientation]

    def entry(self, orientation: int) -> int:
        return self.left if orientation == FROM_LEFT else self.right

    def exit(self, orientation: int) -> int:
        return self.right if orientation == FROM_LEFT else self.left


@dataclass(frozen=True)
class Fleet:
    capacity: tuple[int, int]
    v1_start: int
    v1_end: int
    v2_start: int
    v2_end: int

    def __post_init__(self):
        cap = tuple(int(w) for w in self.capacity)
        if len(cap) != 2 or min(cap) < 0:
            raise ModelError(f"bad capacities {self.capacity}")
        object.__setattr__(self, "capacity", cap)

    @classmethod
    def single_depot(cls, depot: int, w1: int, w2: int) -> "Fleet":
        return cls((w1, w2), depot, depot, depot, depot)

    @property
    def depots(self) -> tuple[int, int, int, int]:
        return (self.v1_start, self.v1_end, self.v2_start, self.v2_end)


class CostModel:
    """Per-vehicle travel cost matrices, stored as one (2, D, D) int64 array."""

    def __init__(self, c1, c2=None):
        c1 = self._as_array(c1)
        c2 = c1 if c2 is None else self._as_array(c2)
        if c1.shape != c2.shape:
            raise ModelError(f"matrix shapes differ: {c1.shape} vs {c2.shape}")
        arr = np.stack([c1, c2])
        if np.any(np.diagonal(arr, axis1=1, axis2=2) != 0):
            raise ModelError("cost matrix diagonal must be zero")
        arr.flags.writeable = False
        self.array = arr

    @staticmethod
    def _as_array(m) -> np.ndarray:
        if isinstance(m, np.ndarray) and m.dtype.kind == "i":
            a = m.astype(np.int64, copy=True)
            if a.ndim != 2 or a.shape[0] != a.shape[1]:
                raise ModelError(f"cost matrix must be square, got {a.shape}")
            if (a < 0).any():
                raise ModelError("negative travel cost")
            return np.minimum(a, INF_INT)
        rows = [[to_int(to_cost(v)) for v in row] for row in m]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ModelError("cost matrix must be square")
        return np.array(rows, dtype=np.int64).reshape(n, n)

    @property
    def dimension(self) -> int:
        return self.array.shape[1]

    def cost(self, vehicle: int, a: int, b: int) -> Cost:
        v = int(self.array[vehicle - 1, a, b])
        return INF if v >= INF_INT else v

    def __eq__(self, other):
        return isinstance(other, CostModel) and np.array_equal(self.array, other.array)

    def __hash__(self):
        return hash(self.array.tobytes())

    def __repr__(self):
        return f"CostModel(dimension={self.dimension})"


def make_switch_customer(fleet: Fleet) -> SegmentCustomer:
    """The auxiliary customer 0 marking the change from vehicle 1 to vehicle 2."""
    return SegmentCustomer(0, fleet.v1_end, fleet.v2_start, ((0, INF), (0, INF)), 0, None)


class CustomerTable(NamedTuple):
    """Column arrays indexed by customer id (row 0 is the switch)."""

    left: np.ndarray
    right: np.ndarray
    trav: np.ndarray  # (2 vehicles, 2 orientations, n + 1)
    demand: np.ndarray
    fixed: np.ndarray  # 0 = free


@dataclass(frozen=True, eq=True)
class Instance:
    fleet: Fleet
    costs: CostModel
    customers: tuple[SegmentCustomer, ...]
    switch: SegmentCustomer = None  # type: ignore[assignment]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "customers", tuple(self.customers))
        if self.switch is None:
            object.__setattr__(self, "switch", make_switch_customer(self.fleet))
        elif self.switch != make_switch_customer(self.fleet):
            raise ModelError("switch customer does not match the fleet depots")
        ids = [c.id for c in self.customers]
        if sorted(ids) != list(range(1, len(ids) + 1)):
            raise ModelError("customer ids must be exactly 1..n")
        if ids != sorted(ids):
            object.__setattr__(self, "customers", tuple(sorted(self.customers, key=lambda c: c.id)))
        dim = self.costs.dimension
        for node in self.fleet.depots:
            if not 0 <= node < dim:
                raise ModelError(f"depot node {node} outside matrix dimension {dim}")
        for c in self.customers:
            if not (0 <= c.left < dim and 0 <= c.right < dim):
                raise ModelError(f"customer {c.id}: node outside matrix dimension {dim}")
        if self.total_demand > sum(self.fleet.capacity):
            raise ModelError(
                f"total demand {self.total_demand} exceeds total capacity {sum(self.fleet.capacity)}"
            )

    @property
    def n(self) -> int:
        return len(self.customers)

    @property
    def total_demand(self) -> int:
        return sum(c.demand for c in self.customers)

    def customer(self, cid: int) -> SegmentCustomer:
        return self.switch if cid == 0 else self.customers[cid - 1]

    @cached_property
    def table(self) -> CustomerTable:
        everyone = (self.switch,) + self.customers
        trav = np.array(
            [[[to_int(c.traversal(m, o)) for c in everyone] for o in (0, 1)] for m in (1, 2)],
            dtype=np.int64,
        )
        return CustomerTable(
            left=np.array([c.left for c in everyone], dtype=np.int64),
            right=np.array([c.right for c in everyone], dtype=np.int64),
            trav=trav,
            demand=np.array([c.demand for c in everyone], dtype=np.int64),
            fixed=np.array([c.fixed_to or 0 for c in everyone], dtype=np.int64),
        )


@dataclass(frozen=True)
class TwoRouteSolution:
    visits: tuple[Visit, ...]
    cost: Cost
    loads: tuple[int, int]

    @property
    def switch_index(self) -> int:
        return next(k for k, (cid, _) in enumerate(self.visits) if cid == 0)

    def route(self, vehicle: int) -> tuple[Visit, ...]:
        k = self.switch_index
        return self.visits[:k] if vehicle == 1 else self.visits[k + 1:]


def validate_visits(inst: Instance, visits: Sequence[Visit], allow_empty: bool = False) -> None:
    ids = [cid for cid, _ in visits]
    if len(ids) != inst.n + 1 or sorted(ids) != list(range(inst.n + 1)):
        seen = set()
        dup = sorted({i for i in ids if i in seen or seen.add(i)})
        missing = sorted(set(range(inst.n + 1)) - set(ids))
        raise StructureError(f"visits must cover 0..{inst.n} once (duplicates {dup}, missing {missing})")
    if any(o not in (FROM_LEFT, FROM_RIGHT) for _, o in visits):
        raise StructureError("orientation must be FROM_LEFT or FROM_RIGHT")
    if not allow_empty and (ids[0] == 0 or ids[-1] == 0):
        raise StructureError("switch customer 0 may not be first or last")


def evaluate_solution(
    inst: Instance, visits: Sequence[Visit], allow_empty: bool = False
) -> tuple[Cost, tuple[int, int]]:
    """Total cost and per-vehicle loads of a concatenated visit sequence."""
    visits = [(int(cid), int(o)) for cid, o in visits]
    validate_visits(inst, visits, allow_empty)
    costs = inst.costs
    vehicle = 1
    node = inst.fleet.v1_start
    total: Cost = 0
    loads = [0, 0]
    for cid, o in visits:
        c = inst.customer(cid)
        if cid == 0:
            total += costs.cost(1, node, c.entry(o))
            vehicle = 2
        else:
            total += costs.cost(vehicle, node, c.entry(o))
            loads[vehicle - 1] += c.demand
        total += c.traversal(vehicle, o)
        node = c.exit(o)
    total += costs.cost(2, node, inst.fleet.v2_end)
    return total, (loads[0], loads[1])


def make_solution(inst: Instance, visits: Iterable[Visit], allow_empty: bool = False) -> TwoRouteSolution:
    visits = tuple((int(cid), int(o)) for cid, o in visits)
    cost, loads = evaluate_solution(inst, visits, allow_empty)
    return TwoRouteSolution(visits, cost, loads)


@dataclass
class FeasibilityReport:
    feasible: bool
    loads: tuple[int, int]
    violations: list[str]

    def __bool__(self):
        return self.feasible


def check_feasibility(inst: Instance, sol: TwoRouteSolution) -> FeasibilityReport:
    """Capacity and fixed-vehicle checks; never raises on a structurally valid solution."""
    k = sol.switch_index
    loads = [0, 0]
    violations = []
    for pos, (cid, _) in enumerate(sol.visits):
        if cid == 0:
            continue
        c = inst.customer(cid)
        vehicle = 1 if pos < k else 2
        loads[vehicle - 1] += c.demand
        if c.fixed_to is not None and c.fixed_to != vehicle:
            violations.append(f"customer {cid} is fixed to vehicle {c.fixed_to} but served by {vehicle}")
    for m in (1, 2):
        if loads[m - 1] > inst.fleet.capacity[m - 1]:
            violations.append(f"vehicle {m} load {loads[m - 1]} exceeds capacity {inst.fleet.capacity[m - 1]}")
    return FeasibilityReport(not violations, (loads[0], loads[1]), violations)
