"""Two-vehicle routing with segment customers: exact subset DP and sliding-subsets search."""

from .aggregation import Disassembly, aggregate_subpath, disassemble, lift_solution
from .dp_core import InfeasibleError, SizeError, SolverError, UnreachableError, solve_exact
from .model import (
    INF,
    CostModel,
    Fleet,
    Instance,
    ModelError,
    SegmentCustomer,
    StructureError,
    TwoRouteSolution,
    check_feasibility,
    evaluate_solution,
    make_solution,
)
from .oracle import brute_force
from .sliding_search import DisassemblyConfig, improve
from .tour_improvement import improve_route, improve_routes
from .two_period import TwoPeriodInstance, build_instance, extract_tours

__version__ = "0.1.0"

__all__ = [
    "INF",
    "CostModel",
    "Disassembly",
    "DisassemblyConfig",
    "Fleet",
    "InfeasibleError",
    "Instance",
    "ModelError",
    "SegmentCustomer",
    "SizeError",
    "SolverError",
    "StructureError",
    "TwoPeriodInstance",
    "TwoRouteSolution",
    "UnreachableError",
    "aggregate_subpath",
    "brute_force",
    "build_instance",
    "check_feasibility",
    "disassemble",
    "evaluate_solution",
    "extract_tours",
    "improve",
    "improve_route",
    "improve_routes",
    "lift_solution",
    "make_solution",
    "solve_exact",
]
