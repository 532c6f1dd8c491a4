"""Random 2-period instances: uniform integer points, depot at node 0."""

from __future__ import annotations

import numpy as np

from ..two_period import TwoPeriodInstance, euclidean_distances


def generate_instance(
    n_total: int = 48,
    m: int = 8,
    seed: int = 0,
    coord_range: int = 10000,
    balanced: bool = True,
    name: str | None = None,
) -> TwoPeriodInstance:
    """``n_total`` customer points plus a depot; ``m`` of them are visited in both periods.

    Deterministic in all arguments.
    """
    if n_total < 2:
        raise ValueError("need at least two customers")
    if not 0 <= m <= n_total:
        raise ValueError(f"m={m} outside 0..{n_total}")
    rng = np.random.default_rng(seed)
    xy = rng.integers(0, coord_range + 1, size=(n_total + 1, 2))
    coords = tuple((int(x), int(y)) for x, y in xy)
    both = rng.choice(np.arange(1, n_total + 1), size=m, replace=False)
    both_set = frozenset(int(v) for v in both)
    single = frozenset(range(1, n_total + 1)) - both_set
    return TwoPeriodInstance(
        0, both_set, single, euclidean_distances(coords), balanced,
        name=name or f"G{n_total}_{m}_{seed}", coords=coords,
    )
