"""Shared fixtures: the canonical 18-classifier example graph and small random specs.

The example graph (5 experts, layered non-experts, one isolated 3-node
component) exercises every structural case: expert siblings, non-expert
chains, a triangle, leaves, and a component detached from the hidden node.
Expected neighborhoods, knots, and selection for it were derived by hand from
the edge list and are frozen in the tests that use them.
"""

from __future__ import annotations

import numpy as np
import pytest

from unelisa.model import IsingModelSpec, NeighborhoodMap
from unelisa.approx import ApproxModel

# Edge list of the example graph; experts are 1..5.
EXAMPLE_EDGES = [
    (0, 1), (0, 2), (0, 3), (0, 4), (0, 5),
    (1, 6), (1, 7), (2, 8), (3, 8), (5, 8),
    (3, 9), (6, 7), (5, 10), (6, 11), (9, 11),
    (10, 12), (10, 13), (11, 14), (12, 15),
    (16, 17), (16, 18),
]
EXAMPLE_P = 18
EXAMPLE_EXPERTS = frozenset({1, 2, 3, 4, 5})


def example_spec(expert_w: float = 1.0, other_w: float = 0.5, theta0: float = 0.0) -> IsingModelSpec:
    edges = {}
    for (s, t) in EXAMPLE_EDGES:
        edges[(s, t)] = expert_w if s == 0 else other_w
    return IsingModelSpec(p=EXAMPLE_P, theta0=theta0, edges=edges, expert_set=EXAMPLE_EXPERTS)


@pytest.fixture
def fig_spec() -> IsingModelSpec:
    return example_spec()


def nbhd_from_approx(model: ApproxModel) -> NeighborhoodMap:
    """Exact neighborhood map (with weights) of a pairwise model."""
    nbrs: dict[int, dict[int, float]] = {s: {} for s in range(1, model.p + 1)}
    for (s, t), w in model.theta.items():
        nbrs[s][t] = w
        nbrs[t][s] = w
    return NeighborhoodMap(p=model.p, nbrs=nbrs)


def random_small_spec(seed: int) -> IsingModelSpec:
    """Random valid spec with p <= 5: a star plus an optional pendant or pair.

    Covers every graph shape that satisfies the degree-gap property at this
    size. Weights are continuous with random signs; the external field is
    small but nonzero half the time.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    p = int(rng.integers(3, 6))
    d0 = int(rng.integers(3, p + 1))
    edges: dict[tuple[int, int], float] = {}
    for s in range(1, d0 + 1):
        w = float(rng.uniform(0.3, 1.2)) * (1.0 if rng.random() < 0.5 else -1.0)
        edges[(0, s)] = w
    free = list(range(d0 + 1, p + 1))
    cap = d0 - 2
    if free and cap >= 2:
        # pendant off a random expert
        v = free.pop(0)
        u = int(rng.integers(1, d0 + 1))
        edges[(u, v)] = float(rng.uniform(0.3, 1.0)) * (1.0 if rng.random() < 0.5 else -1.0)
    if len(free) >= 2:
        # isolated non-expert pair
        a, b = free[0], free[1]
        edges[(a, b)] = float(rng.uniform(0.3, 1.0)) * (1.0 if rng.random() < 0.5 else -1.0)
    theta0 = float(rng.uniform(-0.5, 0.5)) if rng.random() < 0.5 else 0.0
    return IsingModelSpec(p=p, theta0=theta0, edges=edges, expert_set=frozenset(range(1, d0 + 1)))
