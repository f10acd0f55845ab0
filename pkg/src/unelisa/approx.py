"""Closed-form pairwise model for the hidden-node-marginalized distribution.

Marginalizing the hidden node couples every pair of experts; the induced pair
weight has a closed form in the two expert-to-hidden weights and the external
field, while every other pair keeps its original weight. The sign of an
induced weight equals the sign of the product of the two expert-to-hidden
weights, which is what the vote-twisting partition below exploits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .model import IsingModelSpec, StructuralError

__all__ = ["ApproxModel", "theta_tilde_pair", "approximate", "sign_partition", "power_iteration"]


def _logsumexp4(a1: float, a2: float, a3: float, a4: float) -> float:
    m = max(a1, a2, a3, a4)
    return m + np.log(np.exp(a1 - m) + np.exp(a2 - m) + np.exp(a3 - m) + np.exp(a4 - m))


def theta_tilde_pair(theta_0s: float, theta_0t: float, theta_0: float) -> float:
    """Induced pair weight for two experts after marginalizing the hidden node.

    Equals ``0.5 * log(num/den)`` with ``num = e^{a1}+e^{-a1}+e^{a2}+e^{-a2}``
    and ``den = e^{a3}+e^{-a3}+e^{a4}+e^{-a4}``, where a1..a4 are the four
    sums/differences of the inputs; evaluated via log-sum-exp so it stays
    finite for weights up to ~30.
    """
    a1 = theta_0s + theta_0t + theta_0
    a2 = theta_0s + theta_0t - theta_0
    a3 = theta_0s - theta_0t + theta_0
    a4 = theta_0s - theta_0t - theta_0
    num = _logsumexp4(a1, -a1, a2, -a2)
    den = _logsumexp4(a3, -a3, a4, -a4)
    return 0.5 * float(num - den)


@dataclass(frozen=True)
class ApproxModel:
    """Pairwise model over the observed nodes 1..p; no external fields.

    ``theta`` holds the nonzero pair weights keyed by (s, t) with s < t. The
    induced neighborhoods are the nonzero pattern.
    """

    p: int
    theta: Mapping[tuple[int, int], float]

    def __post_init__(self):
        clean = {}
        for (s, t), w in dict(self.theta).items():
            s, t = int(s), int(t)
            if not (1 <= s < t <= self.p):
                raise StructuralError(f"pair ({s},{t}) out of range")
            if w == 0.0:
                raise StructuralError(f"zero weight stored for pair ({s},{t})")
            clean[(s, t)] = float(w)
        object.__setattr__(self, "theta", clean)

    def neighborhood(self, s: int) -> frozenset[int]:
        out = set()
        for (a, b) in self.theta:
            if a == s:
                out.add(b)
            elif b == s:
                out.add(a)
        return frozenset(out)

    def neighborhoods(self) -> dict[int, frozenset[int]]:
        return {s: self.neighborhood(s) for s in range(1, self.p + 1)}

    def weight(self, s: int, t: int) -> float:
        if s > t:
            s, t = t, s
        return self.theta.get((s, t), 0.0)


def approximate(spec: IsingModelSpec) -> ApproxModel:
    """Pairwise model over nodes 1..p induced by marginalizing node 0.

    Pairs outside the expert set keep their original weight; every expert
    pair gets the closed-form induced weight (nonzero, so experts become a
    clique); all remaining pairs are zero.
    """
    theta: dict[tuple[int, int], float] = {}
    for (s, t), w in spec.edges.items():
        if s == 0:
            continue
        theta[(s, t)] = w
    experts = sorted(spec.expert_set)
    for i, s in enumerate(experts):
        for t in experts[i + 1 :]:
            if (s, t) in theta:
                raise StructuralError(f"expert pair ({s},{t}) already has an edge (G3 violation)")
            w = theta_tilde_pair(spec.weight(0, s), spec.weight(0, t), spec.theta0)
            if w != 0.0:
                theta[(s, t)] = w
    return ApproxModel(p=spec.p, theta=theta)


def power_iteration(
    mat: np.ndarray,
    max_iter: int = 1000,
    tol: float = 1e-10,
) -> np.ndarray:
    """Leading (algebraically largest) eigenvector of a symmetric matrix.

    Deterministic: iterates from three fixed starts (all ones; alternating
    +/-1; a greedy sign-propagation coloring of the matrix) and keeps the
    result with the largest Rayleigh quotient. Any single fixed start can be
    orthogonal to the leading eigenvector, so the restarts are what make the
    two-coloring contract hold on balanced sign matrices. A diagonal shift by
    the Gershgorin bound makes the algebraically largest eigenvalue also
    largest in magnitude, so plain power iteration converges to it instead of
    oscillating.
    """
    mat = np.asarray(mat, dtype=float)
    k = mat.shape[0]
    if k == 0:
        raise StructuralError("empty matrix")
    shift = float(np.abs(mat).sum(axis=1).max()) + 1.0
    shifted = mat + shift * np.eye(k)

    def run(v: np.ndarray) -> np.ndarray:
        v = v / np.linalg.norm(v)
        for _ in range(max_iter):
            w = shifted @ v
            w /= np.linalg.norm(w)
            if np.linalg.norm(w - v) < tol:
                return w
            v = w
        return v

    starts = [
        np.ones(k),
        np.array([1.0 if i % 2 == 0 else -1.0 for i in range(k)]),
        _propagated_coloring(mat),
    ]
    best = None
    best_r = -np.inf
    for start in starts:
        v = run(start)
        r = float(v @ shifted @ v)
        if r > best_r + tol:
            best, best_r = v, r
    return best


def _propagated_coloring(mat: np.ndarray) -> np.ndarray:
    """Greedy +/-1 coloring following edge signs (exact on consistent matrices)."""
    k = mat.shape[0]
    color = np.zeros(k)
    for root in range(k):
        if color[root] != 0.0:
            continue
        color[root] = 1.0
        queue = [root]
        while queue:
            u = queue.pop()
            for v in range(k):
                if mat[u, v] != 0.0 and color[v] == 0.0:
                    color[v] = color[u] * (1.0 if mat[u, v] > 0 else -1.0)
                    queue.append(v)
    return color


def sign_partition(nodes, signs: np.ndarray) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Two-group split of ``nodes`` from a symmetric sign matrix.

    ``signs[i,j]`` in {-1,0,+1} says whether nodes i and j pull together or
    apart. The split is the sign pattern of the leading eigenvector (power
    iteration, deterministic); entries of magnitude below 1e-12 go to the
    first group. On a consistent two-colorable matrix this returns the exact
    two-coloring, up to swapping the groups.
    """
    nodes = tuple(nodes)
    if not nodes:
        raise StructuralError("empty node subset")
    signs = np.asarray(signs, dtype=float)
    if signs.shape != (len(nodes), len(nodes)):
        raise StructuralError("sign matrix shape must match the node subset")
    if not np.allclose(signs, signs.T):
        raise StructuralError("sign matrix must be symmetric")
    if np.abs(np.diag(signs)).max() != 0.0:
        raise StructuralError("sign matrix diagonal must be zero")
    if len(nodes) == 1:
        return (nodes[0],), ()
    v = power_iteration(signs)
    group_a = tuple(n for n, x in zip(nodes, v) if x >= 0 or abs(x) < 1e-12)
    group_b = tuple(n for n, x in zip(nodes, v) if not (x >= 0 or abs(x) < 1e-12))
    return group_a, group_b
