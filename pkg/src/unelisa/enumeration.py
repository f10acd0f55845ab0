"""Exact brute-force distribution oracle for small pairwise binary models.

Enumerates all 2^k spin configurations of a model over k nodes, storing the
probability mass function and log-partition value. Everything is computed in
log space with a log-sum-exp reduction so weights up to |theta| ~ 30 stay
finite. This is the ground truth the samplers and closed-form approximations
are tested against; it is not meant for large graphs (default cap: 24 nodes).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .model import IsingModelSpec, StructuralError

__all__ = [
    "ExactDistribution",
    "SizeError",
    "enumerate_weights",
    "enumerate_spec",
    "pair_moment",
    "marginalize_out_node0",
    "conditional_logit",
    "kl_divergence",
]

DEFAULT_MAX_NODES = 24


class SizeError(ValueError):
    """Requested enumeration exceeds the configured node cap."""


def _logsumexp(a: np.ndarray) -> float:
    m = a.max()
    return float(m + np.log(np.sum(np.exp(a - m))))


def _spin(idx: np.ndarray, bit: int) -> np.ndarray:
    # bit set -> +1, clear -> -1
    return ((idx >> np.uint32(bit)) & np.uint32(1)).astype(np.int64) * 2 - 1


@dataclass(frozen=True)
class ExactDistribution:
    """Exact pmf over configurations of ``nodes`` in {-1,+1}^k.

    Configuration index i encodes node ``nodes[j]`` in bit j of i, with a set
    bit meaning spin +1. ``pmf`` sums to one and is strictly positive.
    """

    nodes: tuple[int, ...]
    pmf: np.ndarray
    log_partition: float

    def __post_init__(self):
        k = len(self.nodes)
        pmf = np.asarray(self.pmf, dtype=float)
        if pmf.shape != (2**k,):
            raise StructuralError("pmf length must be 2^k")
        object.__setattr__(self, "nodes", tuple(int(v) for v in self.nodes))
        pmf = np.ascontiguousarray(pmf)
        pmf.flags.writeable = False
        object.__setattr__(self, "pmf", pmf)

    @property
    def k(self) -> int:
        return len(self.nodes)

    def bit(self, node: int) -> int:
        try:
            return self.nodes.index(node)
        except ValueError:
            raise StructuralError(f"node {node} not in distribution over {self.nodes}") from None

    def prob(self, assignment: Mapping[int, int]) -> float:
        """Probability of one full configuration given as node -> spin."""
        if set(assignment) != set(self.nodes):
            raise StructuralError("assignment must cover exactly the distribution's nodes")
        idx = 0
        for node, spin in assignment.items():
            if spin == 1:
                idx |= 1 << self.bit(node)
            elif spin != -1:
                raise StructuralError(f"spin for node {node} must be -1 or +1")
        return float(self.pmf[idx])


def enumerate_weights(
    nodes,
    edges: Mapping[tuple[int, int], float],
    fields: Mapping[int, float] | None = None,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> ExactDistribution:
    """Exact distribution of exp{sum_s h_s y_s + sum_{s<t} w_st y_s y_t} / Z."""
    nodes = tuple(int(v) for v in nodes)
    k = len(nodes)
    if k > max_nodes:
        raise SizeError(f"{k} nodes exceeds enumeration cap {max_nodes}")
    if len(set(nodes)) != k:
        raise StructuralError("duplicate nodes")
    bit = {v: j for j, v in enumerate(nodes)}
    idx = np.arange(2**k, dtype=np.uint32)
    logw = np.zeros(2**k, dtype=float)
    for node, h in (fields or {}).items():
        if h != 0.0:
            logw += float(h) * _spin(idx, bit[node])
    for (s, t), w in edges.items():
        if w != 0.0:
            logw += float(w) * (_spin(idx, bit[s]) * _spin(idx, bit[t]))
    a = _logsumexp(logw)
    return ExactDistribution(nodes=nodes, pmf=np.exp(logw - a), log_partition=a)


def enumerate_spec(spec: IsingModelSpec, max_nodes: int = DEFAULT_MAX_NODES) -> ExactDistribution:
    """Exact joint distribution over nodes 0..p of a model spec."""
    return enumerate_weights(
        nodes=range(spec.p + 1),
        edges=spec.edges,
        fields={0: spec.theta0},
        max_nodes=max_nodes,
    )


def pair_moment(dist: ExactDistribution, r: int, t: int) -> float:
    """E[y_r y_t] under the exact distribution."""
    if r == t:
        raise StructuralError("pair moment needs two distinct nodes")
    idx = np.arange(2**dist.k, dtype=np.uint32)
    prod = _spin(idx, dist.bit(r)) * _spin(idx, dist.bit(t))
    return float(np.dot(dist.pmf, prod))


def marginalize_out_node0(dist: ExactDistribution) -> ExactDistribution:
    """Sum the pmf over node 0, producing the distribution of the observed nodes."""
    b = dist.bit(0)
    k = dist.k
    idx = np.arange(2**k, dtype=np.uint32)
    keep = ((idx >> np.uint32(b + 1)) << np.uint32(b)) | (idx & np.uint32((1 << b) - 1))
    folded = np.zeros(2 ** (k - 1), dtype=float)
    np.add.at(folded, keep, dist.pmf)
    nodes = tuple(v for v in dist.nodes if v != 0)
    return ExactDistribution(nodes=nodes, pmf=folded, log_partition=dist.log_partition)


def conditional_logit(dist: ExactDistribution, s: int, others: Mapping[int, int]) -> float:
    """Half log-odds of y_s = +1 given all other observed nodes.

    ``dist`` may include node 0, in which case it is marginalized out first;
    ``others`` must assign every observed node except s.
    """
    if 0 in dist.nodes:
        dist = marginalize_out_node0(dist)
    expected = set(dist.nodes) - {s}
    if set(others) != expected:
        raise StructuralError(f"assignment must cover exactly nodes {sorted(expected)}")
    plus = dist.prob({**others, s: +1})
    minus = dist.prob({**others, s: -1})
    return 0.5 * float(np.log(plus) - np.log(minus))


def kl_divergence(p: ExactDistribution, q: ExactDistribution) -> float:
    """KL(p || q) over identical node sets; q must be strictly positive."""
    if p.nodes != q.nodes:
        raise StructuralError("distributions must cover the same nodes in the same order")
    if (q.pmf <= 0).any():
        raise StructuralError("q must be strictly positive")
    mask = p.pmf > 0
    pm = p.pmf[mask]
    return float(np.sum(pm * (np.log(pm) - np.log(q.pmf[mask]))))
