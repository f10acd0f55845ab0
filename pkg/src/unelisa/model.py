"""Core domain types: label matrices, Ising model specs, and derived reports.

Node 0 is always the hidden truth variable; observed classifiers are nodes
1..p. All label values live in {-1, +1}; abstentions and missing votes are
rejected. Instances of every type here are immutable after construction and
safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

__all__ = [
    "LabelMatrix",
    "IsingModelSpec",
    "NeighborhoodMap",
    "ExpertReport",
    "PredictionResult",
    "StructuralError",
    "validate_model",
    "degree_stats",
]


class StructuralError(ValueError):
    """Malformed inputs (bad indices, shapes, values); distinct from model-property violations."""


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


def label_values(labels) -> np.ndarray:
    """Accept a LabelMatrix or a raw n-by-k array of +/-1 entries; return the value array."""
    if isinstance(labels, LabelMatrix):
        return labels.values
    a = np.asarray(labels)
    if a.ndim != 2:
        raise StructuralError("label array must be 2-dimensional")
    if not np.isin(a, (-1, 1)).all():
        raise StructuralError("label entries must be -1 or +1")
    return a.astype(np.int8)


@dataclass(frozen=True)
class LabelMatrix:
    """n observed instances by p classifiers, entries in {-1, +1}.

    ``truth`` optionally carries the hidden node-0 column (simulation output
    or gold labels); it is never consumed by the unsupervised estimators.
    """

    values: np.ndarray
    classifier_ids: tuple[str, ...]
    instance_ids: tuple[str, ...] | None = None
    truth: np.ndarray | None = None

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 2:
            raise StructuralError("values must be an n-by-p matrix")
        n, p = v.shape
        if n < 1 or p < 2:
            raise StructuralError(f"need n >= 1 and p >= 2, got n={n}, p={p}")
        if not np.isin(v, (-1, 1)).all():
            raise StructuralError("label entries must be exactly -1 or +1")
        ids = tuple(str(c) for c in self.classifier_ids)
        if len(ids) != p:
            raise StructuralError("classifier_ids length must equal p")
        if len(set(ids)) != p:
            raise StructuralError("classifier_ids must be unique")
        object.__setattr__(self, "values", _freeze(v.astype(np.int8)))
        object.__setattr__(self, "classifier_ids", ids)
        if self.instance_ids is not None:
            iid = tuple(str(i) for i in self.instance_ids)
            if len(iid) != n:
                raise StructuralError("instance_ids length must equal n")
            object.__setattr__(self, "instance_ids", iid)
        if self.truth is not None:
            t = np.asarray(self.truth)
            if t.shape != (n,):
                raise StructuralError("truth must have one entry per instance")
            if not np.isin(t, (-1, 1)).all():
                raise StructuralError("truth entries must be exactly -1 or +1")
            object.__setattr__(self, "truth", _freeze(t.astype(np.int8)))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def column(self, node: int) -> np.ndarray:
        """Column of classifier node s (1-based node id)."""
        if not 1 <= node <= self.p:
            raise StructuralError(f"node {node} out of range 1..{self.p}")
        return self.values[:, node - 1]

    def restrict(self, nodes) -> np.ndarray:
        """Submatrix of the given classifier nodes, in the given order."""
        return self.values[:, [n - 1 for n in nodes]]


@dataclass(frozen=True)
class IsingModelSpec:
    """Pairwise binary model over nodes {0..p} with an external field on node 0.

    ``edges`` maps unordered pairs (s, t) with s < t to nonzero weights;
    ``expert_set`` lists the classifiers designated as directly tied to the
    hidden node. Construction checks structure only; the model properties
    G1-G3 are checked by :func:`validate_model` so that violating specs can
    still be represented and reported on.
    """

    p: int
    theta0: float
    edges: Mapping[tuple[int, int], float]
    expert_set: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.p < 1:
            raise StructuralError("p must be >= 1")
        clean: dict[tuple[int, int], float] = {}
        for (s, t), w in dict(self.edges).items():
            if not (isinstance(s, (int, np.integer)) and isinstance(t, (int, np.integer))):
                raise StructuralError(f"edge endpoints must be integers: ({s},{t})")
            s, t = int(s), int(t)
            if s == t:
                raise StructuralError(f"self-edge ({s},{t}) not allowed")
            if s > t:
                s, t = t, s
            if not (0 <= s <= self.p and 0 <= t <= self.p):
                raise StructuralError(f"edge ({s},{t}) out of range 0..{self.p}")
            w = float(w)
            if w == 0.0 or not np.isfinite(w):
                raise StructuralError(f"edge ({s},{t}) weight must be nonzero and finite")
            if (s, t) in clean:
                raise StructuralError(f"duplicate edge ({s},{t})")
            clean[(s, t)] = w
        experts = frozenset(int(s) for s in self.expert_set)
        if any(not 1 <= s <= self.p for s in experts):
            raise StructuralError("expert_set must be a subset of 1..p")
        object.__setattr__(self, "edges", clean)
        object.__setattr__(self, "expert_set", experts)
        object.__setattr__(self, "theta0", float(self.theta0))

    def neighbors(self, s: int) -> frozenset[int]:
        """All nodes sharing an edge with s (over the full node set 0..p)."""
        out = set()
        for (a, b) in self.edges:
            if a == s:
                out.add(b)
            elif b == s:
                out.add(a)
        return frozenset(out)

    def weight(self, s: int, t: int) -> float:
        if s > t:
            s, t = t, s
        return self.edges.get((s, t), 0.0)


def validate_model(spec: IsingModelSpec) -> list[str]:
    """Check the structural properties G1-G3; return one message per violation.

    G1: node 0 has strictly the largest degree, with a gap of at least 2 over
        every other node.
    G2: the nodes adjacent to node 0 are exactly the designated experts.
    G3: no edge joins two experts.

    An empty list means the spec is a valid model.
    """
    deg = np.zeros(spec.p + 1, dtype=int)
    for (s, t) in spec.edges:
        deg[s] += 1
        deg[t] += 1
    violations: list[str] = []

    d0 = deg[0]
    if spec.p >= 1:
        rest = deg[1:]
        worst = int(rest.argmax()) + 1
        if d0 < rest[worst - 1] + 2 or d0 == 0:
            violations.append(
                f"G1: node 0 degree {d0} must exceed the next-largest degree "
                f"{rest[worst - 1]} (node {worst}) by at least 2"
            )

    adj0 = spec.neighbors(0)
    for s in sorted(adj0 - spec.expert_set):
        violations.append(f"G2: node {s} is adjacent to node 0 but not in the expert set")
    for s in sorted(spec.expert_set - adj0):
        violations.append(f"G2: expert {s} has no edge to node 0")

    for (s, t) in sorted(spec.edges):
        if s in spec.expert_set and t in spec.expert_set:
            violations.append(f"G3: edge ({s},{t}) joins two experts")
    return violations


def degree_stats(spec: IsingModelSpec):
    """Degrees and marginalized-model degrees.

    Returns ``(d0, d, d_marg, d_marg_max)`` where ``d[s]`` counts the
    neighbors of classifier s among the observed nodes 1..p (the edge to node
    0 is not counted), and ``d_marg[s] = d[s] + d0 - 1`` for experts (their
    expert siblings become neighbors once node 0 is marginalized out) and
    ``d_marg[s] = d[s]`` otherwise. Keys are node ids 1..p.
    """
    d0 = len(spec.neighbors(0))
    d: dict[int, int] = {s: 0 for s in range(1, spec.p + 1)}
    for (s, t) in spec.edges:
        if s >= 1:  # pairs are stored with s < t, so s >= 1 excludes exactly the node-0 edges
            d[s] += 1
            d[t] += 1
    d_marg = {
        s: (d[s] + d0 - 1 if s in spec.expert_set else d[s]) for s in range(1, spec.p + 1)
    }
    d_marg_max = max(d_marg.values()) if d_marg else 0
    return d0, d, d_marg, d_marg_max


@dataclass(frozen=True)
class NeighborhoodMap:
    """Estimated neighborhoods over observed nodes: node s -> {t: weight}.

    Weights are the (symmetrized) nonzero edge estimates; node 0 never
    appears, and no node lists itself.
    """

    p: int
    nbrs: Mapping[int, Mapping[int, float]]

    def __post_init__(self):
        clean: dict[int, dict[int, float]] = {}
        for s in range(1, self.p + 1):
            row = dict(self.nbrs.get(s, {}))
            for t, w in row.items():
                if t == s or not 1 <= t <= self.p:
                    raise StructuralError(f"bad neighbor {t} for node {s}")
                if w == 0.0:
                    raise StructuralError(f"zero weight stored for pair ({s},{t})")
            clean[s] = row
        object.__setattr__(self, "nbrs", clean)

    def neighborhood(self, s: int) -> frozenset[int]:
        return frozenset(self.nbrs[s])

    def size(self, s: int) -> int:
        return len(self.nbrs[s])

    def weight(self, s: int, t: int) -> float:
        return self.nbrs[s].get(t, 0.0)

    def sizes(self) -> dict[int, int]:
        return {s: len(self.nbrs[s]) for s in range(1, self.p + 1)}


@dataclass(frozen=True)
class ExpertReport:
    """Estimated expert set with per-expert reliabilities and field estimates.

    ``psi_hat[s]`` is the probability that expert s agrees with the hidden
    label; the edge estimates satisfy theta0s_hat[s] = atanh-style half-logit
    of psi_hat[s] by construction, and theta0_hat likewise for pi_hat.
    """

    expert_set_hat: tuple[int, ...]
    positive_group: tuple[int, ...] = ()
    negative_group: tuple[int, ...] = ()
    psi_hat: Mapping[int, float] = field(default_factory=dict)
    theta0s_hat: Mapping[int, float] = field(default_factory=dict)
    theta0_hat: float = 0.0
    pi_hat: float = 0.5
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        experts = tuple(sorted(int(s) for s in self.expert_set_hat))
        object.__setattr__(self, "expert_set_hat", experts)
        pos = tuple(sorted(int(s) for s in self.positive_group))
        neg = tuple(sorted(int(s) for s in self.negative_group))
        if pos or neg:
            if set(pos) | set(neg) != set(experts) or set(pos) & set(neg):
                raise StructuralError("positive/negative groups must partition the expert set")
        object.__setattr__(self, "positive_group", pos)
        object.__setattr__(self, "negative_group", neg)
        object.__setattr__(self, "psi_hat", dict(self.psi_hat))
        object.__setattr__(self, "theta0s_hat", dict(self.theta0s_hat))


@dataclass(frozen=True)
class PredictionResult:
    """Hard labels in {-1,+1} plus a per-instance score in [0,1]."""

    labels: np.ndarray
    scores: np.ndarray
    method: str
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        lab = np.asarray(self.labels)
        sc = np.asarray(self.scores, dtype=float)
        if lab.shape != sc.shape or lab.ndim != 1:
            raise StructuralError("labels and scores must be 1-d of equal length")
        if not np.isin(lab, (-1, 1)).all():
            raise StructuralError("labels must be -1 or +1")
        if ((sc < 0) | (sc > 1)).any():
            raise StructuralError("scores must lie in [0,1]")
        if self.method == "bayes":
            if not ((lab == 1) == (sc >= 0.5)).all():
                raise StructuralError("bayes labels must equal the 0.5-thresholded scores")
        object.__setattr__(self, "labels", _freeze(lab.astype(np.int8)))
        object.__setattr__(self, "scores", _freeze(sc))

    @property
    def n(self) -> int:
        return self.labels.shape[0]
