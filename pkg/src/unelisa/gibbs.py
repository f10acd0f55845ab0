"""Gibbs sampling of joint (hidden, observed) label configurations.

Single-site heat-bath updates: site s flips to +1 with probability
``sigma(2 * (sum_{t in N_s} theta_st f_t + field_s))``. A chain burns in for
a fixed number of full sweeps, then records one configuration every
``thin_site_updates`` single-site updates.

Randomness comes from numpy's PCG64 generator. From ``SeedSequence(seed)``
two child streams are spawned: child 0 drives the spin decisions (one
uniform per site update), child 1 the per-sweep visit permutations when
``update_order='random'``. Independent chains must use seeds derived via
:func:`chain_seed`. Outputs are reproducible across platforms and identical
between the compiled and pure kernel backends.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import gibbs_chain
from .model import IsingModelSpec, LabelMatrix, StructuralError

__all__ = ["GibbsConfig", "sample", "sample_weights", "chain_seed"]


@dataclass(frozen=True)
class GibbsConfig:
    """Chain protocol: burn-in sweeps, thinning in site updates, sample count.

    ``thin_site_updates=None`` means the default of two full sweeps,
    ``2 * n_nodes``.
    """

    n_samples: int
    seed: int
    burn_in_sweeps: int = 1000
    thin_site_updates: int | None = None
    update_order: str = "fixed"

    def __post_init__(self):
        if self.n_samples < 1:
            raise StructuralError("n_samples must be >= 1")
        if self.burn_in_sweeps < 0:
            raise StructuralError("burn_in_sweeps must be >= 0")
        if self.thin_site_updates is not None and self.thin_site_updates < 1:
            raise StructuralError("thin_site_updates must be >= 1")
        if self.update_order not in ("fixed", "random"):
            raise StructuralError("update_order must be 'fixed' or 'random'")


def chain_seed(seed: int, chain: int) -> int:
    """Derive the seed for an independent parallel chain."""
    return int(np.random.SeedSequence([int(seed), int(chain)]).generate_state(1)[0])


def _csr(k: int, edges) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    adj: list[list[tuple[int, float]]] = [[] for _ in range(k)]
    for (s, t), w in edges.items():
        adj[s].append((t, w))
        adj[t].append((s, w))
    indptr = np.zeros(k + 1, dtype=np.int32)
    indices = []
    weights = []
    for s in range(k):
        adj[s].sort()
        indptr[s + 1] = indptr[s] + len(adj[s])
        for t, w in adj[s]:
            indices.append(t)
            weights.append(w)
    return (
        indptr,
        np.array(indices, dtype=np.int32),
        np.array(weights, dtype=float),
    )


def sample_weights(k: int, edges, fields, cfg: GibbsConfig) -> np.ndarray:
    """Sample configurations of a generic k-node pairwise model.

    ``edges`` maps 0-based index pairs to weights, ``fields`` is a length-k
    external field vector. Returns an ``(n_samples, k)`` int8 matrix.
    """
    indptr, indices, weights = _csr(k, edges)
    fields = np.asarray(fields, dtype=float)
    if fields.shape != (k,):
        raise StructuralError("fields must have one entry per node")
    thin = cfg.thin_site_updates if cfg.thin_site_updates is not None else 2 * k
    n_burn = cfg.burn_in_sweeps * k
    total = n_burn + cfg.n_samples * thin

    ss = np.random.SeedSequence(cfg.seed)
    spin_ss, order_ss = ss.spawn(2)
    uniforms = np.random.Generator(np.random.PCG64(spin_ss)).random(total)
    if cfg.update_order == "fixed":
        order = np.arange(k, dtype=np.int32)
    else:
        rng = np.random.Generator(np.random.PCG64(order_ss))
        sweeps = -(-total // k)
        order = np.concatenate(
            [rng.permutation(k).astype(np.int32) for _ in range(sweeps)]
        )

    state = np.ones(k, dtype=np.int8)
    out = np.empty((cfg.n_samples, k), dtype=np.int8)
    gibbs_chain(indptr, indices, weights, fields, state, order, uniforms, n_burn, thin, out)
    return out


def sample(spec: IsingModelSpec, cfg: GibbsConfig) -> LabelMatrix:
    """Sample a label matrix (observed columns 1..p plus hidden truth column).

    Deterministic given ``cfg.seed``. The chain starts from the all-plus-one
    configuration; the burn-in washes the start out. Any structurally valid
    spec can be sampled, including ones that fail the model-property checks.
    """
    k = spec.p + 1
    fields = np.zeros(k)
    fields[0] = spec.theta0
    rows = sample_weights(k, dict(spec.edges), fields, cfg)
    return LabelMatrix(
        values=rows[:, 1:],
        classifier_ids=tuple(str(s) for s in range(1, spec.p + 1)),
        truth=rows[:, 0],
    )
