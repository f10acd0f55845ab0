"""Per-node sparse logistic regression for neighborhood estimation.

For each observed node s, fit

    min over theta of  mean_i log(2 cosh(x_i . theta)) - theta . mu_s
                       + lambda * |theta|_1

where x_i are the remaining +/-1 columns and ``mu_s[t]`` is the empirical
cross moment ``mean_i f_s f_t``. The estimated neighborhood of s is the
nonzero support of the minimizer; per-node supports are then symmetrized
into an undirected map. The solver contract is the KKT residual, not the
method; the implementation is cyclic coordinate descent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import cd_lasso_logistic
from .approx import ApproxModel, approximate
from .enumeration import SizeError, enumerate_weights
from .model import IsingModelSpec, NeighborhoodMap, StructuralError, label_values

__all__ = [
    "LassoLogisticProblem",
    "LassoLogisticSolution",
    "FisherDiagnostics",
    "lambda_auto",
    "problem_for_node",
    "objective",
    "smooth_gradient",
    "solve",
    "neighborhoods",
    "fisher_diagnostics",
]

ZERO_TRUNCATION = 1e-10


def lambda_auto(n: int, p: int, scale: float = 2.0) -> float:
    """Default regularization level: ``scale * sqrt(log p / n)``.

    The objective below is parameterized in half-logits (the conditional
    logit of the pairwise model is twice the linear predictor), which halves
    the gradient scale relative to a standard logistic lasso. The default
    ``scale=2`` therefore reproduces the standard-parameterization rate
    ``sqrt(log p / n)``: the substitution beta = 2 theta maps one problem
    onto the other with identical supports and signs. At scale 1 the rule is
    only a ~1.8 sigma threshold on the cross-moment noise and support
    estimates pick up several percent false edges regardless of n.
    """
    return scale * math.sqrt(math.log(p) / n)


@dataclass(frozen=True)
class LassoLogisticProblem:
    """One nodewise fit: response node s against the remaining columns."""

    s: int
    design: np.ndarray
    feature_nodes: tuple[int, ...]
    lam: float
    mu: np.ndarray

    def __post_init__(self):
        design = np.asarray(self.design)
        if design.ndim != 2 or not np.isin(design, (-1, 1)).all():
            raise StructuralError("design must be an n-by-(p-1) matrix of +/-1")
        if self.lam < 0:
            raise StructuralError("lambda must be nonnegative")
        mu = np.asarray(self.mu, dtype=float)
        if mu.shape != (design.shape[1],):
            raise StructuralError("mu must have one entry per feature")
        if (np.abs(mu) > 1).any():
            raise StructuralError("cross moments must lie in [-1, 1]")
        object.__setattr__(self, "design", design.astype(np.int8))
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "feature_nodes", tuple(int(t) for t in self.feature_nodes))

    @property
    def n(self) -> int:
        return self.design.shape[0]


@dataclass(frozen=True)
class LassoLogisticSolution:
    theta_hat: np.ndarray
    objective_value: float
    kkt_residual: float
    iterations: int
    converged: bool


def problem_for_node(labels, s: int, lam: float) -> LassoLogisticProblem:
    """Build the nodewise problem for node s from a label matrix."""
    values = label_values(labels)
    p = values.shape[1]
    if not 1 <= s <= p:
        raise StructuralError(f"node {s} out of range 1..{p}")
    features = [t for t in range(1, p + 1) if t != s]
    design = values[:, [t - 1 for t in features]]
    y = values[:, s - 1].astype(float)
    mu = design.astype(float).T @ y / values.shape[0]
    return LassoLogisticProblem(s=s, design=design, feature_nodes=tuple(features), lam=lam, mu=mu)


def objective(theta, problem: LassoLogisticProblem) -> float:
    """Penalized objective value, evaluated with a stable log-cosh."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (problem.design.shape[1],):
        raise StructuralError("theta dimension mismatch")
    w = problem.design @ theta
    # log(e^w + e^-w) = |w| + log1p(e^{-2|w|})
    aw = np.abs(w)
    smooth = float(np.mean(aw + np.log1p(np.exp(-2.0 * aw))))
    return smooth - float(theta @ problem.mu) + problem.lam * float(np.abs(theta).sum())


def smooth_gradient(theta, problem: LassoLogisticProblem) -> np.ndarray:
    """Gradient of the smooth part: mean_i tanh(x_i . theta) x_i - mu."""
    theta = np.asarray(theta, dtype=float)
    w = problem.design @ theta
    return problem.design.T.astype(float) @ np.tanh(w) / problem.n - problem.mu


def kkt_residual(theta, problem: LassoLogisticProblem) -> float:
    """Max coordinate violation of the subgradient optimality conditions."""
    theta = np.asarray(theta, dtype=float)
    g = smooth_gradient(theta, problem)
    at_zero = theta == 0.0
    resid = np.where(
        at_zero,
        np.maximum(np.abs(g) - problem.lam, 0.0),
        np.abs(g + problem.lam * np.sign(theta)),
    )
    return float(resid.max()) if resid.size else 0.0


def solve(
    problem: LassoLogisticProblem,
    tol: float = 1e-6,
    max_iter: int = 10_000,
) -> LassoLogisticSolution:
    """Minimize the nodewise objective to the given KKT tolerance.

    Coordinates are swept cyclically in feature order, so the result is
    deterministic; a non-converged run returns the best iterate with its
    residual and ``converged=False``.
    """
    theta, kkt, iters, converged = cd_lasso_logistic(
        problem.design.astype(float), problem.mu, problem.lam, tol, max_iter
    )
    theta = np.asarray(theta)
    theta[np.abs(theta) < ZERO_TRUNCATION] = 0.0
    return LassoLogisticSolution(
        theta_hat=theta,
        objective_value=objective(theta, problem),
        kkt_residual=float(kkt),
        iterations=int(iters),
        converged=bool(converged),
    )


def neighborhoods(
    labels,
    lam: float,
    symmetrize: str = "or",
    tol: float = 1e-6,
    max_iter: int = 10_000,
) -> NeighborhoodMap:
    """Estimate every node's neighborhood and symmetrize into an edge map.

    ``symmetrize='or'`` keeps an edge detected from either endpoint (weight:
    the mean of the estimates that detected it); ``'and'`` requires both
    directions. Solver failures are reported per node.
    """
    if symmetrize not in ("or", "and"):
        raise StructuralError("symmetrize must be 'or' or 'and'")
    values = label_values(labels)
    n, p = values.shape
    if n < 2:
        raise StructuralError("need at least 2 instances")
    raw: dict[int, dict[int, float]] = {}
    failures = []
    for s in range(1, p + 1):
        prob = problem_for_node(values, s, lam)
        sol = solve(prob, tol=tol, max_iter=max_iter)
        if not sol.converged:
            failures.append(f"node {s}: KKT residual {sol.kkt_residual:.3e} after {sol.iterations} sweeps")
        raw[s] = {
            t: float(w)
            for t, w in zip(prob.feature_nodes, sol.theta_hat)
            if w != 0.0
        }
    if failures:
        raise ArithmeticError("nodewise solver did not converge: " + "; ".join(failures))

    nbrs: dict[int, dict[int, float]] = {s: {} for s in range(1, p + 1)}
    for s in range(1, p + 1):
        for t in range(s + 1, p + 1):
            w_st = raw[s].get(t)
            w_ts = raw[t].get(s)
            if symmetrize == "or":
                found = [w for w in (w_st, w_ts) if w is not None]
                if not found:
                    continue
                w = float(np.mean(found))
            else:
                if w_st is None or w_ts is None:
                    continue
                w = (w_st + w_ts) / 2.0
            if w == 0.0:
                continue  # opposite-signed one-off estimates cancelling exactly
            nbrs[s][t] = w
            nbrs[t][s] = w
    return NeighborhoodMap(p=p, nbrs=nbrs)


@dataclass(frozen=True)
class FisherDiagnostics:
    """Exact Fisher-information checks for one node of the pairwise model."""

    s: int
    lambda_min: float
    irrepresentability: float
    alpha: float
    flags: tuple[str, ...] = ()


def fisher_diagnostics(spec: IsingModelSpec, s: int, max_nodes: int = 16) -> FisherDiagnostics:
    """Fisher information of the marginalized pairwise model at node s.

    Computes ``I = E[h(f) f_-s f_-s^T]`` exactly by enumeration, with
    ``h(f) = sech^2(sum_t theta_st f_t)``, and reports the smallest
    eigenvalue of the neighborhood block, the incoherence value
    ``max-row-sum of |I_out,N . I_NN^{-1}|`` and ``alpha = 1 - incoherence``
    (flagged when not positive).
    """
    if spec.p + 1 > max_nodes:
        raise SizeError(f"p+1={spec.p + 1} exceeds cap {max_nodes}")
    model: ApproxModel = approximate(spec)
    dist = enumerate_weights(range(1, spec.p + 1), model.theta, max_nodes=max_nodes)
    k = spec.p
    idx = np.arange(2**k, dtype=np.uint32)
    spins = np.empty((2**k, k))
    for j in range(k):
        spins[:, j] = ((idx >> np.uint32(j)) & np.uint32(1)).astype(float) * 2 - 1
    others = [t for t in range(1, spec.p + 1) if t != s]
    cols = [dist.bit(t) for t in others]
    theta_row = np.array([model.weight(s, t) for t in others])
    w = spins[:, cols] @ theta_row
    h = 1.0 / np.cosh(w) ** 2
    weighted = spins[:, cols] * (h * dist.pmf)[:, None]
    info = weighted.T @ spins[:, cols]

    nset = sorted(model.neighborhood(s))
    flags: list[str] = []
    if not nset:
        return FisherDiagnostics(
            s=s,
            lambda_min=math.inf,
            irrepresentability=0.0,
            alpha=1.0,
            flags=("empty_neighborhood",),
        )
    in_n = [i for i, t in enumerate(others) if t in nset]
    out_n = [i for i, t in enumerate(others) if t not in nset]
    i_nn = info[np.ix_(in_n, in_n)]
    lam_min = float(np.linalg.eigvalsh(i_nn).min())
    if out_n:
        i_on = info[np.ix_(out_n, in_n)]
        irr = float(np.abs(i_on @ np.linalg.inv(i_nn)).sum(axis=1).max())
    else:
        irr = 0.0
    alpha = 1.0 - irr
    if alpha <= 0:
        flags.append("incoherence_violated")
    return FisherDiagnostics(
        s=s,
        lambda_min=lam_min,
        irrepresentability=irr,
        alpha=alpha,
        flags=tuple(flags),
    )
