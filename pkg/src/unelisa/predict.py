"""Label prediction over the pruned ensemble.

The reduced model treats experts as conditionally independent given the
hidden label, with per-expert agreement probabilities psi_s and class prior
pi. An EM loop estimates (psi, pi) from the expert columns alone; the
resulting plug-in classifier thresholds the posterior
``sigma(2 (theta_0 + sum_s theta_0s f_s))``. The augmented majority vote is
the nonparametric alternative: split the experts into agreeing groups by the
signs of their estimated pairwise couplings, flip the minority group's
columns, and take a plain majority vote.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .approx import sign_partition
from .model import ExpertReport, PredictionResult, StructuralError, label_values

__all__ = [
    "EMState",
    "posterior",
    "em_fit",
    "bayes_classify",
    "augmented_majority_vote",
    "psi_to_theta",
    "theta_to_psi",
]

CLAMP = 1e-6


def psi_to_theta(psi: float) -> float:
    """Half log-odds of an agreement probability."""
    return 0.5 * math.log(psi / (1.0 - psi))


def theta_to_psi(theta: float) -> float:
    """Inverse of :func:`psi_to_theta`."""
    return 1.0 / (1.0 + math.exp(-2.0 * theta))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    e = np.exp(z[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def posterior(theta0: float, theta0s, rows) -> np.ndarray:
    """Posterior probability of the hidden label being +1 per row.

    ``rows`` is an n-by-k matrix of expert votes, ``theta0s`` the matching
    weight vector; returns ``sigma(2 (theta0 + rows . theta0s))`` computed
    stably.
    """
    rows = np.asarray(rows, dtype=float)
    theta0s = np.asarray(theta0s, dtype=float)
    return _sigmoid(2.0 * (theta0 + rows @ theta0s))


@dataclass(frozen=True)
class EMState:
    """Final EM iterate: posteriors, parameters, and the ascent trace."""

    tau: np.ndarray
    psi: Mapping[int, float]
    pi: float
    lower_bound: float
    iteration: int
    converged: bool
    lower_bound_history: tuple[float, ...] = ()


def _elbo(rows: np.ndarray, tau: np.ndarray, psi: np.ndarray, pi: float) -> float:
    """Evidence lower bound: expected complete log-likelihood plus the
    entropy of the responsibilities. This is the quantity the EM alternation
    coordinate-ascends, so it is nondecreasing across iterations."""
    pos = (1.0 + rows) / 2.0
    neg = (1.0 - rows) / 2.0
    a = np.log(pi) + pos @ np.log(psi) + neg @ np.log1p(-psi)
    b = np.log1p(-pi) + pos @ np.log1p(-psi) + neg @ np.log(psi)
    with np.errstate(divide="ignore", invalid="ignore"):
        ent = -np.where(tau > 0, tau * np.log(tau), 0.0) - np.where(
            tau < 1, (1 - tau) * np.log1p(-tau), 0.0
        )
    return float(np.sum(tau * a + (1.0 - tau) * b + ent))


def _m_step(rows: np.ndarray, tau: np.ndarray) -> tuple[np.ndarray, float]:
    n = rows.shape[0]
    psi = 0.5 + (tau - 0.5) @ rows / n
    pi = float(np.mean(tau))
    return np.clip(psi, CLAMP, 1.0 - CLAMP), min(max(pi, CLAMP), 1.0 - CLAMP)


def em_fit(
    labels,
    experts,
    init: str = "soft-mv",
    tol: float = 1e-8,
    max_iter: int = 500,
    seed: int | None = None,
) -> tuple[ExpertReport, EMState]:
    """Estimate the reduced model over the given expert columns by EM.

    Initialization: the default policy sets each responsibility to the row's
    fraction of positive expert votes and takes one M step; ``init='random'``
    draws the responsibilities uniformly (seeded). Convergence is declared
    when the lower bound changes by less than ``tol`` relatively. The global
    flip ambiguity is resolved by requiring a majority of positive expert
    weights; on a tie the sign of their sum decides (flagged).
    """
    experts = tuple(int(s) for s in experts)
    if not experts:
        raise StructuralError("need at least one expert column")
    values = label_values(labels)
    rows = values[:, [s - 1 for s in experts]].astype(float)
    n, k = rows.shape

    if init == "soft-mv":
        tau = (rows == 1).mean(axis=1)
    elif init == "random":
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
        tau = rng.random(n)
    else:
        raise StructuralError("init must be 'soft-mv' or 'random'")

    psi, pi = _m_step(rows, tau)
    history: list[float] = []
    prev = -math.inf
    converged = False
    iteration = 0
    for iteration in range(1, max_iter + 1):
        theta0s = 0.5 * (np.log(psi) - np.log1p(-psi))
        theta0 = 0.5 * (math.log(pi) - math.log1p(-pi))
        tau = posterior(theta0, theta0s, rows)
        psi, pi = _m_step(rows, tau)
        lb = _elbo(rows, tau, psi, pi)
        history.append(lb)
        if iteration > 1 and abs(lb - prev) <= tol * max(1.0, abs(prev)):
            converged = True
            break
        prev = lb

    flags: list[str] = []
    if not converged:
        flags.append("non_converged")

    theta0s = 0.5 * (np.log(psi) - np.log1p(-psi))
    theta0 = 0.5 * (math.log(pi) - math.log1p(-pi))
    tau_final = posterior(theta0, theta0s, rows)
    n_pos = int(np.sum(theta0s > 0))
    n_neg = int(np.sum(theta0s < 0))
    flip = n_pos < n_neg
    if n_pos == n_neg:
        flip = float(np.sum(theta0s)) < 0
        if k > 0 and n_pos + n_neg > 0:
            flags.append("flip_tie")
    if flip:
        psi = 1.0 - psi
        pi = 1.0 - pi
        theta0s = -theta0s
        theta0 = -theta0
        tau_final = 1.0 - tau_final

    positive = tuple(s for s, th in zip(experts, theta0s) if th >= 0)
    negative = tuple(s for s, th in zip(experts, theta0s) if th < 0)
    report = ExpertReport(
        expert_set_hat=experts,
        positive_group=positive,
        negative_group=negative,
        psi_hat={s: float(v) for s, v in zip(experts, psi)},
        theta0s_hat={s: float(v) for s, v in zip(experts, theta0s)},
        theta0_hat=float(theta0),
        pi_hat=float(pi),
        flags=tuple(flags),
    )
    state = EMState(
        tau=tau_final,
        psi={s: float(v) for s, v in zip(experts, psi)},
        pi=float(pi),
        lower_bound=history[-1] if history else -math.inf,
        iteration=iteration,
        converged=converged,
        lower_bound_history=tuple(history),
    )
    return report, state


def bayes_classify(report: ExpertReport, labels) -> PredictionResult:
    """Plug-in posterior classifier over the report's expert columns.

    The label is the sign of ``theta0 + sum_s theta0s f_s`` with ties going
    to +1; the score is the posterior itself.
    """
    values = label_values(labels)
    experts = report.expert_set_hat
    if not experts:
        raise StructuralError("report has an empty expert set")
    missing = [s for s in experts if not 1 <= s <= values.shape[1]]
    if missing:
        raise StructuralError(f"expert columns {missing} not present in the label matrix")
    rows = values[:, [s - 1 for s in experts]].astype(float)
    theta0s = np.array([report.theta0s_hat[s] for s in experts])
    scores = posterior(report.theta0_hat, theta0s, rows)
    labels_hat = np.where(scores >= 0.5, 1, -1)
    return PredictionResult(labels=labels_hat, scores=scores, method="bayes")


def augmented_majority_vote(
    labels,
    experts,
    signs: np.ndarray,
    nbhd_sizes: Mapping[int, int] | None = None,
) -> PredictionResult:
    """Majority vote after flipping the minority expert group.

    ``signs`` is the symmetric sign matrix of the estimated couplings between
    the given experts (entries in {-1,0,+1}, zero diagonal). The spectral
    partition splits the experts into two groups; the smaller group is
    declared negative and its columns are negated before a plain row-wise
    majority vote (ties to +1, score = fraction of positive twisted votes).
    A size tie is broken by keeping positive the group that contains the
    expert with the largest estimated neighborhood (then the smallest node
    id), and is flagged.
    """
    experts = tuple(int(s) for s in experts)
    if not experts:
        raise StructuralError("need at least one expert")
    values = label_values(labels)
    rows = values[:, [s - 1 for s in experts]].astype(float)
    flags: list[str] = []

    if len(experts) == 1:
        group_a, group_b = (experts[0],), ()
    else:
        group_a, group_b = sign_partition(experts, signs)

    if group_a and group_b:
        if len(group_a) == len(group_b):
            flags.append("group_size_tie")
            sizes = nbhd_sizes or {}
            anchor = max(experts, key=lambda s: (sizes.get(s, 0), -s))
            negative = group_b if anchor in group_a else group_a
        else:
            negative = group_a if len(group_a) < len(group_b) else group_b
    else:
        negative = ()

    flip = np.array([-1.0 if s in negative else 1.0 for s in experts])
    twisted = rows * flip
    sums = twisted.sum(axis=1)
    labels_hat = np.where(sums >= 0, 1, -1)
    scores = (sums + len(experts)) / (2.0 * len(experts))
    return PredictionResult(labels=labels_hat, scores=scores, method="amv", flags=tuple(flags))
