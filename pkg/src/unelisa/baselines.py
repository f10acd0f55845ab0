"""Comparator predictors: majority vote, two-coin EM, rank-one spectral vote.

All three consume the full ensemble (no pruning) and are deterministic given
their inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .approx import power_iteration
from .model import PredictionResult, StructuralError, label_values

__all__ = ["DSParams", "majority_vote", "dawid_skene", "sml"]

CLAMP = 1e-6


def majority_vote(labels) -> PredictionResult:
    """Row-wise sign of the vote sum; ties go to +1; score = positive fraction."""
    values = label_values(labels).astype(float)
    p = values.shape[1]
    sums = values.sum(axis=1)
    labs = np.where(sums >= 0, 1, -1)
    scores = (sums + p) / (2.0 * p)
    return PredictionResult(labels=labs, scores=scores, method="mv")


@dataclass(frozen=True)
class DSParams:
    """Two-coin parameters: per-classifier sensitivity/specificity and prior."""

    sensitivity: Mapping[int, float]
    specificity: Mapping[int, float]
    pi: float
    converged: bool
    log_likelihood_history: tuple[float, ...] = ()


def dawid_skene(labels, tol: float = 1e-8, max_iter: int = 500) -> tuple[PredictionResult, DSParams]:
    """Classical two-coin EM over all classifiers.

    Each classifier s is modeled by a sensitivity ``eta_s = P(f_s=+1 | +1)``
    and a specificity ``xi_s = P(f_s=-1 | -1)``; the E step computes the
    posterior of the hidden label, the M step the weighted MLEs (clamped away
    from the boundary). Initialization is the soft majority vote. The global
    flip is resolved by requiring a majority of informative classifiers
    (``eta + xi - 1 > 0``); a tie falls back to the sign of their sum.
    """
    values = label_values(labels).astype(float)
    n, p = values.shape
    pos = (values == 1).astype(float)

    tau = pos.mean(axis=1)
    eta, xi, pi = _ds_m_step(pos, tau)
    history: list[float] = []
    prev = -math.inf
    converged = False
    for _ in range(max_iter):
        log_a, log_b = _ds_row_loglik(pos, eta, xi, pi)
        tau = _stable_posterior(log_a, log_b)
        eta, xi, pi = _ds_m_step(pos, tau)
        ll = float(np.sum(_logaddexp(log_a, log_b)))
        history.append(ll)
        if len(history) > 1 and abs(ll - prev) <= tol * max(1.0, abs(prev)):
            converged = True
            break
        prev = ll

    informative = eta + xi - 1.0
    n_pos = int(np.sum(informative > 0))
    n_neg = int(np.sum(informative < 0))
    flip = n_pos < n_neg or (n_pos == n_neg and float(informative.sum()) < 0)
    if flip:
        eta, xi = 1.0 - xi, 1.0 - eta
        pi = 1.0 - pi
    log_a, log_b = _ds_row_loglik(pos, eta, xi, pi)
    tau = _stable_posterior(log_a, log_b)
    labs = np.where(tau >= 0.5, 1, -1)
    flags = () if converged else ("non_converged",)
    result = PredictionResult(labels=labs, scores=tau, method="ds", flags=flags)
    params = DSParams(
        sensitivity={s + 1: float(v) for s, v in enumerate(eta)},
        specificity={s + 1: float(v) for s, v in enumerate(xi)},
        pi=float(pi),
        converged=converged,
        log_likelihood_history=tuple(history),
    )
    return result, params


def _logaddexp(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.logaddexp(a, b)


def _stable_posterior(log_a: np.ndarray, log_b: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(np.clip(log_b - log_a, -700, 700)))


def _ds_row_loglik(pos: np.ndarray, eta, xi, pi):
    neg = 1.0 - pos
    log_a = math.log(pi) + pos @ np.log(eta) + neg @ np.log1p(-eta)
    log_b = math.log(1.0 - pi) + pos @ np.log1p(-xi) + neg @ np.log(xi)
    return log_a, log_b


def _ds_m_step(pos: np.ndarray, tau: np.ndarray):
    wsum = tau.sum()
    csum = (1.0 - tau).sum()
    eta = tau @ pos / wsum if wsum > 0 else np.full(pos.shape[1], 0.5)
    xi = (1.0 - tau) @ (1.0 - pos) / csum if csum > 0 else np.full(pos.shape[1], 0.5)
    pi = float(np.mean(tau))
    return (
        np.clip(eta, CLAMP, 1.0 - CLAMP),
        np.clip(xi, CLAMP, 1.0 - CLAMP),
        min(max(pi, CLAMP), 1.0 - CLAMP),
    )


def rank_one_weights(cov: np.ndarray) -> np.ndarray:
    """Unit-norm leading eigenvector after rank-one diagonal completion.

    Twenty fixed passes: replace the diagonal with the leading eigenpair's
    outer-product diagonal and re-extract the eigenvector. Globally signed so
    the entries sum positive.
    """
    m = np.array(cov, dtype=float)
    for _ in range(20):
        v = power_iteration(m)
        lam = float(v @ m @ v)
        np.fill_diagonal(m, lam * v * v)
    v = power_iteration(m)
    v = v / np.linalg.norm(v)
    if v.sum() < 0:
        v = -v
    return v


def sml(labels) -> PredictionResult:
    """Rank-one spectral meta-learner: weighted vote by the leading eigenvector.

    The sample covariance of the columns has rank-one structure off the
    diagonal under conditional independence; the diagonal is replaced by a
    rank-one-consistent completion (20 fixed passes of setting it to the
    leading eigenpair's outer-product diagonal). The weight vector is the
    final unit-norm leading eigenvector, globally signed so its entries sum
    positive; scores are the min-max normalized voting margins. A degenerate
    all-zero covariance falls back to majority vote (flagged).
    """
    values = label_values(labels).astype(float)
    n, p = values.shape
    if p < 3:
        raise StructuralError("spectral meta-learner needs at least 3 classifiers")
    cov = np.cov(values, rowvar=False)
    off = cov - np.diag(np.diag(cov))
    if not np.any(np.abs(off) > 1e-12):
        mv = majority_vote(values)
        return PredictionResult(
            labels=mv.labels, scores=mv.scores, method="sml", flags=("degenerate_covariance",)
        )

    v = rank_one_weights(cov)
    margins = values @ v
    labs = np.where(margins >= 0, 1, -1)
    lo, hi = margins.min(), margins.max()
    scores = np.full(n, 0.5) if hi == lo else (margins - lo) / (hi - lo)
    return PredictionResult(labels=labs, scores=scores, method="sml")
