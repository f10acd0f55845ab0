"""Pure-Python kernel implementations.

Drop-in fallback for the compiled module. The Gibbs chain mirrors the
compiled kernel operation-for-operation (same neighbor accumulation order,
same guarded logistic branches, same libm calls), so both backends produce
bit-identical sample streams from the same uniforms. The coordinate-descent
solver uses vectorized numpy inner products, which may differ from the
compiled reduction order by rounding only.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND_NAME = "pure"


def gibbs_chain(indptr, indices, weights, fields, state, order, uniforms, n_burn, thin, out):
    """Run single-site heat-bath updates over a pairwise binary model.

    Sites are visited cyclically through ``order``. After ``n_burn`` updates,
    one configuration is recorded into ``out`` every ``thin`` updates until
    ``out`` is full. ``state`` is updated in place; one uniform is consumed
    per site update.
    """
    n_samples = out.shape[0]
    n_order = len(order)
    pos = 0
    u = 0

    def update():
        nonlocal pos, u
        s = order[pos % n_order]
        pos += 1
        field = fields[s]
        for j in range(indptr[s], indptr[s + 1]):
            field += weights[j] * state[indices[j]]
        if field >= 0.0:
            p_plus = 1.0 / (1.0 + math.exp(-2.0 * field))
        else:
            e = math.exp(2.0 * field)
            p_plus = e / (1.0 + e)
        state[s] = 1 if uniforms[u] < p_plus else -1
        u += 1

    for _ in range(n_burn):
        update()
    for i in range(n_samples):
        for _ in range(thin):
            update()
        out[i, :] = state


def _soft(z: float, lam: float) -> float:
    if z > lam:
        return z - lam
    if z < -lam:
        return z + lam
    return 0.0


def cd_lasso_logistic(x, mu, lam, tol, max_iter):
    """Cyclic coordinate descent for the l1-penalized pairwise logistic loss.

    Minimizes ``mean(log(2 cosh(x_i . theta))) - theta . mu + lam * |theta|_1``
    for a +/-1 design. Each coordinate takes a unit-curvature proximal step
    (the coordinate curvature of the smooth part is at most 1 for +/-1
    features), which yields exact zeros. Returns
    ``(theta, kkt_residual, sweeps, converged)``.
    """
    x = np.asarray(x, dtype=float)
    n, d = x.shape
    mu = np.asarray(mu, dtype=float)
    theta = np.zeros(d)
    w = np.zeros(n)
    tanh_w = np.zeros(n)
    kkt = math.inf
    for sweep in range(1, max_iter + 1):
        for t in range(d):
            g = float(tanh_w @ x[:, t]) / n - mu[t]
            new = _soft(theta[t] - g, lam)
            if new != theta[t]:
                w += (new - theta[t]) * x[:, t]
                np.tanh(w, out=tanh_w)
                theta[t] = new
        grad = (tanh_w @ x) / n - mu
        at_zero = theta == 0.0
        resid = np.where(
            at_zero,
            np.maximum(np.abs(grad) - lam, 0.0),
            np.abs(grad + lam * np.sign(theta)),
        )
        kkt = float(resid.max()) if d else 0.0
        if kkt <= tol:
            return theta, kkt, sweep, True
    return theta, kkt, max_iter, False
