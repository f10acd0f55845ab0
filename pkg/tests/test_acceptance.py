"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines and timings. The benchmark-backed criteria share module-scoped runs
(50 trials per cell, seed 2024).

Criterion 2 asserts that the closed-form induced pairwise model is the exact
KL minimizer (per-pair moment matching of the model distribution and
coordinate-wise KL stationarity). That claim is mathematically false whenever
three or more experts exist: the closed form encodes each pair's true moment
through tanh of the weight, but the resulting clique model does not reproduce
those moments jointly, and the KL gradient at the closed form is nonzero (a
3-expert star at unit weights gives a moment gap of 0.19 and a KL descent of
about 1.9e-4 under a 1e-3 perturbation, far beyond the -1e-10 slack). Every
valid graph here has at least 3 experts, so the criterion fails on all of
them. It is implemented faithfully and left failing; see the per-pair
encoding test in test_approx.py for the property that does hold.
"""

import itertools
import math
import time

import numpy as np
import pytest

from unelisa import harness, metrics, nodewise, predict, prune
from unelisa.approx import approximate, theta_tilde_pair
from unelisa.enumeration import (
    enumerate_spec,
    enumerate_weights,
    kl_divergence,
    marginalize_out_node0,
    pair_moment,
)
from unelisa.gibbs import GibbsConfig, sample
from unelisa.model import IsingModelSpec, PredictionResult

from conftest import example_spec, nbhd_from_approx, random_small_spec
from test_metrics import pairwise_auc

SEED = 2024
TRIALS = 50


def report(num, ok, detail):
    print(f"ACCEPTANCE CRITERION {num}: {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


@pytest.fixture(scope="module")
def bench_cells():
    """Shared 50-trial benchmark runs for criteria 6-9."""
    cells = {}
    for snr, rule in [
        ("high", "sqrt"),
        ("high", "log"),
        ("high", "quarter"),
        ("low", "sqrt"),
        ("low", "log"),
        ("low", "quarter"),
        ("medium", "sqrt"),
    ]:
        cfg = harness.BenchConfig(
            p_list=(25,), d0_rule=rule, snr=snr, trials=TRIALS, seed=SEED
        )
        t0 = time.perf_counter()
        records, rows = harness.run_benchmark(cfg)
        cells[(snr, rule)] = {
            "records": records,
            "means": {r["metric"]: r["mean"] for r in rows},
            "seconds": time.perf_counter() - t0,
        }
    return cells


def test_criterion_01_knot_rule_exactness():
    """Exact reconstruction on the example graph's induced neighborhoods."""
    nbhd = nbhd_from_approx(approximate(example_spec()))
    best = math.inf
    for _ in range(5):
        t0 = time.perf_counter()
        rep, _ = prune.reconstruct_expert_set(nbhd)
        best = min(best, time.perf_counter() - t0)
    ok = rep.expert_set_hat == (1, 2, 3, 4, 5) and best < 1e-3
    assert report(1, ok, f"expert set {rep.expert_set_hat}, {best * 1e6:.0f} us per call")


def test_criterion_02_closed_form_kl_optimality():
    """Moment matching and KL stationarity of the closed form (see module
    docstring: unattainable as stated; kept faithful and failing)."""
    worst_gap = 0.0
    worst_descent = 0.0
    for seed in range(20):
        spec = random_small_spec(seed)
        marg = marginalize_out_node0(enumerate_spec(spec))
        model = approximate(spec)
        nodes = tuple(range(1, spec.p + 1))
        q = enumerate_weights(nodes, model.theta, {})
        for s, t in itertools.combinations(nodes, 2):
            gap = abs(pair_moment(q, s, t) - pair_moment(marg, s, t))
            worst_gap = max(worst_gap, gap)
        base = kl_divergence(marg, q)
        for s, t in itertools.combinations(nodes, 2):
            for delta in (-1e-3, 1e-3):
                theta = dict(model.theta)
                theta[(s, t)] = theta.get((s, t), 0.0) + delta
                theta = {k: v for k, v in theta.items() if v != 0.0}
                perturbed = enumerate_weights(nodes, theta, {})
                worst_descent = max(worst_descent, base - kl_divergence(marg, perturbed))
    ok = worst_gap <= 1e-9 and worst_descent <= 1e-10
    report(
        2,
        ok,
        f"worst pair-moment gap {worst_gap:.3e} (allowed 1e-9), "
        f"worst KL descent under perturbation {worst_descent:.3e} (allowed 1e-10)",
    )
    assert worst_gap <= 1e-9, (
        "closed-form induced model does not match the true marginal's pair moments; "
        f"worst gap {worst_gap:.3e}. The closed form is the per-pair projection "
        "(tanh(theta) equals each true pair moment) but not the joint KL minimizer."
    )
    assert worst_descent <= 1e-10, (
        f"KL decreases by {worst_descent:.3e} under a coordinate perturbation"
    )


def test_criterion_03_sign_law():
    rng = np.random.Generator(np.random.PCG64(SEED))
    t0 = time.perf_counter()
    violations = 0
    for _ in range(1000):
        a = rng.uniform(-3, 3)
        b = rng.uniform(-3, 3)
        while abs(a) < 1e-3:
            a = rng.uniform(-3, 3)
        while abs(b) < 1e-3:
            b = rng.uniform(-3, 3)
        t0field = rng.uniform(-2, 2)
        val = theta_tilde_pair(a, b, t0field)
        if val == 0.0 or math.copysign(1, val) != math.copysign(1, a * b):
            violations += 1
    dt = time.perf_counter() - t0
    ok = violations == 0 and dt < 1.0
    assert report(3, ok, f"{violations} sign violations in 1000 draws, {dt:.2f} s")


def test_criterion_04_gibbs_chain_moments():
    spec = IsingModelSpec(
        p=2, theta0=0.0, edges={(0, 1): 1.0, (1, 2): 0.5}, expert_set={1}
    )
    dist = enumerate_spec(spec)
    t0 = time.perf_counter()
    labels = sample(spec, GibbsConfig(n_samples=50_000, seed=SEED))
    rows = np.column_stack([labels.truth, labels.values])
    worst = 0.0
    for r, t in itertools.combinations(range(3), 2):
        emp = float(np.mean(rows[:, r] * rows[:, t]))
        worst = max(worst, abs(emp - pair_moment(dist, r, t)))
    dt = time.perf_counter() - t0
    ok = worst <= 0.02 and dt < 60
    assert report(4, ok, f"worst pair-moment error {worst:.4f} at 50k retained, {dt:.1f} s")


def test_criterion_05_solver_correctness():
    import json
    from pathlib import Path

    fixtures = json.loads((Path(__file__).parent / "data" / "solver_oracle.json").read_text())
    worst_obj = 0.0
    worst_kkt = 0.0
    for fx in fixtures:
        values = np.array(fx["values"])
        prob = nodewise.problem_for_node(values, fx["s"], fx["lambda"])
        sol = nodewise.solve(prob, tol=1e-8)
        worst_obj = max(worst_obj, abs(sol.objective_value - fx["oracle_objective"]))
        worst_kkt = max(worst_kkt, sol.kkt_residual)

    rng = np.random.Generator(np.random.PCG64(SEED))
    worst_grad = 0.0
    for _ in range(10):
        values = rng.choice([-1, 1], size=(50, 5))
        prob = nodewise.problem_for_node(values, 1, 0.0)
        theta = rng.normal(scale=0.5, size=4)
        g = nodewise.smooth_gradient(theta, prob)
        h = 1e-5
        for j in range(4):
            e = np.zeros(4)
            e[j] = h
            fd = (nodewise.objective(theta + e, prob) - nodewise.objective(theta - e, prob)) / (2 * h)
            worst_grad = max(worst_grad, abs(g[j] - fd))
    ok = worst_obj <= 1e-8 and worst_kkt <= 1e-6 and worst_grad <= 1e-6
    assert report(
        5,
        ok,
        f"objective gap {worst_obj:.2e} over 10 frozen oracles, "
        f"KKT {worst_kkt:.2e}, gradient-vs-FD {worst_grad:.2e}",
    )


def test_criterion_06_high_snr_table_reproduction(bench_cells):
    sqrt_cell = bench_cells[("high", "sqrt")]["means"]
    log_cell = bench_cells[("high", "log")]["means"]
    seconds = bench_cells[("high", "sqrt")]["seconds"] + bench_cells[("high", "log")]["seconds"]
    checks = {
        "d0=5 hit rate": (sqrt_cell["hit_rate"], 0.95),
        "d0=5 precision": (sqrt_cell["precision"], 0.95),
        "d0=5 posterior accuracy": (sqrt_cell["accuracy_bayes"], 0.95),
        "d0=5 twisted-vote accuracy": (sqrt_cell["accuracy_amv"], 0.95),
        "d0=3 hit rate": (log_cell["hit_rate"], 0.93),
        "d0=3 posterior accuracy": (log_cell["accuracy_bayes"], 0.90),
    }
    ok = all(value >= bound for value, bound in checks.values()) and seconds < 600
    detail = ", ".join(f"{k} {v:.3f} (>= {b})" for k, (v, b) in checks.items())
    assert report(6, ok, f"{detail}; {seconds:.0f} s")


def test_criterion_07_method_gap_medium_snr(bench_cells):
    means = bench_cells[("medium", "sqrt")]["means"]
    gap = means["accuracy_bayes"] - means["accuracy_mv"]
    ok = gap >= 0.2
    assert report(
        7,
        ok,
        f"posterior {means['accuracy_bayes']:.3f} vs majority vote "
        f"{means['accuracy_mv']:.3f}, gap {gap:.3f} (>= 0.2)",
    )


def test_criterion_08_snr_degradation_trend(bench_cells):
    results = []
    ok = True
    for rule in ("log", "sqrt", "quarter"):
        high = bench_cells[("high", rule)]["means"]["hit_rate"]
        low = bench_cells[("low", rule)]["means"]["hit_rate"]
        results.append(f"{rule}: high {high:.3f} vs low {low:.3f}")
        ok = ok and high >= low
    assert report(8, ok, "; ".join(results))


def test_criterion_09_em_ascent_health(bench_cells):
    worst_em = 0.0
    worst_ds = 0.0
    n_em = n_ds = 0
    for cell in bench_cells.values():
        for rec in cell["records"]:
            if rec.em_min_ascent is not None:
                worst_em = min(worst_em, rec.em_min_ascent)
                n_em += 1
            if rec.ds_min_ascent is not None:
                worst_ds = min(worst_ds, rec.ds_min_ascent)
                n_ds += 1
    ok = worst_em >= -1e-10 and worst_ds >= -1e-10 and n_em > 0 and n_ds > 0
    assert report(
        9,
        ok,
        f"worst EM ascent step {worst_em:.2e} over {n_em} trials, "
        f"worst two-coin ascent step {worst_ds:.2e} over {n_ds} trials",
    )


def test_criterion_10_metric_verification():
    rec = metrics.recovery({1, 2, 6}, {1, 2, 3})
    hand_ok = rec.hit_rate == pytest.approx(2 / 3) and rec.precision == pytest.approx(2 / 3)

    pred = PredictionResult(labels=[1, -1, -1, -1], scores=[0.9, 0.4, 0.3, 0.2], method="mv")
    m = metrics.classification(pred, [1, 1, -1, -1])
    conf_ok = (
        m.ppv == pytest.approx(1.0)
        and m.npv == pytest.approx(2 / 3)
        and m.f_score == pytest.approx(0.8)
    )

    rng = np.random.Generator(np.random.PCG64(SEED))
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(10, 80))
        scores = np.round(rng.random(n), 2)
        truth = rng.choice([-1, 1], size=n)
        truth[0], truth[1] = 1, -1
        labels = np.where(scores >= 0.5, 1, -1)
        got = metrics.classification(
            PredictionResult(labels=labels, scores=scores, method="mv"), truth
        ).auc
        worst = max(worst, abs(got - pairwise_auc(scores, truth)))
    ok = hand_ok and conf_ok and worst <= 1e-12
    assert report(10, ok, f"hand cases exact, worst AUC-vs-oracle gap {worst:.1e}")
