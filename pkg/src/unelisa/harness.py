"""Synthetic experiment generator and benchmark runner.

A benchmark cell is one (p, d0 rule, noise level) combination; each trial
generates a random valid graph, Gibbs-samples a label matrix of size
``ceil(n_scale * d_marg_max * log p)``, runs the pruning pipeline, then every
requested prediction method, and scores everything against the hidden truth
column. Per-trial seeds are derived as ``SeedSequence([seed, cell_index,
trial_index])`` so trials are order-independent and reproducible.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import baselines, metrics, nodewise, predict, prune
from .gibbs import GibbsConfig, sample
from .model import IsingModelSpec, StructuralError, degree_stats, validate_model

__all__ = [
    "BenchConfig",
    "TrialRecord",
    "InfeasibleGraphError",
    "SNR_EDGE_WEIGHT",
    "d0_for",
    "generate_graph",
    "run_trial",
    "run_benchmark",
    "aggregate",
    "parse_config",
    "write_results_csv",
    "write_trials_csv",
]

SNR_EDGE_WEIGHT = {"high": 0.25, "medium": 0.5, "low": 1.0}
ALL_METHODS = ("bayes", "amv", "mv", "ds", "sml")
EXPERT_POSITIVE_PROB = 0.7


class InfeasibleGraphError(ValueError):
    """The requested (p, d0) cannot produce a valid graph."""


@dataclass(frozen=True)
class BenchConfig:
    """One benchmark run: a list of p values at a single rule and noise level."""

    p_list: tuple[int, ...] = (25, 49, 81)
    d0_rule: str = "sqrt"
    snr: str = "high"
    trials: int = 50
    seed: int = 0
    n_scale: int = 30
    lambda_rule: str = "auto"
    methods: tuple[str, ...] = ALL_METHODS
    out_dir: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise StructuralError("trials must be >= 1")
        if any(p < 4 for p in self.p_list):
            raise StructuralError("p must be >= 4")
        if self.d0_rule not in ("log", "sqrt", "quarter"):
            raise StructuralError("d0_rule must be log, sqrt, or quarter")
        if self.snr not in SNR_EDGE_WEIGHT:
            raise StructuralError("snr must be high, medium, or low")
        bad = [m for m in self.methods if m not in ALL_METHODS]
        if bad:
            raise StructuralError(f"unknown methods: {bad}")
        if self.lambda_rule != "auto":
            float(self.lambda_rule)  # raises if not numeric
        object.__setattr__(self, "p_list", tuple(int(p) for p in self.p_list))
        object.__setattr__(self, "methods", tuple(self.methods))


def d0_for(p: int, rule: str) -> int:
    """Expert count for a size rule: round-half-up of log p, sqrt p, or p/4, floored at 3."""
    value = {"log": math.log(p), "sqrt": math.sqrt(p), "quarter": p / 4}[rule]
    return max(3, int(math.floor(value + 0.5)))


def generate_graph(p: int, d0: int, snr: str, seed) -> IsingModelSpec:
    """Random valid graph: d0 experts on the hidden node plus a non-expert forest.

    Expert weights are +1 with probability 0.7, else -1, redrawn until the
    positive experts strictly outnumber the negative ones (the prediction
    methods assume a positive majority; an unconditioned draw would make the
    orientation unidentifiable in the minority of majority-negative graphs).
    The external field is zero (balanced prior). Each non-expert attaches one
    edge (weight of magnitude set by the noise level, random sign) to a
    uniformly random already-placed node whose degree can still grow without
    breaking the degree-gap property; when no such node exists (only possible
    at d0 = 3, where experts can accept no children) the node is left
    isolated. The result always passes validation.
    """
    if not 2 <= d0 <= p:
        raise StructuralError(f"need 2 <= d0 <= p, got d0={d0}, p={p}")
    cap = d0 - 2  # max degree allowed on any node other than the hidden one
    if cap < 1:
        raise InfeasibleGraphError(
            f"d0={d0} requires every other node degree <= {cap}, "
            "but experts already have degree 1"
        )
    if snr not in SNR_EDGE_WEIGHT:
        raise StructuralError(f"unknown snr level {snr!r}")
    w = SNR_EDGE_WEIGHT[snr]
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    rng = np.random.Generator(np.random.PCG64(seed))

    edges: dict[tuple[int, int], float] = {}
    degree = {s: 0 for s in range(1, p + 1)}
    for _ in range(1000):
        signs = [1.0 if rng.random() < EXPERT_POSITIVE_PROB else -1.0 for _ in range(d0)]
        if sum(signs) > 0:
            break
    else:
        raise InfeasibleGraphError("could not draw a positive-majority expert set")
    for s in range(1, d0 + 1):
        edges[(0, s)] = signs[s - 1]
        degree[s] = 1
    for v in range(d0 + 1, p + 1):
        eligible = [u for u in range(1, v) if degree[u] < cap]
        if eligible:
            u = eligible[int(rng.integers(len(eligible)))]
            sign = 1.0 if rng.random() < 0.5 else -1.0
            edges[(u, v)] = sign * w
            degree[u] += 1
            degree[v] = 1

    spec = IsingModelSpec(p=p, theta0=0.0, edges=edges, expert_set=frozenset(range(1, d0 + 1)))
    violations = validate_model(spec)
    if violations:
        raise InfeasibleGraphError("generated graph failed validation: " + "; ".join(violations))
    return spec


@dataclass(frozen=True)
class TrialRecord:
    p: int
    d0: int
    snr: str
    trial: int
    n: int
    lam: float
    expert_set_true: tuple[int, ...]
    expert_set_hat: tuple[int, ...]
    hit_rate: float | None
    precision: float | None
    accuracy: dict[str, float] = field(default_factory=dict)
    em_min_ascent: float | None = None
    ds_min_ascent: float | None = None
    failures: tuple[str, ...] = ()
    seconds: float = 0.0


def _min_ascent(history) -> float:
    """Smallest step of an ascent trace; nonnegative means monotone."""
    if len(history) < 2:
        return 0.0
    diffs = np.diff(np.asarray(history))
    return float(diffs.min())


def run_trial(p: int, d0: int, snr: str, cfg: BenchConfig, cell_index: int, trial: int) -> TrialRecord:
    t_start = time.perf_counter()
    ss = np.random.SeedSequence([cfg.seed, cell_index, trial])
    graph_ss, gibbs_ss = ss.spawn(2)
    spec = generate_graph(p, d0, snr, graph_ss)
    _, _, _, d_marg_max = degree_stats(spec)
    n = math.ceil(cfg.n_scale * d_marg_max * math.log(p))
    lam = nodewise.lambda_auto(n, p) if cfg.lambda_rule == "auto" else float(cfg.lambda_rule)

    failures: list[str] = []
    accuracy: dict[str, float] = {}
    em_min = None
    ds_min = None

    gibbs_seed = int(gibbs_ss.generate_state(1)[0])
    labels = sample(spec, GibbsConfig(n_samples=n, seed=gibbs_seed))
    truth = labels.truth

    try:
        nbhd = nodewise.neighborhoods(labels, lam)
        report0, _ = prune.reconstruct_expert_set(nbhd)
        experts = report0.expert_set_hat
        rec = metrics.recovery(experts, spec.expert_set)
    except Exception as exc:
        return TrialRecord(
            p=p,
            d0=d0,
            snr=snr,
            trial=trial,
            n=n,
            lam=lam,
            expert_set_true=tuple(sorted(spec.expert_set)),
            expert_set_hat=(),
            hit_rate=None,
            precision=None,
            failures=(f"pruning: {exc}",),
            seconds=time.perf_counter() - t_start,
        )

    if "bayes" in cfg.methods:
        try:
            report, state = predict.em_fit(labels, experts)
            result = predict.bayes_classify(report, labels)
            accuracy["bayes"] = float(np.mean(result.labels == truth))
            em_min = _min_ascent(state.lower_bound_history)
        except Exception as exc:
            failures.append(f"bayes: {exc}")
    if "amv" in cfg.methods:
        try:
            k = len(experts)
            signs = np.zeros((k, k))
            for i, s in enumerate(experts):
                for j, t in enumerate(experts[i + 1 :], start=i + 1):
                    signs[i, j] = signs[j, i] = np.sign(nbhd.weight(s, t))
            result = predict.augmented_majority_vote(labels, experts, signs, nbhd.sizes())
            accuracy["amv"] = float(np.mean(result.labels == truth))
        except Exception as exc:
            failures.append(f"amv: {exc}")
    if "mv" in cfg.methods:
        result = baselines.majority_vote(labels)
        accuracy["mv"] = float(np.mean(result.labels == truth))
    if "ds" in cfg.methods:
        try:
            result, params = baselines.dawid_skene(labels)
            accuracy["ds"] = float(np.mean(result.labels == truth))
            ds_min = _min_ascent(params.log_likelihood_history)
        except Exception as exc:
            failures.append(f"ds: {exc}")
    if "sml" in cfg.methods:
        try:
            result = baselines.sml(labels)
            accuracy["sml"] = float(np.mean(result.labels == truth))
        except Exception as exc:
            failures.append(f"sml: {exc}")

    return TrialRecord(
        p=p,
        d0=d0,
        snr=snr,
        trial=trial,
        n=n,
        lam=lam,
        expert_set_true=tuple(sorted(spec.expert_set)),
        expert_set_hat=experts,
        hit_rate=rec.hit_rate,
        precision=rec.precision,
        accuracy=accuracy,
        em_min_ascent=em_min,
        ds_min_ascent=ds_min,
        failures=tuple(failures),
        seconds=time.perf_counter() - t_start,
    )


def run_benchmark(cfg: BenchConfig) -> tuple[list[TrialRecord], list[dict]]:
    """Run every cell of the config; returns per-trial records and the aggregate table."""
    records: list[TrialRecord] = []
    for cell_index, p in enumerate(cfg.p_list):
        d0 = d0_for(p, cfg.d0_rule)
        for trial in range(cfg.trials):
            records.append(run_trial(p, d0, cfg.snr, cfg, cell_index, trial))
    return records, aggregate(records)


def aggregate(records: list[TrialRecord]) -> list[dict]:
    """Mean/sd per (p, d0, snr, metric) cell, with per-metric failure counts."""
    cells: dict[tuple[int, int, str], list[TrialRecord]] = {}
    for r in records:
        cells.setdefault((r.p, r.d0, r.snr), []).append(r)
    rows: list[dict] = []
    for (p, d0, snr), recs in sorted(cells.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2])):
        series: dict[str, list[float]] = {
            "hit_rate": [r.hit_rate for r in recs if r.hit_rate is not None],
            "precision": [r.precision for r in recs if r.precision is not None],
        }
        for method in ALL_METHODS:
            vals = [r.accuracy[method] for r in recs if method in r.accuracy]
            if vals or any(f.startswith(method) for r in recs for f in r.failures):
                series[f"accuracy_{method}"] = vals
        for metric, vals in series.items():
            arr = np.asarray(vals, dtype=float)
            rows.append(
                {
                    "p": p,
                    "d0": d0,
                    "snr": snr,
                    "metric": metric,
                    "mean": float(arr.mean()) if arr.size else float("nan"),
                    "sd": float(arr.std(ddof=1)) if arr.size > 1 else 0.0,
                    "trials": len(recs),
                    "failures": len(recs) - arr.size,
                }
            )
    return rows


def parse_config(path) -> BenchConfig:
    """Read a flat ``key = value`` config file ('#' starts a comment)."""
    values: dict[str, str] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise StructuralError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    kwargs: dict = {}
    if "p_list" in values:
        kwargs["p_list"] = tuple(int(x) for x in values.pop("p_list").split(","))
    for key in ("d0_rule", "snr", "lambda_rule", "out_dir"):
        if key in values:
            kwargs[key] = values.pop(key)
    for key in ("trials", "seed", "n_scale"):
        if key in values:
            kwargs[key] = int(values.pop(key))
    if "methods" in values:
        kwargs["methods"] = tuple(m.strip() for m in values.pop("methods").split(","))
    if values:
        raise StructuralError(f"{path}: unknown config keys: {sorted(values)}")
    return BenchConfig(**kwargs)


def write_results_csv(rows: list[dict], path) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["p", "d0", "snr", "metric", "mean", "sd", "trials", "failures"])
        for row in rows:
            w.writerow([row[k] for k in ("p", "d0", "snr", "metric", "mean", "sd", "trials", "failures")])


def write_trials_csv(records: list[TrialRecord], path) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        header = ["p", "d0", "snr", "trial", "n", "lambda", "hit_rate", "precision"]
        header += [f"accuracy_{m}" for m in ALL_METHODS]
        header += ["em_min_ascent", "ds_min_ascent", "failures", "seconds"]
        w.writerow(header)
        for r in records:
            row = [r.p, r.d0, r.snr, r.trial, r.n, r.lam]
            row += ["" if r.hit_rate is None else r.hit_rate, "" if r.precision is None else r.precision]
            row += [r.accuracy.get(m, "") for m in ALL_METHODS]
            row += [
                "" if r.em_min_ascent is None else r.em_min_ascent,
                "" if r.ds_min_ascent is None else r.ds_min_ascent,
                ";".join(r.failures),
                f"{r.seconds:.3f}",
            ]
            w.writerow(row)


def run_and_write(cfg: BenchConfig, out_dir) -> tuple[list[TrialRecord], list[dict]]:
    """Run the benchmark and write results.csv and trials.csv to ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records, rows = run_benchmark(cfg)
    write_results_csv(rows, out / "results.csv")
    write_trials_csv(records, out / "trials.csv")
    return records, rows
