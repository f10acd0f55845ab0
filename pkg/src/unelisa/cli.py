"""Command-line interface.

Subcommands: simulate, approx, prune, predict, evaluate, benchmark.
Exit codes: 0 success, 1 usage error, 2 data/format error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import baselines, harness, io, metrics, nodewise, predict, prune
from .approx import approximate
from .enumeration import SizeError
from .gibbs import GibbsConfig, sample
from .model import IsingModelSpec, StructuralError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="unelisa", description="Ising-based unsupervised ensemble learning")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="sample a label matrix from a model")
    sim.add_argument("--graph", help="graph TSV to sample from (otherwise generate one)")
    sim.add_argument("--p", type=int, help="classifier count for a generated graph")
    sim.add_argument("--d0", type=int, help="expert count for a generated graph")
    sim.add_argument("--snr", choices=sorted(harness.SNR_EDGE_WEIGHT), default="high")
    sim.add_argument("--n", type=int, required=True, help="number of instances to sample")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", default=".", help="output directory")

    apx = sub.add_parser("approx", help="dump the marginalized pairwise model")
    apx.add_argument("--graph", required=True)
    apx.add_argument("--out", default="approx.tsv")

    prn = sub.add_parser("prune", help="estimate the expert set")
    prn.add_argument("--labels", required=True)
    prn.add_argument("--lambda", dest="lam", default="auto", help="'auto' (sqrt(log p / n)) or a value")
    prn.add_argument("--rule", choices=("or", "and"), default="or")
    prn.add_argument("--out", default="report.json")

    prd = sub.add_parser("predict", help="predict labels")
    prd.add_argument("--method", choices=("bayes", "amv", "mv", "ds", "sml"), required=True)
    prd.add_argument("--labels", required=True)
    prd.add_argument("--experts", help="expert report JSON (required for bayes/amv)")
    prd.add_argument("--out", default="predictions.csv")

    ev = sub.add_parser("evaluate", help="score predictions against truth")
    ev.add_argument("--pred", required=True)
    ev.add_argument("--truth", required=True)
    ev.add_argument("--out", default="metrics.csv")

    ben = sub.add_parser("benchmark", help="run the simulation benchmark")
    ben.add_argument("--config", help="flat key = value config file")
    ben.add_argument("--trials", type=int, help="override the trial count")
    ben.add_argument("--seed", type=int, help="override the seed")
    ben.add_argument("--out", help="output directory (overrides config out_dir)")
    return parser


def _cmd_simulate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ss = np.random.SeedSequence(args.seed)
    graph_ss, gibbs_ss = ss.spawn(2)
    if args.graph:
        spec = io.read_graph_tsv(args.graph)
    else:
        if args.p is None or args.d0 is None:
            raise UsageError("simulate needs either --graph or both --p and --d0")
        spec = harness.generate_graph(args.p, args.d0, args.snr, graph_ss)
    cfg = GibbsConfig(n_samples=args.n, seed=int(gibbs_ss.generate_state(1)[0]))
    labels = sample(spec, cfg)
    io.write_labels_csv(labels, out / "labels.csv")
    ids = labels.instance_ids or tuple(str(i + 1) for i in range(labels.n))
    io.write_truth_csv(ids, labels.truth, out / "truth.csv")
    io.write_graph_tsv(spec, out / "graph.tsv")
    print(f"wrote {out / 'labels.csv'}, {out / 'truth.csv'}, {out / 'graph.tsv'}")
    return EXIT_OK


def _cmd_approx(args) -> int:
    spec = io.read_graph_tsv(args.graph)
    model = approximate(spec)
    as_spec = IsingModelSpec(p=model.p, theta0=0.0, edges=model.theta, expert_set=frozenset())
    io.write_graph_tsv(as_spec, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_prune(args) -> int:
    labels = io.read_labels_csv(args.labels)
    lam = nodewise.lambda_auto(labels.n, labels.p) if args.lam == "auto" else float(args.lam)
    nbhd = nodewise.neighborhoods(labels, lam, symmetrize=args.rule)
    report, table = prune.reconstruct_expert_set(nbhd)
    experts = report.expert_set_hat
    doc = {
        "expert_set": list(experts),
        "knot_table": [
            {"node": e.node, "size": e.size, "rank": e.rank, "selected": e.selected}
            for e in table.knots
        ],
        "parameters": {"lambda": lam, "rule": args.rule, "n": labels.n, "p": labels.p},
        "flags": list(table.flags),
        "expert_pair_signs": [
            [s, t, int(np.sign(nbhd.weight(s, t)))]
            for i, s in enumerate(experts)
            for t in experts[i + 1 :]
        ],
        "neighborhood_sizes": {str(s): nbhd.size(s) for s in experts},
    }
    io.write_report_json(doc, args.out)
    print(f"wrote {args.out} (expert set: {list(experts)})")
    return EXIT_OK


def _cmd_predict(args) -> int:
    if args.method in ("bayes", "amv") and not args.experts:
        raise UsageError(f"--experts is required for method {args.method}")
    labels = io.read_labels_csv(args.labels)
    if args.method in ("bayes", "amv"):
        doc = io.read_report_json(args.experts)
        experts = tuple(int(s) for s in doc["expert_set"])
        if args.method == "bayes":
            report, _ = predict.em_fit(labels, experts)
            result = predict.bayes_classify(report, labels)
        else:
            k = len(experts)
            pos = {s: i for i, s in enumerate(experts)}
            signs = np.zeros((k, k))
            for s, t, sg in doc.get("expert_pair_signs", []):
                if s in pos and t in pos:
                    signs[pos[s], pos[t]] = signs[pos[t], pos[s]] = sg
            sizes = {int(s): int(v) for s, v in doc.get("neighborhood_sizes", {}).items()}
            result = predict.augmented_majority_vote(labels, experts, signs, sizes)
    elif args.method == "mv":
        result = baselines.majority_vote(labels)
    elif args.method == "ds":
        result, _ = baselines.dawid_skene(labels)
    else:
        result = baselines.sml(labels)
    ids = labels.instance_ids or tuple(str(i + 1) for i in range(labels.n))
    io.write_predictions_csv(ids, result, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    ids, labs, scores = io.read_predictions_csv(args.pred)
    tids, truth = io.read_truth_csv(args.truth)
    if ids != tids:
        raise StructuralError("prediction and truth instance ids do not match")
    from .model import PredictionResult

    result = PredictionResult(labels=labs, scores=scores, method="loaded")
    m = metrics.classification(result, truth)
    flag_of = {
        "accuracy": "",
        "auc": "auc_undefined",
        "ppv": "no_predicted_positive",
        "npv": "no_predicted_negative",
        "f_score": "f_score_undefined",
    }
    import csv

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["metric", "value", "flag"])
        for name in ("accuracy", "auc", "ppv", "npv", "f_score"):
            flag = flag_of[name] if flag_of[name] in m.flags else ""
            w.writerow([name, repr(getattr(m, name)), flag])
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_benchmark(args) -> int:
    cfg = harness.parse_config(args.config) if args.config else harness.BenchConfig()
    overrides = {}
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        from dataclasses import replace

        cfg = replace(cfg, **overrides)
    out_dir = args.out or cfg.out_dir or "."
    records, rows = harness.run_and_write(cfg, out_dir)
    failed = sum(1 for r in records if r.failures)
    print(f"ran {len(records)} trials ({failed} with failures); wrote results to {out_dir}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "simulate": _cmd_simulate,
            "approx": _cmd_approx,
            "prune": _cmd_prune,
            "predict": _cmd_predict,
            "evaluate": _cmd_evaluate,
            "benchmark": _cmd_benchmark,
        }[args.command]
        return handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StructuralError, SizeError, FileNotFoundError, IsADirectoryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
