import json
import subprocess
import sys

import numpy as np
import pytest

from unelisa import io
from unelisa.cli import main
from unelisa.model import IsingModelSpec, LabelMatrix, StructuralError

from conftest import example_spec


class TestLabelsCsv:
    def test_round_trip_identity(self, tmp_path):
        rng = np.random.Generator(np.random.PCG64(0))
        labels = LabelMatrix(
            values=rng.choice([-1, 1], size=(7, 4)),
            classifier_ids=("1", "2", "3", "4"),
            instance_ids=tuple(f"r{i}" for i in range(7)),
        )
        path = tmp_path / "labels.csv"
        io.write_labels_csv(labels, path)
        back = io.read_labels_csv(path)
        assert np.array_equal(back.values, labels.values)
        assert back.classifier_ids == labels.classifier_ids
        assert back.instance_ids == labels.instance_ids

    def test_truth_round_trip_and_alignment(self, tmp_path):
        ids = ("a", "b", "c")
        truth = np.array([1, -1, 1], dtype=np.int8)
        io.write_truth_csv(ids, truth, tmp_path / "truth.csv")
        labels = LabelMatrix(
            values=[[1, 1], [-1, 1], [1, -1]], classifier_ids=("x", "y"), instance_ids=ids
        )
        io.write_labels_csv(labels, tmp_path / "labels.csv")
        back = io.read_labels_csv(tmp_path / "labels.csv", truth_path=tmp_path / "truth.csv")
        assert np.array_equal(back.truth, truth)

    def test_bad_entry_rejected(self, tmp_path):
        path = tmp_path / "labels.csv"
        path.write_text("id,a,b\n1,1,0\n")
        with pytest.raises(StructuralError):
            io.read_labels_csv(path)

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "labels.csv"
        path.write_text("a,b\n1,-1\n")
        with pytest.raises(StructuralError):
            io.read_labels_csv(path)


class TestGraphTsv:
    def test_round_trip_identity(self, tmp_path, fig_spec):
        path = tmp_path / "graph.tsv"
        io.write_graph_tsv(fig_spec, path)
        back = io.read_graph_tsv(path)
        assert back.p == fig_spec.p
        assert back.theta0 == fig_spec.theta0
        assert back.edges == fig_spec.edges
        assert back.expert_set == fig_spec.expert_set

    def test_round_trip_with_isolated_trailing_nodes(self, tmp_path):
        spec = IsingModelSpec(
            p=10, theta0=0.25, edges={(0, 1): 1.0, (0, 2): -1.0, (0, 3): 1.0}, expert_set={1, 2, 3}
        )
        path = tmp_path / "graph.tsv"
        io.write_graph_tsv(spec, path)
        back = io.read_graph_tsv(path)
        assert back.p == 10  # isolated nodes 4..10 preserved via the header comment
        assert back.edges == spec.edges

    def test_expert_set_implied_by_hidden_edges(self, tmp_path):
        path = tmp_path / "graph.tsv"
        path.write_text("0\t0\t0.5\n0\t2\t1.0\n1\t3\t-0.25\n")
        spec = io.read_graph_tsv(path)
        assert spec.expert_set == frozenset({2})
        assert spec.theta0 == 0.5

    def test_malformed_line_rejected(self, tmp_path):
        path = tmp_path / "graph.tsv"
        path.write_text("0\t1\n")
        with pytest.raises(StructuralError):
            io.read_graph_tsv(path)


class TestCli:
    def run(self, *argv):
        return main(list(argv))

    def test_simulate_prune_predict_evaluate_pipeline(self, tmp_path):
        out = tmp_path / "sim"
        code = self.run(
            "simulate", "--p", "12", "--d0", "4", "--snr", "high",
            "--n", "800", "--seed", "3", "--out", str(out),
        )
        assert code == 0
        assert (out / "labels.csv").exists()
        assert (out / "truth.csv").exists()
        assert (out / "graph.tsv").exists()

        report = tmp_path / "report.json"
        code = self.run(
            "prune", "--labels", str(out / "labels.csv"), "--lambda", "auto",
            "--rule", "or", "--out", str(report),
        )
        assert code == 0
        doc = json.loads(report.read_text())
        assert "expert_set" in doc and "knot_table" in doc
        assert doc["parameters"]["rule"] == "or"

        for method in ("bayes", "amv", "mv", "ds", "sml"):
            pred = tmp_path / f"pred_{method}.csv"
            argv = ["predict", "--method", method, "--labels", str(out / "labels.csv"),
                    "--out", str(pred)]
            if method in ("bayes", "amv"):
                argv += ["--experts", str(report)]
            assert self.run(*argv) == 0
            assert pred.exists()

        mpath = tmp_path / "metrics.csv"
        code = self.run(
            "evaluate", "--pred", str(tmp_path / "pred_bayes.csv"),
            "--truth", str(out / "truth.csv"), "--out", str(mpath),
        )
        assert code == 0
        rows = mpath.read_text().strip().splitlines()
        assert rows[0] == "metric,value,flag"
        names = [r.split(",")[0] for r in rows[1:]]
        assert names == ["accuracy", "auc", "ppv", "npv", "f_score"]
        acc = float(rows[1].split(",")[1])
        assert acc > 0.8  # pruned posterior classifier beats chance comfortably

    def test_simulate_from_existing_graph(self, tmp_path, fig_spec):
        gpath = tmp_path / "graph.tsv"
        io.write_graph_tsv(fig_spec, gpath)
        out = tmp_path / "sim"
        code = self.run("simulate", "--graph", str(gpath), "--n", "50", "--out", str(out))
        assert code == 0
        labels = io.read_labels_csv(out / "labels.csv")
        assert labels.p == fig_spec.p and labels.n == 50

    def test_approx_command(self, tmp_path, fig_spec):
        gpath = tmp_path / "graph.tsv"
        io.write_graph_tsv(fig_spec, gpath)
        apath = tmp_path / "approx.tsv"
        assert self.run("approx", "--graph", str(gpath), "--out", str(apath)) == 0
        model = io.read_graph_tsv(apath)
        assert (1, 2) in model.edges  # induced expert coupling present
        assert all(s >= 1 for (s, t) in model.edges)

    def test_benchmark_command(self, tmp_path):
        cfg = tmp_path / "bench.cfg"
        cfg.write_text("p_list = 12\nd0_rule = sqrt\nsnr = high\ntrials = 2\nseed = 4\n")
        out = tmp_path / "results"
        assert self.run("benchmark", "--config", str(cfg), "--out", str(out)) == 0
        results = (out / "results.csv").read_text().strip().splitlines()
        assert results[0] == "p,d0,snr,metric,mean,sd,trials,failures"
        assert (out / "trials.csv").exists()

    def test_usage_error_exit_code(self):
        assert self.run("predict", "--method", "bayes", "--labels", "x.csv") == 1

    def test_data_error_exit_code(self, tmp_path):
        missing = tmp_path / "missing.csv"
        assert self.run("prune", "--labels", str(missing)) == 2

    def test_bad_format_exit_code(self, tmp_path):
        bad = tmp_path / "labels.csv"
        bad.write_text("id,a,b\n1,2,3\n")
        assert self.run("prune", "--labels", str(bad)) == 2

    def test_console_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "unelisa.cli", "--help"], capture_output=True, text=True
        )
        assert proc.returncode == 0
        assert "simulate" in proc.stdout
