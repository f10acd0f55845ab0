"""File formats: label CSV, truth CSV, graph TSV, expert-report JSON.

Label CSV: header ``id,<classifier_id>,...``, one row per instance, entries
``-1``/``1``. Truth CSV: header ``id,f0``. Graph TSV: one ``s<TAB>t<TAB>theta``
line per edge plus a ``0<TAB>0<TAB>theta0`` line for the external field; the
expert set is implied by the edges incident to node 0. A leading ``# p=<p>``
comment records the node count so that specs with isolated trailing nodes
survive a write/read round trip.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .model import IsingModelSpec, LabelMatrix, StructuralError

__all__ = [
    "write_labels_csv",
    "read_labels_csv",
    "write_truth_csv",
    "read_truth_csv",
    "write_graph_tsv",
    "read_graph_tsv",
    "write_report_json",
    "read_report_json",
    "write_predictions_csv",
    "read_predictions_csv",
]


def _parse_pm1(text: str, where: str) -> int:
    v = text.strip()
    if v == "1" or v == "+1":
        return 1
    if v == "-1":
        return -1
    raise StructuralError(f"{where}: expected -1 or 1, got {text!r}")


def write_labels_csv(labels: LabelMatrix, path) -> None:
    ids = labels.instance_ids or tuple(str(i + 1) for i in range(labels.n))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", *labels.classifier_ids])
        for rid, row in zip(ids, labels.values):
            w.writerow([rid, *(int(x) for x in row)])


def read_labels_csv(path, truth_path=None) -> LabelMatrix:
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or not rows[0] or rows[0][0] != "id":
        raise StructuralError(f"{path}: first header column must be 'id'")
    classifier_ids = tuple(rows[0][1:])
    if len(classifier_ids) < 1:
        raise StructuralError(f"{path}: no classifier columns")
    ids = []
    data = []
    for r, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(classifier_ids) + 1:
            raise StructuralError(f"{path}:{r}: expected {len(classifier_ids) + 1} fields")
        ids.append(row[0])
        data.append([_parse_pm1(x, f"{path}:{r}") for x in row[1:]])
    if not data:
        raise StructuralError(f"{path}: no data rows")
    truth = None
    if truth_path is not None:
        tid, tval = read_truth_csv(truth_path)
        if tid != tuple(ids):
            raise StructuralError(f"{truth_path}: instance ids do not match {path}")
        truth = tval
    return LabelMatrix(
        values=np.array(data, dtype=np.int8),
        classifier_ids=classifier_ids,
        instance_ids=tuple(ids),
        truth=truth,
    )


def write_truth_csv(instance_ids, truth, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "f0"])
        for rid, v in zip(instance_ids, truth):
            w.writerow([rid, int(v)])


def read_truth_csv(path) -> tuple[tuple[str, ...], np.ndarray]:
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:2] != ["id", "f0"]:
        raise StructuralError(f"{path}: header must be 'id,f0'")
    ids, vals = [], []
    for r, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise StructuralError(f"{path}:{r}: expected 2 fields")
        ids.append(row[0])
        vals.append(_parse_pm1(row[1], f"{path}:{r}"))
    return tuple(ids), np.array(vals, dtype=np.int8)


def write_graph_tsv(spec: IsingModelSpec, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"# p={spec.p}\n")
        fh.write(f"0\t0\t{spec.theta0!r}\n")
        for (s, t) in sorted(spec.edges):
            fh.write(f"{s}\t{t}\t{spec.edges[(s, t)]!r}\n")


def read_graph_tsv(path) -> IsingModelSpec:
    path = Path(path)
    theta0 = 0.0
    edges: dict[tuple[int, int], float] = {}
    p = 0
    declared_p = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("p="):
                    declared_p = int(body[2:].strip())
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise StructuralError(f"{path}:{lineno}: expected 's<TAB>t<TAB>theta'")
            try:
                s, t, w = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError as exc:
                raise StructuralError(f"{path}:{lineno}: {exc}") from exc
            if s == 0 and t == 0:
                theta0 = w
                continue
            if s > t:
                s, t = t, s
            if (s, t) in edges:
                raise StructuralError(f"{path}:{lineno}: duplicate edge ({s},{t})")
            edges[(s, t)] = w
            p = max(p, t)
    if declared_p is not None:
        if declared_p < p:
            raise StructuralError(f"{path}: declared p={declared_p} smaller than max node {p}")
        p = declared_p
    experts = frozenset(t for (s, t) in edges if s == 0)
    return IsingModelSpec(p=p, theta0=theta0, edges=edges, expert_set=experts)


def write_report_json(report_doc: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(report_doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_report_json(path) -> dict:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise StructuralError(f"{path}: invalid JSON: {exc}") from exc
    if "expert_set" not in doc:
        raise StructuralError(f"{path}: report is missing 'expert_set'")
    return doc


def write_predictions_csv(instance_ids, result, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "pred", "score"])
        for rid, lab, sc in zip(instance_ids, result.labels, result.scores):
            w.writerow([rid, int(lab), repr(float(sc))])


def read_predictions_csv(path) -> tuple[tuple[str, ...], np.ndarray, np.ndarray]:
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:3] != ["id", "pred", "score"]:
        raise StructuralError(f"{path}: header must be 'id,pred,score'")
    ids, labs, scores = [], [], []
    for r, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        ids.append(row[0])
        labs.append(_parse_pm1(row[1], f"{path}:{r}"))
        scores.append(float(row[2]))
    return tuple(ids), np.array(labs, dtype=np.int8), np.array(scores, dtype=float)
