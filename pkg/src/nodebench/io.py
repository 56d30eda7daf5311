"""CSV emission and the on-disk embedding format."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .graph import DataError

TRIAL_LOG_HEADER = ["trial", "status", "val_macro", "val_micro", "embed_seconds", "train_seconds", "params"]
SCORE_HEADER = ["dataset", "method", "classifier", "split", "macro_f1", "micro_f1", "seed",
                "trials", "best_trial", "params"]


def fmt(v) -> str:
    """Fixed 6-significant-digit formatting for floats; everything else via str."""
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.6g}"
    return str(v)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def read_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def write_embedding(path, embedding, node_ids) -> Path:
    """Header ``node_id,dim_0,...``; float32 values, 9 significant digits (exact round trip)."""
    x = np.asarray(embedding, dtype=np.float32)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node_id"] + [f"dim_{k}" for k in range(x.shape[1])])
        for tok, row in zip(node_ids, x):
            w.writerow([tok] + [f"{v:.9g}" for v in row.tolist()])
    return path


def read_embedding(path, graph=None) -> tuple[list, np.ndarray]:
    """Returns (node ids, matrix). With ``graph`` given, rows are reordered to graph indices."""
    with open(path, newline="", encoding="utf-8") as fh:
        r = csv.reader(fh)
        header = next(r, None)
        if not header or header[0] != "node_id":
            raise DataError(f"{path}: missing node_id header")
        ids, rows = [], []
        for line in r:
            ids.append(line[0])
            rows.append([float(v) for v in line[1:]])
    x = np.asarray(rows, dtype=np.float64)
    if graph is None:
        return ids, x
    if len(ids) != graph.n_nodes or set(ids) != set(graph.index):
        raise DataError(f"{path}: embedding nodes do not match the graph")
    out = np.empty_like(x)
    out[[graph.index[t] for t in ids]] = x
    return list(graph.node_ids), out


def trial_rows(result):
    """Trial log rows followed by one summary row carrying the final test scores."""
    for r in result.trials:
        v = r.validation
        yield [r.trial, r.status if r.ok else f"failed:{r.error}",
               v.macro_f1 if v else None, v.micro_f1 if v else None,
               r.embed_seconds, r.train_seconds, r.sample.describe()]
    b = result.best
    yield [f"best={b.trial}", "test", result.test.macro_f1, result.test.micro_f1,
           b.embed_seconds, b.train_seconds, b.sample.describe()]
