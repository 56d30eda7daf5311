"""Tabular and figure summaries built from trial logs and score files."""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .graph import DataError
from .io import SCORE_HEADER, read_csv

DIM_BINS = (16, 32, 64, 128, 256, 512, 1024)
METHOD_ORDER = ("dngr", "grarep", "line", "node2vec")
CLASSIFIER_ORDER = ("forest", "logreg")
CLASSIFIER_NAMES = {"forest": "Random forest", "logreg": "Log. regression"}
METHOD_NAMES = {"dngr": "DNGR", "grarep": "GraRep", "line": "LINE", "node2vec": "node2vec"}


def parse_params(text: str) -> dict:
    out = {}
    for item in filter(None, (text or "").split(";")):
        k, _, v = item.partition("=")
        out[k] = v
    return out


def dimension_bins(records, edges=DIM_BINS):
    """Group (dimension, val_micro, val_macro) triples into [lo, hi) bins; empty bins are dropped.

    Returns rows ``(lo, hi, n_trials, best_micro, best_macro, mean_micro)``.
    """
    recs = [(int(d), float(mi), float(ma)) for d, mi, ma in records]
    rows = []
    bounds = list(edges)
    if recs and max(r[0] for r in recs) >= bounds[-1]:
        bounds.append(max(r[0] for r in recs) + 1)
    for lo, hi in zip(bounds, bounds[1:]):
        inside = [r for r in recs if lo <= r[0] < hi]
        if not inside:
            continue
        mic = [r[1] for r in inside]
        mac = [r[2] for r in inside]
        rows.append((lo, hi, len(inside), max(mic), max(mac), float(np.mean(mic))))
    below = [r for r in recs if r[0] < bounds[0]]
    if below:
        mic = [r[1] for r in below]
        rows.insert(0, (min(r[0] for r in below), bounds[0], len(below), max(mic),
                        max(r[2] for r in below), float(np.mean(mic))))
    return rows


def trial_log_records(path):
    """(dimension, val_micro, val_macro) for every successful trial in a trial log CSV."""
    out = []
    for row in read_csv(path):
        if row["status"] != "ok":
            continue
        params = parse_params(row["params"])
        if "d" not in params:
            continue
        out.append((int(params["d"]), float(row["val_micro"]), float(row["val_macro"])))
    return out


def load_scores(results_dir) -> list[dict]:
    """Every score CSV (``SCORE_HEADER`` layout) below ``results_dir``."""
    root = Path(results_dir)
    if not root.is_dir():
        raise DataError(f"results directory {root} does not exist")
    rows = []
    for p in sorted(root.rglob("*.csv")):
        with open(p, encoding="utf-8") as fh:
            head = fh.readline().strip().split(",")
        if head[: len(SCORE_HEADER)] == SCORE_HEADER:
            rows.extend(read_csv(p))
    if not rows:
        raise DataError(f"no score files found under {root}")
    return rows


def score_table(rows, datasets=None):
    """Rows of (score, classifier, method, value per dataset) plus the baseline row."""
    cells = {}
    base = {}
    for r in rows:
        if r["split"] != "test":
            continue
        ds = r["dataset"]
        if r["method"] == "most_frequent":
            base.setdefault(ds, []).append(float(r["micro_f1"]))
            continue
        key = (r["classifier"], r["method"], ds)
        cells[key] = (float(r["macro_f1"]), float(r["micro_f1"]))
    if datasets is None:
        datasets = sorted({k[2] for k in cells} | set(base))
    out = []
    for score_idx, score in enumerate(("Macro F1", "Micro F1")):
        for clf in CLASSIFIER_ORDER:
            for m in METHOD_ORDER:
                vals = [cells.get((clf, m, ds), (None, None))[score_idx] for ds in datasets]
                out.append([score, CLASSIFIER_NAMES[clf], METHOD_NAMES[m]] + vals)
    out.append(["Most frequent label", "", ""] +
               [float(np.mean(base[ds])) if ds in base else None for ds in datasets])
    return ["score", "classifier", "embedding"] + list(datasets), out


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    plt.rcParams.update({"figure.figsize": (6.0, 3.8), "axes.grid": True, "grid.alpha": 0.3,
                         "font.size": 9, "legend.fontsize": 8, "savefig.dpi": 150})
    return plt


def plot_fraction_sweep(curves: dict, path, title=""):
    """``curves`` maps a legend label to [(fraction, micro_f1), ...]."""
    plt = _pyplot()
    fig, ax = plt.subplots()
    for label, pts in curves.items():
        xs, ys = zip(*pts)
        ax.plot(xs, ys, marker="o", ms=3, label=label)
    ax.set_xlabel("fraction of training data")
    ax.set_ylabel("micro-F1")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return Path(path)


def plot_dimension_study(records, bins, path, title=""):
    plt = _pyplot()
    fig, ax = plt.subplots()
    if records:
        d, mi, _ = zip(*records)
        ax.scatter(d, mi, s=10, alpha=0.5, label="trials")
    if bins:
        centers = [np.sqrt(lo * hi) for lo, hi, *_ in bins]
        ax.step(centers, [b[3] for b in bins], where="mid", color="k", label="best per bin")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("embedding dimension")
    ax.set_ylabel("validation micro-F1")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return Path(path)


def safe_name(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", text)
