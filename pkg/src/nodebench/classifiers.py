"""One-vs-rest logistic regression and a bootstrap forest of CART trees.

Both classifiers handle binary, multi-class and multi-label stores. Multi-label
targets use binary relevance (one independent model per label).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.tree import DecisionTreeClassifier

from .numerics import NumericError, Standardizer, log_sigmoid, sigmoid, standardize_apply, standardize_fit


@dataclass
class LogRegModel:
    weights: np.ndarray  # (d, n_outputs)
    bias: np.ndarray
    l2: float
    stats: Standardizer
    task: str
    n_labels: int


def _targets(labels, rows) -> np.ndarray:
    y = labels.indicator(rows).astype(np.float64)
    if labels.task == "binary":
        return y[:, 1:2]
    return y


def logreg_objective(w, b, x, y, l2):
    """Sum over outputs of mean binary cross-entropy plus (l2/2)||w||^2, and its gradients."""
    z = x @ w + b
    n = x.shape[0]
    loss = -(y * log_sigmoid(z) + (1 - y) * log_sigmoid(-z)).sum() / n + 0.5 * l2 * np.sum(w * w)
    r = (sigmoid(z) - y) / n
    return float(loss), x.T @ r + l2 * w, r.sum(axis=0)


def train_logreg(x, labels, rows, l2: float = 1e-4, lr: float = 0.1, epochs: int = 100,
                 seed: int = 0, batch: int = 64) -> LogRegModel:
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    rows = np.asarray(rows, dtype=np.int64)
    stats = standardize_fit(x, rows)
    xs = standardize_apply(np.asarray(x)[rows], stats)
    y = _targets(labels, rows)
    n, d = xs.shape
    w = np.zeros((d, y.shape[1]))
    b = np.zeros(y.shape[1])
    rng = np.random.default_rng([seed, 0x10C])
    for _ in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch):
            idx = order[start:start + batch]
            _, gw, gb = logreg_objective(w, b, xs[idx], y[idx], l2)
            w -= lr * gw
            b -= lr * gb
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
        raise NumericError("logistic regression diverged")
    return LogRegModel(w, b, l2, stats, labels.task, labels.n_labels)


def logreg_predict_proba(model: LogRegModel, x, rows=None) -> np.ndarray:
    """Per-row, per-label scores in [0, 1]; binary stores get columns (1 - p, p)."""
    xr = np.asarray(x) if rows is None else np.asarray(x)[np.asarray(rows, dtype=np.int64)]
    p = sigmoid(standardize_apply(xr, model.stats) @ model.weights + model.bias)
    if model.task == "binary":
        return np.hstack([1.0 - p, p])
    return p


@dataclass
class ForestModel:
    """``forests[k]`` is a list of (tree, bootstrap rows); one forest unless multilabel."""

    forests: list
    task: str
    n_labels: int
    n_trees: int
    max_depth: int | None
    mtry: int
    min_leaf: int


def resolve_mtry(mtry, d: int) -> int:
    if mtry in ("sqrt", None):
        m = int(np.sqrt(d))
    elif mtry == "log2":
        m = int(np.log2(d)) if d > 1 else 1
    elif mtry == "all":
        m = d
    else:
        m = int(mtry)
    m = max(1, m)
    if m > d:
        raise ValueError(f"mtry={m} exceeds feature count {d}")
    return m


def _tree_seed(seed: int, label: int, t: int) -> int:
    return int(np.random.SeedSequence([seed, label, t]).generate_state(1)[0] >> 1)


def _grow(xr, y, n_trees, max_depth, mtry, min_leaf, seed, label):
    n = xr.shape[0]
    trees = []
    for t in range(n_trees):
        s = _tree_seed(seed, label, t)
        boot = np.random.default_rng(s).integers(n, size=n)
        tree = DecisionTreeClassifier(
            criterion="gini", max_depth=max_depth, max_features=mtry,
            min_samples_leaf=min_leaf, random_state=s,
        )
        tree.fit(xr[boot], y[boot])
        trees.append((tree, boot))
    return trees


def train_random_forest(x, labels, rows, n_trees: int = 100, max_depth=None, mtry="sqrt",
                        min_leaf: int = 1, seed: int = 0) -> ForestModel:
    """Each tree sees a bootstrap of ``rows`` and draws ``mtry`` candidate features per split."""
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    rows = np.asarray(rows, dtype=np.int64)
    xr = np.asarray(x, dtype=np.float64)[rows]
    m = resolve_mtry(mtry, xr.shape[1])
    y = labels.indicator(rows)
    if labels.task == "multilabel":
        forests = [_grow(xr, y[:, k].astype(np.int64), n_trees, max_depth, m, min_leaf, seed, k)
                   for k in range(labels.n_labels)]
    else:
        forests = [_grow(xr, y.argmax(axis=1), n_trees, max_depth, m, min_leaf, seed, 0)]
    return ForestModel(forests, labels.task, labels.n_labels, n_trees, max_depth, m, min_leaf)


def _tree_proba(tree, xr, n_classes):
    p = np.zeros((xr.shape[0], n_classes))
    p[:, tree.classes_.astype(np.int64)] = tree.predict_proba(xr)
    return p


def forest_predict_proba(model: ForestModel, x, rows=None) -> np.ndarray:
    """Mean of leaf class distributions over trees."""
    xr = np.asarray(x, dtype=np.float64)
    if rows is not None:
        xr = xr[np.asarray(rows, dtype=np.int64)]
    if model.task == "multilabel":
        cols = [np.mean([_tree_proba(t, xr, 2)[:, 1] for t, _ in trees], axis=0)
                for trees in model.forests]
        return np.column_stack(cols)
    trees = model.forests[0]
    return np.mean([_tree_proba(t, xr, model.n_labels) for t, _ in trees], axis=0)


def forest_oob_error(model: ForestModel, x, labels, rows) -> float:
    """Out-of-bag misclassification rate for single-label forests.

    ``rows`` must be the training rows, in the order used for fitting.
    """
    rows = np.asarray(rows, dtype=np.int64)
    xr = np.asarray(x, dtype=np.float64)[rows]
    y = labels.indicator(rows).argmax(axis=1)
    votes = np.zeros((len(rows), model.n_labels))
    for tree, boot in model.forests[0]:
        oob = np.setdiff1d(np.arange(len(rows)), boot)
        if len(oob):
            votes[oob] += _tree_proba(tree, xr[oob], model.n_labels)
    seen = votes.sum(axis=1) > 0
    if not seen.any():
        return float("nan")
    return float(np.mean(votes[seen].argmax(axis=1) != y[seen]))
