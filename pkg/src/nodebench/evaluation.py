"""Splits, F1 scoring and single-trial evaluation of a fixed embedding."""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .classifiers import forest_predict_proba, logreg_predict_proba, train_logreg, train_random_forest
from .graph import DataError, LabelStore

log = logging.getLogger(__name__)

DEFAULT_FRACTIONS = (0.5, 0.25, 0.25)
PARTS = ("train", "val", "test")


@dataclass(frozen=True, eq=False)
class Split:
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray
    fractions: tuple = DEFAULT_FRACTIONS
    seed: int = 0

    def part(self, name: str) -> np.ndarray:
        if name not in PARTS:
            raise ValueError(f"unknown split part {name!r}")
        return getattr(self, name)

    def sizes(self) -> tuple[int, int, int]:
        return len(self.train), len(self.val), len(self.test)


def _apportion(n: int, fractions) -> np.ndarray:
    """Largest-remainder rounding of n * fractions (ties to the lower index)."""
    raw = n * np.asarray(fractions, dtype=np.float64)
    out = np.floor(raw + 1e-9).astype(np.int64)
    rem = raw - out
    for k in sorted(range(len(rem)), key=lambda k: (-rem[k], k))[: n - out.sum()]:
        out[k] += 1
    return out


def _stratified_counts(sizes, fractions, targets):
    """Per-stratum split counts, each within one node of its exact share and summing to ``targets``."""
    fr = np.asarray(fractions)
    raw = np.outer(sizes, fr)
    counts = np.floor(raw + 1e-9).astype(np.int64)
    demand = np.asarray(targets) - counts.sum(axis=0)
    extra = np.asarray(sizes) - counts.sum(axis=1)
    for c in sorted(range(len(sizes)), key=lambda c: (-extra[c], c)):
        frac = raw[c] - counts[c]
        picks = sorted(range(len(fr)), key=lambda s: (-demand[s], -frac[s], s))[: extra[c]]
        for s in picks:
            counts[c, s] += 1
            demand[s] -= 1
    if np.any(demand != 0):
        raise AssertionError("stratified allocation failed to meet global split sizes")
    return counts


def make_split(labels: LabelStore, fractions=DEFAULT_FRACTIONS, stratified: bool | None = None,
               seed: int = 0) -> Split:
    """Disjoint train/val/test index sets over labeled nodes.

    Single-label stores are stratified by class unless ``stratified=False``.
    Classes with fewer than three members are pooled and placed at random.
    """
    fractions = tuple(float(f) for f in fractions)
    if len(fractions) != 3 or min(fractions) <= 0 or abs(sum(fractions) - 1) > 1e-9:
        raise ValueError(f"fractions must be three positive numbers summing to 1, got {fractions}")
    nodes = labels.labeled_nodes()
    if len(nodes) == 0:
        raise DataError("no labeled nodes")
    if stratified is None:
        stratified = labels.single_label
    rng = np.random.default_rng([seed, 0x5B1])
    targets = _apportion(len(nodes), fractions)
    if stratified and labels.single_label:
        cls = labels.class_vector(nodes)
        sizes = Counter(cls.tolist())
        small = sorted(c for c, k in sizes.items() if k < 3)
        if small:
            log.warning("classes %s have < 3 members; placing them at random", small)
        strata = [nodes[cls == c] for c in sorted(sizes) if sizes[c] >= 3]
        if small:
            strata.append(nodes[np.isin(cls, small)])
        counts = _stratified_counts([len(s) for s in strata], fractions, targets)
        parts = [[], [], []]
        for members, cnt in zip(strata, counts):
            members = rng.permutation(members)
            cut = np.cumsum(cnt)
            for s, chunk in enumerate(np.split(members, cut[:-1])):
                parts[s].append(chunk)
        train, val, test = (np.sort(np.concatenate(p)) for p in parts)
    else:
        perm = rng.permutation(nodes)
        cut = np.cumsum(targets)
        train, val, test = (np.sort(p) for p in np.split(perm, cut[:-1]))
    return Split(train, val, test, fractions, seed)


@dataclass
class ScoreReport:
    macro_f1: float
    micro_f1: float
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    tp: np.ndarray
    fp: np.ndarray
    fn: np.ndarray
    n: int

    def as_dict(self) -> dict:
        return {"macro_f1": self.macro_f1, "micro_f1": self.micro_f1, "n": self.n}

    def same_scores(self, other: "ScoreReport") -> bool:
        return (self.macro_f1 == other.macro_f1 and self.micro_f1 == other.micro_f1
                and np.array_equal(self.tp, other.tp) and np.array_equal(self.fp, other.fp))


def _as_indicator(y, n_labels):
    if isinstance(y, np.ndarray) and y.ndim == 2:
        if n_labels is not None and y.shape[1] != n_labels:
            raise DataError("indicator width does not match vocabulary")
        return y.astype(bool)
    rows = [[v] if np.isscalar(v) else list(v) for v in y]
    if n_labels is None:
        n_labels = 1 + max((max(r) for r in rows if r), default=-1)
    out = np.zeros((len(rows), n_labels), dtype=bool)
    for i, r in enumerate(rows):
        for v in r:
            if not 0 <= v < n_labels:
                raise DataError(f"label {v} outside vocabulary of size {n_labels}")
            out[i, v] = True
    return out


def _f1(tp, fp, fn):
    denom = 2 * tp + fp + fn
    return np.divide(2.0 * tp, denom, out=np.zeros(np.shape(tp), dtype=np.float64), where=denom > 0)


def f1_scores(y_true, y_pred, n_labels: int | None = None) -> ScoreReport:
    """Macro and micro F1. Inputs are boolean indicator matrices or per-row label collections.

    Macro averages per-label F1 over labels that occur in the truth or the
    predictions; micro pools TP/FP/FN over all labels.
    """
    t = _as_indicator(y_true, n_labels)
    p = _as_indicator(y_pred, t.shape[1] if n_labels is None else n_labels)
    if t.shape != p.shape:
        raise DataError(f"shape mismatch {t.shape} vs {p.shape}")
    tp = (t & p).sum(axis=0)
    fp = (~t & p).sum(axis=0)
    fn = (t & ~p).sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        precision = np.where(tp + fp > 0, tp / np.maximum(tp + fp, 1), 0.0)
        recall = np.where(tp + fn > 0, tp / np.maximum(tp + fn, 1), 0.0)
    f1 = _f1(tp, fp, fn)
    active = (t.any(axis=0) | p.any(axis=0))
    macro = float(f1[active].mean()) if active.any() else 0.0
    micro = float(_f1(tp.sum(), fp.sum(), fn.sum()))
    return ScoreReport(macro, micro, precision, recall, f1, tp, fp, fn, t.shape[0])


def multilabel_predict(scores, rule="top_k_true", true_counts=None) -> np.ndarray:
    """Turn a score matrix into label sets.

    ``top_k_true`` keeps each row's k_i best labels (ties to the lower index);
    a float ``rule`` is a threshold with an argmax fallback for empty rows.
    """
    scores = np.asarray(scores, dtype=np.float64)
    n, k = scores.shape
    out = np.zeros((n, k), dtype=bool)
    if rule == "top_k_true":
        if true_counts is None:
            raise ValueError("top_k_true needs the true label count of each row")
        order = np.argsort(-scores, axis=1, kind="stable")
        for i, c in enumerate(np.asarray(true_counts, dtype=np.int64)):
            out[i, order[i, :max(int(c), 0)]] = True
        return out
    out = scores >= float(rule)
    empty = ~out.any(axis=1)
    out[empty, scores[empty].argmax(axis=1)] = True
    return out


class AuditedLabels:
    """LabelStore proxy counting label reads per split part; test isolation evidence."""

    def __init__(self, labels: LabelStore, split: Split):
        self._labels = labels
        self._masks = {}
        for name in PARTS:
            m = np.zeros(len(labels.labels), dtype=bool)
            m[split.part(name)] = True
            self._masks[name] = m
        self.reads = Counter()

    def __getattr__(self, name):
        return getattr(self._labels, name)

    def _record(self, rows):
        rows = np.asarray(rows, dtype=np.int64)
        for name, m in self._masks.items():
            if m[rows].any():
                self.reads[name] += 1

    def indicator(self, rows):
        self._record(rows)
        return self._labels.indicator(rows)

    def class_vector(self, rows):
        self._record(rows)
        return self._labels.class_vector(rows)


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str = "logreg"
    params: dict = field(default_factory=dict)
    rule: object = "top_k_true"

    def __post_init__(self):
        if self.kind not in ("logreg", "forest"):
            raise ValueError(f"unknown classifier {self.kind!r}")

    def fit(self, x, labels, rows, seed: int):
        if self.kind == "logreg":
            return train_logreg(x, labels, rows, seed=seed, **self.params)
        return train_random_forest(x, labels, rows, seed=seed, **self.params)

    def scores(self, model, x, rows):
        if self.kind == "logreg":
            return logreg_predict_proba(model, x, rows)
        return forest_predict_proba(model, x, rows)


def _predict_sets(labels, scores, y_true, rule):
    if labels.single_label:
        pred = np.zeros_like(y_true)
        pred[np.arange(len(scores)), scores.argmax(axis=1)] = True
        return pred
    return multilabel_predict(scores, rule, y_true.sum(axis=1))


def evaluate(embedding, labels, split: Split, spec: ClassifierSpec, eval_on: str = "val",
             seed: int = 0, train_rows=None) -> ScoreReport:
    """Train on the training rows (or ``train_rows``) and score on ``eval_on``.

    Only the training rows and the ``eval_on`` rows have their labels read.
    """
    x = np.asarray(embedding)
    if x.shape[0] != len(labels.labels):
        raise DataError(f"embedding has {x.shape[0]} rows, label store covers {len(labels.labels)} nodes")
    if eval_on not in ("val", "test"):
        raise ValueError("eval_on must be 'val' or 'test'")
    rows = split.train if train_rows is None else np.sort(np.asarray(train_rows, dtype=np.int64))
    model = spec.fit(x, labels, rows, seed)
    target = split.part(eval_on)
    scores = spec.scores(model, x, target)
    y_true = labels.indicator(target)
    return f1_scores(y_true, _predict_sets(labels, scores, y_true, spec.rule))


def most_frequent_baseline(labels, split: Split, eval_on: str = "test") -> ScoreReport:
    """Predict the training split's most frequent label for every evaluated node."""
    counts = labels.indicator(split.train).sum(axis=0)
    best = int(np.argmax(counts))
    target = split.part(eval_on)
    y_true = labels.indicator(target)
    pred = np.zeros_like(y_true)
    pred[:, best] = True
    return f1_scores(y_true, pred)


def fraction_sweep(embedding, labels, split: Split, spec: ClassifierSpec, fractions, seed: int = 0,
                   eval_on: str = "test"):
    """Evaluate with nested, seeded subsets holding ceil(f * |train|) training rows."""
    fractions = [float(f) for f in fractions]
    if any(not 0 < f <= 1 for f in fractions):
        raise ValueError("fractions must lie in (0, 1]")
    order = np.random.default_rng([seed, 0xF5]).permutation(split.train)
    out = []
    for f in fractions:
        k = max(1, math.ceil(f * len(order) - 1e-9))
        out.append((f, evaluate(embedding, labels, split, spec, eval_on, seed, train_rows=order[:k])))
    return out
