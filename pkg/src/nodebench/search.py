"""Random search over joint embedding and classifier hyperparameters.

Every trial embeds the whole graph, trains the classifier on the training
rows and scores on validation. The best trial is then rebuilt from its
seeds and scored once on the test rows.
"""

from __future__ import annotations

import logging
import math
import time
import traceback
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .embed import METHODS, embed
from .evaluation import AuditedLabels, ClassifierSpec, ScoreReport, Split, evaluate

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class UniformInt:
    lo: int
    hi: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"uniform_int needs lo < hi, got ({self.lo}, {self.hi})")

    def draw(self, rng):
        return int(rng.integers(self.lo, self.hi + 1))


@dataclass(frozen=True)
class UniformReal:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"uniform_real needs lo < hi, got ({self.lo}, {self.hi})")

    def draw(self, rng):
        return float(rng.uniform(self.lo, self.hi))


@dataclass(frozen=True)
class LogUniform:
    lo: float
    hi: float
    integer: bool = False

    def __post_init__(self):
        if not 0 < self.lo < self.hi:
            raise ValueError(f"log_uniform needs 0 < lo < hi, got ({self.lo}, {self.hi})")

    def draw(self, rng):
        v = math.exp(rng.uniform(math.log(self.lo), math.log(self.hi)))
        return int(round(v)) if self.integer else float(v)


@dataclass(frozen=True)
class Choice:
    values: tuple

    def __post_init__(self):
        if len(self.values) == 0:
            raise ValueError("choice needs at least one value")

    def draw(self, rng):
        v = self.values[int(rng.integers(len(self.values)))]
        return v.item() if isinstance(v, np.generic) else v


def parse_param(spec):
    """Build a parameter distribution from its JSON form, e.g. ``["log_uniform", 1e-5, 1]``.

    Scalars are fixed values (a singleton choice).
    """
    if isinstance(spec, (UniformInt, UniformReal, LogUniform, Choice)):
        return spec
    if not isinstance(spec, (list, tuple)) or not spec or not isinstance(spec[0], str):
        return Choice((spec,))
    kind, *args = spec
    if kind == "uniform_int":
        return UniformInt(int(args[0]), int(args[1]))
    if kind == "uniform_real":
        return UniformReal(float(args[0]), float(args[1]))
    if kind == "log_uniform":
        return LogUniform(float(args[0]), float(args[1]), bool(args[2]) if len(args) > 2 else False)
    if kind == "choice":
        return Choice(tuple(args[0]) if len(args) == 1 and isinstance(args[0], list) else tuple(args))
    raise ValueError(f"unknown distribution {kind!r}")


@dataclass
class HyperSpace:
    embedding: dict
    classifier: dict

    def __post_init__(self):
        self.embedding = {k: parse_param(v) for k, v in self.embedding.items()}
        self.classifier = {k: parse_param(v) for k, v in self.classifier.items()}

    def with_overrides(self, embedding=None, classifier=None) -> "HyperSpace":
        return HyperSpace({**self.embedding, **(embedding or {})},
                          {**self.classifier, **(classifier or {})})


@dataclass(frozen=True)
class HyperSample:
    embedding: dict
    classifier: dict

    def describe(self) -> str:
        items = [f"{k}={_fmt_value(v)}" for k, v in self.embedding.items()]
        items += [f"clf.{k}={_fmt_value(v)}" for k, v in self.classifier.items()]
        return ";".join(items)


def _fmt_value(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def sample(space: HyperSpace, rng) -> HyperSample:
    """Independent draws in declaration order, embedding parameters first."""
    return HyperSample(
        {k: d.draw(rng) for k, d in space.embedding.items()},
        {k: d.draw(rng) for k, d in space.classifier.items()},
    )


def default_space(method: str, classifier: str, n_edges: int = 1000) -> HyperSpace:
    dim = UniformInt(16, 1000)
    emb = {
        "node2vec": {
            "d": dim,
            "p": Choice((0.25, 0.5, 0.75, 1, 2, 4)),
            "q": Choice((0.25, 0.5, 0.75, 1, 2, 4)),
            "num_walks": UniformInt(5, 50),
            "walk_len": UniformInt(10, 80),
            "window": Choice((5, 10)),
            "negatives": Choice((5,)),
            "epochs": Choice((1, 2, 5)),
            "lr": Choice((0.025,)),
        },
        "line": {
            "d": dim,
            "order": Choice(("first", "second", "both")),
            "samples": LogUniform(10 * max(n_edges, 1), 200 * max(n_edges, 1), integer=True),
            "negatives": Choice((5,)),
            "lr": Choice((0.025,)),
        },
        "grarep": {"d": dim, "K": UniformInt(1, 6)},
        "dngr": {
            "d": UniformInt(16, 1000),
            "alpha": Choice((0.9, 0.95, 0.98)),
            "steps": Choice((10,)),
            "corruption": UniformReal(0.0, 0.4),
            "epochs": Choice((50,)),
            "batch": Choice((64,)),
        },
    }
    clf = {
        "logreg": {
            "l2": LogUniform(1e-5, 1.0),
            "epochs": UniformInt(20, 200),
            "lr": Choice((0.1,)),
        },
        "forest": {
            "n_trees": UniformInt(50, 500),
            "max_depth": Choice((8, 16, 32, None)),
            "mtry": Choice(("sqrt", "log2", "all")),
            "min_leaf": Choice((1,)),
        },
    }
    if method not in emb:
        raise ValueError(f"unknown method {method!r}")
    if classifier not in clf:
        raise ValueError(f"unknown classifier {classifier!r}")
    return HyperSpace(emb[method], clf[classifier])


@dataclass
class TrialRecord:
    trial: int
    sample: HyperSample
    embed_seed: int
    clf_seed: int
    status: str = "ok"
    validation: ScoreReport | None = None
    embed_seconds: float = 0.0
    train_seconds: float = 0.0
    error: str = ""
    label_reads: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def trial_seeds(master_seed: int, trial: int):
    """(sampling rng, embedding seed, classifier seed) derived from (master_seed, trial) only."""
    ss = np.random.SeedSequence([master_seed, trial])
    s_sample, s_embed, s_clf = ss.spawn(3)
    return (np.random.default_rng(s_sample),
            int(s_embed.generate_state(1)[0] >> 1),
            int(s_clf.generate_state(1)[0] >> 1))


def _clip_dimension(values: dict, method: str, n_nodes: int) -> dict:
    # factorization methods cannot exceed the node count per block
    values = dict(values)
    if method in ("grarep",) and "d" in values:
        values["d"] = min(values["d"], n_nodes * values.get("K", 4))
    if method == "grarep" and "d" in values and values["d"] < values.get("K", 4):
        values["K"] = values["d"]
    return values


def embed_trial(graph, method: str, record: TrialRecord):
    """Rebuild the embedding of a recorded trial from its sample and seed."""
    return embed(graph, method, _clip_dimension(record.sample.embedding, method, graph.n_nodes),
                 record.embed_seed)


def _run_trial(graph, base_labels, method, spec_kind, rule, space, split, master_seed, t):
    rng, embed_seed, clf_seed = trial_seeds(master_seed, t)
    hs = sample(space, rng)
    rec = TrialRecord(t, hs, embed_seed, clf_seed)
    labels = AuditedLabels(base_labels, split)
    try:
        t0 = time.perf_counter()
        x = embed_trial(graph, method, rec)
        t1 = time.perf_counter()
        spec = ClassifierSpec(spec_kind, dict(hs.classifier), rule)
        rec.validation = evaluate(x, labels, split, spec, "val", clf_seed)
        rec.embed_seconds = t1 - t0
        rec.train_seconds = time.perf_counter() - t1
        if not np.all(np.isfinite([rec.validation.micro_f1, rec.validation.macro_f1])):
            raise FloatingPointError("non-finite validation score")
    except (ArithmeticError, MemoryError, ValueError) as exc:
        rec.status = "failed"
        rec.error = f"{type(exc).__name__}: {exc}"
        log.warning("trial %d failed: %s", t, rec.error)
        log.debug("%s", traceback.format_exc())
    rec.label_reads = dict(labels.reads)
    return rec


@dataclass
class SearchResult:
    best: TrialRecord
    test: ScoreReport
    trials: list
    reads: dict = field(default_factory=dict)


def select_best(trials) -> TrialRecord:
    """Highest validation micro-F1; the earliest trial wins ties."""
    ok = [r for r in trials if r.ok]
    if not ok:
        raise RuntimeError("all trials failed")
    return max(ok, key=lambda r: (r.validation.micro_f1, -r.trial))


def run_search(graph, labels, method: str, classifier: str, space: HyperSpace | None = None,
               trials: int = 25, split: Split | None = None, master_seed: int = 0,
               rule="top_k_true", workers: int = 1) -> SearchResult:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if split is None:
        raise ValueError("a prepared split is required")
    space = space or default_space(method, classifier, graph.n_edges)
    args = (graph, labels, method, classifier, rule, space, split, master_seed)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_trial, *args, t) for t in range(trials)]
            records = [f.result() for f in futures]
    else:
        records = [_run_trial(*args, t) for t in range(trials)]
    reads = Counter()
    for r in records:
        reads.update(r.label_reads)
    if reads["test"]:
        raise AssertionError("test labels were read during the search")
    best = select_best(records)
    x = embed_trial(graph, method, best)
    spec = ClassifierSpec(classifier, dict(best.sample.classifier), rule)
    audited = AuditedLabels(labels, split)
    test = evaluate(x, audited, split, spec, "test", best.clf_seed)
    reads.update(audited.reads)
    log.info("best trial %d: val micro %.4f, test micro %.4f",
             best.trial, best.validation.micro_f1, test.micro_f1)
    return SearchResult(best, test, records, dict(reads))
