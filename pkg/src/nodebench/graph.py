"""Graphs, node labels, transition matrices and alias sampling."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

log = logging.getLogger(__name__)

TASKS = ("binary", "multiclass", "multilabel")


class DataError(ValueError):
    """Raised for malformed or inconsistent input data."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Weighted adjacency in CSR form over contiguous node indices.

    ``node_ids[i]`` is the external token of internal node ``i``. Undirected
    graphs store both directions of every edge.
    """

    n_nodes: int
    directed: bool
    offsets: np.ndarray
    targets: np.ndarray
    weights: np.ndarray
    node_ids: tuple
    index: dict = field(repr=False)

    @property
    def n_entries(self) -> int:
        return int(self.targets.shape[0])

    @property
    def n_edges(self) -> int:
        """Edge count in the source file's sense (undirected pairs counted once)."""
        if self.directed:
            return self.n_entries
        return self.n_entries // 2

    def out_degree(self) -> np.ndarray:
        return np.diff(self.offsets)

    def out_strength(self) -> np.ndarray:
        return np.bincount(
            np.repeat(np.arange(self.n_nodes), self.out_degree()),
            weights=self.weights, minlength=self.n_nodes,
        )

    def neighbors(self, i: int) -> np.ndarray:
        return self.targets[self.offsets[i]:self.offsets[i + 1]]

    def adjacency(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            (self.weights, self.targets, self.offsets), shape=(self.n_nodes, self.n_nodes)
        )

    def validate(self) -> None:
        off = self.offsets
        if off[0] != 0 or off[-1] != self.n_entries or np.any(np.diff(off) < 0):
            raise DataError("invalid CSR offsets")
        if self.n_entries and (self.targets.min() < 0 or self.targets.max() >= self.n_nodes):
            raise DataError("edge target out of range")
        if np.any(~np.isfinite(self.weights)) or np.any(self.weights <= 0):
            raise DataError("edge weights must be positive and finite")
        rows = np.repeat(np.arange(self.n_nodes), np.diff(off))
        if np.any(rows == self.targets):
            raise DataError("self-loops are not allowed")
        if not self.directed:
            a = self.adjacency()
            if (a != a.T).nnz:
                raise DataError("undirected graph is not symmetric")


def graph_from_edges(src, dst, weights, n_nodes: int, directed: bool, node_ids=None) -> Graph:
    """Build a Graph from index arrays: drops self-loops, merges duplicates by summing."""
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    w = np.asarray(weights, dtype=np.float64)
    keep = src != dst
    src, dst, w = src[keep], dst[keep], w[keep]
    if not directed:
        src, dst = np.concatenate([src, dst]), np.concatenate([dst, src])
        w = np.concatenate([w, w])
    a = sp.coo_matrix((w, (src, dst)), shape=(n_nodes, n_nodes)).tocsr()
    a.sum_duplicates()
    a.sort_indices()
    if node_ids is None:
        node_ids = tuple(str(i) for i in range(n_nodes))
    node_ids = tuple(node_ids)
    g = Graph(
        n_nodes=n_nodes,
        directed=directed,
        offsets=a.indptr.astype(np.int64),
        targets=a.indices.astype(np.int64),
        weights=a.data.astype(np.float64),
        node_ids=node_ids,
        index={tok: i for i, tok in enumerate(node_ids)},
    )
    for arr in (g.offsets, g.targets, g.weights):
        arr.setflags(write=False)
    return g


def _content_lines(path):
    if not Path(path).is_file():
        raise DataError(f"file {path} does not exist")
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line[0] in "#%":
                continue
            yield lineno, line


def load_edge_list(path, directed: bool, weighted: bool = False, nodes=None) -> Graph:
    """Read a whitespace separated ``src dst [weight]`` file.

    Node indices follow first appearance in the file. Self-loops are dropped,
    parallel edges merged by weight sum, undirected input is symmetrized.
    ``nodes`` optionally pre-registers node ids (in order) so that isolated
    nodes are kept.
    """
    index: dict[str, int] = {}
    for tok in nodes or ():
        index.setdefault(str(tok), len(index))
    src, dst, wts = [], [], []
    n_loops = 0
    for lineno, line in _content_lines(path):
        parts = line.split()
        if len(parts) not in (2, 3):
            raise DataError(f"{path}:{lineno}: expected 'src dst [weight]', got {line!r}")
        w = 1.0
        if len(parts) == 3 and weighted:
            try:
                w = float(parts[2])
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad weight {parts[2]!r}") from None
            if not np.isfinite(w) or w <= 0:
                raise DataError(f"{path}:{lineno}: non-positive weight {w}")
        u = index.setdefault(parts[0], len(index))
        v = index.setdefault(parts[1], len(index))
        if u == v:
            n_loops += 1
        src.append(u)
        dst.append(v)
        wts.append(w)
    if not index:
        raise DataError(f"{path}: empty graph")
    if n_loops:
        log.info("%s: dropped %d self-loops", path, n_loops)
    g = graph_from_edges(src, dst, wts, len(index), directed, node_ids=list(index))
    log.info("%s: %d nodes, %d edges", path, g.n_nodes, g.n_edges)
    return g


def write_edge_list(graph: Graph, path) -> None:
    """Write ``graph`` so that :func:`load_edge_list` reproduces it."""
    rows = np.repeat(np.arange(graph.n_nodes), graph.out_degree())
    with open(path, "w", encoding="utf-8") as fh:
        # isolated nodes cannot be expressed in an edge list
        for u, v, w in zip(rows, graph.targets, graph.weights):
            if not graph.directed and u > v:
                continue
            fh.write(f"{graph.node_ids[u]} {graph.node_ids[v]} {float(w)!r}\n")


@dataclass(frozen=True, eq=False)
class LabelStore:
    """Per-node label sets. ``labels[i]`` is a tuple of label indices; empty means unlabeled."""

    task: str
    vocab: tuple
    labels: tuple

    def __post_init__(self):
        if self.task not in TASKS:
            raise DataError(f"unknown task {self.task!r}")
        k = len(self.vocab)
        if self.task == "binary" and k != 2:
            raise DataError(f"binary task needs exactly 2 labels, found {k}")
        for i, ls in enumerate(self.labels):
            if any(not 0 <= c < k for c in ls):
                raise DataError(f"node {i}: label index out of range")
            if ls and self.task != "multilabel" and len(ls) != 1:
                raise DataError(f"node {i}: {self.task} task needs exactly one label")

    @property
    def n_labels(self) -> int:
        return len(self.vocab)

    @property
    def single_label(self) -> bool:
        return self.task != "multilabel"

    def labeled_nodes(self) -> np.ndarray:
        return np.array([i for i, ls in enumerate(self.labels) if ls], dtype=np.int64)

    def indicator(self, rows) -> np.ndarray:
        """Boolean matrix (len(rows), n_labels)."""
        rows = np.asarray(rows, dtype=np.int64)
        y = np.zeros((len(rows), self.n_labels), dtype=bool)
        for r, i in enumerate(rows):
            y[r, list(self.labels[i])] = True
        return y

    def class_vector(self, rows) -> np.ndarray:
        """Single label per row (single-label tasks only)."""
        if not self.single_label:
            raise DataError("class_vector is undefined for multilabel tasks")
        return np.array([self.labels[i][0] for i in rows], dtype=np.int64)


def load_labels(path, graph: Graph, task: str, unknown: str = "error") -> LabelStore:
    """Read ``node_id label[,label...]`` lines; vocab is in first-appearance order.

    Lines naming nodes absent from ``graph`` raise unless ``unknown="skip"``,
    in which case they are dropped and counted in the log.
    """
    if task not in TASKS:
        raise DataError(f"unknown task {task!r}")
    vocab: dict[str, int] = {}
    per_node: list[set] = [set() for _ in range(graph.n_nodes)]
    n_skipped = 0
    for lineno, line in _content_lines(path):
        parts = line.split(None, 1)
        if len(parts) != 2:
            raise DataError(f"{path}:{lineno}: expected 'node_id label[,label...]'")
        node, toks = parts[0], [t.strip() for t in parts[1].split(",")]
        if node not in graph.index:
            if unknown == "skip":
                n_skipped += 1
                continue
            raise DataError(f"{path}:{lineno}: unknown node id {node!r}")
        if any(not t or any(ch.isspace() for ch in t) for t in toks):
            raise DataError(f"{path}:{lineno}: empty or malformed label token")
        if task != "multilabel" and len(toks) > 1:
            raise DataError(f"{path}:{lineno}: {task} line has {len(toks)} labels")
        i = graph.index[node]
        for t in toks:
            per_node[i].add(vocab.setdefault(t, len(vocab)))
        if task != "multilabel" and len(per_node[i]) > 1:
            raise DataError(f"{path}:{lineno}: node {node!r} has conflicting labels")
    store = LabelStore(task, tuple(vocab), tuple(tuple(sorted(s)) for s in per_node))
    n_lab = sum(1 for s in per_node if s)
    if n_skipped:
        log.warning("%s: skipped %d lines for nodes missing from the graph", path, n_skipped)
    log.info("%s: %d labeled of %d nodes, %d labels", path, n_lab, graph.n_nodes, len(vocab))
    return store


def transition_matrix(graph: Graph) -> sp.csr_matrix:
    """Row-stochastic D^-1 S. Rows of sink nodes become uniform teleport rows."""
    a = graph.adjacency().astype(np.float64)
    strength = np.asarray(a.sum(axis=1)).ravel()
    sinks = np.flatnonzero(strength == 0)
    inv = np.zeros_like(strength)
    inv[strength > 0] = 1.0 / strength[strength > 0]
    p = sp.diags(inv) @ a
    if len(sinks):
        log.warning("%d sink nodes get uniform teleport rows", len(sinks))
        n = graph.n_nodes
        tele = sp.csr_matrix(
            (np.full(len(sinks) * n, 1.0 / n), (np.repeat(sinks, n), np.tile(np.arange(n), len(sinks)))),
            shape=(n, n),
        )
        p = p + tele
    p = sp.csr_matrix(p)
    p.sort_indices()
    return p


@dataclass(frozen=True, eq=False)
class AliasTable:
    prob: np.ndarray
    alias: np.ndarray

    @property
    def n(self) -> int:
        return len(self.prob)

    def mass(self) -> np.ndarray:
        """Exact per-index probability encoded by the table."""
        m = self.prob / self.n
        np.add.at(m, self.alias, (1.0 - self.prob) / self.n)
        return m


def build_alias_table(probs) -> AliasTable:
    """Vose's alias method; input is normalized automatically."""
    p = np.asarray(probs, dtype=np.float64).ravel()
    if p.size == 0 or np.any(~np.isfinite(p)) or np.any(p < 0) or p.sum() <= 0:
        raise ValueError("alias table needs a non-empty, finite, nonnegative vector with positive mass")
    prob, alias = _alias_arrays(p)
    return AliasTable(prob, alias)


def _alias_arrays(p: np.ndarray):
    n = len(p)
    scaled = (p / p.sum()) * n
    prob = np.ones(n)
    alias = np.arange(n, dtype=np.int64)
    small = [i for i in range(n) if scaled[i] < 1.0]
    large = [i for i in range(n) if scaled[i] >= 1.0]
    while small and large:
        s, g = small.pop(), large.pop()
        prob[s] = scaled[s]
        alias[s] = g
        scaled[g] = (scaled[g] + scaled[s]) - 1.0
        (small if scaled[g] < 1.0 else large).append(g)
    # leftovers carry mass 1 up to rounding
    return prob, alias


def sample_alias(table: AliasTable, rng: np.random.Generator, size=None):
    i = rng.integers(table.n, size=size)
    u = rng.random(size=size)
    return np.where(u < table.prob[i], i, table.alias[i]) if size is not None else \
        (int(i) if u < table.prob[i] else int(table.alias[i]))
