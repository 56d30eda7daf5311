"""node2vec: p/q-biased second-order random walks fed to skip-gram with negative sampling."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..graph import Graph
from ..numerics import NumericError, log_sigmoid, sigmoid
from . import _kernels as K

log = logging.getLogger(__name__)

EDGE_TABLE_MAX_EDGES = 1_000_000
EDGE_TABLE_MAX_ENTRIES = 20_000_000
NEG_TABLE_SIZE = 1_000_000


@dataclass(frozen=True)
class Node2vecParams:
    d: int = 128
    p: float = 1.0
    q: float = 1.0
    num_walks: int = 10
    walk_len: int = 80
    window: int = 10
    negatives: int = 5
    epochs: int = 5
    lr: float = 0.025
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if self.p <= 0 or self.q <= 0:
            raise ValueError("p and q must be positive")
        for name in ("num_walks", "walk_len", "window", "negatives", "epochs", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.lr <= 0:
            raise ValueError("lr must be positive")


class WalkSampler:
    """Alias tables for one graph and one (p, q) pair."""

    def __init__(self, graph: Graph, p: float, q: float, edge_tables: bool | None = None):
        self.graph = graph
        self.inv_p = 1.0 / p
        self.inv_q = 1.0 / q
        g = graph
        self.node_prob = np.ones(max(g.n_entries, 1))
        self.node_alias = np.zeros(max(g.n_entries, 1), dtype=np.int64)
        K.build_node_tables(g.offsets, g.weights, self.node_prob, self.node_alias)
        eoff = K.edge_table_offsets(g.offsets, g.targets)
        if edge_tables is None:
            edge_tables = g.n_entries <= EDGE_TABLE_MAX_EDGES and eoff[-1] <= EDGE_TABLE_MAX_ENTRIES
        self.edge_tables = bool(edge_tables)
        self.eoff = eoff
        if self.edge_tables:
            self.edge_prob = np.ones(max(eoff[-1], 1))
            self.edge_alias = np.zeros(max(eoff[-1], 1), dtype=np.int64)
            K.build_edge_tables(g.offsets, g.targets, g.weights, self.inv_p, self.inv_q,
                                eoff, self.edge_prob, self.edge_alias)
        else:
            log.info("second-order tables skipped (%d entries); biasing on the fly", eoff[-1])
            self.edge_prob = np.ones(1)
            self.edge_alias = np.zeros(1, dtype=np.int64)

    def walks(self, num_walks: int, walk_len: int, seed: int, rounds=None) -> np.ndarray:
        """Every node starts one walk per round, in a seeded shuffled order."""
        g = self.graph
        rounds = np.arange(num_walks) if rounds is None else np.asarray(rounds)
        starts = np.stack([
            np.random.default_rng([seed, int(r)]).permutation(g.n_nodes) for r in rounds
        ]).astype(np.int64)
        return K.node2vec_walks(
            g.offsets, g.targets, g.weights, starts, rounds.astype(np.int64), walk_len,
            self.inv_p, self.inv_q, self.node_prob, self.node_alias, self.edge_tables,
            self.eoff, self.edge_prob, self.edge_alias, seed,
        )

    def step_counts(self, prev: int, cur: int, n_draws: int, seed: int = 0) -> np.ndarray:
        """Histogram of ``n_draws`` biased steps out of ``cur`` given arrival from ``prev``."""
        g = self.graph
        return K.next_step_counts(
            g.offsets, g.targets, g.weights, prev, cur, self.inv_p, self.inv_q,
            self.edge_tables, self.eoff, self.edge_prob, self.edge_alias, n_draws, seed,
        )

    def step_distribution(self, prev: int, cur: int) -> np.ndarray:
        """Exact normalized next-step probabilities over ``graph.neighbors(cur)``."""
        g = self.graph
        buf = np.empty(max(g.out_degree()[cur], 1))
        k = K.bias_weights(g.offsets, g.targets, g.weights, prev, cur, self.inv_p, self.inv_q, buf)
        return buf[:k] / buf[:k].sum()


def generate_walks(graph: Graph, params: Node2vecParams) -> np.ndarray:
    """Walk corpus as an int32 array of shape (num_walks * n_nodes, walk_len + 1)."""
    if graph.n_nodes == 0:
        raise ValueError("empty graph")
    sampler = WalkSampler(graph, params.p, params.q)
    return sampler.walks(params.num_walks, params.walk_len, params.seed)


def negative_table(corpus: np.ndarray, n_nodes: int, size: int = NEG_TABLE_SIZE) -> np.ndarray:
    """Unigram^0.75 table: node ``i`` fills a share of slots proportional to count_i**0.75."""
    counts = np.bincount(corpus.ravel(), minlength=n_nodes).astype(np.float64)
    mass = counts ** 0.75
    cum = np.cumsum(mass) / mass.sum()
    slots = (np.arange(size) + 0.5) / size
    return np.searchsorted(cum, slots, side="right").clip(max=n_nodes - 1).astype(np.int64)


def init_vectors(n: int, d: int, seed: int):
    rng = np.random.default_rng([seed, 0xE3B])
    w_in = (rng.random((n, d)) - 0.5) / d
    w_out = np.zeros((n, d))
    return w_in, w_out


def train_sgns(corpus: np.ndarray, n_nodes: int, params: Node2vecParams) -> np.ndarray:
    corpus = np.ascontiguousarray(corpus, dtype=np.int32)
    if corpus.size == 0:
        raise ValueError("empty walk corpus")
    w_in, w_out = init_vectors(n_nodes, params.d, params.seed)
    table = negative_table(corpus, n_nodes)
    if params.workers > 1:
        K.sgns_train_parallel(corpus, w_in, w_out, params.window, params.negatives,
                              params.epochs, params.lr, table, params.seed, params.workers)
    else:
        K.sgns_train(corpus, w_in, w_out, params.window, params.negatives,
                     params.epochs, params.lr, table, params.seed)
    if not np.all(np.isfinite(w_in)):
        raise NumericError("skip-gram training diverged")
    return w_in


def node2vec_embed(graph: Graph, params: Node2vecParams) -> np.ndarray:
    return train_sgns(generate_walks(graph, params), graph.n_nodes, params)


def sgns_loss(u, v_pos, v_negs) -> float:
    """Negative-sampling loss of one (center, context, negatives) triple."""
    return float(-log_sigmoid(u @ v_pos) - log_sigmoid(-(v_negs @ u)).sum())


def sgns_grad(u, v_pos, v_negs):
    """Gradients of :func:`sgns_loss` w.r.t. ``u``, ``v_pos`` and each row of ``v_negs``."""
    gp = sigmoid(u @ v_pos) - 1.0
    gn = sigmoid(v_negs @ u)
    du = gp * v_pos + gn @ v_negs
    return du, gp * u, np.outer(gn, u)
