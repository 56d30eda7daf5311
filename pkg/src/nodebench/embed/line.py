"""LINE: first- and second-order proximity trained by weighted edge sampling."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from ..graph import Graph, build_alias_table
from ..numerics import NumericError, log_sigmoid
from . import _kernels as K
from .node2vec import sgns_grad as edge_grad  # same objective, one edge at a time

log = logging.getLogger(__name__)

ORDERS = ("first", "second", "both")


@dataclass(frozen=True)
class LineParams:
    d: int = 128
    order: str = "both"
    samples: int | None = None  # None -> 100 * |E|
    negatives: int = 5
    lr: float = 0.025
    seed: int = 0

    def __post_init__(self):
        if self.order not in ORDERS:
            raise ValueError(f"order must be one of {ORDERS}")
        if self.d < (2 if self.order == "both" else 1):
            raise ValueError("d too small for the requested order")
        if self.samples is not None and self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.negatives < 1:
            raise ValueError("negatives must be >= 1")

    def split(self) -> tuple[int, int]:
        """Columns given to (first, second) order; odd remainders go to first."""
        if self.order == "first":
            return self.d, 0
        if self.order == "second":
            return 0, self.d
        return self.d - self.d // 2, self.d // 2


def edge_arrays(graph: Graph, symmetric: bool):
    """Source, destination and weight per stored CSR entry, optionally symmetrized."""
    src = np.repeat(np.arange(graph.n_nodes), graph.out_degree())
    dst, w = graph.targets, graph.weights
    if symmetric and graph.directed:
        src, dst = np.concatenate([src, dst]), np.concatenate([dst, src])
        w = np.concatenate([w, w])
    return src.astype(np.int64), np.asarray(dst, dtype=np.int64), np.asarray(w, dtype=np.float64)


def _train_order(graph: Graph, d: int, second: bool, samples: int, params: LineParams):
    src, dst, w = edge_arrays(graph, symmetric=not second)
    edges = build_alias_table(w)
    strength = np.bincount(src, weights=w, minlength=graph.n_nodes)
    negs = build_alias_table(strength ** 0.75)
    seed = int(np.random.SeedSequence([params.seed, 2 if second else 1]).generate_state(1)[0])
    rng = np.random.default_rng(seed)
    emb = (rng.random((graph.n_nodes, d)) - 0.5) / d
    ctx = np.zeros((graph.n_nodes, d)) if second else emb
    K.line_train(src, dst, edges.prob, edges.alias, negs.prob, negs.alias,
                 emb, ctx, samples, params.negatives, params.lr, seed)
    if not np.all(np.isfinite(emb)):
        raise NumericError("LINE training diverged")
    return emb


def _l2_rows(x):
    norm = np.linalg.norm(x, axis=1, keepdims=True)
    return x / np.where(norm > 0, norm, 1.0)


def line_embed(graph: Graph, params: LineParams) -> np.ndarray:
    if graph.n_entries == 0:
        raise ValueError("LINE needs at least one edge")
    if graph.directed and params.order in ("first", "both"):
        warnings.warn("first-order proximity treats directed edges as undirected", stacklevel=2)
    samples = params.samples or 100 * graph.n_edges
    d1, d2 = params.split()
    parts = []
    if d1:
        parts.append(_train_order(graph, d1, False, samples, params))
    if d2:
        parts.append(_train_order(graph, d2, True, samples, params))
    if params.order == "both":
        parts = [_l2_rows(p) for p in parts]
    return np.hstack(parts)


def edge_loss(u_i, x_j, x_negs) -> float:
    """Sampled objective of one edge; ``x`` are vertex vectors (first order) or contexts (second)."""
    return float(-log_sigmoid(u_i @ x_j) - log_sigmoid(-(x_negs @ u_i)).sum())
