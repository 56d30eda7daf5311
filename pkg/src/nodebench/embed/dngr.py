"""DNGR: random surfing, PPMI, and a stacked denoising autoencoder."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..graph import Graph, transition_matrix
from ..numerics import NumericError, sigmoid

log = logging.getLogger(__name__)

SURF_NNZ_BUDGET = 50_000_000


@dataclass(frozen=True)
class DngrParams:
    d: int = 128
    alpha: float = 0.98
    steps: int = 10
    layers: tuple | None = None  # None -> (512, d), or (2d, d) once d >= 512
    corruption: float = 0.2
    epochs: int = 50
    lr: float = 1e-3
    batch: int = 64
    activation: str = "sigmoid"
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if self.steps < 1 or self.epochs < 1 or self.batch < 1:
            raise ValueError("steps, epochs and batch must be >= 1")
        if not 0 <= self.corruption < 1:
            raise ValueError("corruption must lie in [0, 1)")
        if self.activation not in ("sigmoid", "linear"):
            raise ValueError("activation must be 'sigmoid' or 'linear'")
        sizes = self.hidden_sizes()
        if sizes[-1] != self.d or any(a <= b for a, b in zip(sizes, sizes[1:])):
            raise ValueError(f"layers must be strictly decreasing and end in d, got {sizes}")

    def hidden_sizes(self) -> tuple:
        if self.layers is not None:
            return tuple(int(h) for h in self.layers)
        return (512 if self.d < 512 else 2 * self.d, self.d)


def random_surf(graph: Graph, alpha: float, steps: int, nnz_budget: int = SURF_NNZ_BUDGET):
    """Sum over t=1..steps of alpha^t A^t: expected visit profile of a surfer per source row."""
    a = transition_matrix(graph)
    p = sp.identity(graph.n_nodes, format="csr")
    m = sp.csr_matrix((graph.n_nodes, graph.n_nodes))
    for t in range(1, steps + 1):
        p = alpha * (p @ a)
        m = m + p
        if m.nnz > nnz_budget:
            raise MemoryError(f"surf matrix exceeds {nnz_budget} entries at step {t}; use fewer steps")
    m = sp.csr_matrix(m)
    m.sort_indices()
    return m


def ppmi(m) -> sp.csr_matrix:
    """max(log(m_ij * total / (row_i * col_j)), 0) on the support of ``m``."""
    m = sp.csr_matrix(m, dtype=np.float64, copy=True)
    if m.nnz and m.data.min() < 0:
        raise ValueError("co-occurrence matrix must be nonnegative")
    total = m.sum()
    if total <= 0:
        raise ValueError("co-occurrence matrix has zero mass")
    rows = np.asarray(m.sum(axis=1)).ravel()
    cols = np.asarray(m.sum(axis=0)).ravel()
    r = np.repeat(np.arange(m.shape[0]), np.diff(m.indptr))
    with np.errstate(divide="ignore"):
        m.data = np.maximum(np.log(m.data) + np.log(total) - np.log(rows[r]) - np.log(cols[m.indices]), 0.0)
    m.eliminate_zeros()
    return m


@dataclass
class AutoencoderLayer:
    """Untied encoder/decoder pair; the decoder output is linear."""

    w: np.ndarray
    b: np.ndarray
    w_dec: np.ndarray
    b_dec: np.ndarray
    activation: str = "sigmoid"
    history: list = field(default_factory=list)

    @classmethod
    def init(cls, n_in: int, n_hidden: int, rng, activation="sigmoid"):
        bound = np.sqrt(6.0 / (n_in + n_hidden))
        return cls(
            rng.uniform(-bound, bound, (n_in, n_hidden)), np.zeros(n_hidden),
            rng.uniform(-bound, bound, (n_hidden, n_in)), np.zeros(n_in), activation,
        )

    def params(self):
        return [self.w, self.b, self.w_dec, self.b_dec]

    def encode(self, x):
        z = x @ self.w + self.b
        return sigmoid(z) if self.activation == "sigmoid" else z

    def loss_and_grads(self, x_clean, x_noisy):
        """Mean squared reconstruction error of the clean input from the noisy one."""
        n, n_in = x_clean.shape
        h = self.encode(x_noisy)
        out = h @ self.w_dec + self.b_dec
        diff = out - x_clean
        loss = float(np.mean(diff ** 2))
        g_out = 2.0 * diff / (n * n_in)
        g_wd = h.T @ g_out
        g_bd = g_out.sum(axis=0)
        g_h = g_out @ self.w_dec.T
        g_z = g_h * h * (1.0 - h) if self.activation == "sigmoid" else g_h
        return loss, [x_noisy.T @ g_z, g_z.sum(axis=0), g_wd, g_bd]


class _Adam:
    def __init__(self, params, lr, b1=0.9, b2=0.999, eps=1e-8):
        self.lr, self.b1, self.b2, self.eps = lr, b1, b2, eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params, grads):
        self.t += 1
        c1 = 1 - self.b1 ** self.t
        c2 = 1 - self.b2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.b1
            m += (1 - self.b1) * g
            v *= self.b2
            v += (1 - self.b2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


def _rows(x, idx):
    return x[idx].toarray() if sp.issparse(x) else x[idx]


def train_layer(x, n_hidden: int, params: DngrParams, rng, depth: int = 1) -> AutoencoderLayer:
    """Denoising pretraining of one layer on the rows of ``x`` (dense or sparse)."""
    n, n_in = x.shape
    layer = AutoencoderLayer.init(n_in, n_hidden, rng, params.activation)
    opt = _Adam(layer.params(), params.lr)
    for epoch in range(1, params.epochs + 1):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, params.batch):
            idx = order[start:start + params.batch]
            clean = _rows(x, idx)
            noisy = clean * (rng.random(clean.shape) >= params.corruption) if params.corruption else clean
            loss, grads = layer.loss_and_grads(clean, noisy)
            if not np.isfinite(loss):
                raise NumericError(f"autoencoder layer {depth} diverged in epoch {epoch}")
            opt.step(layer.params(), grads)
            total += loss * len(idx)
        layer.history.append(total / n)
    return layer


def encode_all(layer: AutoencoderLayer, x, batch: int = 1024) -> np.ndarray:
    return np.vstack([layer.encode(_rows(x, np.arange(s, min(s + batch, x.shape[0]))))
                      for s in range(0, x.shape[0], batch)])


def sdae_train(x, params: DngrParams):
    """Greedy layer-wise pretraining; returns (embedding, layers)."""
    layers = []
    h = x
    for depth, size in enumerate(params.hidden_sizes(), start=1):
        rng = np.random.default_rng([params.seed, 0xD7, depth])
        layer = train_layer(h, size, params, rng, depth)
        h = encode_all(layer, h)
        log.debug("layer %d: final loss %.5g", depth, layer.history[-1])
        layers.append(layer)
    return h, layers


def dngr_embed(graph: Graph, params: DngrParams) -> np.ndarray:
    if graph.n_nodes == 0:
        raise ValueError("empty graph")
    x = ppmi(random_surf(graph, params.alpha, params.steps))
    emb, _ = sdae_train(x, params)
    return emb
