"""GraRep: factorize log-shifted k-step transition probabilities, one block per step."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..graph import Graph, transition_matrix
from ..numerics import truncated_svd

log = logging.getLogger(__name__)

NNZ_BUDGET = 50_000_000
DENSE_SWITCH = 0.25


class DensityError(MemoryError):
    pass


@dataclass(frozen=True)
class GraRepParams:
    d: int = 128
    K: int = 4
    beta: float | None = None  # None -> 1/N
    seed: int = 0
    nnz_budget: int = NNZ_BUDGET

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if self.d < self.K:
            raise ValueError("d must be >= K")
        if self.beta is not None and self.beta <= 0:
            raise ValueError("beta must be positive")

    def step_dims(self) -> list[int]:
        base, extra = divmod(self.d, self.K)
        return [base + (1 if k < extra else 0) for k in range(self.K)]


def transition_powers(a: sp.csr_matrix, K: int, nnz_budget: int = NNZ_BUDGET):
    """Yield A^1..A^K; switches to dense storage once the power fills up."""
    n = a.shape[0]
    ak = a.copy()
    for k in range(1, K + 1):
        if k > 1:
            ak = ak @ a
            if sp.issparse(ak) and ak.nnz > DENSE_SWITCH * n * n:
                ak = ak.toarray()
        nnz = ak.nnz if sp.issparse(ak) else n * n
        if nnz > nnz_budget:
            raise DensityError(
                f"A^{k} holds {nnz} entries, above the budget of {nnz_budget}; use a smaller K"
            )
        yield k, ak


def log_transition(ak, beta: float) -> sp.csr_matrix | np.ndarray:
    """max(log(A_ij / colsum_j) - log(beta), 0) on the support of ``ak``."""
    colsum = np.asarray(ak.sum(axis=0)).ravel()
    if sp.issparse(ak):
        x = sp.csr_matrix(ak, copy=True)
        cols = x.indices
        x.data = np.maximum(np.log(x.data / colsum[cols]) - np.log(beta), 0.0)
        x.eliminate_zeros()
        return x
    with np.errstate(divide="ignore", invalid="ignore"):
        x = np.log(ak / colsum[None, :]) - np.log(beta)
    x[~np.isfinite(x)] = 0.0
    return np.maximum(x, 0.0)


def _variance_normalize(w):
    std = w.std(axis=0)
    return w / np.where(std > 1e-12, std, 1.0)


def grarep_embed(graph: Graph, params: GraRepParams) -> np.ndarray:
    n = graph.n_nodes
    if n == 0:
        raise ValueError("empty graph")
    beta = params.beta if params.beta is not None else 1.0 / n
    dims = params.step_dims()
    if max(dims) > n:
        raise ValueError(f"per-step dimension {max(dims)} exceeds node count {n}")
    blocks = []
    for k, ak in transition_powers(transition_matrix(graph), params.K, params.nnz_budget):
        x = log_transition(ak, beta)
        seed = int(np.random.SeedSequence([params.seed, k]).generate_state(1)[0])
        u, s, _ = truncated_svd(x, dims[k - 1], seed=seed)
        blocks.append(_variance_normalize(u * np.sqrt(s)))
        log.debug("GraRep step %d: %d dims, top singular value %.4g", k, dims[k - 1], s[0])
    return np.hstack(blocks)
