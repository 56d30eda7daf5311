"""Shared numeric kernels: randomized SVD, standardization, gradient checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp


def truncated_svd(m, rank: int, oversample: int = 10, power_iters: int = 2, seed: int = 0):
    """Randomized rank-``rank`` SVD with a Gaussian sketch (Halko, Martinsson, Tropp).

    ``m`` may be dense or scipy sparse. Returns ``(U, s, Vt)`` with ``s``
    sorted in decreasing order.
    """
    n_rows, n_cols = m.shape
    if rank < 1 or rank > min(n_rows, n_cols):
        raise ValueError(f"rank {rank} outside [1, {min(n_rows, n_cols)}]")
    if sp.issparse(m):
        m = sp.csr_matrix(m, dtype=np.float64)
    else:
        m = np.asarray(m, dtype=np.float64)
    width = min(rank + oversample, n_rows, n_cols)
    rng = np.random.default_rng(seed)
    omega = rng.standard_normal((n_cols, width))
    q, _ = np.linalg.qr(m @ omega)
    for _ in range(power_iters):
        z, _ = np.linalg.qr(m.T @ q)
        q, _ = np.linalg.qr(m @ z)
    b = np.asarray((m.T @ q).T)
    ub, s, vt = np.linalg.svd(b, full_matrices=False)
    u = q @ ub
    return u[:, :rank], s[:rank], vt[:rank]


@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    std: np.ndarray


STD_FLOOR = 1e-12


def standardize_fit(x: np.ndarray, rows) -> Standardizer:
    """Column mean/std over ``rows`` only; near-constant columns keep std 1."""
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size == 0:
        raise ValueError("cannot standardize on an empty row subset")
    sub = np.asarray(x, dtype=np.float64)[rows]
    mean = sub.mean(axis=0)
    std = sub.std(axis=0)
    std = np.where(std < STD_FLOOR, 1.0, std)
    return Standardizer(mean, std)


def standardize_apply(x: np.ndarray, stats: Standardizer) -> np.ndarray:
    return (np.asarray(x, dtype=np.float64) - stats.mean) / stats.std


def finite_diff_check(f, grad, x, eps: float = 1e-6) -> float:
    """Max over coordinates of |g_fd - g| / max(1, |g|) using central differences."""
    x = np.array(x, dtype=np.float64, copy=True).ravel()
    g = np.asarray(grad(x), dtype=np.float64).ravel()
    worst = 0.0
    for i in range(x.size):
        old = x[i]
        x[i] = old + eps
        fp = f(x)
        x[i] = old - eps
        fm = f(x)
        x[i] = old
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise FloatingPointError(f"objective is not finite near coordinate {i}")
        fd = (fp - fm) / (2 * eps)
        worst = max(worst, abs(fd - g[i]) / max(1.0, abs(g[i])))
    return worst


def sigmoid(z):
    # split by sign so exp never overflows
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def log_sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    return -np.logaddexp(0.0, -z)


class NumericError(FloatingPointError):
    """Training produced non-finite values."""
