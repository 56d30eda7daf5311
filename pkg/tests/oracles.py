"""Independent reference computations used only by the tests."""

import numpy as np
from scipy import stats

import networkx as nx

from nodebench.graph import LabelStore, graph_from_edges


def jacobi_singular_values(a, tol=1e-14, max_sweeps=100):
    """One-sided Jacobi SVD: rotate column pairs until mutually orthogonal."""
    u = np.array(a, dtype=np.float64, copy=True)
    n = u.shape[1]
    for _ in range(max_sweeps):
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                alpha = u[:, i] @ u[:, i]
                beta = u[:, j] @ u[:, j]
                gamma = u[:, i] @ u[:, j]
                if abs(gamma) <= tol * np.sqrt(alpha * beta) or gamma == 0:
                    continue
                off = max(off, abs(gamma) / np.sqrt(alpha * beta))
                zeta = (beta - alpha) / (2 * gamma)
                t = np.sign(zeta) / (abs(zeta) + np.sqrt(1 + zeta * zeta)) if zeta != 0 else 1.0
                c = 1 / np.sqrt(1 + t * t)
                s = c * t
                ui = u[:, i].copy()
                u[:, i] = c * ui - s * u[:, j]
                u[:, j] = s * ui + c * u[:, j]
        if off < tol:
            break
    return np.sort(np.linalg.norm(u, axis=0))[::-1]


def chi2_ok(counts, probs, level=0.99):
    """Pearson goodness-of-fit at ``level`` over cells with positive expected mass."""
    counts = np.asarray(counts, dtype=np.float64)
    probs = np.asarray(probs, dtype=np.float64)
    keep = probs > 0
    if np.any(counts[~keep] > 0):
        return False
    exp = counts.sum() * probs[keep] / probs[keep].sum()
    stat = np.sum((counts[keep] - exp) ** 2 / exp)
    df = keep.sum() - 1
    return df == 0 or stat <= stats.chi2.ppf(level, df)


def brute_force_f1(true_sets, pred_sets, n_labels):
    """Macro/micro F1 by explicit per-label counting loops."""
    per = []
    TP = FP = FN = 0
    active = []
    for k in range(n_labels):
        tp = fp = fn = 0
        for t, p in zip(true_sets, pred_sets):
            if k in t and k in p:
                tp += 1
            elif k in p:
                fp += 1
            elif k in t:
                fn += 1
        TP, FP, FN = TP + tp, FP + fp, FN + fn
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        per.append(2 * prec * rec / (prec + rec) if prec + rec else 0.0)
        active.append(tp + fp + fn > 0)
    prec = TP / (TP + FP) if TP + FP else 0.0
    rec = TP / (TP + FN) if TP + FN else 0.0
    micro = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
    macro = float(np.mean([f for f, a in zip(per, active) if a])) if any(active) else 0.0
    return macro, micro


def nx_graph(g, directed=False, weighted=False):
    edges = list(g.edges(data="weight", default=1.0))
    nodes = list(g.nodes())
    idx = {v: i for i, v in enumerate(nodes)}
    src = [idx[u] for u, _, _ in edges]
    dst = [idx[v] for _, v, _ in edges]
    w = [float(x) if weighted else 1.0 for _, _, x in edges]
    return graph_from_edges(src, dst, w, len(nodes), directed, node_ids=[str(v) for v in nodes])


def two_cliques(k=10, bridge=False):
    g = nx.disjoint_union(nx.complete_graph(k), nx.complete_graph(k))
    if bridge:
        g.add_edge(0, k)
    return nx_graph(g)


def planted_partition(n_per=60, k=2, p_in=0.15, p_out=0.01, seed=0, directed=False):
    """Stochastic block model plus its ground-truth community labels."""
    g = nx.planted_partition_graph(k, n_per, p_in, p_out, seed=seed, directed=directed)
    graph = nx_graph(g, directed=directed)
    comm = [v // n_per for v in g.nodes()]
    task = "binary" if k == 2 else "multiclass"
    labels = LabelStore(task, tuple(f"c{c}" for c in range(k)), tuple((c,) for c in comm))
    return graph, labels
