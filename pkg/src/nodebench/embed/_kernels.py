"""Compiled inner loops shared by the walk- and sampling-based embedders.

Every kernel draws randomness from an explicit splitmix64 state so results
depend only on the seeds handed in, never on numba's global generator.
"""

import numpy as np
from numba import njit, prange

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0


@njit(cache=True)
def mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def derive_seed(a, b, c):
    """Hash three integers into one 64-bit stream seed."""
    z = mix64(np.uint64(a) + _GOLDEN)
    z = mix64(z ^ (np.uint64(b) + _GOLDEN))
    return mix64(z ^ (np.uint64(c) + _GOLDEN))


@njit(cache=True)
def next_u64(state):
    state[0] += _GOLDEN
    return mix64(state[0])


@njit(cache=True)
def next_float(state):
    return (next_u64(state) >> np.uint64(11)) * _INV53


@njit(cache=True)
def next_int(state, n):
    return np.int64(next_float(state) * n)


@njit(cache=True)
def alias_build(p, prob, alias, start):
    """Fill prob/alias[start:start+len(p)] with Vose tables for ``p`` (local indices)."""
    n = p.shape[0]
    total = 0.0
    for i in range(n):
        total += p[i]
    scaled = np.empty(n)
    small = np.empty(n, dtype=np.int64)
    large = np.empty(n, dtype=np.int64)
    ns = 0
    nl = 0
    for i in range(n):
        scaled[i] = p[i] * n / total
        prob[start + i] = 1.0
        alias[start + i] = i
        if scaled[i] < 1.0:
            small[ns] = i
            ns += 1
        else:
            large[nl] = i
            nl += 1
    while ns > 0 and nl > 0:
        ns -= 1
        s = small[ns]
        nl -= 1
        g = large[nl]
        prob[start + s] = scaled[s]
        alias[start + s] = g
        scaled[g] = (scaled[g] + scaled[s]) - 1.0
        if scaled[g] < 1.0:
            small[ns] = g
            ns += 1
        else:
            large[nl] = g
            nl += 1


@njit(cache=True)
def alias_draw(prob, alias, start, n, state):
    i = next_int(state, n)
    if next_float(state) < prob[start + i]:
        return i
    return alias[start + i]


@njit(cache=True)
def has_edge(offsets, targets, u, v):
    lo = offsets[u]
    hi = offsets[u + 1]
    while lo < hi:
        mid = (lo + hi) // 2
        t = targets[mid]
        if t == v:
            return True
        if t < v:
            lo = mid + 1
        else:
            hi = mid
    return False


@njit(cache=True)
def bias_weights(offsets, targets, weights, prev, cur, inv_p, inv_q, out):
    """Unnormalized node2vec weights for leaving ``cur`` after arriving from ``prev``."""
    a = offsets[cur]
    b = offsets[cur + 1]
    for k in range(a, b):
        x = targets[k]
        if x == prev:
            out[k - a] = weights[k] * inv_p
        elif has_edge(offsets, targets, prev, x):
            out[k - a] = weights[k]
        else:
            out[k - a] = weights[k] * inv_q
    return b - a


@njit(cache=True)
def build_node_tables(offsets, weights, prob, alias):
    n = offsets.shape[0] - 1
    for v in range(n):
        a = offsets[v]
        b = offsets[v + 1]
        if b > a:
            alias_build(weights[a:b], prob, alias, a)


@njit(cache=True)
def edge_table_offsets(offsets, targets):
    m = targets.shape[0]
    eoff = np.empty(m + 1, dtype=np.int64)
    eoff[0] = 0
    for e in range(m):
        v = targets[e]
        eoff[e + 1] = eoff[e] + offsets[v + 1] - offsets[v]
    return eoff


@njit(cache=True)
def build_edge_tables(offsets, targets, weights, inv_p, inv_q, eoff, prob, alias):
    n = offsets.shape[0] - 1
    maxdeg = 0
    for v in range(n):
        maxdeg = max(maxdeg, offsets[v + 1] - offsets[v])
    buf = np.empty(maxdeg)
    for t in range(n):
        for e in range(offsets[t], offsets[t + 1]):
            v = targets[e]
            k = bias_weights(offsets, targets, weights, t, v, inv_p, inv_q, buf)
            if k > 0:
                alias_build(buf[:k], prob, alias, eoff[e])


@njit(cache=True)
def _one_walk(offsets, targets, weights, n_nodes, start, walk_len, inv_p, inv_q,
              node_prob, node_alias, use_edge_tables, eoff, edge_prob, edge_alias,
              buf, state, out):
    out[0] = start
    cur = start
    prev = -1
    edge = -1
    for step in range(1, walk_len + 1):
        a = offsets[cur]
        deg = offsets[cur + 1] - a
        if deg == 0:
            # sink: restart at a uniformly random node
            nxt = next_int(state, n_nodes)
            prev = -1
            edge = -1
        elif prev < 0:
            j = alias_draw(node_prob, node_alias, a, deg, state)
            nxt = targets[a + j]
            prev = cur
            edge = a + j
        else:
            if use_edge_tables:
                j = alias_draw(edge_prob, edge_alias, eoff[edge], deg, state)
            else:
                k = bias_weights(offsets, targets, weights, prev, cur, inv_p, inv_q, buf)
                total = 0.0
                for i in range(k):
                    total += buf[i]
                r = next_float(state) * total
                j = k - 1
                acc = 0.0
                for i in range(k):
                    acc += buf[i]
                    if r < acc:
                        j = i
                        break
            nxt = targets[a + j]
            prev = cur
            edge = a + j
        out[step] = nxt
        cur = nxt


@njit(cache=True)
def node2vec_walks(offsets, targets, weights, starts, rounds, walk_len, inv_p, inv_q,
                   node_prob, node_alias, use_edge_tables, eoff, edge_prob, edge_alias, seed):
    """``starts[r]`` is the shuffled start order for round ``rounds[r]``."""
    n_nodes = offsets.shape[0] - 1
    n_rounds, per_round = starts.shape
    walks = np.empty((n_rounds * per_round, walk_len + 1), dtype=np.int32)
    maxdeg = 1
    for v in range(n_nodes):
        maxdeg = max(maxdeg, offsets[v + 1] - offsets[v])
    buf = np.empty(maxdeg)
    state = np.zeros(1, dtype=np.uint64)
    for r in range(n_rounds):
        for k in range(per_round):
            s = starts[r, k]
            state[0] = derive_seed(seed, s, rounds[r])
            _one_walk(offsets, targets, weights, n_nodes, s, walk_len, inv_p, inv_q,
                      node_prob, node_alias, use_edge_tables, eoff, edge_prob, edge_alias,
                      buf, state, walks[r * per_round + k])
    return walks


@njit(cache=True)
def next_step_counts(offsets, targets, weights, prev, cur, inv_p, inv_q,
                     use_edge_tables, eoff, edge_prob, edge_alias, n_draws, seed):
    """Empirical distribution of the biased step out of ``cur``; test support."""
    a = offsets[cur]
    deg = offsets[cur + 1] - a
    counts = np.zeros(deg, dtype=np.int64)
    edge = -1
    for k in range(offsets[prev], offsets[prev + 1]):
        if targets[k] == cur:
            edge = k
    buf = np.empty(max(deg, 1))
    state = np.zeros(1, dtype=np.uint64)
    state[0] = derive_seed(seed, prev, cur)
    for _ in range(n_draws):
        if use_edge_tables:
            j = alias_draw(edge_prob, edge_alias, eoff[edge], deg, state)
        else:
            k = bias_weights(offsets, targets, weights, prev, cur, inv_p, inv_q, buf)
            total = 0.0
            for i in range(k):
                total += buf[i]
            r = next_float(state) * total
            j = k - 1
            acc = 0.0
            for i in range(k):
                acc += buf[i]
                if r < acc:
                    j = i
                    break
        counts[j] += 1
    return counts


@njit(cache=True)
def _fast_sigmoid(z):
    if z > 30.0:
        return 1.0
    if z < -30.0:
        return 0.0
    return 1.0 / (1.0 + np.exp(-z))


@njit(cache=True, fastmath=True)
def sgns_update(src, i, dst, pos, negs, n_neg, lr, err, track=True):
    """One SGD step on -log s(u.v_pos) - sum log s(-u.v_neg) for u = src[i].

    Output vectors are updated with the pre-step ``u``; ``u`` is updated last.
    Returns the pair loss before the step (0 when ``track`` is off).
    """
    d = src.shape[1]
    for k in range(d):
        err[k] = 0.0
    loss = 0.0
    for t in range(n_neg + 1):
        if t == 0:
            o = pos
            label = 1.0
        else:
            o = negs[t - 1]
            label = 0.0
        dot = 0.0
        for k in range(d):
            dot += src[i, k] * dst[o, k]
        s = _fast_sigmoid(dot)
        if track:
            if label > 0:
                loss -= np.log(max(s, 1e-300))
            else:
                loss -= np.log(max(1.0 - s, 1e-300))
        g = (label - s) * lr
        for k in range(d):
            err[k] += g * dst[o, k]
        for k in range(d):
            dst[o, k] += g * src[i, k]
    for k in range(d):
        src[i, k] += err[k]
    return loss


@njit(cache=True, fastmath=True)
def sgns_train(walks, w_in, w_out, window, negatives, epochs, lr0, neg_table, seed):
    """Deterministic single-threaded skip-gram with negative sampling over ``walks``.

    Each center draws an effective window in 1..window, as word2vec does.
    """
    n_walks, length = walks.shape
    d = w_in.shape[1]
    err = np.empty(d)
    negs = np.empty(negatives, dtype=np.int64)
    state = np.zeros(1, dtype=np.uint64)
    state[0] = derive_seed(seed, 0x5EED, 0)
    total = float(epochs) * n_walks * length
    done = 0.0
    tsize = neg_table.shape[0]
    for ep in range(epochs):
        for w in range(n_walks):
            for i in range(length):
                lr = lr0 * max(0.01, 1.0 - done / total)
                done += 1.0
                c = walks[w, i]
                win = window - next_int(state, window)
                lo = max(0, i - win)
                hi = min(length, i + win + 1)
                for j in range(lo, hi):
                    if j == i:
                        continue
                    o = walks[w, j]
                    nn = 0
                    for _ in range(negatives):
                        cand = neg_table[next_int(state, tsize)]
                        if cand != o:
                            negs[nn] = cand
                            nn += 1
                    sgns_update(w_in, c, w_out, o, negs, nn, lr, err, False)


@njit(cache=True, parallel=True, fastmath=True)
def sgns_train_parallel(walks, w_in, w_out, window, negatives, epochs, lr0, neg_table, seed,
                        n_chunks):
    """Lock-free variant; updates race between chunks so results are not reproducible."""
    n_walks, length = walks.shape
    d = w_in.shape[1]
    tsize = neg_table.shape[0]
    per = (n_walks + n_chunks - 1) // n_chunks
    for ch in prange(n_chunks):
        err = np.empty(d)
        negs = np.empty(negatives, dtype=np.int64)
        state = np.zeros(1, dtype=np.uint64)
        state[0] = derive_seed(seed, 0x5EED, ch + 1)
        a = ch * per
        b = min(n_walks, a + per)
        total = float(epochs) * max(b - a, 1) * length
        done = 0.0
        for ep in range(epochs):
            for w in range(a, b):
                for i in range(length):
                    lr = lr0 * max(0.01, 1.0 - done / total)
                    done += 1.0
                    c = walks[w, i]
                    win = window - next_int(state, window)
                    lo = max(0, i - win)
                    hi = min(length, i + win + 1)
                    for j in range(lo, hi):
                        if j == i:
                            continue
                        o = walks[w, j]
                        nn = 0
                        for _ in range(negatives):
                            cand = neg_table[next_int(state, tsize)]
                            if cand != o:
                                negs[nn] = cand
                                nn += 1
                        sgns_update(w_in, c, w_out, o, negs, nn, lr, err, False)


@njit(cache=True, fastmath=True)
def line_train(src_nodes, dst_nodes, edge_prob, edge_alias, neg_prob, neg_alias,
               emb, ctx, samples, negatives, lr0, seed):
    """Edge-sampling trainer. Pass ``ctx is emb`` for first-order proximity."""
    m = src_nodes.shape[0]
    n = neg_prob.shape[0]
    d = emb.shape[1]
    err = np.empty(d)
    negs = np.empty(negatives, dtype=np.int64)
    state = np.zeros(1, dtype=np.uint64)
    state[0] = derive_seed(seed, 0x11E, 0)
    for t in range(samples):
        lr = lr0 * max(1e-4, 1.0 - t / samples)
        e = alias_draw(edge_prob, edge_alias, 0, m, state)
        i = src_nodes[e]
        j = dst_nodes[e]
        for k in range(negatives):
            negs[k] = alias_draw(neg_prob, neg_alias, 0, n, state)
        sgns_update(emb, i, ctx, j, negs, negatives, lr, err, False)


@njit(cache=True)
def alias_counts(prob, alias, n_draws, seed):
    n = prob.shape[0]
    counts = np.zeros(n, dtype=np.int64)
    state = np.zeros(1, dtype=np.uint64)
    state[0] = derive_seed(seed, 0xA11A5, 0)
    for _ in range(n_draws):
        counts[alias_draw(prob, alias, 0, n, state)] += 1
    return counts
