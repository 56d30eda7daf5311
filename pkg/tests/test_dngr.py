import time

import networkx as nx
import numpy as np
import pytest
import scipy.sparse as sp

from nodebench.embed.dngr import (AutoencoderLayer, DngrParams, dngr_embed, ppmi, random_surf,
                                  sdae_train, train_layer)
from nodebench.graph import graph_from_edges, transition_matrix
from nodebench.numerics import finite_diff_check

from oracles import nx_graph


def test_single_step_surf_is_transition():
    g = nx_graph(nx.karate_club_graph())
    assert np.allclose(random_surf(g, 1.0, 1).toarray(), transition_matrix(g).toarray())


def test_two_node_surf_by_hand():
    g = graph_from_edges([0], [1], [1], 2, directed=False)
    m = random_surf(g, 0.5, 2).toarray()
    assert np.allclose(m, [[0.25, 0.5], [0.5, 0.25]])


def test_surf_row_sum_bound():
    g = nx_graph(nx.gnm_random_graph(30, 60, seed=2))
    m = random_surf(g, 0.9, 6)
    bound = sum(0.9 ** t for t in range(1, 7))
    assert np.all(np.asarray(m.sum(axis=1)).ravel() <= bound + 1e-9)


def test_ppmi_examples():
    assert ppmi(np.ones((2, 2))).nnz == 0
    assert np.allclose(ppmi(np.array([[2.0, 0], [0, 2.0]])).toarray(), np.log(2) * np.eye(2))
    m = sp.random(20, 20, density=0.3, random_state=np.random.default_rng(0))
    assert np.abs((ppmi(m) - ppmi(m * 10)).toarray()).max() <= 1e-12
    with pytest.raises(ValueError):
        ppmi(np.zeros((2, 2)))


@pytest.mark.parametrize("activation", ["sigmoid", "linear"])
def test_autoencoder_gradient(activation):
    rng = np.random.default_rng(0)
    layer = AutoencoderLayer.init(4, 3, rng, activation)
    clean = rng.random((5, 4))
    noisy = clean * (rng.random((5, 4)) > 0.3)
    shapes = [p.shape for p in layer.params()]

    def load(v):
        out, i = [], 0
        for s in shapes:
            n = int(np.prod(s))
            out.append(v[i:i + n].reshape(s))
            i += n
        layer.w, layer.b, layer.w_dec, layer.b_dec = out

    def f(v):
        load(v)
        return layer.loss_and_grads(clean, noisy)[0]

    def g(v):
        load(v)
        return np.concatenate([a.ravel() for a in layer.loss_and_grads(clean, noisy)[1]])

    x0 = np.concatenate([p.ravel() for p in layer.params()])
    assert finite_diff_check(f, g, x0) <= 1e-4


def test_linear_rank_one_reconstruction():
    rng = np.random.default_rng(1)
    x = np.outer(rng.random(40), rng.random(10))
    prm = DngrParams(d=1, layers=(1,), activation="linear", corruption=0.0, epochs=400, lr=1e-2,
                     batch=8)
    layer = train_layer(x, 1, prm, np.random.default_rng(0))
    assert layer.history[-1] < 1e-3
    assert layer.history[-1] < layer.history[0]


def test_loss_trends_down_and_deterministic():
    g = nx_graph(nx.karate_club_graph())
    x = ppmi(random_surf(g, 0.98, 10))
    prm = DngrParams(d=8, layers=(16, 8), epochs=30, lr=1e-2, seed=3)
    emb, layers = sdae_train(x, prm)
    assert emb.shape == (34, 8)
    assert all(np.mean(la.history[-5:]) < np.mean(la.history[:5]) for la in layers)
    emb2, _ = sdae_train(x, prm)
    assert emb.tobytes() == emb2.tobytes()


def test_param_validation():
    with pytest.raises(ValueError):
        DngrParams(d=8, layers=(4, 8))
    with pytest.raises(ValueError):
        DngrParams(alpha=0)
    assert DngrParams(d=600).hidden_sizes() == (1200, 600)


def test_fifty_node_d16_fast():
    g = nx_graph(nx.gnm_random_graph(50, 150, seed=4))
    t0 = time.perf_counter()
    emb = dngr_embed(g, DngrParams(d=16))
    assert time.perf_counter() - t0 < 30
    assert emb.shape == (50, 16) and np.all(np.isfinite(emb))
