import numpy as np
import pytest

from nodebench.embed import _kernels as K
from nodebench.embed.line import LineParams, edge_arrays, edge_grad, edge_loss, line_embed
from nodebench.graph import build_alias_table, graph_from_edges
from nodebench.numerics import finite_diff_check

from oracles import chi2_ok, two_cliques
from test_node2vec import mean_cosines


@pytest.mark.parametrize("k", [1, 5])
def test_edge_gradient(k):
    rng = np.random.default_rng(k)
    d = 7

    def unpack(v):
        return v[:d], v[d:2 * d], v[2 * d:].reshape(k, d)

    x = rng.standard_normal(d * (k + 2)) * 0.4
    err = finite_diff_check(lambda v: edge_loss(*unpack(v)),
                            lambda v: np.concatenate([a.ravel() for a in edge_grad(*unpack(v))]), x)
    assert err <= 1e-4


def test_edge_sampling_proportional_to_weight():
    g = graph_from_edges([0, 0, 1, 2], [1, 2, 2, 3], [1.0, 4.0, 2.0, 0.5], 4, directed=True)
    _, _, w = edge_arrays(g, symmetric=False)
    t = build_alias_table(w)
    counts = K.alias_counts(t.prob, t.alias, 200_000, 7)
    assert chi2_ok(counts, w)


def test_edge_arrays_symmetrize_directed():
    g = graph_from_edges([0], [1], [2.0], 2, directed=True)
    src, dst, w = edge_arrays(g, symmetric=True)
    assert sorted(zip(src.tolist(), dst.tolist())) == [(0, 1), (1, 0)]
    assert w.tolist() == [2.0, 2.0]


@pytest.mark.parametrize("order", ["first", "second"])
def test_two_cliques(order):
    emb = line_embed(two_cliques(10), LineParams(d=8, order=order, samples=40_000, seed=2))
    intra, inter = mean_cosines(emb, 10)
    assert intra > inter


def test_dimension_split_and_half_norms():
    emb = line_embed(two_cliques(6, bridge=True), LineParams(d=128, samples=2000))
    assert emb.shape == (12, 128)
    assert LineParams(d=128).split() == (64, 64)
    assert LineParams(d=7).split() == (4, 3)
    assert np.allclose(np.linalg.norm(emb[:, :64], axis=1), 1)
    assert np.allclose(np.linalg.norm(emb[:, 64:], axis=1), 1)


def test_directed_first_order_warns():
    g = graph_from_edges([0, 1], [1, 2], [1, 1], 3, directed=True)
    with pytest.warns(UserWarning):
        line_embed(g, LineParams(d=4, order="first", samples=100))


def test_deterministic_and_validation():
    g = two_cliques(5, bridge=True)
    prm = LineParams(d=6, samples=3000, seed=4)
    assert line_embed(g, prm).tobytes() == line_embed(g, prm).tobytes()
    with pytest.raises(ValueError):
        LineParams(order="third")
    with pytest.raises(ValueError):
        LineParams(d=1, order="both")
