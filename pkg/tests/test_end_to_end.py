"""Synthetic stand-in for the dataset-backed quality criteria.

A planted three-community graph is easy enough that every method should
recover the communities after a short search.
"""

import numpy as np
import pytest

from nodebench.evaluation import ClassifierSpec, fraction_sweep, make_split
from nodebench.search import default_space, embed_trial, run_search

from oracles import planted_partition

SPACES = {
    "node2vec": {"d": ["uniform_int", 16, 64], "num_walks": 10, "walk_len": 30, "window": 5, "epochs": 2},
    "line": {"d": ["uniform_int", 16, 64], "samples": 200_000},
    "grarep": {"d": ["uniform_int", 16, 64], "K": ["uniform_int", 2, 4]},
    "dngr": {"d": ["uniform_int", 16, 64], "epochs": 20},
}


@pytest.fixture(scope="module")
def sbm():
    g, lab = planted_partition(n_per=100, k=3, p_in=0.1, p_out=0.005, seed=7)
    return g, lab, make_split(lab, seed=1)


@pytest.mark.parametrize("method", sorted(SPACES))
def test_communities_recovered(sbm, method):
    g, lab, split = sbm
    space = default_space(method, "logreg", g.n_edges).with_overrides(SPACES[method], {"epochs": 50})
    res = run_search(g, lab, method, "logreg", space, trials=3, split=split, master_seed=2)
    assert res.reads["test"] == 1
    assert res.test.micro_f1 >= 0.9, res.test.micro_f1


def test_sweep_plateau(sbm):
    g, lab, split = sbm
    space = default_space("grarep", "logreg", g.n_edges).with_overrides(SPACES["grarep"], {"epochs": 50})
    res = run_search(g, lab, "grarep", "logreg", space, trials=2, split=split)
    b = res.best
    pts = dict(fraction_sweep(embed_trial(g, "grarep", b), lab, split,
                              ClassifierSpec("logreg", dict(b.sample.classifier)), [0.3, 1.0], b.clf_seed))
    assert pts[1.0].same_scores(res.test)
    assert abs(pts[1.0].micro_f1 - pts[0.3].micro_f1) <= 0.05
