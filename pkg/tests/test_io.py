import json

import numpy as np
import pytest

from nodebench.datasets import load_manifest
from nodebench.graph import DataError, graph_from_edges
from nodebench.io import fmt, read_csv, read_embedding, write_csv, write_embedding


def test_fmt_six_significant_digits():
    assert fmt(0.123456789) == "0.123457"
    assert fmt(np.float32(2.5)) == "2.5"
    assert fmt(None) == "" and fmt(3) == "3" and fmt("x") == "x"


def test_csv_round_trip(tmp_path):
    p = write_csv(tmp_path / "sub" / "a.csv", ["a", "b"], [[1, 0.5], ["x", None]])
    assert read_csv(p) == [{"a": "1", "b": "0.5"}, {"a": "x", "b": ""}]


def test_embedding_round_trip_float32(tmp_path):
    g = graph_from_edges([0, 1], [1, 2], [1, 1], 3, directed=False, node_ids=["c", "a", "b"])
    x = np.random.default_rng(0).standard_normal((3, 4))
    p = write_embedding(tmp_path / "e.csv", x, g.node_ids)
    ids, y = read_embedding(p)
    assert ids == ["c", "a", "b"]
    assert np.array_equal(y.astype(np.float32), x.astype(np.float32))
    lines = p.read_text().splitlines()
    reordered = tmp_path / "r.csv"
    reordered.write_text("\n".join([lines[0], lines[3], lines[1], lines[2]]) + "\n")
    _, z = read_embedding(reordered, g)
    assert np.array_equal(z, y)
    with pytest.raises(DataError):
        read_embedding(p, graph_from_edges([0], [1], [1], 2, directed=False))


def test_manifest_resolves_relative_paths(tmp_path):
    (tmp_path / "d").mkdir()
    (tmp_path / "d" / "e.txt").write_text("a b\nb c\n")
    (tmp_path / "d" / "l.txt").write_text("a x\nc y\n")
    (tmp_path / "m.json").write_text(json.dumps(
        {"datasets": {"Toy": {"edges": "d/e.txt", "labels": "d/l.txt", "directed": True}}}))
    entry = load_manifest(tmp_path / "m.json")["toy"]
    g, lab = entry.load()
    assert g.n_nodes == 3 and g.directed and lab.vocab == ("x", "y")
    with pytest.raises(DataError):
        load_manifest(tmp_path / "missing.json")
