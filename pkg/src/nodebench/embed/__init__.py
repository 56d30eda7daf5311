"""The four embedding methods behind one dispatch function."""

from dataclasses import fields

from .dngr import DngrParams, dngr_embed
from .grarep import GraRepParams, grarep_embed
from .line import LineParams, line_embed
from .node2vec import Node2vecParams, node2vec_embed

METHODS = {
    "node2vec": (Node2vecParams, node2vec_embed),
    "line": (LineParams, line_embed),
    "grarep": (GraRepParams, grarep_embed),
    "dngr": (DngrParams, dngr_embed),
}


def make_params(method: str, values: dict, seed: int):
    """Parameter dataclass for ``method`` from a flat dict; unknown keys are an error."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {sorted(METHODS)}")
    cls = METHODS[method][0]
    known = {f.name for f in fields(cls)}
    extra = set(values) - known
    if extra:
        raise ValueError(f"{method} does not take parameters {sorted(extra)}")
    kwargs = dict(values, seed=seed)
    if "layers" in kwargs and kwargs["layers"] is not None:
        kwargs["layers"] = tuple(kwargs["layers"])
    return cls(**kwargs)


def embed(graph, method: str, values: dict, seed: int = 0):
    cls_params = make_params(method, values, seed)
    return METHODS[method][1](graph, cls_params)


__all__ = [
    "METHODS", "embed", "make_params",
    "Node2vecParams", "LineParams", "GraRepParams", "DngrParams",
    "node2vec_embed", "line_embed", "grarep_embed", "dngr_embed",
]
