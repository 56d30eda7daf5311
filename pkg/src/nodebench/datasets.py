"""Dataset manifests: named graphs and label files on local disk.

A manifest is a JSON document::

    {"datasets": {"moreno": {"edges": "moreno/edges.txt", "labels": "moreno/labels.txt",
                             "directed": true, "weighted": false, "task": "binary"}}}

Relative paths resolve against the manifest's directory. Optional keys:
``nodes`` (file of node ids, one per line, to keep isolated nodes) and
``unknown_labels`` ("error" or "skip").
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .graph import DataError, Graph, LabelStore, load_edge_list, load_labels

log = logging.getLogger(__name__)

# node/edge counts of the four benchmark networks
REFERENCE_COUNTS = {
    "moreno": (1224, 19025),
    "citeseer": (3312, 4660),
    "facebook": (4039, 88234),
    "blogcatalog": (10312, 333983),
}
BASELINE_MICRO = {"blogcatalog": 0.090, "citeseer": 0.212, "facebook": 0.336, "moreno": 0.520}


@dataclass(frozen=True)
class DatasetEntry:
    name: str
    edges: Path
    labels: Path | None
    directed: bool
    weighted: bool = False
    task: str = "multiclass"
    nodes: Path | None = None
    unknown_labels: str = "error"

    def load(self) -> tuple[Graph, LabelStore | None]:
        for p in (self.edges, self.labels, self.nodes):
            if p is not None and not p.exists():
                raise DataError(f"{self.name}: missing file {p}")
        nodes = None
        if self.nodes is not None:
            nodes = [ln.split()[0] for ln in self.nodes.read_text(encoding="utf-8").splitlines()
                     if ln.strip() and ln[0] not in "#%"]
        g = load_edge_list(self.edges, self.directed, self.weighted, nodes=nodes)
        labels = None
        if self.labels is not None:
            labels = load_labels(self.labels, g, self.task, unknown=self.unknown_labels)
        return g, labels


def load_manifest(path) -> dict[str, DatasetEntry]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"manifest {path} not found")
    doc = json.loads(path.read_text(encoding="utf-8"))
    root = path.parent
    out = {}
    for name, e in doc.get("datasets", {}).items():
        def rel(key):
            return (root / e[key]).resolve() if e.get(key) else None
        out[name.lower()] = DatasetEntry(
            name=name.lower(), edges=rel("edges"), labels=rel("labels"),
            directed=bool(e.get("directed", False)), weighted=bool(e.get("weighted", False)),
            task=e.get("task", "multiclass"), nodes=rel("nodes"),
            unknown_labels=e.get("unknown_labels", "error"),
        )
    return out
