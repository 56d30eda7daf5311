"""Run configuration: a JSON document whose keys mirror :class:`RunConfig`."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .datasets import DatasetEntry, load_manifest
from .embed import METHODS
from .graph import TASKS, DataError

WORKERS_ENV = "NODEBENCH_WORKERS"


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    dataset: str = ""
    manifest: str = ""
    edges: str = ""
    labels: str = ""
    nodes: str = ""
    directed: bool = False
    weighted: bool = False
    task: str = "multiclass"
    method: str = "node2vec"
    classifier: str = "logreg"
    fractions: list = field(default_factory=lambda: [0.5, 0.25, 0.25])
    stratified: bool | None = None
    split_seed: int = 0
    trials: int = 25
    master_seed: int = 0
    workers: int = 1
    deterministic: bool = True
    rule: object = "top_k_true"
    space: dict = field(default_factory=dict)  # {"embedding": {...}, "classifier": {...}}
    sweep_fractions: list = field(default_factory=lambda: [round(0.1 * k, 1) for k in range(1, 11)])
    output: str = "results"

    def validate(self) -> "RunConfig":
        if self.trials < 1:
            raise UsageError("trials must be >= 1")
        if len(self.fractions) != 3 or abs(sum(self.fractions) - 1) > 1e-9:
            raise UsageError(f"fractions must be three values summing to 1, got {self.fractions}")
        if self.method not in METHODS:
            raise UsageError(f"unknown method {self.method!r}; choose from {sorted(METHODS)}")
        if self.classifier not in ("logreg", "forest"):
            raise UsageError(f"unknown classifier {self.classifier!r}")
        if self.task not in TASKS:
            raise UsageError(f"unknown task {self.task!r}")
        if self.rule != "top_k_true":
            try:
                self.rule = float(self.rule)
            except (TypeError, ValueError):
                raise UsageError(f"rule must be 'top_k_true' or a threshold, got {self.rule!r}") from None
        if not self.dataset and not self.edges:
            raise UsageError("give either a dataset name (with a manifest) or an edge file")
        for p in (self.edges, self.labels, self.nodes, self.manifest):
            if p and not Path(p).exists():
                raise DataError(f"file {p} does not exist")
        return self

    def dataset_entry(self) -> DatasetEntry:
        if self.dataset:
            if not self.manifest:
                raise UsageError("dataset names need a manifest")
            entries = load_manifest(self.manifest)
            if self.dataset.lower() not in entries:
                raise DataError(f"dataset {self.dataset!r} not in manifest {self.manifest}")
            return entries[self.dataset.lower()]
        return DatasetEntry(
            name=Path(self.edges).stem, edges=Path(self.edges),
            labels=Path(self.labels) if self.labels else None, directed=self.directed,
            weighted=self.weighted, task=self.task, nodes=Path(self.nodes) if self.nodes else None,
        )

    def as_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Config file values, then environment worker override, then explicit overrides."""
    data = {}
    if path:
        p = Path(path)
        if not p.exists():
            raise DataError(f"config file {p} does not exist")
        data = json.loads(p.read_text(encoding="utf-8"))
        known = {f.name for f in fields(RunConfig)}
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config keys {sorted(unknown)}")
        for key in ("manifest", "edges", "labels", "nodes"):
            if data.get(key) and not Path(data[key]).is_absolute():
                data[key] = str((p.parent / data[key]).resolve())
    if os.environ.get(WORKERS_ENV):
        data["workers"] = int(os.environ[WORKERS_ENV])
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return RunConfig(**data).validate()
