"""Convert locally downloaded copies of the four benchmark networks to nodebench files.

Nothing is downloaded here; licences differ per source. Fetch the raw files by hand:

    moreno       KONECT "moreno_blogs": out.moreno_blogs_blogs,
                 ent.moreno_blogs_blogs.blog.orientation
    citeseer     LINQS CiteSeer: citeseer.cites, citeseer.content
    facebook     SNAP ego-Facebook: facebook_combined.txt, plus a "node label" file
                 with the four-class labels (their provenance is not public)
    blogcatalog  ASU BlogCatalog3: edges.csv, group-edges.csv, nodes.csv

Each subcommand writes ``<out>/<name>/{edges,labels,nodes}.txt`` and registers the
dataset in ``<out>/manifest.json``. Point NODEBENCH_MANIFEST at that file to run the
dataset-backed acceptance tests.

Example::

    python scripts/prepare_datasets.py moreno --edges out.moreno_blogs_blogs \\
        --orientation ent.moreno_blogs_blogs.blog.orientation --out data
"""

import argparse
import csv
import json
from pathlib import Path


def _content(path):
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and line[0] not in "#%":
                yield line


def _write(out, name, edges, labels, nodes, directed, task):
    d = Path(out) / name
    d.mkdir(parents=True, exist_ok=True)
    (d / "edges.txt").write_text("".join(f"{u} {v}\n" for u, v in edges), encoding="utf-8")
    (d / "labels.txt").write_text("".join(f"{n} {','.join(ls)}\n" for n, ls in labels), encoding="utf-8")
    (d / "nodes.txt").write_text("".join(f"{n}\n" for n in nodes), encoding="utf-8")
    mpath = Path(out) / "manifest.json"
    doc = json.loads(mpath.read_text(encoding="utf-8")) if mpath.exists() else {"datasets": {}}
    doc["datasets"][name] = {"edges": f"{name}/edges.txt", "labels": f"{name}/labels.txt",
                             "nodes": f"{name}/nodes.txt", "directed": directed, "task": task}
    mpath.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"{name}: {len(nodes)} nodes, {len(edges)} edge lines, {len(labels)} labeled -> {d}")


def moreno(args):
    edges = [tuple(line.split()[:2]) for line in _content(args.edges)]
    # one orientation per line, line i belongs to node i (1-based)
    labels = [(str(i), [tok.split()[0]]) for i, tok in enumerate(_content(args.orientation), start=1)]
    nodes = [n for n, _ in labels]
    _write(args.out, "moreno", edges, labels, nodes, True, "binary")


def citeseer(args):
    labels, nodes = [], []
    for line in _content(args.content):
        parts = line.split("\t") if "\t" in line else line.split()
        nodes.append(parts[0])
        labels.append((parts[0], [parts[-1]]))
    known = set(nodes)
    edges = []
    for line in _content(args.cites):
        cited, citing = line.split()[:2]
        # keep the intersection with the labeled documents
        if cited in known and citing in known:
            edges.append((citing, cited))
    _write(args.out, "citeseer", edges, labels, nodes, True, "multiclass")


def facebook(args):
    edges = [tuple(line.split()[:2]) for line in _content(args.edges)]
    labels = [(line.split()[0], [line.split()[1]]) for line in _content(args.labels)]
    nodes = sorted({u for e in edges for u in e}, key=lambda t: (len(t), t))
    _write(args.out, "facebook", edges, labels, nodes, False, "multiclass")


def blogcatalog(args):
    with open(args.edges, encoding="utf-8") as fh:
        edges = [(r[0], r[1]) for r in csv.reader(fh) if len(r) >= 2]
    groups = {}
    with open(args.groups, encoding="utf-8") as fh:
        for r in csv.reader(fh):
            if len(r) >= 2:
                groups.setdefault(r[0], []).append(r[1])
    with open(args.nodes, encoding="utf-8") as fh:
        nodes = [r[0] for r in csv.reader(fh) if r]
    labels = [(n, sorted(set(groups[n]), key=int)) for n in nodes if n in groups]
    _write(args.out, "blogcatalog", edges, labels, nodes, False, "multilabel")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="name", required=True)
    s = sub.add_parser("moreno")
    s.add_argument("--edges", required=True)
    s.add_argument("--orientation", required=True)
    s.set_defaults(fn=moreno)
    s = sub.add_parser("citeseer")
    s.add_argument("--cites", required=True)
    s.add_argument("--content", required=True)
    s.set_defaults(fn=citeseer)
    s = sub.add_parser("facebook")
    s.add_argument("--edges", required=True)
    s.add_argument("--labels", required=True)
    s.set_defaults(fn=facebook)
    s = sub.add_parser("blogcatalog")
    s.add_argument("--edges", required=True)
    s.add_argument("--groups", required=True)
    s.add_argument("--nodes", required=True)
    s.set_defaults(fn=blogcatalog)
    for s in sub.choices.values():
        s.add_argument("--out", default="data")
    args = p.parse_args()
    args.fn(args)


if __name__ == "__main__":
    main()
