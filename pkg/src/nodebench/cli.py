"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import UsageError, load_config
from .embed import METHODS, embed, make_params
from .evaluation import ClassifierSpec, evaluate, fraction_sweep, make_split, most_frequent_baseline
from .graph import DataError
from .io import SCORE_HEADER, TRIAL_LOG_HEADER, fmt, read_embedding, trial_rows, write_csv, write_embedding
from .report import (DIM_BINS, dimension_bins, load_scores, plot_dimension_study, plot_fraction_sweep,
                     safe_name, score_table, trial_log_records)
from .search import default_space, embed_trial, run_search

log = logging.getLogger("nodebench")

EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _kv(text: str):
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


def _data_args(p):
    g = p.add_argument_group("data")
    g.add_argument("--config", help="JSON run configuration")
    g.add_argument("--manifest", help="dataset manifest JSON")
    g.add_argument("--dataset", help="dataset name inside the manifest")
    g.add_argument("--edges", help="edge list file")
    g.add_argument("--labels", help="label file")
    g.add_argument("--nodes", help="optional node id list (keeps isolated nodes)")
    g.add_argument("--directed", action="store_true", default=None)
    g.add_argument("--weighted", action="store_true", default=None)
    g.add_argument("--task", choices=("binary", "multiclass", "multilabel"))
    g.add_argument("--split-seed", type=int, dest="split_seed")
    g.add_argument("--seed", type=int, dest="master_seed", help="master seed")
    g.add_argument("--workers", type=int)


def build_parser():
    parser = _Parser(prog="nodebench", description="Node embedding benchmarks with joint random search.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("embed", help="embed a graph with explicit parameters")
    _data_args(p)
    p.add_argument("--method", required=True, choices=sorted(METHODS))
    p.add_argument("--dim", type=int)
    p.add_argument("--param", type=_kv, action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--out", required=True)

    p = sub.add_parser("evaluate", help="score a stored embedding with one classifier")
    _data_args(p)
    p.add_argument("--embedding", required=True)
    p.add_argument("--classifier", choices=("logreg", "forest"))
    p.add_argument("--param", type=_kv, action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--on", choices=("val", "test"), default="val")
    p.add_argument("--out")

    p = sub.add_parser("search", help="random search, then one test evaluation")
    _data_args(p)
    p.add_argument("--method", choices=sorted(METHODS))
    p.add_argument("--classifier", choices=("logreg", "forest"))
    p.add_argument("--trials", type=int)
    p.add_argument("--out", dest="output")

    p = sub.add_parser("sweep", help="training-fraction sweep of the best searched model")
    _data_args(p)
    p.add_argument("--methods", nargs="+", choices=sorted(METHODS))
    p.add_argument("--classifier", choices=("logreg", "forest"))
    p.add_argument("--trials", type=int)
    p.add_argument("--fractions", type=float, nargs="+")
    p.add_argument("--out", dest="output")
    p.add_argument("--plot", action="store_true", help="also render a PNG next to the CSV")

    p = sub.add_parser("dimension-study", help="best validation score per dimension bin")
    _data_args(p)
    p.add_argument("--trial-log", nargs="*", default=[], help="existing trial logs to bin")
    p.add_argument("--method", choices=sorted(METHODS))
    p.add_argument("--classifier", choices=("logreg", "forest"))
    p.add_argument("--trials", type=int)
    p.add_argument("--bins", type=int, nargs="+")
    p.add_argument("--out", dest="output")
    p.add_argument("--plot", action="store_true")

    p = sub.add_parser("baseline", help="most-frequent-label scores")
    _data_args(p)
    p.add_argument("--split-seeds", type=int, nargs="+", default=[0, 1, 2, 3, 4])
    p.add_argument("--out", dest="output")

    p = sub.add_parser("report", help="methods x classifiers score table from score files")
    p.add_argument("--results", required=True)
    p.add_argument("--datasets", nargs="+")
    p.add_argument("--out", required=True)
    return parser


def _config(args, **extra):
    keys = ("manifest", "dataset", "edges", "labels", "nodes", "directed", "weighted", "task",
            "split_seed", "master_seed", "workers", "method", "classifier", "trials", "output")
    over = {k: getattr(args, k, None) for k in keys}
    over.update(extra)
    for k in ("manifest", "edges", "labels", "nodes"):
        if over.get(k):
            over[k] = str(Path(over[k]).resolve())
    return load_config(args.config, over)


def _load(cfg):
    entry = cfg.dataset_entry()
    graph, labels = entry.load()
    return entry, graph, labels


def _split(cfg, labels):
    if labels is None:
        raise DataError("this command needs a label file")
    return make_split(labels, cfg.fractions, cfg.stratified, cfg.split_seed)


def _space(cfg, graph):
    space = default_space(cfg.method, cfg.classifier, graph.n_edges)
    over = cfg.space or {}
    space = space.with_overrides(over.get("embedding"), over.get("classifier"))
    if not cfg.deterministic and cfg.method == "node2vec":
        space = space.with_overrides({"workers": os.cpu_count() or 1})
    return space


def _score_row(dataset, method, classifier, split, report, seed, trials="", best="", params=""):
    return [dataset, method, classifier, split, report.macro_f1, report.micro_f1, seed, trials, best, params]


def cmd_embed(args):
    cfg = _config(args, method=args.method)
    entry, graph, _ = _load(cfg)
    values = dict(args.param)
    if args.dim is not None:
        values["d"] = args.dim
    make_params(args.method, values, cfg.master_seed)
    x = embed(graph, args.method, values, cfg.master_seed)
    write_embedding(args.out, x, graph.node_ids)
    log.info("wrote %d x %d embedding to %s", *x.shape, args.out)


def cmd_evaluate(args):
    cfg = _config(args)
    entry, graph, labels = _load(cfg)
    _, x = read_embedding(args.embedding, graph)
    split = _split(cfg, labels)
    spec = ClassifierSpec(cfg.classifier, dict(args.param), cfg.rule)
    rep = evaluate(x, labels, split, spec, args.on, cfg.master_seed)
    rows = [_score_row(entry.name, Path(args.embedding).stem, cfg.classifier, args.on, rep,
                       cfg.master_seed, params=";".join(f"{k}={v}" for k, v in args.param))]
    if args.out:
        write_csv(args.out, SCORE_HEADER, rows)
    print(",".join(SCORE_HEADER))
    print(",".join(fmt(v) for v in rows[0]))


def _search(cfg, graph, labels, split):
    return run_search(graph, labels, cfg.method, cfg.classifier, _space(cfg, graph), cfg.trials,
                      split, cfg.master_seed, cfg.rule, cfg.workers)


def _write_search(cfg, entry, result, out: Path):
    stem = safe_name(f"{entry.name}_{cfg.method}_{cfg.classifier}")
    log_path = write_csv(out / f"{stem}_trials.csv", TRIAL_LOG_HEADER, trial_rows(result))
    b = result.best
    score_path = write_csv(out / f"{stem}_scores.csv", SCORE_HEADER, [
        _score_row(entry.name, cfg.method, cfg.classifier, "val", b.validation, cfg.master_seed,
                   cfg.trials, b.trial, b.sample.describe()),
        _score_row(entry.name, cfg.method, cfg.classifier, "test", result.test, cfg.master_seed,
                   cfg.trials, b.trial, b.sample.describe()),
    ])
    return log_path, score_path


def cmd_search(args):
    cfg = _config(args)
    entry, graph, labels = _load(cfg)
    split = _split(cfg, labels)
    result = _search(cfg, graph, labels, split)
    log_path, score_path = _write_search(cfg, entry, result, Path(cfg.output))
    print(f"best trial {result.best.trial}: val micro {result.best.validation.micro_f1:.4f}, "
          f"test micro {result.test.micro_f1:.4f} macro {result.test.macro_f1:.4f}")
    print(f"trial log: {log_path}\nscores: {score_path}")


def cmd_sweep(args):
    extra = {}
    if args.fractions:
        extra["sweep_fractions"] = args.fractions
    cfg = _config(args, **extra)
    entry, graph, labels = _load(cfg)
    split = _split(cfg, labels)
    methods = args.methods or [cfg.method]
    rows, curves = [], {}
    out = Path(cfg.output)
    for m in methods:
        cfg.method = m
        result = _search(cfg, graph, labels, split)
        _write_search(cfg, entry, result, out)
        b = result.best
        x = embed_trial(graph, m, b)
        spec = ClassifierSpec(cfg.classifier, dict(b.sample.classifier), cfg.rule)
        pts = fraction_sweep(x, labels, split, spec, cfg.sweep_fractions, b.clf_seed)
        for f, rep in pts:
            n_train = int(np.ceil(f * len(split.train) - 1e-9))
            rows.append([entry.name, m, cfg.classifier, f, n_train, rep.macro_f1, rep.micro_f1,
                         cfg.master_seed])
        curves[f"{m} / {cfg.classifier}"] = [(f, rep.micro_f1) for f, rep in pts]
    stem = safe_name(f"{entry.name}_{cfg.classifier}_sweep")
    path = write_csv(out / f"{stem}.csv",
                     ["dataset", "method", "classifier", "fraction", "n_train", "macro_f1", "micro_f1", "seed"],
                     rows)
    print(f"sweep: {path}")
    if args.plot:
        print(f"figure: {plot_fraction_sweep(curves, path.with_suffix('.png'), entry.name)}")


def cmd_dimension_study(args):
    records = []
    if args.trial_log:
        # binning existing logs needs no dataset
        out = Path(args.output or "results")
        for p in args.trial_log:
            if not Path(p).exists():
                raise DataError(f"trial log {p} does not exist")
            records.extend(trial_log_records(p))
        name = Path(args.trial_log[0]).stem
    else:
        cfg = _config(args)
        out = Path(cfg.output)
        entry, graph, labels = _load(cfg)
        split = _split(cfg, labels)
        result = _search(cfg, graph, labels, split)
        log_path, _ = _write_search(cfg, entry, result, out)
        records = trial_log_records(log_path)
        name = log_path.stem
    bins = dimension_bins(records, tuple(args.bins) if args.bins else DIM_BINS)
    path = write_csv(out / f"{safe_name(name)}_dimensions.csv",
                     ["dim_lo", "dim_hi", "n_trials", "best_val_micro", "best_val_macro", "mean_val_micro"],
                     bins)
    print(f"dimension study: {path}")
    if args.plot:
        print(f"figure: {plot_dimension_study(records, bins, path.with_suffix('.png'), name)}")


def cmd_baseline(args):
    cfg = _config(args)
    entry, graph, labels = _load(cfg)
    rows, scores = [], []
    for s in args.split_seeds:
        split = make_split(labels, cfg.fractions, cfg.stratified, s)
        rep = most_frequent_baseline(labels, split)
        scores.append(rep.micro_f1)
        rows.append(_score_row(entry.name, "most_frequent", "none", "test", rep, s))
    path = write_csv(Path(cfg.output) / f"{safe_name(entry.name)}_baseline_scores.csv", SCORE_HEADER, rows)
    print(f"{entry.name}: most-frequent-label micro-F1 {np.mean(scores):.4f} over {len(scores)} splits")
    print(f"scores: {path}")


def cmd_report(args):
    header, rows = score_table(load_scores(args.results), args.datasets)
    path = write_csv(args.out, header, rows)
    print(f"report: {path}")


COMMANDS = {
    "embed": cmd_embed, "evaluate": cmd_evaluate, "search": cmd_search, "sweep": cmd_sweep,
    "dimension-study": cmd_dimension_study, "baseline": cmd_baseline, "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"nodebench: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, FileNotFoundError) as exc:
        print(f"nodebench: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ArithmeticError, RuntimeError) as exc:
        print(f"nodebench: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"nodebench: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
