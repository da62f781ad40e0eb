"""Command-line front end: ``ingest``, ``synth``, ``run``, ``report`` and ``dag``.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 no
source-impact path (or no final node).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .changepoint import segment, stability_histogram
from .config import PipelineConfig, load_config
from .entropy import entropy_series
from .exceptions import ConfigError, DataError, ImpactError, PathNotFoundError, UnknownNodeError
from .pathway import (build_full_dag, default_source, export_dot, find_node, graph_to_json, impact_dag,
                      source_impact_dag, source_impact_path)
from .pipeline import analyze_pairs
from .stats import granularity_compare
from .synth import generate_pair

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_PATH = 0, 2, 3, 4


class StageError(Exception):
    def __init__(self, stage: str, exc: Exception):
        super().__init__(f"stage {stage}: {exc}")
        self.stage = stage
        self.cause = exc


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (ConfigError, PathNotFoundError, UnknownNodeError):
        raise
    except (ImpactError, ValueError, OSError) as exc:
        raise StageError(name, exc) from exc


def cmd_ingest(cfg: PipelineConfig) -> int:
    pairs = _stage("ingest", io.read_ingest_csv, cfg.inputs)
    io.write_store(pairs, cfg.path("store"), cfg.hash)
    for (variable, region), pair in pairs.items():
        print(f"{variable}/{region}: E={pair.ensemble_size} N={pair.length}")
    return EXIT_OK


def cmd_synth(cfg: PipelineConfig) -> int:
    pairs, truth = generate_pair(cfg.synth)
    out = cfg.inputs[0]
    out.parent.mkdir(parents=True, exist_ok=True)
    io.write_ingest_csv(pairs.values(), out)
    doc = {"config_hash": cfg.hash, **truth.to_json()}
    cfg.path("truth").write_text(json.dumps(doc, indent=2) + "\n")
    print(f"wrote {len(pairs)} series to {out}")
    return EXIT_OK


def _slug(key):
    return io.pair_filename(*key)


def _build_graphs(cfg: PipelineConfig, records, out: Path) -> int:
    """Write the full, impact and source-impact graphs; returns the exit code."""
    h = cfg.hash
    graphs = out / "graphs"
    full = build_full_dag(records, cfg.constraints)
    full.topological_order()
    io.write_text(graphs / "full.dot", export_dot(full, [f"config_hash: {h}"]))
    io.write_text(graphs / "full.json", graph_to_json(full, h))
    for stale in ("impact.dot", "impact.json", "source_impact.dot", "source_impact.json", "path.csv"):
        (graphs / stale).unlink(missing_ok=True)
    try:
        final = find_node(full, *cfg.final)
        imp = impact_dag(full, final)
        io.write_text(graphs / "impact.dot", export_dot(imp, [f"config_hash: {h}"]))
        io.write_text(graphs / "impact.json", graph_to_json(imp, h))
        source = default_source(imp, *cfg.source)
        path = source_impact_path(imp, source, final)
    except (PathNotFoundError, UnknownNodeError) as exc:
        print(f"no source-impact path: {exc}", file=sys.stderr)
        return EXIT_PATH
    si = source_impact_dag(imp, path)
    io.write_text(graphs / "source_impact.dot", export_dot(si, [f"config_hash: {h}"]))
    io.write_text(graphs / "source_impact.json", graph_to_json(si, h))
    io.write_text(graphs / "path.csv", io.path_csv(imp.nodes[n] for n in path), h)
    print(f"full DAG {len(full)} nodes/{len(full.edges)} edges; impact DAG {len(imp)}/{len(imp.edges)}; "
          f"path of {len(path)} nodes")
    return EXIT_OK


def cmd_run(cfg: PipelineConfig) -> int:
    pairs = _stage("load", io.read_store, cfg.path("store"))
    out = cfg.path("output")
    h = cfg.hash
    params = cfg.entropy
    results = _stage("analysis", analyze_pairs, pairs, params, cfg.changepoint, cfg.ci_level)
    intervals, records = {}, []
    for key, res in results.items():
        seg = res.segmentation
        io.write_text(out / "entropy" / _slug(key), io.entropy_csv(res.entropy), h)
        io.write_text(out / "changepoints" / _slug(key),
                      io.changepoints_csv(seg.changepoints, params, res.pair.start_date), h,
                      [f"bonferroni_k: {seg.bonferroni_k}", f"level: {seg.level!r}"])
        intervals[key] = res.intervals
        records += res.records
    io.write_text(out / "intervals.json", io.intervals_json(intervals, h))
    io.write_text(out / "impacts.csv", io.impacts_csv(records), h)
    n_sig = sum(r.significant for r in records)
    print(f"{len(pairs)} series, {len(records)} intervals, {n_sig} significant impacts")
    return _stage("pathway", _build_graphs, cfg, records, out)


def cmd_dag(cfg: PipelineConfig) -> int:
    pairs = _stage("load", io.read_store, cfg.path("store"))
    origins = {k: p.start_date for k, p in pairs.items()}
    out = cfg.path("output")
    impacts = out / "impacts.csv"
    if not impacts.exists():
        raise StageError("dag", DataError(f"{impacts} missing; run the pipeline first"))
    records = _stage("dag", io.read_impacts_csv, impacts, origins, cfg.ci_level)
    return _stage("pathway", _build_graphs, cfg, records, out)


def _report_series(cfg: PipelineConfig, key, pair, records, root: Path):
    h = cfg.hash
    d = root / Path(_slug(key)).stem
    dates = [x.isoformat() for x in pair.dates()]
    f, c = pair.forced, pair.counterfactual
    signal = io._table(
        ("date", "forced_min", "forced_mean", "forced_max", "counterfactual_min", "counterfactual_mean",
         "counterfactual_max"),
        zip(dates, *(a.tolist() for a in (f.min(0), f.mean(0), f.max(0), c.min(0), c.mean(0), c.max(0)))))
    io.write_text(d / "signal.csv", signal, h)

    daily = (f - c).mean(0).tolist()
    rows = []
    for r in records:
        for k in range(r.interval.start_index - 1, r.interval.end_index):
            rows.append((dates[k], daily[k], r.mean_diff, r.ci_low, r.ci_high, int(r.significant)))
    io.write_text(d / "difference.csv",
                  io._table(("date", "daily_mean_diff", "interval_mean", "ci_low", "ci_high", "significant"), rows),
                  h)

    params = cfg.entropy
    es = entropy_series(pair, params)
    cps = set(segment(es, cfg.changepoint).changepoints)
    mid = es.midpoint_dates()
    io.write_text(d / "entropy.csv", io._table(
        ("window", "midpoint_date", "entropy", "changepoint"),
        ((k, mid[k - 1].isoformat(), float(v), int(k in cps)) for k, v in enumerate(es.values, start=1))), h)

    gran = []
    for mode in ("daily", "monthly", "entropy"):
        recs = granularity_compare(pair, mode, params, cfg.changepoint, cfg.ci_level)
        gran.append((mode, len(recs), sum(r.significant for r in recs)))
    io.write_text(d / "granularity.csv", io._table(("mode", "intervals", "significant"), gran), h)

    hist = stability_histogram(pair, params, cfg.changepoint)
    E = pair.ensemble_size
    io.write_text(d / "stability.csv", io._table(
        ("day", "date", *(f"size_{k}" for k in range(1, E + 1)), "frequency"),
        ((day, pair.date_of(day).isoformat(), *map(int, v), int(np.sum(v))) for day, v in hist.items())), h)


def cmd_report(cfg: PipelineConfig) -> int:
    pairs = _stage("load", io.read_store, cfg.path("store"))
    impacts = cfg.path("output") / "impacts.csv"
    if not impacts.exists():
        raise StageError("report", DataError(f"{impacts} missing; run the pipeline first"))
    origins = {k: p.start_date for k, p in pairs.items()}
    records = _stage("report", io.read_impacts_csv, impacts, origins, cfg.ci_level)
    root = cfg.path("report")
    for key, pair in pairs.items():
        mine = [r for r in records if (r.variable, r.region) == key]
        _stage("report", _report_series, cfg, key, pair, mine, root)
    print(f"wrote report bundles for {len(pairs)} series to {root}")
    return EXIT_OK


COMMANDS = {
    "ingest": (cmd_ingest, "validate ingest CSV files into a dataset store"),
    "synth": (cmd_synth, "generate a synthetic paired ensemble and its ground truth"),
    "run": (cmd_run, "entropy, changepoints, impacts and pathway graphs"),
    "report": (cmd_report, "plot-ready CSV bundles for a completed run"),
    "dag": (cmd_dag, "rebuild pathway graphs from existing impacts"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entropic-impacts", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, default=None, help="TOML config file (defaults if omitted)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command][0](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PathNotFoundError, UnknownNodeError) as exc:
        print(f"no source-impact path: {exc}", file=sys.stderr)
        return EXIT_PATH
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG if isinstance(exc.cause, ConfigError) else EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
