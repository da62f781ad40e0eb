"""In-process pipeline: entropy, changepoints, feature intervals and impacts for many pairs."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from typing import Mapping

from .changepoint import ChangepointConfig, FeatureInterval, Segmentation, map_to_time, segment
from .core import EnsemblePair
from .entropy import EntropyParams, EntropySeries, entropy_series
from .pathway import (PathwayConstraints, PathwayGraph, build_full_dag, default_source, find_node,
                      impact_dag, source_impact_path)
from .stats import ImpactRecord, impacts_for_features

__all__ = ["SeriesAnalysis", "analyze_pair", "analyze_pairs", "PathwayResult", "build_pathway"]


@dataclass(frozen=True)
class SeriesAnalysis:
    pair: EnsemblePair
    entropy: EntropySeries
    segmentation: Segmentation
    intervals: tuple[FeatureInterval, ...]
    records: tuple[ImpactRecord, ...]


def analyze_pair(pair: EnsemblePair, params: EntropyParams | None = None,
                 cfg: ChangepointConfig | None = None, ci_level: float = 0.99) -> SeriesAnalysis:
    params = params or EntropyParams()
    es = entropy_series(pair, params)
    seg = segment(es, cfg)
    ivs = tuple(map_to_time(seg.changepoints, params, pair.length, pair.start_date))
    return SeriesAnalysis(pair, es, seg, ivs, tuple(impacts_for_features(pair, ivs, ci_level)))


def analyze_pairs(pairs: Mapping[tuple[str, str], EnsemblePair], params: EntropyParams | None = None,
                  cfg: ChangepointConfig | None = None,
                  ci_level: float = 0.99) -> dict[tuple[str, str], SeriesAnalysis]:
    """:func:`analyze_pair` for every pair, keyed and ordered like ``sorted(pairs)``."""
    return {key: analyze_pair(pairs[key], params, cfg, ci_level) for key in sorted(pairs)}


@dataclass(frozen=True)
class PathwayResult:
    full: PathwayGraph
    impact: PathwayGraph | None = None
    path: tuple[str, ...] = field(default=())


def build_pathway(records, constraints: PathwayConstraints | None = None, *,
                  final: tuple[str, str, dt.date], source: tuple[str, str] = ("AEROD_v", "Tropical")
                  ) -> PathwayResult:
    """Full DAG, impact DAG of the node containing ``final`` and the greedy source-impact path.

    Raises :class:`UnknownNodeError` or :class:`PathNotFoundError` when the
    final node or a path to the source does not exist.
    """
    full = build_full_dag(records, constraints)
    final_id = find_node(full, *final)
    imp = impact_dag(full, final_id)
    path = source_impact_path(imp, default_source(imp, *source), final_id)
    return PathwayResult(full, imp, tuple(path))
