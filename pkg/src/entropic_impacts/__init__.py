"""Impacts of a forcing from paired forced/counterfactual ensembles.

Cross-fuzzy entropy between the two ensemble means is segmented into
intervals of constant entropy; each interval's ensemble mean difference is
tested with a t-interval, and significant impacts are linked into
source-to-impact pathway graphs.
"""

from .changepoint import ChangepointConfig, FeatureInterval, detect_changepoints, map_to_time, two_sample_t
from .core import EnsemblePair, RegionalSeries, RegionMask, Scenario, align_pair, build_windows, regional_mean
from .entropy import EntropyParams, EntropySeries, cross_fuzzy_entropy, entropy_series
from .pathway import (PathwayConstraints, PathwayGraph, build_full_dag, export_dot, impact_dag,
                      source_impact_path)
from .stats import ImpactRecord, granularity_compare, impact_record
from .synth import GroundTruth, SynthConfig, generate_pair, score_recovery
from .tdist import t_quantile

__version__ = "0.1.0"
