"""Shared fixtures and independent oracles for the test suite."""

import datetime as dt
import math

import numpy as np

from entropic_impacts.changepoint import FeatureInterval
from entropic_impacts.stats import ImpactRecord
from entropic_impacts.synth import ImpactSpec, SynthConfig

KEY = ("TREFHT", "Temperate North")
TRUE_IMPACT = ImpactSpec("TREFHT", "Temperate North", 322, 521, -0.6, 10)


def trefht_config(seed, scale=1.0, ensemble_size=9, impact=TRUE_IMPACT):
    """Single-series fixture: E 9, 1461 days, -0.6 K over 200 days, sigma 0.3, seasonal amplitude 5."""
    return SynthConfig(seed=seed, ensemble_size=ensemble_size, variables=(KEY[0],), regions=(KEY[1],),
                       impacts=(impact,), magnitude_scale=scale)


def null_config(seed):
    """Forced runs diverge from their counterfactuals everywhere with zero mean shift."""
    return trefht_config(seed, impact=ImpactSpec(KEY[0], KEY[1], 1, 1461, 0.0, 1))


def naive_cross_fuzzy_entropy(u, v, m=2, r1=0.2, r2=2.0):
    """Direct loop transcription of the cross-fuzzy entropy definition."""
    n = len(u)
    K = n - m

    def vectors(x, length):
        out = []
        for i in range(K):
            seg = [float(x[i + k]) for k in range(length)]
            base = sum(seg) / length
            out.append([s - base for s in seg])
        return out

    def phi(length):
        xs, ys = vectors(u, length), vectors(v, length)
        total = []
        for a in xs:
            for b in ys:
                d = max(abs(p - q) for p, q in zip(a, b))
                total.append(math.exp(-(d ** r2) / r1))
        return math.fsum(total) / (K * K)

    return math.log(phi(m)) - math.log(phi(m + 1))


def make_record(variable, region, start, end, score, origin=dt.date(2000, 1, 1), mean=None):
    """Hand-built impact record whose CI and standard error agree with its score at E 9."""
    iv = FeatureInterval.from_indices(start, end, origin)
    mean = score if mean is None else mean
    se = abs(mean / score) if score and mean else 1.0
    half = 3.355387331 * se
    return ImpactRecord(variable, region, iv, mean, se, mean - half, mean + half, score, 0.99, 9)


def truth_score(records, interval):
    """Day-weighted mean |score| of the records covering ``interval``."""
    total = 0.0
    for r in records:
        lo = max(r.interval.start_index, interval.start_index)
        hi = min(r.interval.end_index, interval.end_index)
        if hi >= lo:
            total += abs(r.score) * (hi - lo + 1)
    return total / interval.length


VARIABLES = ("AEROD_v", "FSDSC", "TREFHT")
REGIONS = ("Polar South", "Temperate South", "Subtropical South", "Tropical",
           "Subtropical North", "Temperate North", "Polar North")
DEPS = {("AEROD_v", "AEROD_v"), ("AEROD_v", "FSDSC"), ("FSDSC", "FSDSC"), ("FSDSC", "TREFHT"),
        ("TREFHT", "TREFHT")}


def random_records(rng, count):
    """Random impact records with distinct (variable, region, start, end) keys."""
    out, seen = [], set()
    while len(out) < count:
        v = VARIABLES[rng.integers(3)]
        r = REGIONS[rng.integers(7)]
        start = int(rng.integers(1, 120))
        end = start + int(rng.integers(0, 40))
        if (v, r, start, end) in seen:
            continue
        seen.add((v, r, start, end))
        out.append(make_record(v, r, start, end, float(rng.normal(0, 4))))
    return out


def brute_force_edges(records, epsilon=1.0, slack=0):
    """All edges allowed by the constraint rules, by exhaustive pair enumeration."""
    nodes = [r for r in records if abs(r.score) > epsilon]

    def key(r):
        return (r.interval.start_index, VARIABLES.index(r.variable), REGIONS.index(r.region), r.interval.end_index)

    edges = set()
    for a in nodes:
        for b in nodes:
            if a is b:
                continue
            if not a.interval.start_index <= b.interval.start_index <= a.interval.end_index + slack:
                continue
            if abs(REGIONS.index(a.region) - REGIONS.index(b.region)) > 1:
                continue
            if (a.variable, b.variable) not in DEPS or not key(a) < key(b):
                continue
            edges.add((a.node_id, b.node_id))
    return {r.node_id for r in nodes}, edges
