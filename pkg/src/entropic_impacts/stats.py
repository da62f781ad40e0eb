"""Ensemble impact statistics over feature intervals.

For an interval ``[i, j]`` each member contributes the time-mean difference
``w_e = mean(u_e[i:j] - v_e[i:j])``. Across the ``E`` members the impact is
the mean ``w``, its standard error ``SD / sqrt(E)`` (``E - 1`` denominator),
the t-interval ``w +- t_q SE`` with ``E - 1`` degrees of freedom, and the
t-score ``w / SE``.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np

from .changepoint import ChangepointConfig, FeatureInterval, detect_changepoints, map_to_time
from .core import EnsemblePair
from .entropy import EntropyParams, entropy_series
from .exceptions import DataError, InvalidParameterError
from .tdist import t_quantile

__all__ = [
    "ImpactRecord",
    "interval_mean_diff",
    "t_quantile",
    "impact_record",
    "impacts_for_features",
    "monthly_intervals",
    "daily_intervals",
    "entropy_intervals",
    "granularity_compare",
]


@dataclass(frozen=True)
class ImpactRecord:
    """Impact of one (variable, region) over one feature interval."""

    variable: str
    region: str
    interval: FeatureInterval
    mean_diff: float
    se: float
    ci_low: float
    ci_high: float
    score: float
    ci_level: float = 0.99
    ensemble_size: int = 0

    @property
    def significant(self) -> bool:
        """The confidence interval excludes zero."""
        return self.ci_low > 0 or self.ci_high < 0

    @property
    def start_date(self) -> dt.date | None:
        return self.interval.start_date

    @property
    def end_date(self) -> dt.date | None:
        return self.interval.end_date

    @property
    def node_id(self) -> str:
        iv = self.interval
        span = f"{iv.start_date}..{iv.end_date}" if iv.start_date else f"{iv.start_index}..{iv.end_index}"
        return f"{self.variable}|{self.region}|{span}"


def _bounds(interval) -> tuple[int, int]:
    if isinstance(interval, FeatureInterval):
        return interval.start_index, interval.end_index
    i, j = interval
    return int(i), int(j)


def interval_mean_diff(u, v, interval) -> float:
    """Mean of ``u - v`` over the inclusive 1-based day range ``interval``."""
    i, j = _bounds(interval)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if not (1 <= i <= j <= min(u.shape[-1], v.shape[-1])):
        raise InvalidParameterError(f"interval [{i}, {j}] outside series of length {u.shape[-1]}")
    return float(np.mean(u[i - 1:j] - v[i - 1:j]))


def impact_record(pair: EnsemblePair, interval: FeatureInterval, ci_level: float = 0.99) -> ImpactRecord:
    """Ensemble mean difference, standard error, t-interval and t-score over ``interval``.

    A zero standard error gives score 0 when the mean difference is zero and
    ``+-inf`` (a degenerate but significant record) otherwise.
    """
    if not 0 < ci_level < 1:
        raise InvalidParameterError(f"ci_level must be in (0, 1), got {ci_level}")
    E = pair.ensemble_size
    if E < 2:
        raise DataError("an impact needs at least two ensemble members for a standard error")
    i, j = _bounds(interval)
    if not 1 <= i <= j <= pair.length:
        raise InvalidParameterError(f"interval [{i}, {j}] outside series of length {pair.length}")
    if not isinstance(interval, FeatureInterval):
        interval = FeatureInterval.from_indices(i, j, pair.start_date)

    w = (pair.forced[:, i - 1:j] - pair.counterfactual[:, i - 1:j]).mean(axis=1)
    if np.ptp(w) == 0:
        mean, se = float(w[0]), 0.0
    else:
        mean = float(w.mean())
        se = float(w.std(ddof=1)) / math.sqrt(E)
    half = t_quantile((1 - ci_level) / 2, E - 1) * se
    if se > 0:
        score = mean / se
    else:
        score = 0.0 if mean == 0 else math.copysign(math.inf, mean)
    return ImpactRecord(pair.variable, pair.region, interval, mean, se,
                        mean - half, mean + half, score, ci_level, E)


def impacts_for_features(pair: EnsemblePair, intervals: Iterable[FeatureInterval],
                         ci_level: float = 0.99) -> list[ImpactRecord]:
    return [impact_record(pair, iv, ci_level) for iv in intervals]


def daily_intervals(pair: EnsemblePair) -> list[FeatureInterval]:
    return [FeatureInterval.from_indices(k, k, pair.start_date) for k in range(1, pair.length + 1)]


def monthly_intervals(pair: EnsemblePair) -> list[FeatureInterval]:
    """One interval per calendar month touched by the series."""
    out = []
    start = 1
    dates = pair.dates()
    for k in range(1, pair.length):
        if (dates[k].year, dates[k].month) != (dates[k - 1].year, dates[k - 1].month):
            out.append(FeatureInterval.from_indices(start, k, pair.start_date))
            start = k + 1
    out.append(FeatureInterval.from_indices(start, pair.length, pair.start_date))
    return out


def entropy_intervals(pair: EnsemblePair, params: EntropyParams | None = None,
                      cfg: ChangepointConfig | None = None) -> list[FeatureInterval]:
    """Intervals of constant entropy between the forced and counterfactual ensemble means."""
    params = params or EntropyParams()
    cps = detect_changepoints(entropy_series(pair, params), cfg)
    return map_to_time(cps, params, pair.length, pair.start_date)


def granularity_compare(pair: EnsemblePair, mode: Literal["daily", "monthly", "entropy"],
                        params: EntropyParams | None = None, cfg: ChangepointConfig | None = None,
                        ci_level: float = 0.99) -> list[ImpactRecord]:
    """Impact records at daily, calendar-month or entropy-interval granularity."""
    if mode == "daily":
        intervals = daily_intervals(pair)
    elif mode == "monthly":
        intervals = monthly_intervals(pair)
    elif mode == "entropy":
        intervals = entropy_intervals(pair, params, cfg)
    else:
        raise InvalidParameterError(f"unknown granularity mode {mode!r}")
    return impacts_for_features(pair, intervals, ci_level)
