"""Changepoints in an entropy series and their feature intervals on the time axis.

Detection is binary segmentation driven by Welch two-sample t-tests. Each
active segment proposes the split with the largest ``|t|``; pending segments
are tested largest-``|t|`` first, an accepted split queues both halves, and a
rejected one retires its segment.

Every candidate split position evaluated counts as one hypothesis test, so
the proposal is judged at the Bonferroni level ``alpha / K`` with ``K`` the
number of distinct split positions examined in the run (``K <= M - 1``).
Positions admissible inside a sub-segment are always admissible in the full
series, so ``K`` is fixed by the first scan and does not depend on which
splits are accepted.
"""

from __future__ import annotations

import datetime as dt
import heapq
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .core import EnsemblePair, build_windows
from .entropy import EntropyParams, EntropySeries, entropy_series
from .exceptions import DataError, InvalidParameterError
from .tdist import t_two_sided_p

__all__ = [
    "ChangepointConfig",
    "FeatureInterval",
    "TTestResult",
    "SplitTest",
    "Segmentation",
    "two_sample_t",
    "segment",
    "detect_changepoints",
    "map_to_time",
    "stability_histogram",
]


@dataclass(frozen=True)
class ChangepointConfig:
    """Significance level, minimum windows per segment and cap on reported changepoints."""

    alpha: float = 0.05
    min_segment: int = 5
    max_changepoints: int = 20

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise InvalidParameterError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.min_segment < 2:
            raise InvalidParameterError(f"min_segment must be >= 2, got {self.min_segment}")
        if self.max_changepoints < 0:
            raise InvalidParameterError(f"max_changepoints must be >= 0, got {self.max_changepoints}")


@dataclass(frozen=True, order=True)
class FeatureInterval:
    """Inclusive 1-based day range ``start_index .. end_index`` of a daily series."""

    start_index: int
    end_index: int
    start_date: dt.date | None = None
    end_date: dt.date | None = None

    def __post_init__(self):
        if not 1 <= self.start_index <= self.end_index:
            raise InvalidParameterError(f"invalid interval [{self.start_index}, {self.end_index}]")

    @classmethod
    def from_indices(cls, start: int, end: int, origin: dt.date | None = None) -> "FeatureInterval":
        if origin is None:
            return cls(start, end)
        return cls(start, end, origin + dt.timedelta(days=start - 1), origin + dt.timedelta(days=end - 1))

    @property
    def length(self) -> int:
        return self.end_index - self.start_index + 1

    def slice(self) -> slice:
        return slice(self.start_index - 1, self.end_index)


class TTestResult(NamedTuple):
    statistic: float
    df: float
    pvalue: float


class SplitTest(NamedTuple):
    """One performed test: segment ``[lo, hi)`` split at ``cut`` (0-based window positions)."""

    lo: int
    hi: int
    cut: int
    statistic: float
    df: float
    pvalue: float
    accepted: bool


@dataclass(frozen=True)
class Segmentation:
    changepoints: tuple[int, ...]
    tests: tuple[SplitTest, ...]
    bonferroni_k: int
    level: float


def _welch(ma, mb, va, vb, na, nb):
    """Welch statistic, df and two-sided p with the zero-variance conventions."""
    sa, sb = va / na, vb / nb
    se2 = sa + sb
    diff = ma - mb
    if se2 == 0:
        if diff == 0:
            return 0.0, float(na + nb - 2), 1.0
        return math.copysign(math.inf, diff), float(na + nb - 2), 0.0
    t = diff / math.sqrt(se2)
    df = se2 * se2 / (sa * sa / (na - 1) + sb * sb / (nb - 1))
    return t, df, t_two_sided_p(t, df)


def _moments(x: np.ndarray):
    if np.ptp(x) == 0:
        return float(x[0]), 0.0
    return float(np.mean(x)), float(np.var(x, ddof=1))


def two_sample_t(a, b) -> TTestResult:
    """Welch's unequal-variance t-test with Welch-Satterthwaite degrees of freedom.

    Two zero-variance samples give ``t = 0, p = 1`` when their means agree and
    ``t = +-inf, p = 0`` otherwise.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise InvalidParameterError("each sample needs at least two values")
    (ma, va), (mb, vb) = _moments(a), _moments(b)
    return TTestResult(*_welch(ma, mb, va, vb, a.size, b.size))


def _split_scan(x: np.ndarray, min_segment: int):
    """Welch tests for every admissible split of ``x``; returns ``(cuts, t, df, p)``."""
    L = x.shape[0]
    cuts = np.arange(min_segment, L - min_segment + 1)
    nl = cuts.astype(float)
    nr = L - nl
    y = x - x[0]
    c1 = np.concatenate(([0.0], np.cumsum(y)))
    c2 = np.concatenate(([0.0], np.cumsum(y * y)))
    s1l, s2l = c1[cuts], c2[cuts]
    s1r, s2r = c1[-1] - s1l, c2[-1] - s2l
    ml, mr = s1l / nl, s1r / nr
    vl = np.maximum(s2l - s1l * ml, 0.0) / (nl - 1)
    vr = np.maximum(s2r - s1r * mr, 0.0) / (nr - 1)

    # constant sides: exact means and zero variance
    const_l = (np.maximum.accumulate(x) == np.minimum.accumulate(x))[cuts - 1]
    const_r = (np.maximum.accumulate(x[::-1]) == np.minimum.accumulate(x[::-1]))[::-1][cuts]
    ml = np.where(const_l, y[0], ml)
    mr = np.where(const_r, y[cuts.clip(max=L - 1)], mr)
    vl = np.where(const_l, 0.0, vl)
    vr = np.where(const_r, 0.0, vr)

    sl, sr = vl / nl, vr / nr
    se2 = sl + sr
    diff = ml - mr
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(se2 > 0, diff / np.sqrt(se2), np.where(diff == 0, 0.0, np.copysign(np.inf, diff)))
        df = np.where(se2 > 0, se2 * se2 / (sl * sl / (nl - 1) + sr * sr / (nr - 1)), nl + nr - 2)
    p = np.where(se2 > 0, t_two_sided_p(np.where(se2 > 0, t, 0.0), df),
                 np.where(diff == 0, 1.0, 0.0))
    return cuts, t, df, np.atleast_1d(p)


class _Segmenter:
    def __init__(self, values: np.ndarray, min_segment: int):
        self.values = values
        self.min_segment = min_segment
        self._cache: dict[tuple[int, int], tuple | None] = {}

    def candidate(self, lo: int, hi: int):
        key = (lo, hi)
        if key not in self._cache:
            if hi - lo < 2 * self.min_segment:
                self._cache[key] = None
            else:
                cuts, t, df, p = _split_scan(self.values[lo:hi], self.min_segment)
                k = int(np.argmax(np.abs(t)))
                self._cache[key] = (lo + int(cuts[k]), float(t[k]), float(df[k]), float(p[k]))
        return self._cache[key]

    def run(self, level: float) -> list[SplitTest]:
        tests = []
        heap = []
        order = 0

        def push(lo, hi):
            nonlocal order
            cand = self.candidate(lo, hi)
            if cand is not None:
                heapq.heappush(heap, (-abs(cand[1]), order, lo, hi, cand))
                order += 1

        push(0, self.values.shape[0])
        while heap:
            _, _, lo, hi, (cut, t, df, p) = heapq.heappop(heap)
            accepted = p < level
            tests.append(SplitTest(lo, hi, cut, t, df, p, accepted))
            if accepted:
                push(lo, cut)
                push(cut, hi)
        return tests


def _as_values(s) -> np.ndarray:
    values = np.asarray(s.values if isinstance(s, EntropySeries) else s, dtype=float)
    if values.ndim != 1:
        raise DataError("entropy series must be 1-d")
    if not np.all(np.isfinite(values)):
        raise DataError("entropy series contains non-finite values")
    return values


def segment(s, cfg: ChangepointConfig | None = None) -> Segmentation:
    """Run the segmentation and return changepoints together with every test performed."""
    cfg = cfg or ChangepointConfig()
    values = _as_values(s)
    if values.shape[0] < 2 * cfg.min_segment:
        raise InvalidParameterError(
            f"entropy series of length {values.shape[0]} is shorter than 2 * min_segment = {2 * cfg.min_segment}")
    seg = _Segmenter(values, cfg.min_segment)
    k = values.shape[0] - 2 * cfg.min_segment + 1
    level = cfg.alpha / k
    tests = tuple(seg.run(level))
    accepted = [t.cut + 1 for t in tests if t.accepted][: cfg.max_changepoints]
    return Segmentation(tuple(sorted(accepted)), tests, k, level)


def detect_changepoints(s, cfg: ChangepointConfig | None = None) -> list[int]:
    """Changepoints of an entropy series as sorted 1-based window indices.

    A changepoint ``v`` splits the series into windows ``1 .. v-1`` and ``v .. M``.
    """
    return list(segment(s, cfg).changepoints)


def map_to_time(window_changepoints: Sequence[int], params: EntropyParams, series_length: int,
                start_date: dt.date | None = None) -> list[FeatureInterval]:
    """Partition days ``1 .. series_length`` at the midpoints of the changepoint windows.

    Window ``i`` maps to day ``(i - 1) * p + ceil(n / 2)``, which becomes the first
    day of a new interval.
    """
    n_windows = len(build_windows(series_length, params.n, params.p))
    bounds = set()
    for i in window_changepoints:
        if not 1 <= i <= n_windows:
            raise InvalidParameterError(f"window index {i} outside 1..{n_windows}")
        t = params.midpoint(i)
        if t > 1:
            bounds.add(t)
    starts = [1] + sorted(bounds)
    ends = [b - 1 for b in starts[1:]] + [series_length]
    return [FeatureInterval.from_indices(a, b, start_date) for a, b in zip(starts, ends)]


def stability_histogram(pair: EnsemblePair, params: EntropyParams | None = None,
                        cfg: ChangepointConfig | None = None) -> dict[int, np.ndarray]:
    """Changepoint days found with the first ``1 .. E`` members.

    Maps each changepoint day to an ``E``-vector whose entry ``k`` is 1 when the
    day was found using the first ``k + 1`` members; row sums are the frequency.
    """
    params = params or EntropyParams()
    E = pair.ensemble_size
    hist: dict[int, np.ndarray] = {}
    for size in range(1, E + 1):
        cps = detect_changepoints(entropy_series(pair.head(size), params), cfg)
        for i in cps:
            hist.setdefault(params.midpoint(i), np.zeros(E, dtype=int))[size - 1] += 1
    return dict(sorted(hist.items()))
