"""Synthetic paired ensembles with known injected impacts.

Member ``e`` of every (variable, region) shares one background realization
between its forced and counterfactual runs: a seasonal cosine plus a
stationary AR(1) anomaly. The forced run additionally carries

* the impact kernels: linear-ramp steps of amplitude ``A * magnitude_scale``;
* a member-specific divergence, an independent AR(1) anomaly multiplied by
  the kernel envelope, so paired runs agree exactly wherever no impact acts
  and spread apart like chaotic ensemble members where one does.

Any ``magnitude_scale == 0`` run is identical to its counterfactual. All
randomness comes from PCG64 streams keyed by (member, variable, region,
stream), so results do not depend on generation order or on which other
variables and regions are requested.
"""

from __future__ import annotations

import datetime as dt
import zlib
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
from scipy.signal import lfilter

from .changepoint import FeatureInterval
from .core import EnsemblePair
from .exceptions import ConfigError
from .stats import ImpactRecord

__all__ = [
    "Background",
    "ImpactSpec",
    "SynthConfig",
    "GroundTruth",
    "RecoveryMetrics",
    "DEFAULT_BACKGROUNDS",
    "DEFAULT_IMPACTS",
    "impact_kernel",
    "generate_pair",
    "score_recovery",
    "interval_jaccard",
]

_BACKGROUND_STREAM = 0
_DIVERGENCE_STREAM = 1


@dataclass(frozen=True)
class Background:
    """Seasonal cosine (peak on ``peak_day`` of the year) plus AR(1) noise of marginal SD ``sigma``.

    ``divergence_sigma`` and ``divergence_ar_coef`` shape the forced-run
    divergence under an impact; the sigma defaults to ``sigma``.
    """

    mean: float = 0.0
    seasonal_amplitude: float = 0.0
    ar_coef: float = 0.5
    sigma: float = 1.0
    peak_day: int = 196
    divergence_sigma: float | None = None
    divergence_ar_coef: float = 0.0

    def __post_init__(self):
        for name in ("ar_coef", "divergence_ar_coef"):
            if not 0 <= getattr(self, name) < 1:
                raise ConfigError(f"{name} must be in [0, 1), got {getattr(self, name)}")
        if self.sigma < 0 or (self.divergence_sigma is not None and self.divergence_sigma < 0):
            raise ConfigError("noise sigmas must be >= 0")
        if self.divergence_sigma is None:
            object.__setattr__(self, "divergence_sigma", self.sigma)


@dataclass(frozen=True)
class ImpactSpec:
    """Step of ``amplitude`` on days ``start_day .. end_day`` with ``ramp_days``-long linear edges."""

    variable: str
    region: str
    start_day: int
    end_day: int
    amplitude: float
    ramp_days: int = 1

    def __post_init__(self):
        if self.ramp_days < 1:
            raise ConfigError(f"ramp width must be >= 1 day, got {self.ramp_days}")
        if self.start_day > self.end_day:
            raise ConfigError(f"impact on {self.variable}/{self.region} ends before it starts")


DEFAULT_BACKGROUNDS = {
    "AEROD_v": Background(mean=0.12, seasonal_amplitude=0.01, ar_coef=0.8, sigma=0.004),
    "FSDSC": Background(mean=250.0, seasonal_amplitude=60.0, ar_coef=0.6, sigma=5.0),
    "TREFHT": Background(mean=285.0, seasonal_amplitude=5.0, ar_coef=0.7, sigma=0.3),
}

# Days are counted from 1991-06-01; the forcing starts mid-June.
DEFAULT_IMPACTS = (
    ImpactSpec("AEROD_v", "Tropical", 16, 200, 0.03, 5),
    ImpactSpec("AEROD_v", "Subtropical North", 30, 260, 0.01, 10),
    ImpactSpec("AEROD_v", "Temperate North", 60, 420, 0.04, 10),
    ImpactSpec("FSDSC", "Temperate North", 150, 440, -8.0, 10),
    ImpactSpec("TREFHT", "Temperate North", 322, 521, -0.6, 10),
)

DEFAULT_REGIONS = (
    "Temperate South",
    "Subtropical South",
    "Tropical",
    "Subtropical North",
    "Temperate North",
    "Polar North",
)


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    ensemble_size: int = 9
    days: int = 1461
    start_date: dt.date = dt.date(1991, 6, 1)
    variables: tuple[str, ...] = ("AEROD_v", "FSDSC", "TREFHT")
    regions: tuple[str, ...] = DEFAULT_REGIONS
    backgrounds: Mapping[str, Background] = field(default_factory=lambda: dict(DEFAULT_BACKGROUNDS))
    # per-(variable, region) overrides of the per-variable backgrounds
    region_backgrounds: Mapping[tuple[str, str], Background] = field(default_factory=dict)
    impacts: tuple[ImpactSpec, ...] = DEFAULT_IMPACTS
    magnitude_scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "regions", tuple(self.regions))
        object.__setattr__(self, "impacts", tuple(self.impacts))
        if self.ensemble_size < 1:
            raise ConfigError(f"ensemble size must be >= 1, got {self.ensemble_size}")
        if self.days < 1:
            raise ConfigError(f"series length must be >= 1 day, got {self.days}")
        if self.magnitude_scale < 0:
            raise ConfigError(f"magnitude scale must be >= 0, got {self.magnitude_scale}")
        for imp in self.impacts:
            if not 1 <= imp.start_day <= imp.end_day <= self.days:
                raise ConfigError(
                    f"impact on {imp.variable}/{imp.region} spans days {imp.start_day}..{imp.end_day}, "
                    f"outside 1..{self.days}")
            if imp.variable not in self.variables or imp.region not in self.regions:
                raise ConfigError(f"impact on unknown series {imp.variable}/{imp.region}")

    def background(self, variable: str, region: str) -> Background:
        if (variable, region) in self.region_backgrounds:
            return self.region_backgrounds[(variable, region)]
        return self.backgrounds.get(variable, Background())


@dataclass(frozen=True)
class GroundTruth:
    """True impacts per (variable, region), amplitudes already scaled."""

    days: int
    start_date: dt.date
    impacts: Mapping[tuple[str, str], tuple[ImpactSpec, ...]]

    def intervals(self, key: tuple[str, str]) -> list[FeatureInterval]:
        return [FeatureInterval.from_indices(s.start_day, s.end_day, self.start_date)
                for s in self.impacts.get(key, ())]

    def expected_difference(self, key: tuple[str, str]) -> np.ndarray:
        """Noise-free forced minus counterfactual signal for ``key``."""
        days = np.arange(1, self.days + 1)
        total = np.zeros(self.days)
        for s in self.impacts.get(key, ()):
            total += s.amplitude * impact_kernel(days, s.start_day, s.end_day, s.ramp_days)
        return total

    def expected_mean(self, key: tuple[str, str], interval: FeatureInterval) -> float:
        return float(self.expected_difference(key)[interval.slice()].mean())

    def to_json(self) -> dict:
        return {
            "days": self.days,
            "start_date": self.start_date.isoformat(),
            "impacts": [
                {"variable": s.variable, "region": s.region, "start_day": s.start_day,
                 "end_day": s.end_day, "amplitude": s.amplitude, "ramp_days": s.ramp_days,
                 "start_date": (self.start_date + dt.timedelta(days=s.start_day - 1)).isoformat(),
                 "end_date": (self.start_date + dt.timedelta(days=s.end_day - 1)).isoformat()}
                for key in sorted(self.impacts) for s in self.impacts[key]
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "GroundTruth":
        table: dict[tuple[str, str], list[ImpactSpec]] = {}
        for d in data["impacts"]:
            spec = ImpactSpec(d["variable"], d["region"], int(d["start_day"]), int(d["end_day"]),
                              float(d["amplitude"]), int(d.get("ramp_days", 1)))
            table.setdefault((spec.variable, spec.region), []).append(spec)
        return cls(int(data["days"]), dt.date.fromisoformat(data["start_date"]),
                   {k: tuple(v) for k, v in table.items()})


def impact_kernel(days, start: int, end: int, ramp: int = 1) -> np.ndarray:
    """Trapezoid on ``start .. end``: rises over ``ramp`` days, holds at 1, falls over ``ramp`` days."""
    days = np.asarray(days, dtype=float)
    up = np.clip((days - start + 1) / ramp, 0.0, 1.0)
    down = np.clip((end - days + 1) / ramp, 0.0, 1.0)
    return np.minimum(up, down)


def _stream(seed: int, member: int, variable: str, region: str, kind: int) -> np.random.Generator:
    key = (member, zlib.crc32(variable.encode()), zlib.crc32(region.encode()), kind)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def _ar1(rng: np.random.Generator, n: int, phi: float, sigma: float) -> np.ndarray:
    eps = rng.standard_normal(n)
    eps[1:] *= np.sqrt(1.0 - phi * phi)
    return sigma * lfilter([1.0], [1.0, -phi], eps)


def _seasonal(cfg: SynthConfig, bg: Background) -> np.ndarray:
    doy0 = cfg.start_date.timetuple().tm_yday
    t = np.arange(cfg.days) + doy0
    return bg.mean + bg.seasonal_amplitude * np.cos(2 * np.pi * (t - bg.peak_day) / 365.25)


def generate_pair(cfg: SynthConfig | None = None) -> tuple[dict[tuple[str, str], EnsemblePair], GroundTruth]:
    """Paired ensembles for every (variable, region) in ``cfg`` plus their ground truth."""
    cfg = cfg or SynthConfig()
    by_key: dict[tuple[str, str], list[ImpactSpec]] = {}
    for imp in cfg.impacts:
        by_key.setdefault((imp.variable, imp.region), []).append(imp)

    days = np.arange(1, cfg.days + 1)
    pairs = {}
    truth = {}
    for variable in cfg.variables:
        for region in cfg.regions:
            key = (variable, region)
            bg = cfg.background(variable, region)
            seasonal = _seasonal(cfg, bg)
            specs = by_key.get(key, [])
            signal = np.zeros(cfg.days)
            envelope = np.zeros(cfg.days)
            for s in specs:
                k = impact_kernel(days, s.start_day, s.end_day, s.ramp_days)
                signal += s.amplitude * cfg.magnitude_scale * k
                envelope = np.maximum(envelope, k)
            diverge = cfg.magnitude_scale > 0 and envelope.any()

            forced = np.empty((cfg.ensemble_size, cfg.days))
            counter = np.empty((cfg.ensemble_size, cfg.days))
            for e in range(cfg.ensemble_size):
                base = seasonal + _ar1(_stream(cfg.seed, e, variable, region, _BACKGROUND_STREAM),
                                       cfg.days, bg.ar_coef, bg.sigma)
                counter[e] = base
                forced[e] = base + signal
                if diverge:
                    drift = _ar1(_stream(cfg.seed, e, variable, region, _DIVERGENCE_STREAM),
                                 cfg.days, bg.divergence_ar_coef, bg.divergence_sigma)
                    forced[e] += envelope * drift
            pairs[key] = EnsemblePair(variable, region, cfg.start_date, forced, counter)
            if specs:
                truth[key] = tuple(
                    ImpactSpec(s.variable, s.region, s.start_day, s.end_day,
                               s.amplitude * cfg.magnitude_scale, s.ramp_days) for s in specs)
    return pairs, GroundTruth(cfg.days, cfg.start_date, truth)


def interval_jaccard(a: FeatureInterval, b: FeatureInterval) -> float:
    """Day-count Jaccard index of two inclusive intervals."""
    inter = min(a.end_index, b.end_index) - max(a.start_index, b.start_index) + 1
    if inter <= 0:
        return 0.0
    union = max(a.end_index, b.end_index) - min(a.start_index, b.start_index) + 1
    return inter / union


@dataclass(frozen=True)
class RecoveryMetrics:
    """Best matching record and Jaccard per true impact, plus record-level precision/recall."""

    jaccard: dict[tuple[str, str, int, int], float]
    best: dict[tuple[str, str, int, int], ImpactRecord | None]
    precision: float
    recall: float
    n_found: int


def score_recovery(found: Iterable[ImpactRecord], truth: GroundTruth) -> RecoveryMetrics:
    """Compare significant records against the injected impacts.

    A significant record is a true positive when it overlaps a true impact of
    the same series with matching sign. With no significant records the
    precision is reported as 1.0.
    """
    sig = [r for r in found if r.significant]
    jaccard: dict = {}
    best: dict = {}
    for key, specs in sorted(truth.impacts.items()):
        for s in specs:
            tid = (key[0], key[1], s.start_day, s.end_day)
            true_iv = FeatureInterval(s.start_day, s.end_day)
            jaccard[tid], best[tid] = 0.0, None
            for r in sig:
                if (r.variable, r.region) != key or np.sign(r.mean_diff) != np.sign(s.amplitude):
                    continue
                j = interval_jaccard(r.interval, true_iv)
                if j > jaccard[tid]:
                    jaccard[tid], best[tid] = j, r

    def matches(r):
        return any(
            np.sign(r.mean_diff) == np.sign(s.amplitude)
            and interval_jaccard(r.interval, FeatureInterval(s.start_day, s.end_day)) > 0
            for s in truth.impacts.get((r.variable, r.region), ()))

    tp = sum(matches(r) for r in sig)
    precision = tp / len(sig) if sig else 1.0
    recall = sum(j > 0 for j in jaccard.values()) / len(jaccard) if jaccard else 1.0
    return RecoveryMetrics(jaccard, best, precision, recall, len(sig))
