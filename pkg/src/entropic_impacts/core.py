"""Shared data model, sliding windows and mask-based regional reduction."""

from __future__ import annotations

import enum
import datetime as dt
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import AlignmentError, DataError, EmptyRegionError, InvalidParameterError

__all__ = [
    "Scenario",
    "ZONAL_REGIONS",
    "zonal_adjacency",
    "RegionalSeries",
    "EnsemblePair",
    "Window",
    "RegionMask",
    "build_windows",
    "regional_mean",
    "align_pair",
]

# South-to-north chain of latitudinal bands.
ZONAL_REGIONS = (
    "Polar South",
    "Temperate South",
    "Subtropical South",
    "Tropical",
    "Subtropical North",
    "Temperate North",
    "Polar North",
)


def zonal_adjacency(regions: Sequence[str] = ZONAL_REGIONS) -> dict[str, frozenset[str]]:
    """Symmetric chain adjacency (each region adjacent to itself and its neighbours)."""
    adj = {}
    for k, name in enumerate(regions):
        near = {name}
        if k > 0:
            near.add(regions[k - 1])
        if k + 1 < len(regions):
            near.add(regions[k + 1])
        adj[name] = frozenset(near)
    return adj


class Scenario(str, enum.Enum):
    FORCED = "forced"
    COUNTERFACTUAL = "counterfactual"

    @classmethod
    def parse(cls, text: str) -> "Scenario":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise DataError(f"unknown scenario {text!r}; expected 'forced' or 'counterfactual'") from None


def _frozen_array(values, ndim: int, what: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise DataError(f"{what} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise DataError(f"{what} contains a missing or non-finite value at position {tuple(bad)}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class RegionalSeries:
    """Daily regional-mean values of one variable for one ensemble member."""

    variable: str
    region: str
    scenario: Scenario
    member: int
    start_date: dt.date
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "scenario", Scenario(self.scenario))
        if self.member < 1:
            raise DataError(f"member index must be >= 1, got {self.member}")
        object.__setattr__(self, "values", _frozen_array(self.values, 1, "values"))

    def __len__(self):
        return self.values.shape[0]

    def __eq__(self, other):
        if not isinstance(other, RegionalSeries):
            return NotImplemented
        return (
            (self.variable, self.region, self.scenario, self.member, self.start_date)
            == (other.variable, other.region, other.scenario, other.member, other.start_date)
            and np.array_equal(self.values, other.values)
        )


@dataclass(frozen=True, eq=False)
class EnsemblePair:
    """Aligned forced/counterfactual ensembles for one (variable, region).

    ``forced`` and ``counterfactual`` are ``(E, N)`` arrays; row ``e`` of each
    holds the paired member ``e + 1``.
    """

    variable: str
    region: str
    start_date: dt.date
    forced: np.ndarray
    counterfactual: np.ndarray

    def __post_init__(self):
        f = _frozen_array(self.forced, 2, "forced")
        c = _frozen_array(self.counterfactual, 2, "counterfactual")
        if f.shape != c.shape:
            raise AlignmentError(f"forced shape {f.shape} differs from counterfactual shape {c.shape}")
        if f.shape[0] < 1 or f.shape[1] < 1:
            raise AlignmentError("an ensemble pair needs at least one member and one day")
        object.__setattr__(self, "forced", f)
        object.__setattr__(self, "counterfactual", c)

    @property
    def ensemble_size(self) -> int:
        return self.forced.shape[0]

    E = ensemble_size

    @property
    def length(self) -> int:
        return self.forced.shape[1]

    N = length

    @property
    def key(self) -> tuple[str, str]:
        return (self.variable, self.region)

    def date_of(self, index: int) -> dt.date:
        """Calendar date of 1-based day ``index``."""
        return self.start_date + dt.timedelta(days=int(index) - 1)

    def dates(self) -> list[dt.date]:
        return [self.start_date + dt.timedelta(days=k) for k in range(self.length)]

    def ensemble_means(self) -> tuple[np.ndarray, np.ndarray]:
        return self.forced.mean(axis=0), self.counterfactual.mean(axis=0)

    def head(self, size: int) -> "EnsemblePair":
        """The pair restricted to the first ``size`` members."""
        if not 1 <= size <= self.ensemble_size:
            raise InvalidParameterError(f"ensemble subset size must be in [1, {self.ensemble_size}], got {size}")
        return EnsemblePair(self.variable, self.region, self.start_date,
                            self.forced[:size], self.counterfactual[:size])

    def to_series(self) -> tuple[list[RegionalSeries], list[RegionalSeries]]:
        """Split back into per-member :class:`RegionalSeries` lists."""
        def members(arr, scenario):
            return [RegionalSeries(self.variable, self.region, scenario, e + 1, self.start_date, row)
                    for e, row in enumerate(arr)]
        return members(self.forced, Scenario.FORCED), members(self.counterfactual, Scenario.COUNTERFACTUAL)

    def __eq__(self, other):
        if not isinstance(other, EnsemblePair):
            return NotImplemented
        return (
            (self.variable, self.region, self.start_date) == (other.variable, other.region, other.start_date)
            and np.array_equal(self.forced, other.forced)
            and np.array_equal(self.counterfactual, other.counterfactual)
        )


@dataclass(frozen=True)
class Window:
    """A 1-based sliding window: samples ``start .. start + length - 1`` (0-based offsets)."""

    index: int
    start: int
    length: int

    @property
    def stop(self) -> int:
        return self.start + self.length

    def slice(self) -> slice:
        return slice(self.start, self.stop)


def build_windows(series_length: int, n: int, p: int) -> list[Window]:
    """Full-length sliding windows of size ``n`` and lag ``p``.

    Returns ``floor((series_length - n) / p) + 1`` windows; trailing samples not
    covered by a full window are dropped.
    """
    if n < 1 or p < 1:
        raise InvalidParameterError(f"window size and lag must be >= 1, got n={n}, p={p}")
    if n > series_length:
        raise InvalidParameterError(f"window size n={n} exceeds series length {series_length}")
    count = (series_length - n) // p + 1
    return [Window(i + 1, i * p, n) for i in range(count)]


@dataclass(frozen=True, eq=False)
class RegionMask:
    """Non-overlapping assignment of grid columns to labelled regions."""

    labels: tuple[str, ...]
    assignment: np.ndarray
    weights: np.ndarray = field(default=None)

    def __post_init__(self):
        labels = tuple(self.labels)
        assignment = np.asarray(self.assignment)
        if assignment.ndim != 1 or not np.issubdtype(assignment.dtype, np.integer):
            raise DataError("mask assignment must be a 1-d integer array")
        if assignment.size and (assignment.min() < 0 or assignment.max() >= len(labels)):
            raise DataError("mask assignment refers to an unknown region index")
        if self.weights is None:
            weights = np.ones(assignment.shape[0])
        else:
            weights = np.asarray(self.weights, dtype=float)
        if weights.shape != assignment.shape:
            raise DataError("mask weights and assignment differ in length")
        if not np.all(np.isfinite(weights) & (weights > 0)):
            raise DataError("mask weights must be finite and strictly positive")
        assignment = assignment.copy()
        assignment.setflags(write=False)
        weights = weights.copy()
        weights.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "assignment", assignment)
        object.__setattr__(self, "weights", weights)

    @property
    def n_columns(self) -> int:
        return self.assignment.shape[0]


def regional_mean(grid_values, mask: RegionMask) -> dict[str, float] | dict[str, np.ndarray]:
    """Area-weighted mean of ``grid_values`` over each region of ``mask``.

    ``grid_values`` has the grid columns on its last axis; leading axes (e.g.
    time) are kept, so a ``(T, C)`` field yields one length-``T`` array per region.
    """
    x = np.asarray(grid_values, dtype=float)
    if x.shape[-1] != mask.n_columns:
        raise DataError(f"grid has {x.shape[-1]} columns but the mask covers {mask.n_columns}")
    n_regions = len(mask.labels)
    totals = np.bincount(mask.assignment, weights=mask.weights, minlength=n_regions)
    out = {}
    for r, label in enumerate(mask.labels):
        if totals[r] == 0:
            raise EmptyRegionError(f"region {label!r} has no assigned columns")
        cols = mask.assignment == r
        w = mask.weights[cols]
        xr = x[..., cols]
        mean = (xr * w).sum(axis=-1) / w.sum()
        # region-constant fields come back exactly, free of rounding in the weighted sum
        mean = np.where(np.all(xr == xr[..., :1], axis=-1), xr[..., 0], mean)
        out[label] = float(mean) if np.ndim(mean) == 0 else mean
    return out


def align_pair(forced: Sequence[RegionalSeries], counterfactual: Sequence[RegionalSeries]) -> EnsemblePair:
    """Validate and pair forced/counterfactual members into an :class:`EnsemblePair`."""
    if not forced or not counterfactual:
        raise AlignmentError("both forced and counterfactual member lists must be non-empty")
    ref = forced[0]
    for s in list(forced) + list(counterfactual):
        if (s.variable, s.region) != (ref.variable, ref.region):
            raise AlignmentError(
                f"member {s.member} ({s.scenario.value}) is {s.variable}/{s.region}, "
                f"expected {ref.variable}/{ref.region}")

    def by_member(items, scenario):
        table = {}
        for s in items:
            if s.scenario is not scenario:
                raise AlignmentError(f"member {s.member} has scenario {s.scenario.value}, expected {scenario.value}")
            if s.member in table:
                raise AlignmentError(f"duplicate {scenario.value} member {s.member}")
            table[s.member] = s
        return table

    f_tab = by_member(forced, Scenario.FORCED)
    c_tab = by_member(counterfactual, Scenario.COUNTERFACTUAL)
    unmatched = sorted(set(f_tab) ^ set(c_tab))
    if unmatched:
        raise AlignmentError(f"member {unmatched[0]} has no paired counterpart")

    members = sorted(f_tab)
    for e in members:
        for s in (f_tab[e], c_tab[e]):
            if len(s) != len(ref):
                raise AlignmentError(
                    f"{s.scenario.value} member {e} has length {len(s)}, expected {len(ref)}")
            if s.start_date != ref.start_date:
                raise AlignmentError(
                    f"{s.scenario.value} member {e} starts {s.start_date}, expected {ref.start_date}")
    return EnsemblePair(
        ref.variable, ref.region, ref.start_date,
        np.stack([f_tab[e].values for e in members]),
        np.stack([c_tab[e].values for e in members]),
    )
