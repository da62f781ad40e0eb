"""Cross-fuzzy entropy between paired windows and per-window entropy series.

The entropy of two windows ``U`` and ``V`` of length ``n`` compares every
baseline-subtracted embedding vector of ``U`` with every one of ``V`` using the
Chebyshev distance and an exponential membership ``exp(-d**r2 / r1)``. With
``K = n - m`` vectors of length ``m`` and ``m + 1`` (both drawn from the start
indices ``0 .. K-1``)::

    phi_m   = sum_ij D_ij(m)   / K**2
    phi_m+1 = sum_ij D_ij(m+1) / K**2
    s       = ln(phi_m) - ln(phi_m+1)

Values are in nats.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .core import EnsemblePair, build_windows
from .exceptions import DataError, InvalidParameterError, NumericalUnderflowError

__all__ = [
    "EntropyParams",
    "EntropySeries",
    "fuzzy_membership",
    "cross_fuzzy_entropy",
    "entropy_series",
]

# elements of the (windows, K, K, m+1) distance tensor evaluated at once
_CHUNK_ELEMENTS = 1 << 22


@dataclass(frozen=True)
class EntropyParams:
    """Embedding dimension ``m``, fuzzy width ``r1`` and exponent ``r2``, window ``n`` and lag ``p``."""

    m: int = 2
    r1: float = 0.2
    r2: float = 2.0
    n: int = 30
    p: int = 9

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise InvalidParameterError(f"embedding dimension m must be an integer >= 1, got {self.m}")
        if not (self.r1 > 0 and self.r2 > 0):
            raise InvalidParameterError(f"fuzzy parameters must be positive, got r1={self.r1}, r2={self.r2}")
        if self.p < 1:
            raise InvalidParameterError(f"lag p must be >= 1, got {self.p}")
        if self.n <= self.m + 1:
            raise InvalidParameterError(f"window size n={self.n} must exceed m + 1 = {self.m + 1}")

    @property
    def midpoint_offset(self) -> int:
        """1-based position of a window's midpoint within the window."""
        return -(-self.n // 2)

    def midpoint(self, window_index: int) -> int:
        """1-based time index of the midpoint of 1-based window ``window_index``."""
        return (window_index - 1) * self.p + self.midpoint_offset


@dataclass(frozen=True, eq=False)
class EntropySeries:
    values: np.ndarray
    midpoints: np.ndarray
    params: EntropyParams
    start_date: dt.date | None = None

    def __len__(self):
        return self.values.shape[0]

    def midpoint_dates(self) -> list[dt.date]:
        if self.start_date is None:
            raise DataError("entropy series has no start date")
        return [self.start_date + dt.timedelta(days=int(t) - 1) for t in self.midpoints]


def fuzzy_membership(d, r1: float = 0.2, r2: float = 2.0):
    """Exponential membership ``exp(-d**r2 / r1)`` of a distance ``d >= 0``."""
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise InvalidParameterError("distances must be non-negative")
    out = np.exp(-(d ** r2) / r1)
    return float(out) if out.ndim == 0 else out


def _baseline_vectors(windows: np.ndarray, m: int, length: int) -> np.ndarray:
    """Baseline-subtracted embedding vectors, shape ``(..., n - m, length)``.

    Each component is written as the mean of differences ``u[i+k] - u[i+l]``
    rather than ``u[i+k] - mean``, so adding a constant to a window leaves the
    vectors bit-for-bit unchanged whenever the addition itself is exact.
    """
    n = windows.shape[-1]
    seg = sliding_window_view(windows, m + 1, axis=-1)[..., : n - m, :length]
    return (seg[..., :, None] - seg[..., None, :]).sum(axis=-1) / length


def _phi_sums(x: np.ndarray, y: np.ndarray, r1: float, r2: float) -> np.ndarray:
    """Compensated sums of memberships over all vector pairs, per window."""
    d = np.abs(x[..., :, None, :] - y[..., None, :, :]).max(axis=-1)
    member = np.exp(-(d ** r2) / r1)
    flat = member.reshape(member.shape[0], -1)
    return np.array([math.fsum(row.tolist()) for row in flat])


def _entropy_batch(u_windows: np.ndarray, v_windows: np.ndarray, m: int, r1: float, r2: float,
                   first_index: int = 1) -> np.ndarray:
    n = u_windows.shape[-1]
    k = n - m
    phis = []
    for length in (m, m + 1):
        x = _baseline_vectors(u_windows, m, length)
        y = _baseline_vectors(v_windows, m, length)
        phis.append(_phi_sums(x, y, r1, r2) / (k * k))
    phi_m, phi_m1 = phis
    under = np.flatnonzero((phi_m == 0) | (phi_m1 == 0))
    if under.size:
        raise NumericalUnderflowError(
            f"fuzzy similarity underflowed to zero in window {first_index + int(under[0])}; "
            "the fuzzy width r1 is too small for the data scale")
    return np.log(phi_m) - np.log(phi_m1)


def cross_fuzzy_entropy(u, v, params: EntropyParams | None = None, *, m: int | None = None,
                        r1: float | None = None, r2: float | None = None) -> float:
    """Cross-fuzzy entropy of two equal-length windows ``u`` and ``v``.

    Parameters
    ----------
    u, v : array-like
        Windows of equal length ``n > m + 1``.
    params : EntropyParams, optional
        Supplies ``m``, ``r1`` and ``r2`` (defaults 2, 0.2, 2). Keyword
        arguments override individual fields.

    Returns
    -------
    float
        ``ln(phi_m) - ln(phi_m+1)`` in nats.
    """
    params = params or EntropyParams()
    m = params.m if m is None else m
    r1 = params.r1 if r1 is None else r1
    r2 = params.r2 if r2 is None else r2
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.ndim != 1 or u.shape != v.shape:
        raise DataError(f"windows must be 1-d and equal length, got {u.shape} and {v.shape}")
    if u.shape[0] <= m + 1:
        raise InvalidParameterError(f"window length {u.shape[0]} must exceed m + 1 = {m + 1}")
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
        raise DataError("windows contain non-finite values")
    return float(_entropy_batch(u[None], v[None], m, r1, r2)[0])


def entropy_series(data, params: EntropyParams | None = None) -> EntropySeries:
    """Cross-fuzzy entropy for every sliding window of a series pair.

    ``data`` is an :class:`EnsemblePair` (entropy is taken between the forced
    and counterfactual ensemble means) or a ``(u, v)`` tuple of aligned series.
    """
    params = params or EntropyParams()
    start = None
    if isinstance(data, EnsemblePair):
        u, v = data.ensemble_means()
        start = data.start_date
    else:
        u, v = (np.asarray(a, dtype=float) for a in data)
    if u.ndim != 1 or u.shape != v.shape:
        raise DataError(f"series must be 1-d and equal length, got {u.shape} and {v.shape}")
    windows = build_windows(u.shape[0], params.n, params.p)
    count = len(windows)
    uw = sliding_window_view(u, params.n)[:: params.p][:count]
    vw = sliding_window_view(v, params.n)[:: params.p][:count]

    k = params.n - params.m
    chunk = max(1, _CHUNK_ELEMENTS // (k * k * (params.m + 1)))
    values = np.concatenate([
        _entropy_batch(uw[a:a + chunk], vw[a:a + chunk], params.m, params.r1, params.r2, first_index=a + 1)
        for a in range(0, count, chunk)
    ])
    values.setflags(write=False)
    midpoints = np.array([params.midpoint(w.index) for w in windows])
    midpoints.setflags(write=False)
    return EntropySeries(values, midpoints, params, start)
