"""Student's t tail probabilities and quantiles.

Thin wrappers over the Cephes Student-t distribution and its inverse in
``scipy.special``, with the argument checks and conventions used here.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import stdtr, stdtrit

from .exceptions import InvalidParameterError

__all__ = ["t_two_sided_p", "t_sf", "t_quantile"]


def t_two_sided_p(t, df):
    """Two-sided p-value ``P(|T| >= |t|)`` for Student's t with ``df`` degrees of freedom."""
    p = 2.0 * stdtr(np.asarray(df, dtype=float), -np.abs(np.asarray(t, dtype=float)))
    return float(p) if np.ndim(p) == 0 else p


def t_sf(t, df):
    """Upper tail ``P(T > t)``."""
    p = stdtr(np.asarray(df, dtype=float), -np.asarray(t, dtype=float))
    return float(p) if np.ndim(p) == 0 else p


@lru_cache(maxsize=1024)
def t_quantile(tail_prob: float, df: float) -> float:
    """Upper-tail quantile: the ``x >= 0`` with ``P(T > x) = tail_prob``.

    >>> round(t_quantile(0.005, 8), 4)
    3.3554
    """
    if not 0 < tail_prob <= 0.5:
        raise InvalidParameterError(f"tail probability must be in (0, 0.5], got {tail_prob}")
    if not df >= 1:
        raise InvalidParameterError(f"degrees of freedom must be >= 1, got {df}")
    if tail_prob == 0.5:
        return 0.0
    return float(-stdtrit(df, tail_prob))
