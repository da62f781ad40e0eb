import datetime as dt
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from entropic_impacts.changepoint import FeatureInterval
from entropic_impacts.core import EnsemblePair
from entropic_impacts.exceptions import DataError, InvalidParameterError
from entropic_impacts.stats import (granularity_compare, impact_record, impacts_for_features,
                                    interval_mean_diff, monthly_intervals)
from entropic_impacts.tdist import t_quantile

D0 = dt.date(1991, 1, 1)


def pair_from_diffs(w, N=10):
    """Pair whose member e has constant forced-minus-counterfactual difference w[e]."""
    w = np.asarray(w, float)
    c = np.zeros((w.size, N))
    return EnsemblePair("X", "R", D0, c + w[:, None], c)


def naive_record(pair, i, j, ci=0.99):
    E = pair.E
    w = [sum(pair.forced[e][k] - pair.counterfactual[e][k] for k in range(i - 1, j)) / (j - i + 1)
         for e in range(E)]
    mean = math.fsum(w) / E
    sd = math.sqrt(math.fsum((x - mean) ** 2 for x in w) / (E - 1))
    se = sd / math.sqrt(E)
    return mean, se, mean / se


def test_interval_mean_diff_examples():
    assert interval_mean_diff([1, 2, 3], [0, 0, 3], (1, 3)) == 1.0
    assert interval_mean_diff([4, 4], [1, 1], (1, 2)) == 3.0
    with pytest.raises(InvalidParameterError):
        interval_mean_diff([1, 2], [1, 2], (2, 3))


def test_hand_example():
    r = impact_record(pair_from_diffs([1, 2, 3, 4]), FeatureInterval(1, 10))
    assert r.mean_diff == 2.5
    assert r.se == pytest.approx(0.6455, abs=1e-4)
    assert r.score == pytest.approx(3.873, abs=1e-3)
    assert (r.ci_low, r.ci_high) == pytest.approx((-1.27, 6.27), abs=1e-2)
    assert not r.significant


def test_zero_se_conventions():
    assert impact_record(pair_from_diffs([0, 0, 0]), FeatureInterval(1, 5)).score == 0.0
    r = impact_record(pair_from_diffs([0.1, 0.1, 0.1]), FeatureInterval(1, 5))
    assert r.score == math.inf and r.significant and r.ci_low == r.ci_high == r.mean_diff
    with pytest.raises(DataError):
        impact_record(pair_from_diffs([1.0]), FeatureInterval(1, 5))


@given(st.integers(0, 10_000), st.integers(2, 12))
def test_matches_naive_oracle(seed, E):
    rng = np.random.default_rng(seed)
    pair = EnsemblePair("X", "R", D0, rng.normal(size=(E, 40)), rng.normal(size=(E, 40)))
    i, j = sorted(rng.integers(1, 41, 2))
    r = impact_record(pair, FeatureInterval(int(i), int(j)))
    mean, se, score = naive_record(pair, i, j)
    assert r.mean_diff == pytest.approx(mean, rel=1e-12, abs=1e-14)
    assert r.se == pytest.approx(se, rel=1e-12)
    assert r.score == pytest.approx(score, rel=1e-11, abs=1e-12)
    assert r.ci_low <= r.mean_diff <= r.ci_high
    assert r.mean_diff - r.ci_low == pytest.approx(r.ci_high - r.mean_diff, rel=1e-12)


def test_half_width_at_e9():
    rng = np.random.default_rng(2)
    r = impact_record(EnsemblePair("X", "R", D0, rng.normal(size=(9, 20)), np.zeros((9, 20))), FeatureInterval(1, 20))
    assert (r.ci_high - r.mean_diff) / r.se == pytest.approx(3.3554, abs=1e-3)


@given(st.floats(0.01, 100))
def test_scale_invariance(a):
    rng = np.random.default_rng(3)
    f, c = rng.normal(size=(2, 5, 30))
    iv = FeatureInterval(3, 25)
    r1 = impact_record(EnsemblePair("X", "R", D0, f, c), iv)
    r2 = impact_record(EnsemblePair("X", "R", D0, a * f, a * c), iv)
    assert r2.score == pytest.approx(r1.score, rel=1e-9)
    assert r2.mean_diff == pytest.approx(a * r1.mean_diff, rel=1e-9)
    assert r2.ci_high - r2.ci_low == pytest.approx(a * (r1.ci_high - r1.ci_low), rel=1e-9)


def test_ci_shrinks_with_replicated_members():
    base = [0.3, -0.1, 0.7]
    w1 = impact_record(pair_from_diffs(base), FeatureInterval(1, 5)).se
    w4 = impact_record(pair_from_diffs(base * 4), FeatureInterval(1, 5)).se
    # replication keeps the SD (up to the E-1 denominator) and divides SE by sqrt of the size ratio
    sd1, sd4 = np.std(base, ddof=1), np.std(base * 4, ddof=1)
    assert w4 / w1 == pytest.approx(sd4 / sd1 / 2, rel=1e-12)


def test_partition_linearity():
    rng = np.random.default_rng(4)
    pair = EnsemblePair("X", "R", D0, rng.normal(size=(4, 30)), rng.normal(size=(4, 30)))
    parts = [FeatureInterval(1, 7), FeatureInterval(8, 20), FeatureInterval(21, 30)]
    recs = impacts_for_features(pair, parts)
    whole = impact_record(pair, FeatureInterval(1, 30))
    weighted = sum(r.mean_diff * r.interval.length for r in recs) / 30
    assert weighted == pytest.approx(whole.mean_diff, rel=1e-12)
    assert impact_record(EnsemblePair("X", "R", D0, np.ones((3, 30)), np.ones((3, 30))), FeatureInterval(1, 30)).score == 0


def test_granularity_counts():
    rng = np.random.default_rng(5)
    pair = EnsemblePair("X", "R", dt.date(1991, 6, 1), rng.normal(size=(3, 730)), rng.normal(size=(3, 730)))
    assert len(monthly_intervals(pair)) == 24
    assert len(granularity_compare(pair, "monthly")) == 24
    assert len(granularity_compare(pair, "daily")) == 730
    ent = granularity_compare(pair, "entropy")
    assert ent[0].interval.start_index == 1 and ent[-1].interval.end_index == 730
    with pytest.raises(InvalidParameterError):
        granularity_compare(pair, "weekly")
    assert t_quantile(0.005, 2) > 0
