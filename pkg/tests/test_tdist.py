import numpy as np
import pytest
from hypothesis import given, strategies as st
import mpmath

from entropic_impacts.exceptions import InvalidParameterError
from entropic_impacts.tdist import t_quantile, t_sf, t_two_sided_p


def test_reference_quantiles():
    assert t_quantile(0.005, 8) == pytest.approx(3.355387, abs=1e-6)
    assert t_quantile(0.025, 1e6) == pytest.approx(1.959966, abs=1e-5)
    assert t_quantile(0.005, 3) == pytest.approx(5.840909, abs=1e-6)
    assert t_quantile(0.5, 4) == 0.0


mpmath.mp.dps = 50


def mp_upper_tail(t, df):
    """High-precision P(T > t) from the incomplete beta integral."""
    t, df = mpmath.mpf(t), mpmath.mpf(df)
    half = mpmath.betainc(df / 2, mpmath.mpf(1) / 2, 0, df / (df + t * t), regularized=True) / 2
    return half if t >= 0 else 1 - half


@given(st.floats(1e-6, 0.5, exclude_max=True), st.floats(1, 500))
def test_quantile_inverts_high_precision_tail(q, df):
    x = t_quantile(q, df)
    assert x >= 0
    assert float(mp_upper_tail(x, df)) == pytest.approx(q, rel=1e-9, abs=1e-15)


@given(st.floats(-50, 50), st.floats(1, 200))
def test_tails_match_high_precision(t, df):
    ref = mp_upper_tail(t, df)
    assert t_sf(t, df) == pytest.approx(float(ref), rel=1e-9, abs=1e-300)
    assert t_two_sided_p(t, df) == pytest.approx(float(2 * mp_upper_tail(abs(t), df)), rel=1e-9, abs=1e-300)


def test_vectorized_and_infinite():
    p = t_two_sided_p(np.array([0.0, np.inf, -np.inf]), 5)
    assert list(p) == [1.0, 0.0, 0.0]


@pytest.mark.parametrize("q,df", [(0.0, 5), (0.6, 5), (0.01, 0.5)])
def test_quantile_rejects(q, df):
    with pytest.raises(InvalidParameterError):
        t_quantile(q, df)
