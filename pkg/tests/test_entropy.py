import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from entropic_impacts.core import EnsemblePair
from entropic_impacts.entropy import EntropyParams, cross_fuzzy_entropy, entropy_series, fuzzy_membership
from entropic_impacts.exceptions import DataError, InvalidParameterError, NumericalUnderflowError

from helpers import naive_cross_fuzzy_entropy

EntropyHub = pytest.importorskip("EntropyHub")


def test_params_defaults_and_midpoints():
    p = EntropyParams()
    assert (p.m, p.r1, p.r2, p.n, p.p) == (2, 0.2, 2.0, 30, 9)
    assert p.midpoint(1) == 15
    assert p.midpoint(3) == 33
    assert EntropyParams(n=31).midpoint(1) == 16


@pytest.mark.parametrize("kwargs", [dict(m=0), dict(r1=0), dict(r2=-1), dict(p=0), dict(n=3, m=2)])
def test_params_rejected(kwargs):
    with pytest.raises(InvalidParameterError):
        EntropyParams(**kwargs)


def test_membership():
    assert fuzzy_membership(0.0) == 1.0
    assert fuzzy_membership(0.2, r1=0.2, r2=1.0) == pytest.approx(np.exp(-1))
    with pytest.raises(InvalidParameterError):
        fuzzy_membership(-1.0)


@pytest.mark.parametrize("n,m", [(10, 1), (12, 2), (30, 2), (64, 3)])
def test_matches_naive_transcription(n, m):
    rng = np.random.default_rng(n * 10 + m)
    for _ in range(5):
        u, v = rng.normal(size=(2, n))
        got = cross_fuzzy_entropy(u, v, m=m)
        assert got == pytest.approx(naive_cross_fuzzy_entropy(u, v, m), rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("n,m", [(11, 1), (30, 2), (64, 3)])
def test_matches_entropyhub(n, m):
    rng = np.random.default_rng(7 + n + m)
    u, v = rng.normal(size=(2, n))
    ref = EntropyHub.XFuzzEn(u, v, m=m)[0][-1]
    assert cross_fuzzy_entropy(u, v, m=m) == pytest.approx(ref, rel=1e-12)


def test_constant_windows_are_zero():
    assert cross_fuzzy_entropy(np.full(30, 4.0), np.full(30, -2.5)) == 0.0


def test_rejects_bad_windows():
    with pytest.raises(DataError):
        cross_fuzzy_entropy(np.zeros(10), np.zeros(11))
    with pytest.raises(DataError):
        cross_fuzzy_entropy(np.r_[np.zeros(9), np.nan], np.zeros(10))
    with pytest.raises(InvalidParameterError):
        cross_fuzzy_entropy(np.zeros(3), np.zeros(3), m=2)


def test_underflow_names_window():
    spiky = np.linspace(0, 1e4, 30) * np.tile([1, -1], 15)
    with pytest.raises(NumericalUnderflowError, match="window 1"):
        cross_fuzzy_entropy(spiky, np.zeros(30), r1=1e-6)


dyadic = st.integers(-2 ** 10, 2 ** 10).map(lambda k: k / 64)


@given(arrays(float, 20, elements=dyadic), arrays(float, 20, elements=dyadic), st.integers(1, 3))
def test_symmetry(u, v, m):
    assert cross_fuzzy_entropy(u, v, m=m) == cross_fuzzy_entropy(v, u, m=m)


@given(arrays(float, 20, elements=dyadic), arrays(float, 20, elements=dyadic), dyadic, dyadic)
def test_offset_invariance(u, v, a, b):
    assert cross_fuzzy_entropy(u + a, v + b) == cross_fuzzy_entropy(u, v)


def test_series_windows_and_dates():
    rng = np.random.default_rng(3)
    u, v = rng.normal(size=(2, 100))
    p = EntropyParams(n=30, p=9)
    s = entropy_series((u, v), p)
    assert len(s) == (100 - 30) // 9 + 1
    assert list(s.midpoints[:3]) == [15, 24, 33]
    for i in range(len(s)):
        assert s.values[i] == pytest.approx(cross_fuzzy_entropy(u[9 * i:9 * i + 30], v[9 * i:9 * i + 30]), rel=1e-13)
    assert s.start_date is None


def test_series_from_pair_uses_ensemble_means():
    import datetime as dt
    rng = np.random.default_rng(4)
    f, c = rng.normal(size=(2, 3, 60))
    pair = EnsemblePair("X", "R", dt.date(2000, 1, 1), f, c)
    s = entropy_series(pair)
    ref = entropy_series((f.mean(0), c.mean(0)))
    assert np.array_equal(s.values, ref.values)
    assert s.midpoint_dates()[0] == dt.date(2000, 1, 15)


def test_series_chunking_is_invisible(monkeypatch):
    import entropic_impacts.entropy as ent
    rng = np.random.default_rng(5)
    u, v = rng.normal(size=(2, 400))
    whole = entropy_series((u, v)).values
    monkeypatch.setattr(ent, "_CHUNK_ELEMENTS", 1)
    assert np.array_equal(entropy_series((u, v)).values, whole)
