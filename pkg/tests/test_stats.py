from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st
from scipy.stats import ks_2samp

from defect_tuning.stats import SampleSeries, delta_series, ks_different, ks_statistic, ks_threshold

samples = st.lists(st.floats(0, 1, allow_nan=False), min_size=1, max_size=40)


def test_hand_examples():
    assert ks_statistic([0.2, 0.4], [0.2, 0.4]) == 0.0
    assert ks_statistic([0, 0, 0], [1, 1, 1]) == 1.0
    assert ks_statistic([1, 2, 3, 4], [3, 4, 5, 6]) == 0.5


def test_threshold_values():
    assert ks_threshold(17, 17) == pytest.approx(0.4665, abs=5e-4)
    assert ks_threshold(34, 34) == pytest.approx(0.3299, abs=5e-4)
    for n in (1, 5, 17, 100):
        assert ks_threshold(n, n) == pytest.approx(1.36 * math.sqrt(2 / n))


def test_threshold_decreasing():
    values = [ks_threshold(n, 10) for n in range(1, 50)]
    assert all(a > b for a, b in zip(values, values[1:]))
    with pytest.raises(ValueError):
        ks_threshold(0, 3)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
@given(samples, samples)
def test_matches_scipy(xs, ys):
    assert ks_statistic(xs, ys) == pytest.approx(ks_2samp(xs, ys, method="asymp").statistic, abs=1e-12)


@given(samples, samples, st.randoms())
def test_symmetric_and_order_invariant(xs, ys, rnd):
    d = ks_statistic(xs, ys)
    shuffled = list(xs)
    rnd.shuffle(shuffled)
    assert ks_statistic(ys, xs) == d
    assert ks_statistic(shuffled, ys) == d


@given(samples)
def test_zero_iff_same_distribution(xs):
    assert ks_statistic(xs, xs + xs) == 0.0
    assert ks_statistic(xs, [v + 2.0 for v in xs]) == 1.0


def test_decision_rule():
    d, t, diff = ks_different([0.5] * 17, [0.5] * 17)
    assert (d, diff) == (0.0, False)
    d, t, diff = ks_different([0.0] * 17, [1.0] * 17)
    assert diff and d >= t


def test_empty_and_non_finite_rejected():
    with pytest.raises(ValueError):
        ks_statistic([], [1.0])
    with pytest.raises(ValueError):
        SampleSeries("x", [])
    with pytest.raises(ValueError):
        SampleSeries("x", [float("nan")])


def test_delta_series():
    a = SampleSeries("tuned", [0.35, 0.6], ("antV0", "antV1"))
    b = SampleSeries("untuned", [0.0, 0.7], ("antV0", "antV1"))
    assert delta_series(a, b) == pytest.approx([-0.1, 0.35])
    assert delta_series(a, a) == [0.0, 0.0]
    with pytest.raises(ValueError, match="aligned"):
        delta_series(a, SampleSeries("u", [0, 0], ("antV1", "antV0")))
    with pytest.raises(ValueError, match="length"):
        delta_series(a, SampleSeries("u", [0]))


@given(st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1)), min_size=1, max_size=30))
def test_delta_series_is_sorted_permutation(pairs):
    t, u = zip(*pairs)
    out = delta_series(SampleSeries("t", t), SampleSeries("u", u))
    assert out == sorted(out)
    assert sorted(a - b for a, b in pairs) == out
