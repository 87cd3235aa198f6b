import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rssmpl import (
    Exponential,
    Perfect,
    RankedSetSample,
    ZeroMassError,
    ci_na,
    draw_rss,
    f_rss,
    hiv_fixture_sample,
    k_rss,
    k_srs,
    mpl_exact,
    var_plugin,
)
from rssmpl.harness import rng_substream

Z_975 = 1.959963985  # standard normal 97.5% quantile

EXP1 = Exponential(1.0)


def _plugin_oracle(sample: RankedSetSample, t: float) -> float:
    """Spreadsheet-style recomputation of the plug-in variance, rank by rank
    with plain Python floats."""
    k, m = sample.set_size, sample.cycles
    n = k * m
    pooled = [float(x) for x in sample.pooled()]
    qualifying = [x for x in pooled if x <= t]
    f_hat = len(qualifying) / n
    k_hat = sum(t - x for x in qualifying) / len(qualifying)
    total = 0.0
    for r in range(k):
        row = [float(x) for x in sample.values[r]]
        below = [t - x for x in row if x <= t]
        v = len(below)
        f_r = v / m
        k_r = sum(below) / v if v else 0.0
        s2_r = sum((d - k_r) ** 2 for d in below) / v if v > 1 else 0.0
        total += s2_r * f_r + f_r * (1.0 - f_r) * (k_r - k_hat) ** 2
    return total / (n * k * f_hat**2)


def test_k_srs_single_observation():
    est = k_srs([0.5], 1.0)
    assert est.value == 0.5 and est.count_at_risk == 1


def test_k_srs_zero_convention():
    est = k_srs([2.0, 3.0], 1.0)
    assert est.value == 0.0 and est.count_at_risk == 0


def test_k_srs_pooled_fixture_at_200():
    pooled = hiv_fixture_sample().pooled()
    qualifying = [x for x in pooled if x <= 200.0]
    assert sorted(qualifying) == [137.0, 143.0, 158.0, 171.0, 192.0]
    expected = sum(200.0 - x for x in qualifying) / len(qualifying)
    est = k_srs(pooled, 200.0)
    assert est.value == expected == 39.8
    assert est.count_at_risk == 5


def test_k_srs_validation():
    with pytest.raises(ValueError):
        k_srs([], 1.0)
    with pytest.raises(ValueError):
        k_srs([1.0], 0.0)


def test_k_rss_fixture_at_200():
    est = k_rss(hiv_fixture_sample(), 200.0)
    assert est.value == 39.8
    assert est.count_at_risk == 5


def test_k_rss_zero_convention():
    sample = RankedSetSample([[2.0, 4.0], [3.0, 5.0]])
    est = k_rss(sample, 1.0)
    assert est.value == 0.0 and est.count_at_risk == 0


def test_k_rss_single_cell():
    assert k_rss(RankedSetSample([[0.5]]), 1.0).value == 0.5


def test_f_rss_fixture():
    sample = hiv_fixture_sample()
    assert f_rss(sample, 200.0) == 5 / 30
    assert f_rss(sample, 100.0) == 0.0
    assert f_rss(sample, 3000.0) == 1.0


def test_var_plugin_fixture_regression():
    sample = hiv_fixture_sample()
    got = var_plugin(sample, 200.0)
    assert got == pytest.approx(_plugin_oracle(sample, 200.0), rel=1e-12)
    # Regression lock: independently hand-computed from the fixture.
    assert got == pytest.approx(74.72746666666667, rel=1e-12)


def test_var_plugin_sparse_ranks_between_term_only():
    # Every rank has 0 or 1 qualifying value: the within-rank variances all
    # vanish by convention, leaving the between-rank spread.
    sample = RankedSetSample([[0.5, 2.0], [0.4, 3.0], [9.0, 9.0]])
    got = var_plugin(sample, 1.0)
    assert got == pytest.approx(_plugin_oracle(sample, 1.0), rel=1e-12)
    assert math.isfinite(got) and got >= 0.0


def test_var_plugin_k1_collapses_to_srs_plugin():
    stream = rng_substream(31, 0)
    sample = draw_rss(EXP1, Perfect(), 1, 40, stream)
    t = 1.0
    pooled = sample.pooled()
    below = pooled[pooled <= t]
    f_hat = below.size / pooled.size
    sigma2_hat = np.mean((t - below) ** 2) - np.mean(t - below) ** 2
    expected = sigma2_hat / (pooled.size * f_hat)
    assert var_plugin(sample, t) == pytest.approx(expected, rel=1e-12)


def test_var_plugin_zero_mass_raises():
    with pytest.raises(ZeroMassError):
        var_plugin(RankedSetSample([[2.0], [3.0]]), 1.0)


def test_ci_na_degenerate():
    est = dataclasses.replace(k_srs([0.5], 1.0), variance=0.0)
    out = ci_na(est, 0.95)
    assert out.ci == (out.value, out.value)
    assert out.level == 0.95


def test_ci_na_width():
    est = dataclasses.replace(k_srs([0.2, 0.4, 0.6], 1.0), variance=4.0)
    out = ci_na(est, 0.95)
    assert out.ci[1] - out.value == pytest.approx(Z_975 * 2.0, abs=1e-5)
    # Lower end would be negative: clamped to 0.
    assert out.ci[0] == 0.0


def test_ci_na_requires_variance_and_level():
    est = k_srs([0.5], 1.0)
    with pytest.raises(ValueError):
        ci_na(est, 0.95)
    with pytest.raises(ValueError):
        ci_na(dataclasses.replace(est, variance=1.0), 1.0)


@given(
    values=arrays(
        np.float64,
        st.tuples(st.integers(1, 4), st.integers(1, 6)),
        elements=st.floats(min_value=0.0, max_value=10.0),
    ),
    t=st.floats(min_value=0.01, max_value=12.0),
)
@settings(max_examples=150, deadline=None)
def test_k_rss_bounds_property(values, t):
    est = k_rss(RankedSetSample(values), t)
    assert 0.0 <= est.value <= t
    assert 0 <= est.count_at_risk <= values.size


@given(
    values=arrays(
        np.float64,
        st.tuples(st.just(1), st.integers(1, 30)),
        elements=st.floats(min_value=0.0, max_value=10.0),
    ),
    t=st.floats(min_value=0.01, max_value=12.0),
)
@settings(max_examples=100, deadline=None)
def test_k1_rss_equals_srs_exactly(values, t):
    sample = RankedSetSample(values)
    assert k_rss(sample, t).value == k_srs(values[0], t).value
    assert k_rss(sample, t).count_at_risk == k_srs(values[0], t).count_at_risk


def test_k_rss_permutation_invariance():
    rng = np.random.default_rng(8)
    values = rng.exponential(size=(3, 10))
    sample = RankedSetSample(values)
    t = 1.2
    baseline = k_rss(sample, t).value
    shuffled_cycles = RankedSetSample(values[:, rng.permutation(10)])
    assert k_rss(shuffled_cycles, t).value == pytest.approx(baseline, rel=1e-12)
    within = values.copy()
    within[1] = within[1, rng.permutation(10)]
    assert k_rss(RankedSetSample(within), t).value == pytest.approx(baseline, rel=1e-12)


def test_strong_consistency_in_cycle_count():
    # Supremum error over the quantile grid shrinks as cycles grow; at
    # m = 1e4 it is below 0.05 for at least 99 of 100 seeds.
    qs = np.linspace(0.05, 0.95, 19)
    ts = np.asarray(EXP1.quantile(qs))
    k_true = np.array([mpl_exact(EXP1, float(t)) for t in ts])
    mean_sup = {}
    below_cap = 0
    for m in (100, 1_000, 10_000):
        sups = []
        for seed in range(100):
            sample = draw_rss(EXP1, Perfect(), 3, m, rng_substream(4_000 + seed, 0))
            errs = [abs(k_rss(sample, float(t)).value - k_true[i]) for i, t in enumerate(ts)]
            sups.append(max(errs))
        mean_sup[m] = float(np.mean(sups))
        if m == 10_000:
            below_cap = sum(s < 0.05 for s in sups)
    assert mean_sup[100] > mean_sup[1_000] > mean_sup[10_000]
    assert below_cap >= 99


def test_var_plugin_shrinks_like_one_over_n():
    # Doubling the cycle count roughly halves the plug-in variance.
    t = float(EXP1.quantile(0.5))
    ratios = []
    for seed in range(100):
        small = draw_rss(EXP1, Perfect(), 3, 200, rng_substream(9_000 + seed, 0))
        big = draw_rss(EXP1, Perfect(), 3, 400, rng_substream(9_000 + seed, 1))
        ratios.append(var_plugin(big, t) / var_plugin(small, t))
    assert 0.3 <= float(np.mean(ratios)) <= 0.7
