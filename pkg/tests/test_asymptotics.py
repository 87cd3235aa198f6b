import math

import numpy as np
import pytest

from rssmpl import (
    Exponential,
    FractionNeighbor,
    FractionRandom,
    Gamma,
    MomentPair,
    Perfect,
    PopulationContext,
    RescaledBeta,
    StateSpaceLimitError,
    Weibull,
    ZeroMassError,
    are,
    avar_rss,
    avar_srs,
    exact_moments_krss,
    integrate,
    mpl_exact,
    mpl_judged,
    sigma2_exact,
    sigma2_judged,
)
from rssmpl.asymptotics import DEFAULT_QUANTILE_GRID, _judged_moments, _parent_moments
from rssmpl.distributions import DEFAULT_QUADRATURE

EXP1 = Exponential(1.0)
WEIB = Weibull(4.0, 3.0)
RBETA = RescaledBeta()
SWEEP_DISTS = [EXP1, WEIB, RBETA]


def _conditional_moments_mc(draws: np.ndarray, t: float) -> tuple[float, float]:
    gaps = t - draws[draws <= t]
    return float(gaps.mean()), float(gaps.var())


def test_mpl_exact_exponential_closed_form():
    # K(1) = e^-1 / (1 - e^-1) for the unit exponential.
    expected = math.exp(-1.0) / (1.0 - math.exp(-1.0))
    assert mpl_exact(EXP1, 1.0) == pytest.approx(expected, abs=1e-9)
    assert mpl_exact(EXP1, 1.0) == pytest.approx(0.581977, abs=5e-7)


def test_mpl_exact_vanishes_at_small_t():
    for t in (1e-3, 1e-2):
        value = mpl_exact(EXP1, t)
        assert 0.0 < value < t


def test_mpl_exact_full_mass_rescaled_beta():
    # With all mass at or below t, the mean past lifetime is t - E[X].
    mean = integrate(lambda x: x * float(RBETA.pdf(x)), 0.0, 2.0)
    assert mpl_exact(RBETA, 2.0) == pytest.approx(2.0 - mean, abs=1e-8)


def test_mpl_exact_zero_mass():
    with pytest.raises(ZeroMassError):
        mpl_exact(EXP1, 1e-13)


def test_sigma2_exact_against_monte_carlo():
    rng = np.random.default_rng(424242)
    draws = rng.standard_exponential(10_000_000)
    mc_mean, mc_var = _conditional_moments_mc(draws, 1.0)
    assert mpl_exact(EXP1, 1.0) == pytest.approx(mc_mean, abs=3e-4)
    assert sigma2_exact(EXP1, 1.0) == pytest.approx(mc_var, abs=3e-4)
    assert sigma2_exact(EXP1, 1.0) == pytest.approx(0.0793, abs=5e-5)


def test_sigma2_exact_full_mass_is_plain_variance():
    # V(2 - X | X <= 2) = V(X) when F(2) = 1.
    second = integrate(lambda x: x * x * float(RBETA.pdf(x)), 0.0, 2.0)
    mean = integrate(lambda x: x * float(RBETA.pdf(x)), 0.0, 2.0)
    assert sigma2_exact(RBETA, 2.0) == pytest.approx(second - mean**2, abs=1e-8)


@pytest.mark.parametrize("dist", SWEEP_DISTS, ids=["exp1", "weibull43", "rbeta"])
def test_sigma2_nonnegative_on_grid(dist):
    for q in DEFAULT_QUANTILE_GRID:
        assert sigma2_exact(dist, float(dist.quantile(q))) >= 0.0


def test_mpl_judged_collapses():
    ctx1 = PopulationContext(dist=EXP1, model=Perfect(), k=1)
    assert mpl_judged(ctx1, 1, 1.0) == pytest.approx(mpl_exact(EXP1, 1.0), abs=1e-12)
    ctx0 = PopulationContext(dist=EXP1, model=FractionRandom(0.0), k=4)
    for r in range(1, 5):
        assert mpl_judged(ctx0, r, 1.0) == pytest.approx(mpl_exact(EXP1, 1.0), abs=1e-12)
        assert sigma2_judged(ctx0, r, 1.0) == pytest.approx(sigma2_exact(EXP1, 1.0), abs=1e-12)


def test_mpl_judged_min_of_three_against_monte_carlo():
    # Judged rank 1 under perfect ranking is the minimum of 3 draws.
    rng = np.random.default_rng(7_654_321)
    mins = np.concatenate(
        [rng.standard_exponential((2_000_000, 3)).min(axis=1) for _ in range(5)]
    )
    mc_mean, _ = _conditional_moments_mc(mins, 1.0)
    ctx = PopulationContext(dist=EXP1, model=Perfect(), k=3)
    assert mpl_judged(ctx, 1, 1.0) == pytest.approx(mc_mean, abs=4e-4)


def test_sigma2_judged_median_of_three_against_monte_carlo():
    rng = np.random.default_rng(1_234_567)
    medians = np.concatenate(
        [np.sort(rng.standard_exponential((2_000_000, 3)), axis=1)[:, 1] for _ in range(5)]
    )
    mc_mean, mc_var = _conditional_moments_mc(medians, 1.0)
    ctx = PopulationContext(dist=EXP1, model=Perfect(), k=3)
    assert mpl_judged(ctx, 2, 1.0) == pytest.approx(mc_mean, abs=4e-4)
    assert sigma2_judged(ctx, 2, 1.0) == pytest.approx(mc_var, abs=4e-4)


def test_judged_zero_mass():
    ctx = PopulationContext(dist=EXP1, model=Perfect(), k=3)
    with pytest.raises(ZeroMassError):
        mpl_judged(ctx, 3, 1e-5)  # F_(3)(t) ~ t^3 is below the mass floor


def test_avar_srs_dominates_sigma2():
    for q in (0.1, 0.5, 0.9):
        t = float(EXP1.quantile(q))
        assert avar_srs(EXP1, t) >= sigma2_exact(EXP1, t)
    # F(2) = 1 for the rescaled beta: no inflation at full mass.
    assert avar_srs(RBETA, 2.0) == pytest.approx(sigma2_exact(RBETA, 2.0), rel=1e-12)


def test_avar_srs_against_simulated_estimator_variance():
    # Oracle: variance of sqrt(n) (K_SRS - K) over independent replications.
    from rssmpl._backend import pooled_mpl_curve

    n, reps = 30_000, 4_000
    t = 1.0
    rng = np.random.default_rng(90_210)
    k_true = mpl_exact(EXP1, t)
    est = np.concatenate(
        [
            pooled_mpl_curve(rng.standard_exponential((500, n)), np.array([t]))[0][:, 0]
            for _ in range(reps // 500)
        ]
    )
    simulated = n * float(np.var(est - k_true, ddof=1))
    assert avar_srs(EXP1, t) == pytest.approx(simulated, rel=0.10)


def test_avar_rss_collapses_to_avar_srs():
    t = 1.3
    ctx1 = PopulationContext(dist=EXP1, model=Perfect(), k=1)
    assert avar_rss(ctx1, t) == pytest.approx(avar_srs(EXP1, t), rel=1e-12)
    ctx0 = PopulationContext(dist=EXP1, model=FractionRandom(0.0), k=5)
    assert avar_rss(ctx0, t) == pytest.approx(avar_srs(EXP1, t), rel=1e-10)


def test_avar_rss_below_avar_srs_under_perfect_ranking():
    ctx = PopulationContext(dist=EXP1, model=Perfect(), k=3)
    t = float(EXP1.quantile(0.5))
    assert avar_rss(ctx, t) < avar_srs(EXP1, t)


def test_are_examples():
    t = float(EXP1.quantile(0.5))
    assert are(PopulationContext(dist=EXP1, model=Perfect(), k=1), t) == pytest.approx(
        1.0, abs=1e-12
    )
    assert are(PopulationContext(dist=EXP1, model=FractionRandom(0.0), k=3), t) == pytest.approx(
        1.0, abs=1e-8
    )


@pytest.mark.parametrize("dist", SWEEP_DISTS, ids=["exp1", "weibull43", "rbeta"])
def test_are_at_least_one_and_monotone_in_k(dist):
    qs = (0.1, 0.3, 0.5, 0.7, 0.9)
    ctx3 = PopulationContext(dist=dist, model=Perfect(), k=3)
    ctx5 = PopulationContext(dist=dist, model=Perfect(), k=5)
    for q in qs:
        t = float(dist.quantile(q))
        a3 = are(ctx3, t)
        a5 = are(ctx5, t)
        assert a3 >= 1.0 - 1e-6
        assert a5 >= a3 - 1e-9


@pytest.mark.parametrize(
    "model", [Perfect(), FractionRandom(0.5), FractionNeighbor(0.5)], ids=["perfect", "rand", "nbr"]
)
def test_proof_identity(model):
    # k sigma2(t) F(t) = sum_r F_r sigma2_r + sum_r F_r (K_r - K)^2.
    k = 3
    ctx = PopulationContext(dist=EXP1, model=model, k=k)
    for q in (0.2, 0.5, 0.8):
        t = float(EXP1.quantile(q))
        f_t, k_t, s2 = _parent_moments(EXP1, t, DEFAULT_QUADRATURE)
        lhs = k * s2 * f_t
        rhs = 0.0
        for r in range(1, k + 1):
            f_r, k_r, s2_r = _judged_moments(EXP1, model, k, r, t, DEFAULT_QUADRATURE)
            rhs += f_r * s2_r + f_r * (k_r - k_t) ** 2
        assert abs(lhs - rhs) <= 1e-6 * lhs


@pytest.mark.parametrize("dist", SWEEP_DISTS, ids=["exp1", "weibull43", "rbeta"])
def test_mixture_mean_identity(dist):
    # K(t) F(t) = (1/k) sum_r K_r(t) F_r(t): integrate the consistency identity.
    model = FractionNeighbor(0.4)
    k = 4
    for q in (0.25, 0.75):
        t = float(dist.quantile(q))
        f_t, k_t, _ = _parent_moments(dist, t, DEFAULT_QUADRATURE)
        acc = 0.0
        for r in range(1, k + 1):
            f_r, k_r, _ = _judged_moments(dist, model, k, r, t, DEFAULT_QUADRATURE)
            acc += k_r * f_r
        assert k_t * f_t == pytest.approx(acc / k, rel=1e-6, abs=1e-7)


def test_exact_moments_single_cell_hand_enumeration():
    # k = m = 1: two states.  With probability 1 - F the estimate is 0,
    # with probability F it is distributed as t - X | X <= t.
    ctx = PopulationContext(dist=EXP1, model=Perfect(), k=1)
    t = 1.0
    f_t = float(EXP1.cdf(t))
    k1 = mpl_judged(ctx, 1, t)
    s1 = sigma2_judged(ctx, 1, t)
    expected_mean = f_t * k1
    expected_var = f_t * s1 + f_t * k1**2 - expected_mean**2
    got = exact_moments_krss(ctx, 1, t)
    assert got.mean == pytest.approx(expected_mean, rel=1e-10)
    assert got.variance == pytest.approx(expected_var, rel=1e-10)


def test_exact_moments_variance_nonnegative():
    for model in (Perfect(), FractionNeighbor(0.3)):
        ctx = PopulationContext(dist=WEIB, model=model, k=3)
        for q in (0.1, 0.5, 0.9):
            t = float(WEIB.quantile(q))
            assert exact_moments_krss(ctx, 4, t).variance >= 0.0


def test_exact_moments_state_limit():
    ctx = PopulationContext(dist=EXP1, model=Perfect(), k=3)
    with pytest.raises(StateSpaceLimitError):
        exact_moments_krss(ctx, 100, 1.0)  # 101^3 > 1e6
    exact_moments_krss(ctx, 100, 1.0, state_limit=101**3)


def test_exact_moments_bias_shrinks_with_cycles():
    ctx = PopulationContext(dist=EXP1, model=Perfect(), k=3)
    t = float(EXP1.quantile(0.5))
    k_true = mpl_exact(EXP1, t)
    biases = [abs(exact_moments_krss(ctx, m, t).mean - k_true) for m in (1, 5, 20)]
    assert biases[0] > biases[1] > biases[2]


def test_exact_moments_validates_m():
    ctx = PopulationContext(dist=EXP1, model=Perfect(), k=2)
    with pytest.raises(ValueError):
        exact_moments_krss(ctx, 0, 1.0)


def test_moment_pair_validation():
    with pytest.raises(ValueError):
        MomentPair(mean=0.0, variance=-1.0)


def test_population_context_validation():
    with pytest.raises(ValueError):
        PopulationContext(dist=EXP1, model=Perfect(), k=0)


def test_gamma_mpl_sane():
    # The demo parent: K grows with t and stays below it.
    dist = Gamma(8.0, 40.0)
    prev = 0.0
    for q in (0.1, 0.3, 0.5, 0.7, 0.9):
        t = float(dist.quantile(q))
        value = mpl_exact(dist, t)
        assert 0.0 < value < t
        assert value > prev
        prev = value
