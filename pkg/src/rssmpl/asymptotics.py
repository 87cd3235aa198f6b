"""Exact population quantities for the mean-past-lifetime estimators.

Everything here is deterministic quadrature or enumeration: the exact
mean past lifetime ``K(t)`` and conditional variance ``sigma2(t)`` of the
parent law, their per-judged-rank counterparts under a ranking model, the
large-sample variances of the two estimators, their ratio (the asymptotic
relative efficiency), and the exact finite-sample mean and variance of
the ranked-set estimator by enumerating the joint law of the per-rank
qualifying counts.

Per-rank results are memoized on (distribution, model, k, rank, t,
quadrature config); all of those are frozen dataclasses, so sweeps over a
shared grid reuse each integral.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

from scipy import stats

from .distributions import (
    DEFAULT_QUADRATURE,
    ZERO_MASS_TOL,
    Distribution,
    QuadratureConfig,
    ZeroMassError,
    integrate,
)
from .ranking import RankingModel, _check_rank, judged_cdf_from_parent

#: Probabilities 0.05, 0.10, ..., 0.95: the quantile grid the efficiency
#: studies are evaluated on.
DEFAULT_QUANTILE_GRID = tuple(round(0.05 * i, 10) for i in range(1, 20))


class StateSpaceLimitError(ValueError):
    """Exact-moment enumeration would exceed the configured state budget."""


@dataclass(frozen=True)
class PopulationContext:
    """Bundle of the arguments every exact per-rank formula shares."""

    dist: Distribution
    model: RankingModel
    k: int
    quad: QuadratureConfig = DEFAULT_QUADRATURE

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("set size k must be >= 1")


@dataclass(frozen=True)
class MomentPair:
    mean: float
    variance: float

    def __post_init__(self):
        if self.variance < 0.0:
            raise ValueError("variance must be nonnegative")


def _require_mass(f_t: float, what: str, t: float) -> float:
    if f_t < ZERO_MASS_TOL:
        raise ZeroMassError(f"{what} has no mass at or below t={t}")
    return f_t


def _mass_scaled(quad: QuadratureConfig, f_t: float) -> QuadratureConfig:
    """Tighten the absolute tolerance in proportion to the conditioning mass:
    integrals of a CDF bounded by f_t are themselves O(f_t), and dividing by
    f_t afterwards would otherwise amplify a fixed absolute error."""
    if f_t >= 1.0:
        return quad
    return QuadratureConfig(
        abs_tol=quad.abs_tol * f_t,
        rel_tol=quad.rel_tol,
        max_subdivisions=quad.max_subdivisions,
    )


@lru_cache(maxsize=262144)
def _parent_moments(dist: Distribution, t: float, quad: QuadratureConfig):
    """(F(t), K(t), sigma2(t)) for the parent law."""
    f_t = _require_mass(float(dist.cdf(t)), "parent distribution", t)
    lower = dist.support[0]
    scaled = _mass_scaled(quad, f_t)
    i1 = integrate(lambda x: float(dist.cdf(x)), lower, t, scaled)
    i2 = integrate(lambda x: (t - x) * float(dist.cdf(x)), lower, t, scaled)
    k_t = i1 / f_t
    return f_t, k_t, _nonneg_variance(2.0 * i2 / f_t - k_t * k_t, k_t * k_t)


@lru_cache(maxsize=262144)
def _judged_moments(
    dist: Distribution,
    model: RankingModel,
    k: int,
    r: int,
    t: float,
    quad: QuadratureConfig,
):
    """(F_r(t), K_r(t), sigma2_r(t)) for the unit judged to hold rank r."""
    _check_rank(k, r)
    f_t = _require_mass(
        float(judged_cdf_from_parent(model, k, r, dist.cdf(t))), f"judged rank {r}", t
    )

    def f_r(x: float) -> float:
        return float(judged_cdf_from_parent(model, k, r, dist.cdf(x)))

    lower = dist.support[0]
    scaled = _mass_scaled(quad, f_t)
    i1 = integrate(f_r, lower, t, scaled)
    i2 = integrate(lambda x: (t - x) * f_r(x), lower, t, scaled)
    k_t = i1 / f_t
    return f_t, k_t, _nonneg_variance(2.0 * i2 / f_t - k_t * k_t, k_t * k_t)


def _nonneg_variance(value: float, scale: float) -> float:
    # Quadrature roundoff can leave a conditional variance a hair below 0;
    # the cancellation magnitude is set by K^2.  Anything clearly beyond
    # that is a real error.
    if value < 0.0:
        if value > -1e-6 * max(scale, 1e-300):
            return 0.0
        raise ArithmeticError(f"conditional variance came out negative: {value}")
    return value


def mpl_exact(dist: Distribution, t: float, quad: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Exact mean past lifetime of the parent law at ``t``."""
    return _parent_moments(dist, t, quad)[1]


def sigma2_exact(
    dist: Distribution, t: float, quad: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    """Exact conditional variance of ``t - X`` given ``X <= t``."""
    return _parent_moments(dist, t, quad)[2]


def mpl_judged(ctx: PopulationContext, r: int, t: float) -> float:
    """Exact mean past lifetime of the unit judged to hold rank ``r``."""
    return _judged_moments(ctx.dist, ctx.model, ctx.k, r, t, ctx.quad)[1]


def sigma2_judged(ctx: PopulationContext, r: int, t: float) -> float:
    """Exact conditional variance of ``t - X`` for judged rank ``r``."""
    return _judged_moments(ctx.dist, ctx.model, ctx.k, r, t, ctx.quad)[2]


def avar_srs(dist: Distribution, t: float, quad: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Large-sample variance of sqrt(n) times the SRS estimator error."""
    f_t, _, s2 = _parent_moments(dist, t, quad)
    return s2 / f_t


def avar_rss(ctx: PopulationContext, t: float) -> float:
    """Large-sample variance of sqrt(n) times the RSS estimator error.

    Combines, over judged ranks, the within-rank conditional variance and
    the between-rank spread of per-rank mean past lifetimes:
    ``(1 / (k F(t)^2)) * sum_r [sigma2_r F_r + F_r (1 - F_r)(K_r - K)^2]``.
    """
    f_t, k_t, _ = _parent_moments(ctx.dist, t, ctx.quad)
    total = 0.0
    for r in range(1, ctx.k + 1):
        f_r, k_r, s2_r = _judged_moments(ctx.dist, ctx.model, ctx.k, r, t, ctx.quad)
        total += s2_r * f_r + f_r * (1.0 - f_r) * (k_r - k_t) ** 2
    return total / (ctx.k * f_t * f_t)


def are(ctx: PopulationContext, t: float) -> float:
    """Asymptotic relative efficiency of RSS to SRS at ``t``: the ratio of
    their large-sample variances.  At least 1 under consistent ranking."""
    return avar_srs(ctx.dist, t, ctx.quad) / avar_rss(ctx, t)


class _CompensatedSum:
    """Neumaier-compensated accumulator; the enumeration adds up to 10^6
    terms of wildly different magnitudes."""

    __slots__ = ("total", "_c")

    def __init__(self):
        self.total = 0.0
        self._c = 0.0

    def add(self, x: float) -> None:
        s = self.total + x
        if abs(self.total) >= abs(x):
            self._c += (self.total - s) + x
        else:
            self._c += (x - s) + self.total
        self.total = s

    @property
    def value(self) -> float:
        return self.total + self._c


def exact_moments_krss(
    ctx: PopulationContext,
    m: int,
    t: float,
    state_limit: int = 1_000_000,
) -> MomentPair:
    """Exact mean and variance of the RSS estimator at ``t`` for ``m``
    cycles, by enumerating the joint law of the per-rank qualifying
    counts.

    Conditional on counts ``v`` with ``sum(v) > 0``, the estimator has
    mean ``sum_r v_r K_r / sum(v)`` and variance
    ``sum_r v_r sigma2_r / sum(v)^2``; the all-zero state contributes the
    constant 0.  Counts are independent Binomial(m, F_r), so the state
    space has ``(m + 1)^k`` points, capped by ``state_limit``.
    """
    if m < 1:
        raise ValueError("cycle count m must be >= 1")
    k = ctx.k
    states = (m + 1) ** k
    if states > state_limit:
        raise StateSpaceLimitError(
            f"(m + 1)^k = {states} states exceeds the limit of {state_limit}"
        )

    k_rank = [0.0] * k
    s2_rank = [0.0] * k
    pmfs = []
    for r in range(1, k + 1):
        f_r = float(judged_cdf_from_parent(ctx.model, k, r, ctx.dist.cdf(t)))
        if f_r < ZERO_MASS_TOL:
            # This rank qualifies with probability ~0; its states carry no
            # weight, so the undefined conditional moments are moot.
            pmfs.append(stats.binom.pmf(range(m + 1), m, 0.0))
            continue
        _, k_rank[r - 1], s2_rank[r - 1] = _judged_moments(
            ctx.dist, ctx.model, k, r, t, ctx.quad
        )
        pmfs.append(stats.binom.pmf(range(m + 1), m, f_r))

    mean_acc = _CompensatedSum()
    sq_acc = _CompensatedSum()
    within_acc = _CompensatedSum()
    for v in itertools.product(range(m + 1), repeat=k):
        sv = sum(v)
        if sv == 0:
            continue
        p = 1.0
        for r in range(k):
            p *= pmfs[r][v[r]]
        if p == 0.0:
            continue
        cond_mean = math.fsum(v[r] * k_rank[r] for r in range(k)) / sv
        cond_var = math.fsum(v[r] * s2_rank[r] for r in range(k)) / (sv * sv)
        mean_acc.add(p * cond_mean)
        sq_acc.add(p * cond_mean * cond_mean)
        within_acc.add(p * cond_var)

    mean = float(mean_acc.value)
    variance = float(within_acc.value + sq_acc.value - mean * mean)
    if -1e-12 < variance < 0.0:
        variance = 0.0
    return MomentPair(mean=mean, variance=variance)
