"""Monte Carlo experiments comparing the RSS and SRS estimators.

Every replication owns a keyed counter-based random substream, so results
are bit-reproducible for a fixed seed regardless of execution order or
parallelism degree.  Within a replication the uniform consumption order
is fixed: the SRS sample first (n uniforms), then the RSS sample (for
each cycle and target rank, k set-draw uniforms plus one selection
uniform).  Replications are processed in fixed-size chunks and reduced in
index order; the worker count only changes who computes a chunk, never
the arithmetic.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _hiv_fixture
from ._backend import pooled_mpl_curve
from .asymptotics import DEFAULT_QUANTILE_GRID, mpl_exact
from .distributions import ZERO_MASS_TOL, Distribution, Gamma, ZeroMassError
from .estimators import MplEstimate, ci_na, k_rss, var_plugin
from .ranking import (
    FractionRandom,
    RankedSetSample,
    RankingModel,
    rss_values_from_uniforms,
)

_MASK64 = (1 << 64) - 1

# Replications per work chunk.  Fixed so that accumulation order (and
# therefore the bit-exact result) does not depend on the worker count.
_CHUNK = 1024


def rng_substream(seed: int, replication_index: int) -> np.random.Generator:
    """Independent random stream for one replication.

    Streams are keyed Philox counters: identical (seed, index) pairs give
    identical streams, distinct indices give statistically independent
    ones, with no sequential jumping involved.
    """
    if replication_index < 0:
        raise ValueError("replication index must be nonnegative")
    key = [seed & _MASK64, replication_index & _MASK64]
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings of one Monte Carlo efficiency experiment."""

    dist: Distribution
    model: RankingModel
    n: int
    k: int
    replications: int = 100_000
    grid: tuple[float, ...] = DEFAULT_QUANTILE_GRID
    seed: int = 0
    batches: int = 20

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("set size k must be >= 1")
        if self.k > 20:
            raise ValueError("set size k > 20 is not supported")
        if self.n < 1 or self.n % self.k != 0:
            raise ValueError("n must be a positive multiple of k")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not 1 <= self.batches <= self.replications:
            raise ValueError("batches must lie in [1, replications]")
        qs = tuple(float(q) for q in self.grid)
        if not qs or any(not 0.0 < q < 1.0 for q in qs):
            raise ValueError("grid probabilities must lie in (0, 1)")
        if any(b <= a for a, b in zip(qs, qs[1:])):
            raise ValueError("grid probabilities must be strictly increasing")
        object.__setattr__(self, "grid", qs)

    @property
    def m(self) -> int:
        """Cycle count n / k."""
        return self.n // self.k


@dataclass(frozen=True)
class EfficiencyRow:
    q: float
    t: float
    mse_srs: float
    mse_rss: float
    re: float
    re_stderr: float
    zero_frac_srs: float
    zero_frac_rss: float


@dataclass(frozen=True)
class EfficiencyReport:
    config: ExperimentConfig
    rows: tuple[EfficiencyRow, ...]


@dataclass(frozen=True)
class SamplingMoments:
    """Monte Carlo mean/variance of one estimator, with batch-means
    standard errors.  ``variance`` is None when it cannot be formed."""

    mean: float
    variance: float | None
    mean_stderr: float | None
    variance_stderr: float | None


@dataclass(frozen=True)
class SamplingDistribution:
    srs: SamplingMoments
    rss: SamplingMoments
    t: float
    replications: int


def _batch_bounds(replications: int, batches: int) -> list[tuple[int, int]]:
    return [
        (b * replications // batches, (b + 1) * replications // batches)
        for b in range(batches)
    ]


def _replication_values(config: ExperimentConfig, lo: int, hi: int):
    """Measured SRS and pooled RSS values for replications [lo, hi).

    Equivalent to calling draw_srs then draw_rss on rng_substream(seed, i)
    for each i, but generated in one block per replication.
    """
    n, k, m = config.n, config.k, config.m
    per_rep = n + m * k * (k + 1)
    u = np.empty((hi - lo, per_rep))
    for row, rep in enumerate(range(lo, hi)):
        u[row] = rng_substream(config.seed, rep).random(per_rep)
    srs = config.dist._quantile(u[:, :n])
    rss_u = u[:, n:].reshape(hi - lo, m, k, k + 1)
    rss = rss_values_from_uniforms(config.dist, config.model, k, rss_u)
    return srs, rss.reshape(hi - lo, m * k)


def _run_batches(config: ExperimentConfig, worker, jobs: int) -> list:
    bounds = _batch_bounds(config.replications, config.batches)
    if jobs <= 1:
        return [worker(lo, hi) for lo, hi in bounds]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda b: worker(*b), bounds))


def simulate_re(config: ExperimentConfig, jobs: int = 1) -> EfficiencyReport:
    """Estimate the relative efficiency MSE(SRS)/MSE(RSS) on the quantile
    grid, with batch-means standard errors.

    Squared errors are measured against the exact mean past lifetime;
    zero-convention replications (no observation at or below t) enter the
    MSE like any other and their frequency is reported per estimator.
    """
    qs = np.asarray(config.grid)
    ts = np.atleast_1d(config.dist.quantile(qs))
    k_true = np.array([mpl_exact(config.dist, float(t)) for t in ts])
    n_t = ts.shape[0]

    def batch_worker(lo: int, hi: int):
        sq_srs = np.zeros(n_t)
        sq_rss = np.zeros(n_t)
        zero_srs = np.zeros(n_t, dtype=np.int64)
        zero_rss = np.zeros(n_t, dtype=np.int64)
        for c_lo in range(lo, hi, _CHUNK):
            c_hi = min(c_lo + _CHUNK, hi)
            srs_vals, rss_vals = _replication_values(config, c_lo, c_hi)
            est_s, cnt_s = pooled_mpl_curve(srs_vals, ts)
            est_r, cnt_r = pooled_mpl_curve(rss_vals, ts)
            sq_srs += ((est_s - k_true) ** 2).sum(axis=0)
            sq_rss += ((est_r - k_true) ** 2).sum(axis=0)
            zero_srs += (cnt_s == 0).sum(axis=0)
            zero_rss += (cnt_r == 0).sum(axis=0)
        return sq_srs, sq_rss, zero_srs, zero_rss

    parts = _run_batches(config, batch_worker, jobs)

    reps = config.replications
    tot_sq_srs = np.zeros(n_t)
    tot_sq_rss = np.zeros(n_t)
    tot_zero_srs = np.zeros(n_t, dtype=np.int64)
    tot_zero_rss = np.zeros(n_t, dtype=np.int64)
    batch_re = np.empty((config.batches, n_t))
    for b, (sq_s, sq_r, z_s, z_r) in enumerate(parts):
        tot_sq_srs += sq_s
        tot_sq_rss += sq_r
        tot_zero_srs += z_s
        tot_zero_rss += z_r
        with np.errstate(divide="ignore", invalid="ignore"):
            batch_re[b] = sq_s / sq_r

    with np.errstate(divide="ignore", invalid="ignore"):
        re = tot_sq_srs / tot_sq_rss
    if config.batches >= 2:
        re_stderr = batch_re.std(axis=0, ddof=1) / math.sqrt(config.batches)
    else:
        re_stderr = np.full(n_t, math.nan)

    rows = tuple(
        EfficiencyRow(
            q=float(qs[i]),
            t=float(ts[i]),
            mse_srs=float(tot_sq_srs[i] / reps),
            mse_rss=float(tot_sq_rss[i] / reps),
            re=float(re[i]),
            re_stderr=float(re_stderr[i]),
            zero_frac_srs=float(tot_zero_srs[i] / reps),
            zero_frac_rss=float(tot_zero_rss[i] / reps),
        )
        for i in range(n_t)
    )
    return EfficiencyReport(config=config, rows=rows)


def simulate_sampling_distribution(
    config: ExperimentConfig, t: float, jobs: int = 1
) -> SamplingDistribution:
    """Monte Carlo mean and variance of each estimator at a single ``t``."""
    if float(config.dist.cdf(t)) < ZERO_MASS_TOL:
        raise ZeroMassError(f"no mass at or below t={t}")
    ts = np.array([float(t)])

    def batch_worker(lo: int, hi: int):
        sums = np.zeros(4)  # s1_srs, s2_srs, s1_rss, s2_rss
        for c_lo in range(lo, hi, _CHUNK):
            c_hi = min(c_lo + _CHUNK, hi)
            srs_vals, rss_vals = _replication_values(config, c_lo, c_hi)
            est_s = pooled_mpl_curve(srs_vals, ts)[0][:, 0]
            est_r = pooled_mpl_curve(rss_vals, ts)[0][:, 0]
            sums += (
                est_s.sum(),
                (est_s**2).sum(),
                est_r.sum(),
                (est_r**2).sum(),
            )
        return sums, hi - lo

    parts = _run_batches(config, batch_worker, jobs)
    reps = config.replications

    def summarize(idx_mean: int, idx_sq: int) -> SamplingMoments:
        s1 = sum(p[0][idx_mean] for p in parts)
        s2 = sum(p[0][idx_sq] for p in parts)
        mean = s1 / reps
        variance = (s2 - s1 * s1 / reps) / (reps - 1) if reps >= 2 else None
        b_means = []
        b_vars = []
        for sums, count in parts:
            if count >= 1:
                b_means.append(sums[idx_mean] / count)
            if count >= 2:
                bm = sums[idx_mean] / count
                b_vars.append((sums[idx_sq] - count * bm * bm) / (count - 1))
        mean_stderr = (
            float(np.std(b_means, ddof=1) / math.sqrt(len(b_means)))
            if len(b_means) >= 2
            else None
        )
        variance_stderr = (
            float(np.std(b_vars, ddof=1) / math.sqrt(len(b_vars)))
            if len(b_vars) >= 2
            else None
        )
        return SamplingMoments(mean, variance, mean_stderr, variance_stderr)

    return SamplingDistribution(
        srs=summarize(0, 1), rss=summarize(2, 3), t=float(t), replications=reps
    )


def mpl_curve(
    sample: RankedSetSample, ts, level: float = 0.95
) -> list[MplEstimate]:
    """Point estimates over a t-grid with plug-in variance and CI wherever
    the sample has mass at or below t."""
    out = []
    for t in np.asarray(ts, dtype=float):
        est = k_rss(sample, float(t))
        try:
            variance = var_plugin(sample, float(t))
        except ZeroMassError:
            out.append(est)
            continue
        est = dataclasses.replace(est, variance=variance)
        out.append(ci_na(est, level))
    return out


HIV_SET_SIZE = _hiv_fixture.SET_SIZE
HIV_CYCLES = _hiv_fixture.CYCLES


def hiv_fixture_sample() -> RankedSetSample:
    """The bundled infection-to-diagnosis demo sample (weeks)."""
    values = np.array(_hiv_fixture.TABLE_CYCLE_MAJOR, dtype=float).T
    return RankedSetSample(values)


def hiv_demo(
    seed: int | None = None, t_points: int = 40
) -> tuple[RankedSetSample, list[MplEstimate]]:
    """The infection-to-diagnosis worked example.

    Without a seed, returns the bundled sample.  With a seed, simulates a
    fresh one: set size 5, six cycles, Gamma(shape 8, scale 40) parent,
    fraction-of-random ranking with p = 0.8, each value rounded half away
    from zero to a whole week.  Either way the estimate curve spans the
    sample range on ``t_points`` equally spaced points with plug-in
    variance and 95% normal-approximation intervals.
    """
    if seed is None:
        sample = hiv_fixture_sample()
    else:
        u = rng_substream(seed, 0).random(
            (HIV_CYCLES, HIV_SET_SIZE, HIV_SET_SIZE + 1)
        )
        values = rss_values_from_uniforms(
            Gamma(8.0, 40.0), FractionRandom(0.8), HIV_SET_SIZE, u
        )
        sample = RankedSetSample(np.floor(values + 0.5).T)
    ts = np.linspace(sample.values.min(), sample.values.max(), t_points)
    return sample, mpl_curve(sample, ts, level=0.95)
