"""Empirical mean-past-lifetime estimators with plug-in variance.

The mean past lifetime at time ``t`` is ``E(t - X | X <= t)``.  Its
empirical estimate is the average of ``t - x`` over the observations at
or below ``t``, taken to be 0 when there are none (the "zero convention",
applied to both the simple-random-sample and ranked-set-sample forms so
the two can be compared replication by replication).

For ranked set samples the point estimate only depends on the pooled
values, but the plug-in variance uses the per-rank structure: it replaces
every population quantity in the large-sample variance with its per-rank
empirical counterpart.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
from scipy import special

from .distributions import ZeroMassError
from .ranking import RankedSetSample


@dataclass(frozen=True)
class MplEstimate:
    """Point estimate of the mean past lifetime at time ``t``.

    ``count_at_risk`` is the number of observations at or below ``t``;
    ``variance``, ``ci`` and ``level`` are filled by :func:`var_plugin`
    and :func:`ci_na` when requested.
    """

    t: float
    value: float
    count_at_risk: int
    variance: float | None = None
    ci: tuple[float, float] | None = None
    level: float | None = None


def _pooled_estimate(values: np.ndarray, t: float) -> tuple[float, int]:
    below = values <= t
    count = int(np.count_nonzero(below))
    if count == 0:
        return 0.0, 0
    total = float(np.sum((t - values) * below))
    # Summation roundoff must not push the mean past its exact bound t.
    return min(total / count, t), count


def k_srs(data, t: float) -> MplEstimate:
    """Empirical mean past lifetime from a simple random sample."""
    data = np.asarray(data, dtype=float)
    if data.size == 0:
        raise ValueError("data must be nonempty")
    if t <= 0:
        raise ValueError("t must be positive")
    value, count = _pooled_estimate(data, t)
    return MplEstimate(t=t, value=value, count_at_risk=count)


def k_rss(sample: RankedSetSample, t: float) -> MplEstimate:
    """Empirical mean past lifetime from a ranked set sample.

    Per-rank sums of ``t - x`` over qualifying values are combined across
    ranks and divided by the total qualifying count; the estimate is
    exactly 0 when no value lies at or below ``t``.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    u_r, v_r = _rank_sums(sample, t)
    total = int(v_r.sum())
    if total == 0:
        return MplEstimate(t=t, value=0.0, count_at_risk=0)
    value = min(float(u_r.sum()) / total, t)
    return MplEstimate(t=t, value=value, count_at_risk=total)


def f_rss(sample: RankedSetSample, t: float) -> float:
    """Pooled empirical CDF of the ranked set sample at ``t``."""
    return float(np.count_nonzero(sample.values <= t)) / sample.size


def _rank_sums(sample: RankedSetSample, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-rank sums U_r of (t - x) over qualifying values and counts V_r."""
    below = sample.values <= t
    v = below.sum(axis=1)
    u = ((t - sample.values) * below).sum(axis=1)
    return u, v


def var_plugin(sample: RankedSetSample, t: float) -> float:
    """Plug-in estimate of the variance of the RSS mean-past-lifetime
    estimator at ``t``.

    Every component of the large-sample variance is replaced by its
    empirical counterpart, computed per rank from the ``m`` values at that
    rank: the judged CDF by the qualifying fraction, the per-rank mean
    past lifetime by the qualifying average (0 when the rank has no
    qualifying value), and the per-rank conditional variance by the biased
    empirical variance of ``t - x`` among qualifying values (0 when the
    rank has fewer than two).

    Raises
    ------
    ZeroMassError
        If no observation lies at or below ``t``.
    """
    k, m = sample.set_size, sample.cycles
    n = sample.size
    f_hat = f_rss(sample, t)
    if f_hat == 0.0:
        raise ZeroMassError(f"no observations at or below t={t}")
    k_hat = k_rss(sample, t).value

    u_r, v_r = _rank_sums(sample, t)
    f_rank = v_r / m
    with np.errstate(invalid="ignore"):
        k_rank = np.where(v_r > 0, u_r / np.maximum(v_r, 1), 0.0)
    # Biased (divide-by-count) per-rank variance of t - x among qualifiers.
    below = sample.values <= t
    sq = ((t - sample.values) ** 2 * below).sum(axis=1)
    sigma2_rank = np.where(v_r > 1, sq / np.maximum(v_r, 1) - k_rank**2, 0.0)
    sigma2_rank = np.maximum(sigma2_rank, 0.0)

    terms = sigma2_rank * f_rank + f_rank * (1.0 - f_rank) * (k_rank - k_hat) ** 2
    return float(terms.sum()) / (n * k * f_hat**2)


def ci_na(estimate: MplEstimate, level: float = 0.95) -> MplEstimate:
    """Normal-approximation confidence interval around an estimate.

    The lower bound is truncated at 0 since the mean past lifetime is
    nonnegative.  Requires ``estimate.variance``.
    """
    if estimate.variance is None:
        raise ValueError("estimate has no variance; compute var_plugin first")
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    z = float(special.ndtri(0.5 * (1.0 + level)))
    half = z * estimate.variance**0.5
    ci = (max(0.0, estimate.value - half), estimate.value + half)
    return dataclasses.replace(estimate, ci=ci, level=level)
