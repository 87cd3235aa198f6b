"""Judgement-ranking models and ranked set sample generation.

A ranked set sample of set size ``k`` and cycle count ``m`` measures one
unit per (cycle, target rank) pair: ``k`` units are drawn, ranked by
judgement, and the unit holding the target rank is measured.  Ranking may
be imperfect; the two error models here mix the true order-statistic CDFs
so that the judged-rank CDFs stay analytically tractable:

* fraction-of-random: with probability ``p`` the judged unit truly holds
  rank ``r``, otherwise it is a uniformly random unit of the set, giving
  ``F_judged = p * F_orderstat(r) + (1 - p) * F``.
* fraction-of-neighbor: with probability ``p`` the rank is correct,
  otherwise it is confused with an adjacent rank (each with probability
  ``(1 - p) / 2``, clamped at the extremes).

Both models average to the parent CDF over ranks, the "consistent
ranking" identity that all exact results downstream rely on.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import Distribution, sample


class RankingModel:
    """Base class; concrete models are frozen dataclasses (hashable)."""


@dataclass(frozen=True)
class Perfect(RankingModel):
    """Error-free ranking: judged rank r is the true r-th order statistic."""


@dataclass(frozen=True)
class FractionRandom(RankingModel):
    p: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")


@dataclass(frozen=True)
class FractionNeighbor(RankingModel):
    p: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")


def _check_rank(k: int, r: int) -> None:
    if not 1 <= r <= k:
        raise ValueError(f"rank {r} out of range for set size {k}")


def order_stat_cdf_from_parent(k: int, r: int, parent_cdf):
    """CDF of the r-th order statistic of k i.i.d. draws, as a function of
    the parent CDF value: P(Bin(k, F) >= r).  Accepts scalars or arrays."""
    _check_rank(k, r)
    if np.ndim(parent_cdf) == 0:
        f = float(parent_cdf)
        g = 1.0 - f
        total = 0.0
        for j in range(r, k + 1):
            total += math.comb(k, j) * f**j * g ** (k - j)
        return min(total, 1.0)
    f = np.asarray(parent_cdf, dtype=float)
    g = 1.0 - f
    total = np.zeros_like(f)
    for j in range(r, k + 1):
        total += math.comb(k, j) * f**j * g ** (k - j)
    return np.minimum(total, 1.0)


def order_stat_cdf(dist: Distribution, k: int, r: int, t):
    """Evaluate the r-th order-statistic CDF of ``dist`` at ``t``."""
    return order_stat_cdf_from_parent(k, r, dist.cdf(t))


def judged_cdf_from_parent(model: RankingModel, k: int, r: int, parent_cdf):
    """Judged-rank CDF as a mixture over order-statistic CDFs, expressed in
    terms of the parent CDF value (scalar or array)."""
    _check_rank(k, r)
    if isinstance(model, Perfect):
        return order_stat_cdf_from_parent(k, r, parent_cdf)
    if isinstance(model, FractionRandom):
        return model.p * order_stat_cdf_from_parent(k, r, parent_cdf) + (
            1.0 - model.p
        ) * parent_cdf
    if isinstance(model, FractionNeighbor):
        # Adjacent-rank confusion, with rank 0 read as rank 1 and rank k+1
        # as rank k at the extremes.
        w = 0.5 * (1.0 - model.p)
        below = order_stat_cdf_from_parent(k, max(r - 1, 1), parent_cdf)
        here = order_stat_cdf_from_parent(k, r, parent_cdf)
        above = order_stat_cdf_from_parent(k, min(r + 1, k), parent_cdf)
        return w * below + model.p * here + w * above
    raise TypeError(f"unknown ranking model: {type(model).__name__}")


def judged_cdf(dist: Distribution, model: RankingModel, k: int, r: int, t):
    """CDF of the unit judged to hold rank ``r`` in a set of size ``k``."""
    return judged_cdf_from_parent(model, k, r, dist.cdf(t))


@dataclass(eq=False)
class RankedSetSample:
    """Measured values of a ranked set sample.

    ``values[r - 1, j - 1]`` is the measurement at judged rank ``r`` in
    cycle ``j``; shape is (set size, cycle count).
    """

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.size == 0:
            raise ValueError("values must be a nonempty (k, m) array")

    @property
    def set_size(self) -> int:
        return self.values.shape[0]

    @property
    def cycles(self) -> int:
        return self.values.shape[1]

    @property
    def size(self) -> int:
        return self.values.size

    def pooled(self) -> np.ndarray:
        """All measurements as a flat array (rank-major)."""
        return self.values.reshape(-1)


def _selection_indices(model: RankingModel, k: int, usel: np.ndarray) -> np.ndarray:
    """0-based judged index into each sorted set, from one selection uniform
    per unit.  ``usel`` has shape (..., m, k) with target rank r = 1..k on
    the last axis."""
    targets = np.broadcast_to(np.arange(k, dtype=np.int64), usel.shape)
    if isinstance(model, Perfect):
        return targets
    if isinstance(model, FractionRandom):
        if model.p >= 1.0:
            return targets
        # Reuse the tail of the selection uniform beyond p as the uniform
        # random pick, so each unit still consumes exactly one uniform.
        tail = (usel - model.p) / (1.0 - model.p)
        random_pick = np.minimum((tail * k).astype(np.int64), k - 1)
        return np.where(usel < model.p, targets, random_pick)
    if isinstance(model, FractionNeighbor):
        w = 0.5 * (1.0 - model.p)
        neighbor = np.where(usel < model.p + w, targets - 1, targets + 1)
        idx = np.where(usel < model.p, targets, neighbor)
        return np.clip(idx, 0, k - 1)
    raise TypeError(f"unknown ranking model: {type(model).__name__}")


def rss_values_from_uniforms(
    dist: Distribution, model: RankingModel, k: int, uniforms: np.ndarray
) -> np.ndarray:
    """Turn a block of uniforms into measured RSS values.

    ``uniforms`` has shape (..., m, k, k + 1): for each (cycle, target
    rank) unit, entries [..., :k] are the set draws (inverse-transformed)
    and entry [..., k] decides the judged selection.  Returns measured
    values with shape (..., m, k) indexed (cycle, rank).  The same uniform
    layout is consumed for every ranking model, so a fixed stream yields
    the same underlying set draws regardless of the model compared.
    """
    if uniforms.shape[-1] != k + 1 or uniforms.shape[-2] != k:
        raise ValueError("uniform block must have trailing shape (m, k, k + 1)")
    draws = dist._quantile(uniforms[..., :k])
    # Ties occur with probability zero; stable sort breaks any by draw order.
    ordered = np.sort(draws, axis=-1, kind="stable")
    idx = _selection_indices(model, k, uniforms[..., k])
    return np.take_along_axis(ordered, idx[..., None], axis=-1)[..., 0]


def draw_rss(
    dist: Distribution,
    model: RankingModel,
    k: int,
    m: int,
    stream: np.random.Generator,
) -> RankedSetSample:
    """Generate a ranked set sample of set size ``k`` over ``m`` cycles.

    Uniform consumption order is fixed: for each cycle, for each target
    rank, ``k`` set-draw uniforms followed by one selection uniform.
    """
    if k < 1 or m < 1:
        raise ValueError("set size and cycle count must be >= 1")
    u = stream.random((m, k, k + 1))
    values = rss_values_from_uniforms(dist, model, k, u)
    return RankedSetSample(values.T)


def draw_srs(dist: Distribution, n: int, stream: np.random.Generator) -> np.ndarray:
    """Simple random sample of size ``n`` by inverse transform."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return sample(dist, stream, n)


def write_rss_csv(sample: RankedSetSample, path) -> None:
    """Write the ``cycle,rank,value`` interchange CSV (cycle-major rows)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["cycle", "rank", "value"])
        for j in range(sample.cycles):
            for r in range(sample.set_size):
                writer.writerow([j + 1, r + 1, repr(float(sample.values[r, j]))])


def read_rss_csv(path) -> RankedSetSample:
    """Read the ``cycle,rank,value`` CSV back into a sample, requiring a
    complete k x m grid of (cycle, rank) pairs."""
    entries: dict[tuple[int, int], float] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["cycle", "rank", "value"]:
            raise ValueError("expected header 'cycle,rank,value'")
        for row in reader:
            if not row:
                continue
            if len(row) != 3:
                raise ValueError(f"malformed row: {row!r}")
            key = (int(row[0]), int(row[1]))
            if key in entries:
                raise ValueError(f"duplicate (cycle, rank) entry: {key}")
            entries[key] = float(row[2])
    if not entries:
        raise ValueError("no data rows")
    m = max(c for c, _ in entries)
    k = max(r for _, r in entries)
    if len(entries) != m * k:
        raise ValueError(f"incomplete grid: expected {m * k} rows, got {len(entries)}")
    values = np.empty((k, m))
    for (j, r), v in entries.items():
        if j < 1 or r < 1:
            raise ValueError("cycle and rank indices start at 1")
        values[r - 1, j - 1] = v
    return RankedSetSample(values)
