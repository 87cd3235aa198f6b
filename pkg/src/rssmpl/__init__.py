"""Mean past lifetime estimation from ranked set samples.

Estimators for the mean time elapsed since an event given that it has
occurred by time t, from both simple random and ranked set samples, with
exact large-sample theory, exact finite-sample moments, and a Monte Carlo
harness for relative-efficiency studies.
"""

from ._backend import BACKEND
from .asymptotics import (
    DEFAULT_QUANTILE_GRID,
    MomentPair,
    PopulationContext,
    StateSpaceLimitError,
    are,
    avar_rss,
    avar_srs,
    exact_moments_krss,
    mpl_exact,
    mpl_judged,
    sigma2_exact,
    sigma2_judged,
)
from .distributions import (
    DEFAULT_QUADRATURE,
    Distribution,
    Exponential,
    Gamma,
    QuadratureConfig,
    RescaledBeta,
    SubdivisionLimitError,
    Weibull,
    ZeroMassError,
    format_distribution,
    integrate,
    parse_distribution,
    sample,
)
from .estimators import MplEstimate, ci_na, f_rss, k_rss, k_srs, var_plugin
from .harness import (
    EfficiencyReport,
    EfficiencyRow,
    ExperimentConfig,
    SamplingDistribution,
    SamplingMoments,
    hiv_demo,
    hiv_fixture_sample,
    mpl_curve,
    rng_substream,
    simulate_re,
    simulate_sampling_distribution,
)
from .ranking import (
    FractionNeighbor,
    FractionRandom,
    Perfect,
    RankedSetSample,
    RankingModel,
    draw_rss,
    draw_srs,
    judged_cdf,
    order_stat_cdf,
    read_rss_csv,
    write_rss_csv,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DEFAULT_QUADRATURE",
    "DEFAULT_QUANTILE_GRID",
    "Distribution",
    "EfficiencyReport",
    "EfficiencyRow",
    "ExperimentConfig",
    "Exponential",
    "FractionNeighbor",
    "FractionRandom",
    "Gamma",
    "MomentPair",
    "MplEstimate",
    "Perfect",
    "PopulationContext",
    "QuadratureConfig",
    "RankedSetSample",
    "RankingModel",
    "RescaledBeta",
    "SamplingDistribution",
    "SamplingMoments",
    "StateSpaceLimitError",
    "SubdivisionLimitError",
    "Weibull",
    "ZeroMassError",
    "are",
    "avar_rss",
    "avar_srs",
    "ci_na",
    "draw_rss",
    "draw_srs",
    "exact_moments_krss",
    "f_rss",
    "format_distribution",
    "hiv_demo",
    "hiv_fixture_sample",
    "integrate",
    "judged_cdf",
    "k_rss",
    "k_srs",
    "mpl_curve",
    "mpl_exact",
    "mpl_judged",
    "order_stat_cdf",
    "parse_distribution",
    "read_rss_csv",
    "rng_substream",
    "sample",
    "sigma2_exact",
    "sigma2_judged",
    "simulate_re",
    "simulate_sampling_distribution",
    "var_plugin",
    "write_rss_csv",
]
