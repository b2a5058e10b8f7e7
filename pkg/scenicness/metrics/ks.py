"""One-sample Kolmogorov-Smirnov test of human ratings against a predicted distribution.

The rating scale is discrete and rating sets are small, so p-values come from a
seeded Monte-Carlo null distribution rather than the asymptotic formula.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from scenicness.errors import InvalidInputError
from scenicness.ratings_core import RatingHistogram, ScoreDistribution, as_distribution

SIGNIFICANCE = 0.05
DEFAULT_MC_SAMPLES = 10_000
# Simulated statistics within this distance of the observed one count as ties.
TIE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class KsResult:
    statistic: float
    p_value: float
    pass_at_5pct: bool


def image_rng(seed: int, image_id: str | int) -> np.random.Generator:
    """Per-image generator derived from ``(seed, image id)``, independent of evaluation order."""
    key = zlib.crc32(str(image_id).encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence([int(seed), key]))


def ks_statistic(pred: ScoreDistribution | np.ndarray, ratings: RatingHistogram) -> float:
    """``max_r |ECDF(r) - CDF(r)|`` over the rating levels."""
    if ratings.total < 1:
        raise InvalidInputError("[metrics] K-S test needs at least one rating")
    predicted_cdf = np.cumsum(as_distribution(pred).probs)
    counts = ratings.as_array()
    empirical_cdf = np.cumsum(counts) / counts.sum()
    return float(np.max(np.abs(empirical_cdf - predicted_cdf)))


def ks_test(
    pred: ScoreDistribution | np.ndarray,
    ratings: RatingHistogram,
    mc_samples: int = DEFAULT_MC_SAMPLES,
    seed: int = 0,
    rng: np.random.Generator | None = None,
) -> KsResult:
    """Test whether ``ratings`` could be drawn from ``pred``.

    The p-value is the add-one smoothed share of ``mc_samples`` simulated
    rating sets (same size as ``ratings``) whose statistic is at least the
    observed one.
    """
    if mc_samples < 1:
        raise InvalidInputError(f"[metrics] mc_samples must be >= 1, got {mc_samples}")
    observed = ks_statistic(pred, ratings)
    probs = np.array(as_distribution(pred).probs)
    probs = probs / probs.sum()
    predicted_cdf = np.cumsum(probs)
    size = ratings.total

    rng = rng if rng is not None else np.random.default_rng(seed)
    simulated = rng.multinomial(size, probs, size=mc_samples)
    simulated_cdf = np.cumsum(simulated, axis=1) / size
    statistics = np.max(np.abs(simulated_cdf - predicted_cdf), axis=1)

    exceed = int(np.count_nonzero(statistics >= observed - TIE_TOLERANCE))
    p_value = (exceed + 1) / (mc_samples + 1)
    return KsResult(statistic=observed, p_value=p_value, pass_at_5pct=p_value >= SIGNIFICANCE)
