"""Crowdsourced rating histograms and their statistics."""

from scenicness.ratings_core.ratings import (
    NON_SCENIC_THRESHOLD,
    NUM_LEVELS,
    RATING_LEVELS,
    SCENIC_THRESHOLD,
    EntropyLevel,
    Partition,
    RatingHistogram,
    ScoreDistribution,
    as_distribution,
    entropy,
    entropy_profile,
    filter_min_ratings,
    mean_rating,
    normalize,
    partition_counts,
    partition_label,
    round_half_up,
    rounded_mean,
)

__all__ = [
    "NON_SCENIC_THRESHOLD",
    "NUM_LEVELS",
    "RATING_LEVELS",
    "SCENIC_THRESHOLD",
    "EntropyLevel",
    "Partition",
    "RatingHistogram",
    "ScoreDistribution",
    "as_distribution",
    "entropy",
    "entropy_profile",
    "filter_min_ratings",
    "mean_rating",
    "normalize",
    "partition_counts",
    "partition_label",
    "round_half_up",
    "rounded_mean",
]
