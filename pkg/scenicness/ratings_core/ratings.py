"""Rating histograms, predicted score distributions and their statistics."""

from __future__ import annotations

import enum
import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence, TypeVar

import numpy as np
from scipy.stats import entropy as shannon_entropy

from scenicness.errors import InvalidInputError

log = logging.getLogger("scenicness.ratings_core")

NUM_LEVELS = 10
RATING_LEVELS = np.arange(1, NUM_LEVELS + 1, dtype=float)
SCENIC_THRESHOLD = 7.0
NON_SCENIC_THRESHOLD = 3.0
DISTRIBUTION_TOLERANCE = 1e-9


class Partition(enum.Enum):
    SCENIC = "scenic"
    NON_SCENIC = "non_scenic"
    NEUTRAL = "neutral"


@dataclass(frozen=True)
class RatingHistogram:
    """Counts of the integer ratings 1..10 given to one image.

    ``counts[i]`` holds the number of raters who answered ``i + 1``.
    """

    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if len(counts) != NUM_LEVELS:
            raise InvalidInputError(
                f"[ratings_core] histogram needs {NUM_LEVELS} counts, got {len(counts)}"
            )
        if any(c < 0 for c in counts):
            raise InvalidInputError(f"[ratings_core] negative count in {counts}")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_ratings(cls, ratings: Iterable[int]) -> "RatingHistogram":
        """Fold a raw list of ratings into counts; the order carries no information."""
        tally = Counter()
        for rating in ratings:
            value = int(rating)
            if value != rating or not 1 <= value <= NUM_LEVELS:
                raise InvalidInputError(
                    f"[ratings_core] rating {rating!r} outside 1..{NUM_LEVELS}"
                )
            tally[value] += 1
        return cls(tuple(tally.get(level, 0) for level in range(1, NUM_LEVELS + 1)))

    @property
    def total(self) -> int:
        return sum(self.counts)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float)

    def ratings(self) -> list[int]:
        """Expand back to a sorted rating list."""
        return [
            level
            for level, count in zip(range(1, NUM_LEVELS + 1), self.counts)
            for _ in range(count)
        ]


@dataclass(frozen=True, eq=False)
class ScoreDistribution:
    """Probability vector over the 10 rating levels."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float)
        if probs.shape != (NUM_LEVELS,):
            raise InvalidInputError(
                f"[ratings_core] distribution needs shape ({NUM_LEVELS},), got {probs.shape}"
            )
        if not np.all(np.isfinite(probs)) or np.any(probs < 0):
            raise InvalidInputError("[ratings_core] distribution has negative or non-finite entries")
        if abs(probs.sum() - 1.0) > DISTRIBUTION_TOLERANCE:
            raise InvalidInputError(
                f"[ratings_core] distribution sums to {probs.sum():.12f}, not 1"
            )
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScoreDistribution):
            return NotImplemented
        return bool(np.array_equal(self.probs, other.probs))

    def __hash__(self) -> int:
        return hash(self.probs.tobytes())

    @property
    def argmax_label(self) -> int:
        """Most probable rating (1..10); ties resolve to the lower rating."""
        return int(np.argmax(self.probs)) + 1


def as_distribution(value: ScoreDistribution | Sequence[float] | np.ndarray) -> ScoreDistribution:
    if isinstance(value, ScoreDistribution):
        return value
    return ScoreDistribution(np.asarray(value, dtype=float))


def _require_ratings(hist: RatingHistogram) -> None:
    if hist.total < 1:
        raise InvalidInputError("[ratings_core] histogram has no ratings")


def normalize(hist: RatingHistogram) -> ScoreDistribution:
    """Proportion of each rating, the target distribution of the distribution loss."""
    _require_ratings(hist)
    counts = hist.as_array()
    return ScoreDistribution(counts / counts.sum())


def mean_rating(hist: RatingHistogram) -> float:
    _require_ratings(hist)
    counts = hist.as_array()
    return float(np.dot(RATING_LEVELS, counts) / counts.sum())


def round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def rounded_mean(hist: RatingHistogram) -> int:
    """Mean rating rounded to the nearest level, x.5 rounding up, clamped to 1..10."""
    return min(max(round_half_up(mean_rating(hist)), 1), NUM_LEVELS)


def entropy(hist: RatingHistogram) -> float:
    """Shannon entropy of the normalized ratings in nats."""
    return float(shannon_entropy(normalize(hist).probs))


def partition_label(mean: float) -> Partition:
    """Scenic above 7.0, non-scenic below 3.0, neutral otherwise (strict)."""
    if not math.isfinite(mean) or not 1.0 <= mean <= NUM_LEVELS:
        raise InvalidInputError(f"[ratings_core] mean rating {mean} outside [1, 10]")
    if mean > SCENIC_THRESHOLD:
        return Partition.SCENIC
    if mean < NON_SCENIC_THRESHOLD:
        return Partition.NON_SCENIC
    return Partition.NEUTRAL


def partition_counts(histograms: Iterable[RatingHistogram]) -> dict[Partition, int]:
    counts = {partition: 0 for partition in Partition}
    for hist in histograms:
        counts[partition_label(mean_rating(hist))] += 1
    return counts


@dataclass(frozen=True)
class EntropyLevel:
    level: int
    images: int
    mean_entropy: float


def entropy_profile(histograms: Iterable[RatingHistogram]) -> list[EntropyLevel]:
    """Average per-image entropy grouped by rounded mean rating.

    Levels without images are left out.
    """
    buckets: dict[int, list[float]] = {}
    for hist in histograms:
        buckets.setdefault(rounded_mean(hist), []).append(entropy(hist))
    return [
        EntropyLevel(level=level, images=len(values), mean_entropy=float(np.mean(values)))
        for level, values in sorted(buckets.items())
    ]


T = TypeVar("T")


def filter_min_ratings(items: Iterable[T], min_ratings: int, key=lambda item: item) -> list[T]:
    """Keep items whose histogram (``key(item)``) has at least ``min_ratings`` ratings."""
    if min_ratings < 0:
        raise InvalidInputError(f"[ratings_core] min_ratings must be >= 0, got {min_ratings}")
    kept = [item for item in items if key(item).total >= min_ratings]
    log.debug(f"[ratings_core] {len(kept)} items with at least {min_ratings} ratings")
    return kept
