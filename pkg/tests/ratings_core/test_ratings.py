import math

import numpy as np
import pytest

from scenicness.errors import InvalidInputError
from scenicness.ratings_core import (
    Partition,
    RatingHistogram,
    ScoreDistribution,
    entropy,
    entropy_profile,
    filter_min_ratings,
    mean_rating,
    normalize,
    partition_counts,
    partition_label,
    rounded_mean,
)

# -----------------------------------------------------------------------------
# Helpers
# -----------------------------------------------------------------------------


def _hist(*counts):
    return RatingHistogram(tuple(counts))


def _one_hot(rating: int, count: int = 1) -> RatingHistogram:
    counts = [0] * 10
    counts[rating - 1] = count
    return RatingHistogram(tuple(counts))


EMPTY = RatingHistogram((0,) * 10)


# -----------------------------------------------------------------------------
# Histogram construction
# -----------------------------------------------------------------------------


class TestRatingHistogram:
    def test_from_ratings_folds_into_counts(self):
        """Raw ratings are tallied by level."""
        hist = RatingHistogram.from_ratings([7, 7, 8, 8, 8])
        assert hist.counts == (0, 0, 0, 0, 0, 0, 2, 3, 0, 0)
        assert hist.total == 5

    def test_order_is_irrelevant(self):
        """Shuffled rating lists give the same histogram."""
        assert RatingHistogram.from_ratings([1, 10, 5]) == RatingHistogram.from_ratings([5, 1, 10])

    def test_ratings_expand_sorted(self):
        """ratings() expands the counts back to a sorted list."""
        assert _hist(1, 0, 2, 0, 0, 0, 0, 0, 0, 1).ratings() == [1, 3, 3, 10]

    @pytest.mark.parametrize("bad", [0, 11, -1, 2.5])
    def test_out_of_range_rating_rejected(self, bad):
        """Ratings outside 1..10 or non-integers are invalid input."""
        with pytest.raises(InvalidInputError):
            RatingHistogram.from_ratings([5, bad])

    def test_wrong_length_rejected(self):
        """A histogram needs exactly ten bins."""
        with pytest.raises(InvalidInputError):
            RatingHistogram((1, 2, 3))

    def test_negative_count_rejected(self):
        """Counts must be non-negative."""
        with pytest.raises(InvalidInputError):
            _hist(1, -1, 0, 0, 0, 0, 0, 0, 0, 0)


class TestScoreDistribution:
    def test_must_sum_to_one(self):
        """Probabilities that do not sum to one are rejected."""
        with pytest.raises(InvalidInputError):
            ScoreDistribution(np.full(10, 0.2))

    def test_negative_entries_rejected(self):
        """Every probability must be non-negative."""
        probs = np.zeros(10)
        probs[0], probs[1] = 1.5, -0.5
        with pytest.raises(InvalidInputError):
            ScoreDistribution(probs)

    def test_probs_are_read_only(self):
        """The stored vector cannot be mutated in place."""
        dist = normalize(_one_hot(4))
        with pytest.raises(ValueError):
            dist.probs[0] = 1.0

    def test_argmax_label_prefers_lower_rating_on_ties(self):
        """Equal mass on two levels reports the lower one."""
        assert normalize(_hist(0, 0, 0, 0, 5, 5, 0, 0, 0, 0)).argmax_label == 5


# -----------------------------------------------------------------------------
# normalize
# -----------------------------------------------------------------------------


class TestNormalize:
    def test_two_equal_bins(self):
        """Half the mass on 5 and half on 6."""
        dist = normalize(_hist(0, 0, 0, 0, 5, 5, 0, 0, 0, 0))
        np.testing.assert_allclose(dist.probs, [0, 0, 0, 0, 0.5, 0.5, 0, 0, 0, 0])

    def test_single_bin(self):
        """All ratings at 10 give a one-hot distribution."""
        np.testing.assert_allclose(normalize(_one_hot(10, 7)).probs, np.eye(10)[9])

    def test_arithmetic(self):
        """Proportions are counts over the total."""
        dist = normalize(_hist(1, 2, 3, 4, 0, 0, 0, 0, 0, 0))
        np.testing.assert_allclose(dist.probs, [0.1, 0.2, 0.3, 0.4, 0, 0, 0, 0, 0, 0])

    @pytest.mark.parametrize("k", [1, 2, 7, 1000])
    def test_scale_invariant(self, k):
        """Scaling every count by k leaves the distribution unchanged."""
        counts = (3, 0, 1, 4, 1, 5, 9, 2, 6, 5)
        scaled = tuple(k * c for c in counts)
        np.testing.assert_allclose(normalize(_hist(*scaled)).probs, normalize(_hist(*counts)).probs)

    def test_empty_histogram(self):
        """An empty histogram is invalid input."""
        with pytest.raises(InvalidInputError):
            normalize(EMPTY)


# -----------------------------------------------------------------------------
# Means
# -----------------------------------------------------------------------------


class TestMeanRating:
    def test_arithmetic(self):
        """{7,7,8,8,8} averages 7.6 and rounds to 8."""
        hist = RatingHistogram.from_ratings([7, 7, 8, 8, 8])
        assert mean_rating(hist) == pytest.approx(7.6)
        assert rounded_mean(hist) == 8

    def test_half_rounds_up(self):
        """{5,6} averages 5.5 and rounds up to 6."""
        hist = RatingHistogram.from_ratings([5, 6])
        assert mean_rating(hist) == pytest.approx(5.5)
        assert rounded_mean(hist) == 6

    def test_one_hot(self):
        """A single level is its own mean."""
        assert mean_rating(_one_hot(3)) == 3.0
        assert rounded_mean(_one_hot(3)) == 3

    def test_bounds(self):
        """Means always fall in [1, 10]."""
        rng = np.random.default_rng(3)
        for _ in range(50):
            counts = rng.integers(0, 5, 10)
            counts[rng.integers(10)] += 1
            hist = RatingHistogram(tuple(counts))
            assert 1.0 <= mean_rating(hist) <= 10.0
            assert 1 <= rounded_mean(hist) <= 10

    def test_empty_histogram(self):
        """Means of nothing are undefined."""
        with pytest.raises(InvalidInputError):
            mean_rating(EMPTY)
        with pytest.raises(InvalidInputError):
            rounded_mean(EMPTY)


# -----------------------------------------------------------------------------
# Entropy
# -----------------------------------------------------------------------------


class TestEntropy:
    def test_one_hot_is_zero(self):
        """A unanimous vote has no uncertainty."""
        assert entropy(_one_hot(6, 12)) == 0.0

    def test_uniform_is_log_ten(self):
        """Uniform votes reach the maximum ln 10."""
        assert entropy(_hist(*(3,) * 10)) == pytest.approx(math.log(10))

    def test_two_equal_bins(self):
        """Two equal bins give ln 2."""
        assert entropy(_hist(5, 5, 0, 0, 0, 0, 0, 0, 0, 0)) == pytest.approx(math.log(2))

    def test_range(self):
        """Entropy lies in [0, ln 10]."""
        rng = np.random.default_rng(11)
        for _ in range(50):
            counts = rng.integers(0, 6, 10)
            counts[rng.integers(10)] += 1
            value = entropy(RatingHistogram(tuple(counts)))
            assert 0.0 <= value <= math.log(10) + 1e-12

    def test_empty_histogram(self):
        """Entropy of nothing is undefined."""
        with pytest.raises(InvalidInputError):
            entropy(EMPTY)


# -----------------------------------------------------------------------------
# Partitions
# -----------------------------------------------------------------------------


class TestPartitionLabel:
    @pytest.mark.parametrize(
        "mean, expected",
        [
            (7.4, Partition.SCENIC),
            (7.0, Partition.NEUTRAL),
            (3.0, Partition.NEUTRAL),
            (2.9, Partition.NON_SCENIC),
            (1.0, Partition.NON_SCENIC),
            (10.0, Partition.SCENIC),
            (5.0, Partition.NEUTRAL),
        ],
    )
    def test_thresholds_are_strict(self, mean, expected):
        """Scenic above 7, non-scenic below 3, neutral in between."""
        assert partition_label(mean) is expected

    @pytest.mark.parametrize("mean", [0.5, 10.5, float("nan")])
    def test_out_of_range(self, mean):
        """Means outside [1, 10] are invalid input."""
        with pytest.raises(InvalidInputError):
            partition_label(mean)

    def test_partition_counts(self):
        """Every partition is reported, even when empty."""
        counts = partition_counts([_one_hot(9), _one_hot(8), _one_hot(2)])
        assert counts == {Partition.SCENIC: 2, Partition.NON_SCENIC: 1, Partition.NEUTRAL: 0}


# -----------------------------------------------------------------------------
# Dataset statistics
# -----------------------------------------------------------------------------


class TestEntropyProfile:
    def test_groups_by_rounded_mean(self):
        """Images are bucketed by rounded mean and empty levels are skipped."""
        profile = entropy_profile(
            [_one_hot(2), _hist(0, 0, 0, 0, 1, 1, 0, 0, 0, 0), _one_hot(6, 3)]
        )
        assert [level.level for level in profile] == [2, 6]
        six = profile[1]
        assert six.images == 2
        assert six.mean_entropy == pytest.approx(math.log(2) / 2)


class TestFilterMinRatings:
    def test_keeps_images_with_enough_ratings(self):
        """Only histograms with at least min_ratings survive."""
        items = [("a", _one_hot(5, 3)), ("b", _one_hot(5, 10)), ("c", _one_hot(5, 12))]
        kept = filter_min_ratings(items, 10, key=lambda item: item[1])
        assert [name for name, _ in kept] == ["b", "c"]

    def test_negative_threshold(self):
        """A negative threshold is invalid input."""
        with pytest.raises(InvalidInputError):
            filter_min_ratings([], -1)
