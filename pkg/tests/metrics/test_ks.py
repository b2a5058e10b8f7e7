import numpy as np
import pytest

from scenicness.errors import InvalidInputError
from scenicness.metrics import image_rng, ks_statistic, ks_test
from scenicness.ratings_core import RatingHistogram


def _hist_from(ratings):
    return RatingHistogram.from_ratings(ratings)


class TestKsStatistic:
    def test_maximal_gap(self):
        """All mass at opposite ends of the scale gives 1."""
        assert ks_statistic(np.eye(10)[0], _hist_from([10, 10, 10])) == pytest.approx(1.0)

    def test_identical_cdfs(self):
        """Ratings proportional to the prediction give 0."""
        pred = np.zeros(10)
        pred[:2] = 0.5
        assert ks_statistic(pred, _hist_from([1, 2])) == pytest.approx(0.0)

    def test_range(self):
        """The statistic lies in [0, 1]."""
        rng = np.random.default_rng(0)
        for _ in range(50):
            value = ks_statistic(rng.dirichlet(np.ones(10)), _hist_from(rng.integers(1, 11, 7).tolist()))
            assert 0.0 <= value <= 1.0

    def test_empty_ratings(self):
        """No ratings, no test."""
        with pytest.raises(InvalidInputError):
            ks_statistic(np.full(10, 0.1), RatingHistogram((0,) * 10))


class TestKsTest:
    def test_clear_rejection(self):
        """Ratings at 10 against a prediction at 1 fail with the smallest p-value."""
        result = ks_test(np.eye(10)[0], _hist_from([10] * 12), mc_samples=999, seed=1)
        assert result.statistic == pytest.approx(1.0)
        assert result.p_value == pytest.approx(1 / 1000)
        assert not result.pass_at_5pct

    def test_perfect_fit_passes(self):
        """Identical CDFs pass with p-value 1."""
        pred = np.zeros(10)
        pred[:2] = 0.5
        result = ks_test(pred, _hist_from([1, 2]), mc_samples=500, seed=2)
        assert result.statistic == 0.0
        assert result.p_value == 1.0
        assert result.pass_at_5pct

    def test_pass_flag_matches_p_value(self):
        """pass_at_5pct is exactly p >= 0.05."""
        rng = np.random.default_rng(3)
        for _ in range(20):
            result = ks_test(
                rng.dirichlet(np.ones(10)), _hist_from(rng.integers(1, 11, 10).tolist()), mc_samples=200, seed=4
            )
            assert result.pass_at_5pct == (result.p_value >= 0.05)

    def test_seeded(self):
        """The same seed gives the same p-value."""
        pred = np.random.default_rng(5).dirichlet(np.ones(10))
        hist = _hist_from([3, 4, 4, 5, 9])
        assert ks_test(pred, hist, 300, seed=7) == ks_test(pred, hist, 300, seed=7)

    def test_calibrated_under_the_null(self):
        """Ratings drawn from the prediction are rejected about 5% of the time."""
        rng = np.random.default_rng(2024)
        trials, rejections = 2000, 0
        for trial in range(trials):
            pred = rng.dirichlet(np.ones(10))
            counts = rng.multinomial(10, pred)
            result = ks_test(pred, RatingHistogram(tuple(counts)), mc_samples=10000, rng=image_rng(0, trial))
            rejections += not result.pass_at_5pct
        assert 0.03 <= rejections / trials <= 0.07

    def test_invalid_sample_count(self):
        """At least one Monte-Carlo sample is needed."""
        with pytest.raises(InvalidInputError):
            ks_test(np.full(10, 0.1), _hist_from([5]), mc_samples=0)


class TestImageRng:
    def test_depends_on_seed_and_id(self):
        """Streams differ across ids and seeds and repeat for the same pair."""
        draw = lambda seed, image_id: image_rng(seed, image_id).random()
        assert draw(0, "a") == draw(0, "a")
        assert draw(0, "a") != draw(0, "b")
        assert draw(0, "a") != draw(1, "a")
