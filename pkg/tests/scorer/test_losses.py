import math

import numpy as np
import pytest

from helper_lib.mlp import FeedForwardNetwork
from scenicness.errors import ConfigError, InvalidInputError
from scenicness.ratings_core import RatingHistogram, entropy, normalize
from scenicness.scorer import (
    LossKind,
    ScorerModel,
    loss_average,
    loss_distribution,
    loss_gradient,
    loss_multinomial,
    loss_value,
    predict,
    target_weights,
)

LN10 = math.log(10)
UNIFORM = np.full(10, 0.1)

# -----------------------------------------------------------------------------
# Helpers
# -----------------------------------------------------------------------------


def _hist(**counts):
    """Histogram from keyword counts like ``r5=2, r6=3``."""
    values = [0] * 10
    for key, count in counts.items():
        values[int(key[1:]) - 1] = count
    return RatingHistogram(tuple(values))


def _random_hist(rng):
    counts = rng.integers(0, 6, 10)
    counts[rng.integers(10)] += 1
    return RatingHistogram(tuple(counts))


def _random_dist(rng):
    probs = rng.dirichlet(np.ones(10))
    return np.maximum(probs, 1e-6) / np.maximum(probs, 1e-6).sum()


def _make_model(seed, dims=(3, 4, 10)):
    return ScorerModel(FeedForwardNetwork.initialize(list(dims), np.random.default_rng(seed)))


def _numeric_gradient(model, features, hist, kind, h=1e-5):
    flat = model.network.flatten()
    grad = np.zeros_like(flat)
    for i in range(flat.size):
        step = np.zeros_like(flat)
        step[i] = h
        up = ScorerModel(model.network.with_flat(flat + step))
        down = ScorerModel(model.network.with_flat(flat - step))
        grad[i] = (
            loss_value(predict(up, features), hist, kind)
            - loss_value(predict(down, features), hist, kind)
        ) / (2 * h)
    return grad


# -----------------------------------------------------------------------------
# Loss values
# -----------------------------------------------------------------------------


class TestLossAverage:
    def test_uniform_prediction(self):
        """A uniform prediction costs ln 10 whatever the ratings."""
        assert loss_average(UNIFORM, _hist(r3=1, r9=4)) == pytest.approx(LN10)

    def test_perfect_prediction(self):
        """A one-hot prediction at the rounded mean costs nothing."""
        assert loss_average(np.eye(10)[7], _hist(r7=2, r8=3)) == pytest.approx(0.0, abs=1e-6)

    def test_half_mass_on_target(self):
        """Half the mass on the target costs ln 2."""
        pred = np.full(10, 0.5 / 9)
        pred[5] = 0.5
        assert loss_average(pred, _hist(r6=4)) == pytest.approx(math.log(2))

    def test_zero_probability_is_clamped(self):
        """No mass on the target gives a large finite loss."""
        value = loss_average(np.eye(10)[0], _hist(r10=1))
        assert np.isfinite(value)
        assert value == pytest.approx(-math.log(1e-12))


class TestLossDistribution:
    def test_one_hot_reduces_to_average(self):
        """A unanimous histogram makes both losses agree."""
        pred = _random_dist(np.random.default_rng(0))
        hist = _hist(r4=6)
        assert loss_distribution(pred, hist) == pytest.approx(loss_average(pred, hist))

    def test_self_cross_entropy_is_entropy(self):
        """Predicting the normalized histogram costs its entropy."""
        hist = _hist(r2=1, r5=3, r9=2)
        assert loss_distribution(normalize(hist), hist) == pytest.approx(entropy(hist))

    def test_uniform_prediction(self):
        """A uniform prediction costs ln 10."""
        assert loss_distribution(UNIFORM, _hist(r1=2, r10=7)) == pytest.approx(LN10)


class TestLossMultinomial:
    def test_single_rating_reduces(self):
        """With one rating all three losses agree."""
        pred = _random_dist(np.random.default_rng(1))
        hist = _hist(r8=1)
        assert loss_multinomial(pred, hist) == pytest.approx(loss_distribution(pred, hist))
        assert loss_multinomial(pred, hist) == pytest.approx(loss_average(pred, hist))

    def test_closed_form(self):
        """Five ratings against a uniform prediction cost 5 ln 10."""
        assert loss_multinomial(UNIFORM, _hist(r5=2, r6=3)) == pytest.approx(5 * LN10)

    def test_scales_distribution_loss_by_total(self):
        """The multinomial loss is total ratings times the distribution loss."""
        rng = np.random.default_rng(2)
        for _ in range(1000):
            pred, hist = _random_dist(rng), _random_hist(rng)
            assert loss_multinomial(pred, hist) == pytest.approx(
                hist.total * loss_distribution(pred, hist), rel=1e-12
            )

    def test_empty_histogram(self):
        """An image without ratings has no likelihood."""
        with pytest.raises(InvalidInputError):
            loss_multinomial(UNIFORM, RatingHistogram((0,) * 10))


class TestLossProperties:
    @pytest.mark.parametrize("kind", list(LossKind))
    def test_non_negative(self, kind):
        """Every loss is non-negative."""
        rng = np.random.default_rng(3)
        for _ in range(50):
            assert loss_value(_random_dist(rng), _random_hist(rng), kind) >= 0.0

    @pytest.mark.parametrize("kind", ["average", "distribution", "multinomial"])
    def test_zero_only_for_exact_one_hot(self, kind):
        """All mass on the only observed rating gives zero loss."""
        assert loss_value(np.eye(10)[2], _hist(r3=5), kind) == pytest.approx(0.0, abs=1e-9)

    def test_unknown_kind(self):
        """Unknown loss names are config errors."""
        with pytest.raises(ConfigError):
            LossKind.parse("hinge")

    def test_targets(self):
        """Target weights are one-hot, normalized and raw counts respectively."""
        hist = _hist(r5=1, r6=3)
        np.testing.assert_array_equal(target_weights(hist, "average"), np.eye(10)[5])
        np.testing.assert_allclose(target_weights(hist, "distribution"), normalize(hist).probs)
        np.testing.assert_array_equal(target_weights(hist, "multinomial"), hist.as_array())


# -----------------------------------------------------------------------------
# Gradients
# -----------------------------------------------------------------------------


class TestLossGradient:
    @pytest.mark.parametrize("kind", list(LossKind))
    def test_matches_finite_differences(self, kind):
        """Analytic gradients match central differences on random triples."""
        rng = np.random.default_rng(10)
        for trial in range(100):
            model = _make_model(trial, dims=(3, 4, 10) if trial % 2 else (3, 10))
            features = rng.standard_normal(3)
            hist = _random_hist(rng)
            analytic = loss_gradient(model, features, hist, kind).flatten()
            numeric = _numeric_gradient(model, features, hist, kind)
            np.testing.assert_allclose(analytic, numeric, rtol=1e-4, atol=1e-7)

    def test_stationary_at_target(self):
        """Predicting the target distribution zeroes the output-layer gradient."""
        hist = RatingHistogram(tuple(range(1, 11)))
        biases = np.log(normalize(hist).probs)
        model = ScorerModel(FeedForwardNetwork((np.zeros((4, 10)),), (biases,)))
        gradient = loss_gradient(model, np.array([0.3, -1.0, 2.0, 0.5]), hist, "distribution")
        np.testing.assert_allclose(gradient.biases[0], 0.0, atol=1e-12)
        np.testing.assert_allclose(gradient.weights[0], 0.0, atol=1e-12)

    def test_zero_features(self):
        """Zero inputs give zero input-weight gradients but nonzero bias gradients."""
        model = _make_model(4)
        gradient = loss_gradient(model, np.zeros(3), _hist(r9=3), "multinomial")
        np.testing.assert_array_equal(gradient.weights[0], 0.0)
        assert np.abs(gradient.biases[-1]).sum() > 0

    def test_dimension_mismatch(self):
        """Features of the wrong width are invalid input."""
        with pytest.raises(InvalidInputError):
            loss_gradient(_make_model(0), np.zeros(5), _hist(r1=1), "average")
