"""The three training objectives and their gradients.

- average: cross-entropy against the rounded mean rating.
- distribution: cross-entropy against the normalized rating histogram.
- multinomial: negative log-likelihood of the observed rating multiset,
  ``-sum_r counts[r] * log p(r)``. Not divided by the number of ratings, so
  images with more ratings weigh more.
"""

from __future__ import annotations

import enum
from typing import Sequence

import numpy as np

from helper_lib.mlp import LOG_CLAMP, Gradient, loss_and_gradient
from scenicness.errors import ConfigError, InvalidInputError
from scenicness.ratings_core import (
    NUM_LEVELS,
    RatingHistogram,
    ScoreDistribution,
    as_distribution,
    normalize,
    rounded_mean,
)
from scenicness.scorer.model import ScorerModel, _check_features


def _require_ratings(hist: RatingHistogram) -> None:
    if hist.total < 1:
        raise InvalidInputError("[scorer] histogram has no ratings")


class LossKind(enum.Enum):
    AVERAGE = "average"
    DISTRIBUTION = "distribution"
    MULTINOMIAL = "multinomial"

    @classmethod
    def parse(cls, value: "LossKind | str") -> "LossKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError as exc:
            choices = ", ".join(kind.value for kind in cls)
            raise ConfigError(f"[scorer] unknown loss {value!r}; choose one of {choices}") from exc


def target_weights(hist: RatingHistogram, loss_kind: LossKind | str) -> np.ndarray:
    """Weight vector ``t`` such that the loss equals ``-sum_r t_r log p_r``."""
    kind = LossKind.parse(loss_kind)
    if kind is LossKind.AVERAGE:
        target = np.zeros(NUM_LEVELS)
        target[rounded_mean(hist) - 1] = 1.0
        return target
    if kind is LossKind.DISTRIBUTION:
        return np.array(normalize(hist).probs)
    _require_ratings(hist)
    return hist.as_array()


def target_matrix(histograms: Sequence[RatingHistogram], loss_kind: LossKind | str) -> np.ndarray:
    return np.array([target_weights(hist, loss_kind) for hist in histograms]).reshape(
        -1, NUM_LEVELS
    )


def _clamped_log(pred: ScoreDistribution | np.ndarray) -> np.ndarray:
    return np.log(np.maximum(as_distribution(pred).probs, LOG_CLAMP))


def loss_average(pred: ScoreDistribution | np.ndarray, hist: RatingHistogram) -> float:
    return float(-_clamped_log(pred)[rounded_mean(hist) - 1])


def loss_distribution(pred: ScoreDistribution | np.ndarray, hist: RatingHistogram) -> float:
    return float(-np.dot(normalize(hist).probs, _clamped_log(pred)))


def loss_multinomial(pred: ScoreDistribution | np.ndarray, hist: RatingHistogram) -> float:
    _require_ratings(hist)
    return float(-np.dot(hist.as_array(), _clamped_log(pred)))


LOSSES = {
    LossKind.AVERAGE: loss_average,
    LossKind.DISTRIBUTION: loss_distribution,
    LossKind.MULTINOMIAL: loss_multinomial,
}


def loss_value(pred, hist: RatingHistogram, loss_kind: LossKind | str) -> float:
    return LOSSES[LossKind.parse(loss_kind)](pred, hist)


def loss_gradient(
    model: ScorerModel,
    features: np.ndarray,
    hist: RatingHistogram,
    loss_kind: LossKind | str,
) -> Gradient:
    """Analytic gradient of the selected loss w.r.t. every weight and bias."""
    features = _check_features(model, features)
    _, gradient = loss_and_gradient(
        model.network, features.reshape(1, -1), target_weights(hist, loss_kind)[None, :]
    )
    return gradient
