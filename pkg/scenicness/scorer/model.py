from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from helper_lib.mlp import FeedForwardNetwork
from scenicness.errors import InvalidInputError
from scenicness.featurize import Featurizer, FeaturizerSpec, build_featurizer
from scenicness.ratings_core import (
    NUM_LEVELS,
    RATING_LEVELS,
    ScoreDistribution,
    as_distribution,
)

ACTIVATION = "tanh"


@dataclass(frozen=True, eq=False)
class ScorerModel:
    """Trained parameters of the rating-distribution predictor.

    Hidden layers use tanh, the 10-way output is a softmax over ratings 1..10.
    """

    network: FeedForwardNetwork
    featurizer_spec: FeaturizerSpec = field(default_factory=FeaturizerSpec)

    def __post_init__(self):
        if self.network.output_dim != NUM_LEVELS:
            raise InvalidInputError(
                f"[scorer] output dimension must be {NUM_LEVELS}, got {self.network.output_dim}"
            )

    @classmethod
    def initialize(
        cls,
        input_dim: int,
        hidden_dims: Sequence[int],
        rng: np.random.Generator,
        featurizer_spec: FeaturizerSpec | None = None,
    ) -> "ScorerModel":
        dims = [input_dim, *hidden_dims, NUM_LEVELS]
        return cls(FeedForwardNetwork.initialize(dims, rng), featurizer_spec or FeaturizerSpec())

    @property
    def layer_dims(self) -> list[int]:
        return self.network.layer_dims

    @property
    def input_dim(self) -> int:
        return self.network.input_dim

    def featurizer(self) -> Featurizer:
        """Image featurizer matching the features this model was trained on."""
        return build_featurizer(self.featurizer_spec)


def _check_features(model_or_network, features: np.ndarray) -> np.ndarray:
    features = np.asarray(features, dtype=float)
    expected = model_or_network.input_dim
    if features.shape[-1] != expected:
        raise InvalidInputError(
            f"[scorer] feature dimension {features.shape[-1]} does not match model input {expected}"
        )
    if not np.all(np.isfinite(features)):
        raise InvalidInputError("[scorer] features contain non-finite values")
    return features


def predict(model: ScorerModel, features: np.ndarray) -> ScoreDistribution:
    """Softmax of the final-layer logits for one feature vector."""
    features = _check_features(model, features)
    if features.ndim != 1:
        raise InvalidInputError("[scorer] predict takes a single feature vector")
    return ScoreDistribution(model.network.predict_proba(features)[0])


def predict_batch(model: ScorerModel, features: np.ndarray) -> np.ndarray:
    """Row-wise predicted distributions for an ``(n, D)`` feature matrix."""
    features = _check_features(model, np.atleast_2d(features))
    return model.network.predict_proba(features)


def weighted_average_score(dist: ScoreDistribution | np.ndarray) -> float:
    """Expected rating ``sum_r r * p(r)``."""
    return float(np.dot(RATING_LEVELS, as_distribution(dist).probs))


def weighted_average_scores(probs: np.ndarray) -> np.ndarray:
    return np.asarray(probs, dtype=float) @ RATING_LEVELS
