"""Geotagged samples and the ground-prediction index behind the 1NN and LWA baselines."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from helper_lib.workers import ordered_map
from scenicness.errors import InvalidInputError
from scenicness.featurize import as_feature_vector
from scenicness.ratings_core import NUM_LEVELS, RatingHistogram, ScoreDistribution
from scenicness.scorer import ScorerModel, predict_batch

log = logging.getLogger("scenicness.geomap")

DEFAULT_SIGMA = 0.01
# Below this total kernel weight LWA falls back to the nearest sample.
WEIGHT_UNDERFLOW = 1e-300
# Extra search radius when collecting samples tied at the same distance.
TIE_RADIUS = 1e-12


@dataclass(frozen=True, eq=False)
class GeoSample:
    """One geotagged, rated ground image with optional co-located overhead features."""

    id: str
    lat: float
    lon: float
    ratings: RatingHistogram
    ground_features: np.ndarray
    overhead_features: np.ndarray | None = None

    def __post_init__(self):
        if not self.id:
            raise InvalidInputError("[geomap] sample id must be non-empty")
        if not -90.0 <= self.lat <= 90.0 or not -180.0 <= self.lon <= 180.0:
            raise InvalidInputError(
                f"[geomap] sample {self.id}: ({self.lat}, {self.lon}) is not a valid position"
            )
        object.__setattr__(self, "ground_features", as_feature_vector(self.ground_features))
        if self.overhead_features is not None:
            object.__setattr__(
                self, "overhead_features", as_feature_vector(self.overhead_features)
            )

    @property
    def position(self) -> np.ndarray:
        return np.array([self.lat, self.lon])


@dataclass(frozen=True)
class NeighborContext:
    """The ``k`` nearest samples of a query, ascending by distance then id."""

    ids: tuple[str, ...]
    distances: np.ndarray
    predictions: np.ndarray
    weights: np.ndarray


def kernel_weights(distances: np.ndarray, sigma: float) -> np.ndarray:
    """Gaussian kernel ``exp(-d^2 / (2 sigma^2))`` of distances in degrees."""
    distances = np.asarray(distances, dtype=float)
    return np.exp(-(distances * distances) / (2.0 * sigma * sigma))


class GroundIndex:
    """Samples with their ground-scorer predictions, indexed by position.

    Samples are ordered by id, so the lowest row index is also the
    lexicographically smallest id when breaking distance ties.
    """

    def __init__(self, samples: Sequence[GeoSample], predictions: np.ndarray):
        if not samples:
            raise InvalidInputError("[geomap] the ground index needs at least one sample")
        order = sorted(range(len(samples)), key=lambda i: samples[i].id)
        self.samples = [samples[i] for i in order]
        ids = [s.id for s in self.samples]
        if len(set(ids)) != len(ids):
            raise InvalidInputError("[geomap] sample ids must be unique")
        predictions = np.asarray(predictions, dtype=float)
        if predictions.shape != (len(samples), NUM_LEVELS):
            raise InvalidInputError(
                f"[geomap] expected {len(samples)}x{NUM_LEVELS} predictions, "
                f"got {predictions.shape}"
            )
        self.predictions = predictions[order]
        self.predictions.flags.writeable = False
        self.ids = ids
        self.positions = np.array([s.position for s in self.samples])
        self.tree = cKDTree(self.positions)

    @classmethod
    def from_model(
        cls, samples: Sequence[GeoSample], model: ScorerModel, threads: int = 1
    ) -> "GroundIndex":
        """Score every sample's ground features with ``model``."""
        if not samples:
            raise InvalidInputError("[geomap] the ground index needs at least one sample")
        rows = ordered_map(
            lambda s: predict_batch(model, s.ground_features)[0], samples, threads
        )
        return cls(samples, np.array(rows))

    def __len__(self) -> int:
        return len(self.samples)

    def nearest(self, lat: float, lon: float) -> int:
        """Row of the closest sample; ties go to the smallest id."""
        distance, _ = self.tree.query([lat, lon], k=1)
        tied = self.tree.query_ball_point([lat, lon], r=distance + TIE_RADIUS)
        return min(tied)

    def neighbors(
        self,
        lat: float,
        lon: float,
        k: int,
        sigma: float = DEFAULT_SIGMA,
        exclude_id: str | None = None,
    ) -> NeighborContext:
        """``k`` closest samples, optionally leaving out the sample ``exclude_id``."""
        available = len(self) - (1 if exclude_id in self.ids else 0)
        if k < 1 or available < k:
            raise InvalidInputError(
                f"[geomap] need {k} neighbors but only {available} samples are available"
            )
        distances, _ = self.tree.query([lat, lon], k=min(len(self), k + 1))
        radius = float(np.max(distances)) + TIE_RADIUS
        rows = np.array(self.tree.query_ball_point([lat, lon], r=radius), dtype=int)
        if exclude_id is not None:
            rows = rows[[self.ids[r] != exclude_id for r in rows]]
        dist = np.hypot(self.positions[rows, 0] - lat, self.positions[rows, 1] - lon)
        chosen = rows[np.lexsort((rows, dist))][:k]
        chosen_dist = np.hypot(self.positions[chosen, 0] - lat, self.positions[chosen, 1] - lon)
        return NeighborContext(
            ids=tuple(self.ids[r] for r in chosen),
            distances=chosen_dist,
            predictions=self.predictions[chosen],
            weights=kernel_weights(chosen_dist, sigma),
        )


def nn_predict(index: GroundIndex, lat: float, lon: float) -> ScoreDistribution:
    """Prediction of the nearest ground sample."""
    return ScoreDistribution(index.predictions[index.nearest(lat, lon)])


def lwa_predict(
    index: GroundIndex, lat: float, lon: float, sigma: float = DEFAULT_SIGMA
) -> ScoreDistribution:
    """Gaussian-kernel weighted average of every sample's prediction."""
    if not sigma > 0:
        raise InvalidInputError(f"[geomap] sigma must be > 0, got {sigma}")
    dist = np.hypot(index.positions[:, 0] - lat, index.positions[:, 1] - lon)
    weights = kernel_weights(dist, sigma)
    total = weights.sum()
    if total < WEIGHT_UNDERFLOW:
        log.debug(f"[geomap] LWA weights underflow at ({lat}, {lon}); using nearest sample")
        return nn_predict(index, lat, lon)
    probs = weights @ index.predictions / total
    return ScoreDistribution(probs / probs.sum())
