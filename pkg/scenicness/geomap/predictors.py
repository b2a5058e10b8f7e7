from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from helper_lib.workers import ordered_map
from scenicness.errors import InvalidInputError
from scenicness.geomap.cvh import CvhModel, assemble_cvh_input, cvh_predict
from scenicness.geomap.index import (
    DEFAULT_SIGMA,
    GeoSample,
    GroundIndex,
    lwa_predict,
    nn_predict,
)
from scenicness.metrics import auc_binary
from scenicness.ratings_core import SCENIC_THRESHOLD, ScoreDistribution, mean_rating
from scenicness.scorer import ScorerModel, predict, weighted_average_score

log = logging.getLogger("scenicness.geomap")


class MapPredictor(Protocol):
    """Anything that predicts a rating distribution at a location."""

    name: str
    requires_overhead: bool

    def predict(
        self, lat: float, lon: float, overhead: np.ndarray | None = None
    ) -> ScoreDistribution: ...


def _require_overhead(name: str, overhead: np.ndarray | None) -> np.ndarray:
    if overhead is None:
        raise InvalidInputError(f"[geomap] the {name} predictor needs overhead features")
    return overhead


@dataclass(frozen=True, eq=False)
class NearestNeighborPredictor:
    index: GroundIndex
    name: str = "1nn"
    requires_overhead: bool = False

    def predict(self, lat, lon, overhead=None) -> ScoreDistribution:
        return nn_predict(self.index, lat, lon)


@dataclass(frozen=True, eq=False)
class LocallyWeightedPredictor:
    index: GroundIndex
    sigma: float = DEFAULT_SIGMA
    name: str = "lwa"
    requires_overhead: bool = False

    def predict(self, lat, lon, overhead=None) -> ScoreDistribution:
        return lwa_predict(self.index, lat, lon, self.sigma)


@dataclass(frozen=True, eq=False)
class OverheadPredictor:
    """Overhead-only scorer trained by cross-view supervision."""

    scorer: ScorerModel
    name: str = "overhead"
    requires_overhead: bool = True

    def predict(self, lat, lon, overhead=None) -> ScoreDistribution:
        return predict(self.scorer, _require_overhead(self.name, overhead))


@dataclass(frozen=True, eq=False)
class CrossViewHybridPredictor:
    model: CvhModel
    index: GroundIndex
    name: str = "cvh"
    requires_overhead: bool = True

    def predict(self, lat, lon, overhead=None) -> ScoreDistribution:
        vector = self.model.overhead_vector(_require_overhead(self.name, overhead))
        fused = assemble_cvh_input(
            self.index, lat, lon, vector, self.model.k, self.model.sigma
        )
        return cvh_predict(self.model, fused)


@dataclass(frozen=True)
class MappingReport:
    method: str
    queries: int
    auc: float | None
    mean_abs_error: float

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "queries": self.queries,
            "auc": self.auc,
            "mean_abs_error": self.mean_abs_error,
        }


def evaluate_mapping(
    predictor: MapPredictor,
    queries: Sequence[GeoSample],
    threshold: float = SCENIC_THRESHOLD,
    threads: int = 1,
) -> MappingReport:
    """Threshold AUC of a map predictor on held-out rated locations.

    Positives are queries whose mean rating exceeds ``threshold``; scores are
    weighted-average predictions at the query position.
    """
    if not queries:
        raise InvalidInputError("[geomap] no query locations to evaluate")

    def score(query: GeoSample) -> float:
        dist = predictor.predict(query.lat, query.lon, query.overhead_features)
        return weighted_average_score(dist)

    scores = np.array(ordered_map(score, queries, threads))
    means = np.array([mean_rating(q.ratings) for q in queries])
    try:
        auc = auc_binary(scores, means > threshold)
    except InvalidInputError:
        log.warning(f"[geomap] every query falls on one side of {threshold}; AUC undefined")
        auc = None
    report = MappingReport(
        method=predictor.name,
        queries=len(queries),
        auc=auc,
        mean_abs_error=float(np.mean(np.abs(scores - means))),
    )
    log.info(f"[geomap] {predictor.name}: AUC={auc} over {len(queries)} queries")
    return report
