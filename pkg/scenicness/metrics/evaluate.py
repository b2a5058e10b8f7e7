from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, Sequence, Union

import numpy as np

from helper_lib.workers import ordered_map
from scenicness.errors import ConfigError, InvalidInputError
from scenicness.metrics.ks import DEFAULT_MC_SAMPLES, image_rng, ks_test
from scenicness.metrics.ranking import auc_binary, ndcg
from scenicness.ratings_core import (
    ScoreDistribution,
    as_distribution,
    filter_min_ratings,
    mean_rating,
)
from scenicness.scorer import ScorerModel, predict, weighted_average_score

log = logging.getLogger("scenicness.metrics")

Predictor = Callable[[Any], Union[ScoreDistribution, np.ndarray]]


@dataclass(frozen=True)
class EvalConfig:
    """
    - min_ratings: test images need at least this many ratings (default 10).
    - mc_samples: Monte-Carlo resamples per K-S test.
    - seed: base seed; each image's K-S stream derives from (seed, image id).
    - threads: worker pool size; never changes results.
    - auc_threshold: positives have a mean rating above this value.
    """

    min_ratings: int = 10
    mc_samples: int = DEFAULT_MC_SAMPLES
    seed: int = 0
    threads: int = 1
    auc_threshold: float = 7.0

    def __post_init__(self):
        if self.min_ratings < 1:
            raise ConfigError(f"[metrics] min_ratings must be >= 1, got {self.min_ratings}")
        if self.mc_samples < 1:
            raise ConfigError(f"[metrics] mc_samples must be >= 1, got {self.mc_samples}")
        if self.threads < 1:
            raise ConfigError(f"[metrics] threads must be >= 1, got {self.threads}")


@dataclass(frozen=True)
class ImageRecord:
    id: str
    ratings: int
    mean_rating: float
    predicted_score: float
    ndcg: float
    ks_statistic: float
    ks_p_value: float
    ks_pass: bool


@dataclass
class EvalReport:
    mean_ndcg: float
    ks_pass_rate: float
    auc: float | None
    per_image: list[ImageRecord] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mean_ndcg": self.mean_ndcg,
            "ks_pass_rate": self.ks_pass_rate,
            "auc": self.auc,
            "per_image": [asdict(record) for record in self.per_image],
        }


def as_predictor(model_or_predictor: ScorerModel | Predictor) -> Predictor:
    """Wrap a scorer so it predicts from each item's ground features."""
    if isinstance(model_or_predictor, ScorerModel):
        model = model_or_predictor
        return lambda item: predict(model, item.ground_features)
    return model_or_predictor


def evaluate(
    model_or_predictor: ScorerModel | Predictor,
    test_set: Sequence[Any],
    config: EvalConfig = EvalConfig(),
) -> EvalReport:
    """nDCG, K-S pass rate and threshold AUC over a held-out set.

    Items need ``id`` and ``ratings``; a :class:`ScorerModel` additionally
    reads ``ground_features``.
    """
    predictor = as_predictor(model_or_predictor)
    items = filter_min_ratings(test_set, config.min_ratings, key=lambda item: item.ratings)
    if not items:
        raise InvalidInputError(
            f"[metrics] no test images with at least {config.min_ratings} ratings"
        )

    def score(item) -> ImageRecord:
        dist = as_distribution(predictor(item))
        mean = mean_rating(item.ratings)
        ks = ks_test(
            dist,
            item.ratings,
            mc_samples=config.mc_samples,
            rng=image_rng(config.seed, item.id),
        )
        return ImageRecord(
            id=str(item.id),
            ratings=item.ratings.total,
            mean_rating=mean,
            predicted_score=weighted_average_score(dist),
            ndcg=ndcg(dist, mean),
            ks_statistic=ks.statistic,
            ks_p_value=ks.p_value,
            ks_pass=ks.pass_at_5pct,
        )

    records = ordered_map(score, items, config.threads)
    labels = [record.mean_rating > config.auc_threshold for record in records]
    try:
        auc = auc_binary([record.predicted_score for record in records], labels)
    except InvalidInputError:
        log.warning(
            f"[metrics] all {len(records)} test images fall on one side of "
            f"{config.auc_threshold}; AUC is undefined"
        )
        auc = None

    report = EvalReport(
        mean_ndcg=float(np.mean([record.ndcg for record in records])),
        ks_pass_rate=sum(record.ks_pass for record in records) / len(records),
        auc=auc,
        per_image=records,
    )
    log.info(
        f"[metrics] {len(records)} images: nDCG={report.mean_ndcg:.4f} "
        f"K-S pass={report.ks_pass_rate:.1%} AUC={auc if auc is None else round(auc, 4)}"
    )
    return report
