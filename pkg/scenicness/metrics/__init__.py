"""Evaluation metrics: nDCG, one-sample K-S and binary AUC."""

from scenicness.metrics.evaluate import (
    EvalConfig,
    EvalReport,
    ImageRecord,
    as_predictor,
    evaluate,
)
from scenicness.metrics.ks import KsResult, image_rng, ks_statistic, ks_test
from scenicness.metrics.ranking import (
    auc_binary,
    dcg,
    label_relevance,
    ndcg,
    ndcg_scores,
    ranking_order,
)

__all__ = [
    "EvalConfig",
    "EvalReport",
    "ImageRecord",
    "KsResult",
    "as_predictor",
    "auc_binary",
    "dcg",
    "evaluate",
    "image_rng",
    "ks_statistic",
    "ks_test",
    "label_relevance",
    "ndcg",
    "ndcg_scores",
    "ranking_order",
]
