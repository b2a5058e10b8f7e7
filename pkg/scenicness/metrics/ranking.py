"""Rank-based metrics: nDCG over rating labels and the binary AUC."""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.stats import rankdata

from scenicness.errors import InvalidInputError
from scenicness.ratings_core import NUM_LEVELS, ScoreDistribution, as_distribution, round_half_up


def dcg(gains_in_rank_order: Sequence[float]) -> float:
    """Exponential-gain DCG: ``sum_i (2^rel_i - 1) / log2(i + 1)``, positions from 1."""
    relevance = np.asarray(gains_in_rank_order, dtype=float)
    positions = np.arange(1, relevance.size + 1)
    return float(np.sum((np.power(2.0, relevance) - 1.0) / np.log2(positions + 1)))


def label_relevance(true_label: int, num_labels: int) -> np.ndarray:
    """Distance-based relevance ``(num_labels - 1) - |label - true_label|`` for labels 1..n."""
    labels = np.arange(1, num_labels + 1)
    return (num_labels - 1) - np.abs(labels - true_label).astype(float)


def ranking_order(scores: np.ndarray) -> np.ndarray:
    """Label indices by descending score, ties broken by ascending label."""
    scores = np.asarray(scores, dtype=float)
    return np.lexsort((np.arange(scores.size), -scores))


def ndcg_scores(scores: Sequence[float], true_label: int) -> float:
    """nDCG of the label ranking induced by ``scores`` (any number of labels)."""
    scores = np.asarray(scores, dtype=float)
    relevance = label_relevance(true_label, scores.size)
    ideal = dcg(np.sort(relevance)[::-1])
    return dcg(relevance[ranking_order(scores)]) / ideal


def ndcg(pred: ScoreDistribution | np.ndarray, true_mean: float) -> float:
    """Rank quality of the predicted label ordering against the mean human rating."""
    try:
        dist = as_distribution(pred)
    except InvalidInputError as exc:
        raise InvalidInputError(f"[metrics] invalid distribution for nDCG: {exc}") from exc
    if not 1.0 <= true_mean <= NUM_LEVELS:
        raise InvalidInputError(f"[metrics] true mean {true_mean} outside [1, 10]")
    return ndcg_scores(dist.probs, round_half_up(true_mean))


def auc_binary(scores: Sequence[float], labels: Sequence[bool]) -> float:
    """Probability that a random positive outscores a random negative (ties count 1/2)."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=bool)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise InvalidInputError("[metrics] scores and labels must be equal-length 1-D sequences")
    positives = int(labels.sum())
    negatives = labels.size - positives
    if positives == 0 or negatives == 0:
        raise InvalidInputError("[metrics] AUC needs both positive and negative examples")
    ranks = rankdata(scores)
    u_statistic = ranks[labels].sum() - positives * (positives + 1) / 2.0
    return float(u_statistic / (positives * negatives))
