import itertools
import math

import numpy as np
import pytest
from scipy.special import softmax

from scenicness.errors import InvalidInputError
from scenicness.metrics import auc_binary, dcg, label_relevance, ndcg, ndcg_scores, ranking_order

# -----------------------------------------------------------------------------
# Helpers
# -----------------------------------------------------------------------------


def _scores_for(order):
    """Score vector whose descending ranking is ``order`` (1-based labels)."""
    scores = np.zeros(len(order))
    for position, label in enumerate(order):
        scores[label - 1] = len(order) - position
    return scores


def _dcg_by_hand(relevance):
    return sum((2**rel - 1) / math.log2(i + 2) for i, rel in enumerate(relevance))


# -----------------------------------------------------------------------------
# nDCG
# -----------------------------------------------------------------------------


class TestRankingOrder:
    def test_descending_with_ascending_ties(self):
        """Equal scores keep ascending label order."""
        assert ranking_order(np.array([0.2, 0.5, 0.2, 0.1])).tolist() == [1, 0, 2, 3]


class TestLabelRelevance:
    def test_distance_based(self):
        """Relevance drops by one per step away from the true label."""
        assert label_relevance(3, 10).tolist() == [7, 8, 9, 8, 7, 6, 5, 4, 3, 2]


class TestNdcg:
    def test_ideal_ordering_is_one(self):
        """Ranking labels by closeness to the truth scores 1."""
        probs = softmax(-np.abs(np.arange(1, 11) - 6.0))
        assert ndcg(probs, 6.0) == pytest.approx(1.0)

    def test_one_hot_by_hand(self):
        """A one-hot prediction ranks the rest ascending and matches the formula."""
        ranked = [9, 5, 6, 7, 8, 8, 7, 6, 5, 4]
        ideal = [9, 8, 8, 7, 7, 6, 6, 5, 5, 4]
        expected = _dcg_by_hand(ranked) / _dcg_by_hand(ideal)
        assert ndcg(np.eye(10)[4], 5.0) == pytest.approx(expected)
        assert expected < 1.0

    def test_rounds_true_mean_half_up(self):
        """A mean of 4.5 is scored against label 5."""
        assert ndcg(np.eye(10)[4], 4.5) == ndcg(np.eye(10)[4], 5.0)

    @pytest.mark.parametrize("target", [1, 4, 7])
    def test_reversal_is_minimal_over_all_orderings(self, target):
        """Exhaustively over 7 labels no ordering scores below the reversed ideal."""
        labels = list(range(1, 8))
        ideal = ranking_order(label_relevance(target, 7)) + 1
        reversal = ndcg_scores(_scores_for(list(ideal[::-1])), target)
        values = [ndcg_scores(_scores_for(order), target) for order in itertools.permutations(labels)]
        assert reversal == pytest.approx(min(values))
        if target == 1:
            # distinct relevances make the minimizer unique
            assert sum(v <= reversal + 1e-12 for v in values) == 1

    def test_range(self):
        """Values stay in [0, 1]."""
        rng = np.random.default_rng(0)
        for _ in range(100):
            value = ndcg(rng.dirichlet(np.ones(10)), rng.uniform(1, 10))
            assert 0.0 <= value <= 1.0 + 1e-12

    def test_monotone_invariance(self):
        """Only the induced ordering matters."""
        probs = np.random.default_rng(1).dirichlet(np.ones(10))
        sharpened = softmax(3.0 * np.log(probs))
        assert ndcg(probs, 3.2) == pytest.approx(ndcg(sharpened, 3.2))

    def test_invalid_distribution(self):
        """A vector that is not a distribution is invalid input."""
        with pytest.raises(InvalidInputError):
            ndcg(np.full(10, 0.5), 5.0)

    def test_true_mean_out_of_range(self):
        """True means must lie in [1, 10]."""
        with pytest.raises(InvalidInputError):
            ndcg(np.full(10, 0.1), 11.0)

    def test_dcg_by_position(self):
        """The first position is undiscounted."""
        assert dcg([1.0]) == pytest.approx(1.0)
        assert dcg([0.0, 1.0]) == pytest.approx(1.0 / math.log2(3))


# -----------------------------------------------------------------------------
# AUC
# -----------------------------------------------------------------------------


class TestAucBinary:
    def test_perfect_separation(self):
        """Every positive above every negative gives 1."""
        assert auc_binary([0.1, 0.2, 0.8, 0.9], [False, False, True, True]) == 1.0

    def test_all_ties(self):
        """Equal scores give 0.5."""
        assert auc_binary([5.5] * 6, [True, False] * 3) == 0.5

    def test_pairwise_count(self):
        """Three of four positive-negative pairs are won."""
        assert auc_binary([0.1, 0.4, 0.35, 0.8], [False, False, True, True]) == pytest.approx(0.75)

    def test_monotone_invariance(self):
        """Strictly increasing transforms keep the AUC."""
        rng = np.random.default_rng(2)
        scores = rng.random(30)
        labels = rng.random(30) > 0.5
        assert auc_binary(np.exp(scores), labels) == pytest.approx(auc_binary(scores, labels))

    def test_label_flip(self):
        """Flipping labels maps AUC to 1 - AUC."""
        rng = np.random.default_rng(3)
        scores = rng.integers(0, 5, 40).astype(float)
        labels = rng.random(40) > 0.4
        assert auc_binary(scores, ~labels) == pytest.approx(1.0 - auc_binary(scores, labels))

    def test_single_class(self):
        """AUC is undefined with one class."""
        with pytest.raises(InvalidInputError):
            auc_binary([0.1, 0.2], [True, True])

    def test_length_mismatch(self):
        """Scores and labels must align."""
        with pytest.raises(InvalidInputError):
            auc_binary([0.1, 0.2], [True])
