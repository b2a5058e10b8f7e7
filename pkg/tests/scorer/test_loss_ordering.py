from types import SimpleNamespace

import numpy as np

from scenicness.data_io import SynthSpec, synth_generate
from scenicness.featurize import FeaturizerKind, FeaturizerSpec
from scenicness.metrics import EvalConfig, evaluate
from scenicness.scorer import LossKind, TrainConfig, train

N_TRAIN = 500
N_TEST = 200
# Multinomial targets carry the rating count (5..15), so a smaller step moves
# the weights about as far as the unit-mass targets do.
LEARNING_RATES = {
    LossKind.AVERAGE: 0.01,
    LossKind.DISTRIBUTION: 0.01,
    LossKind.MULTINOMIAL: 0.001,
}


def _heteroscedastic_split(seed=0):
    spec = SynthSpec(n_samples=N_TRAIN + N_TEST, heteroscedastic=True, seed=seed)
    manifest, _ = synth_generate(spec)
    features = np.array([r.ground_features for r in manifest])
    features = (features - features[:N_TRAIN].mean(axis=0)) / features[:N_TRAIN].std(axis=0)
    items = [
        SimpleNamespace(id=r.id, ratings=r.ratings, ground_features=f)
        for r, f in zip(manifest, features)
    ]
    return items[:N_TRAIN], items[N_TRAIN:]


class TestLossOrdering:
    def test_distribution_losses_pass_ks_more_often(self):
        """Distribution-aware losses beat the average loss on K-S with similar nDCG."""
        train_items, test_items = _heteroscedastic_split()
        spec = FeaturizerSpec(kind=FeaturizerKind.PASSTHROUGH, dim=8)
        eval_config = EvalConfig(min_ratings=5, mc_samples=1000, seed=1, threads=4)
        reports = {}
        for kind, rate in LEARNING_RATES.items():
            config = TrainConfig(
                loss_kind=kind, learning_rate=rate, epochs=200, hidden_dims=(16,), seed=2
            )
            model, _ = train([(i.ground_features, i.ratings) for i in train_items], config, spec)
            reports[kind] = evaluate(model, test_items, eval_config)

        average = reports[LossKind.AVERAGE]
        distribution = reports[LossKind.DISTRIBUTION]
        multinomial = reports[LossKind.MULTINOMIAL]
        assert len(average.per_image) == N_TEST
        assert distribution.ks_pass_rate >= average.ks_pass_rate + 0.10
        assert multinomial.ks_pass_rate >= average.ks_pass_rate + 0.10
        assert multinomial.ks_pass_rate >= distribution.ks_pass_rate - 0.05
        ndcgs = [r.mean_ndcg for r in reports.values()]
        assert max(ndcgs) - min(ndcgs) <= 0.05
