"""Rating-distribution scorer: model, losses and training."""

from scenicness.scorer.losses import (
    LossKind,
    loss_average,
    loss_distribution,
    loss_gradient,
    loss_multinomial,
    loss_value,
    target_matrix,
    target_weights,
)
from scenicness.scorer.model import (
    ScorerModel,
    predict,
    predict_batch,
    weighted_average_score,
    weighted_average_scores,
)
from scenicness.scorer.trainer import EpochLoss, TrainConfig, TrainReport, fit_network, train

__all__ = [
    "EpochLoss",
    "LossKind",
    "ScorerModel",
    "TrainConfig",
    "TrainReport",
    "fit_network",
    "loss_average",
    "loss_distribution",
    "loss_gradient",
    "loss_multinomial",
    "loss_value",
    "predict",
    "predict_batch",
    "target_matrix",
    "target_weights",
    "train",
    "weighted_average_score",
    "weighted_average_scores",
]
