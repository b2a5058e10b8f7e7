from helper_lib.mlp.network import (
    LOG_CLAMP,
    FeedForwardNetwork,
    Gradient,
    cross_entropy,
    loss_and_gradient,
)
from helper_lib.mlp.trainer import (
    EpochRecord,
    SgdSchedule,
    TrainingDiverged,
    TrainingRun,
    mean_loss,
    split_indices,
    train_network,
)

__all__ = [
    "LOG_CLAMP",
    "EpochRecord",
    "FeedForwardNetwork",
    "Gradient",
    "SgdSchedule",
    "TrainingDiverged",
    "TrainingRun",
    "cross_entropy",
    "loss_and_gradient",
    "mean_loss",
    "split_indices",
    "train_network",
]
