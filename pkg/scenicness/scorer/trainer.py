from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, Sequence

import numpy as np

from helper_lib.mlp import SgdSchedule, TrainingDiverged, train_network
from scenicness.errors import ConfigError, DivergedError, InvalidInputError
from scenicness.featurize import FeaturizerSpec, as_feature_vector
from scenicness.ratings_core import RatingHistogram
from scenicness.scorer.losses import LossKind, target_matrix
from scenicness.scorer.model import ScorerModel

log = logging.getLogger("scenicness.scorer")


@dataclass(frozen=True)
class TrainConfig:
    """Training options for the rating-distribution scorer.

    - loss_kind: average, distribution or multinomial.
    - learning_rate: constant SGD step (default 1e-4).
    - batch_size: minibatch size (default 40).
    - epochs: passes over the training split.
    - validation_fraction: share of samples held out for model selection (default 0.10).
    - seed: drives initialization, the split and every epoch's shuffle.
    - hidden_dims: tanh hidden layer widths; empty for a linear softmax model.
    """

    loss_kind: LossKind = LossKind.MULTINOMIAL
    learning_rate: float = 1e-4
    batch_size: int = 40
    epochs: int = 50
    validation_fraction: float = 0.10
    seed: int = 0
    hidden_dims: tuple[int, ...] = (32,)

    def __post_init__(self):
        object.__setattr__(self, "loss_kind", LossKind.parse(self.loss_kind))
        object.__setattr__(self, "hidden_dims", tuple(int(d) for d in self.hidden_dims))
        if not self.learning_rate > 0:
            raise ConfigError(f"[scorer] learning_rate must be > 0, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ConfigError(f"[scorer] batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 0:
            raise ConfigError(f"[scorer] epochs must be >= 0, got {self.epochs}")
        if not 0 <= self.validation_fraction < 1:
            raise ConfigError(
                f"[scorer] validation_fraction must be in [0, 1), got {self.validation_fraction}"
            )
        if any(d < 1 for d in self.hidden_dims):
            raise ConfigError(f"[scorer] hidden widths must be positive, got {self.hidden_dims}")

    @property
    def schedule(self) -> SgdSchedule:
        return SgdSchedule(
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            epochs=self.epochs,
            validation_fraction=self.validation_fraction,
        )

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"[scorer] unknown training options: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class EpochLoss:
    epoch: int
    train_loss: float
    validation_loss: float | None


@dataclass
class TrainReport:
    loss_kind: str
    best_epoch: int
    epochs: list[EpochLoss] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "loss_kind": self.loss_kind,
            "best_epoch": self.best_epoch,
            "epochs": [asdict(entry) for entry in self.epochs],
        }


def fit_network(initial, inputs, targets, config, rng, l2_weight=0.0, tag="scorer"):
    """Run the shared SGD loop, translating divergence into :class:`DivergedError`."""
    try:
        return train_network(initial, inputs, targets, config.schedule, rng, l2_weight, tag)
    except TrainingDiverged as exc:
        log.error(str(exc))
        raise DivergedError(str(exc), exc.epoch, exc.batch) from exc


def _stack_features(features: Sequence[np.ndarray]) -> np.ndarray:
    dims = {np.asarray(f).shape for f in features}
    if len(dims) != 1:
        raise InvalidInputError(f"[scorer] inconsistent feature dimensions: {sorted(dims)}")
    return np.array([as_feature_vector(f) for f in features])


def train(
    dataset: Sequence[tuple[np.ndarray, RatingHistogram]],
    config: TrainConfig,
    featurizer_spec: FeaturizerSpec | None = None,
    initial: ScorerModel | None = None,
) -> tuple[ScorerModel, TrainReport]:
    """Fit a scorer on ``(features, histogram)`` pairs.

    Deterministic for a given seed. Returns the epoch with the best
    validation loss (epoch 0 is the initialization). ``initial`` warm-starts
    from an existing model with matching dimensions.
    """
    if not dataset:
        raise InvalidInputError("[scorer] cannot train on an empty dataset")
    inputs = _stack_features([features for features, _ in dataset])
    histograms = [hist for _, hist in dataset]
    if any(hist.total < 1 for hist in histograms):
        raise InvalidInputError("[scorer] every training sample needs at least one rating")
    targets = target_matrix(histograms, config.loss_kind)

    rng = np.random.default_rng(config.seed)
    if initial is None:
        initial = ScorerModel.initialize(inputs.shape[1], config.hidden_dims, rng, featurizer_spec)
    elif initial.input_dim != inputs.shape[1]:
        raise InvalidInputError(
            f"[scorer] warm-start model expects {initial.input_dim} features, data has {inputs.shape[1]}"
        )

    log.info(
        f"[scorer] training {config.loss_kind.value} model {initial.layer_dims} "
        f"on {len(dataset)} samples for {config.epochs} epochs"
    )
    run = fit_network(initial.network, inputs, targets, config, rng)
    model = ScorerModel(run.network, featurizer_spec or initial.featurizer_spec)
    report = TrainReport(
        loss_kind=config.loss_kind.value,
        best_epoch=run.best_epoch,
        epochs=[EpochLoss(e.epoch, e.train_loss, e.validation_loss) for e in run.history],
    )
    return model, report
