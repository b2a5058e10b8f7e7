"""Cross-view hybrid: fuse overhead features with nearby ground predictions."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, fields
from typing import Any, Dict, Sequence

import numpy as np

from helper_lib.mlp import FeedForwardNetwork, SgdSchedule
from scenicness.errors import ConfigError, InvalidInputError
from scenicness.featurize import FeaturizerKind, FeaturizerSpec, as_feature_vector
from scenicness.geomap.index import DEFAULT_SIGMA, GeoSample, GroundIndex
from scenicness.ratings_core import NUM_LEVELS, RatingHistogram, ScoreDistribution
from scenicness.scorer import (
    EpochLoss,
    LossKind,
    ScorerModel,
    TrainConfig,
    TrainReport,
    fit_network,
    predict,
    target_matrix,
    train,
)

log = logging.getLogger("scenicness.geomap")

CVH_HIDDEN_DIMS = (100, 50, 25)
# Per neighbor: its predicted distribution and one kernel-weighted distance.
NEIGHBOR_WIDTH = NUM_LEVELS + 1


class OverheadInput(enum.Enum):
    """What the fusion network sees of the overhead image."""

    DISTRIBUTION = "distribution"
    FEATURES = "features"


@dataclass(frozen=True)
class CvhTrainConfig:
    """
    - k: ground neighbors per query (default 5).
    - sigma: kernel width in degrees for the neighbor distance features.
    - hidden_dims: tanh hidden layers (default 100, 50, 25).
    - l2_weight: weight of the squared-weight penalty (default 0.5).
    - overhead_input: ``distribution`` feeds the overhead scorer's output,
      ``features`` feeds raw overhead features.
    - learning_rate, batch_size, epochs, validation_fraction, seed: SGD settings.
    """

    k: int = 5
    sigma: float = DEFAULT_SIGMA
    hidden_dims: tuple[int, ...] = CVH_HIDDEN_DIMS
    l2_weight: float = 0.5
    overhead_input: OverheadInput = OverheadInput.DISTRIBUTION
    learning_rate: float = 1e-3
    batch_size: int = 40
    epochs: int = 100
    validation_fraction: float = 0.10
    seed: int = 0

    def __post_init__(self):
        try:
            object.__setattr__(self, "overhead_input", OverheadInput(self.overhead_input))
        except ValueError as exc:
            raise ConfigError(
                f"[geomap] unknown overhead input {self.overhead_input!r}"
            ) from exc
        object.__setattr__(self, "hidden_dims", tuple(int(d) for d in self.hidden_dims))
        if self.k < 1:
            raise ConfigError(f"[geomap] k must be >= 1, got {self.k}")
        if not self.sigma > 0:
            raise ConfigError(f"[geomap] sigma must be > 0, got {self.sigma}")
        if self.l2_weight < 0:
            raise ConfigError(f"[geomap] l2_weight must be >= 0, got {self.l2_weight}")
        if not self.learning_rate > 0 or self.batch_size < 1 or self.epochs < 0:
            raise ConfigError("[geomap] invalid SGD settings")
        if not 0 <= self.validation_fraction < 1:
            raise ConfigError(
                f"[geomap] validation_fraction must be in [0, 1), "
                f"got {self.validation_fraction}"
            )

    @property
    def schedule(self) -> SgdSchedule:
        return SgdSchedule(
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            epochs=self.epochs,
            validation_fraction=self.validation_fraction,
        )

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CvhTrainConfig":
        unknown = set(data) - {f.name for f in fields(cls)}
        if unknown:
            raise ConfigError(f"[geomap] unknown CVH options: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True, eq=False)
class CvhModel:
    """Fusion network plus everything needed to rebuild its inputs."""

    network: FeedForwardNetwork
    k: int = 5
    sigma: float = DEFAULT_SIGMA
    overhead_input: OverheadInput = OverheadInput.DISTRIBUTION
    overhead_scorer: ScorerModel | None = None

    def __post_init__(self):
        object.__setattr__(self, "overhead_input", OverheadInput(self.overhead_input))
        if self.network.output_dim != NUM_LEVELS:
            raise InvalidInputError(
                f"[geomap] CVH output must have {NUM_LEVELS} ratings, "
                f"got {self.network.output_dim}"
            )
        if self.overhead_dim < 1:
            raise InvalidInputError(
                f"[geomap] CVH input {self.network.input_dim} leaves no room for "
                f"overhead features with k={self.k}"
            )
        if self.overhead_input is OverheadInput.DISTRIBUTION:
            if self.overhead_scorer is None:
                raise InvalidInputError(
                    "[geomap] distribution overhead input needs an overhead scorer"
                )
            if self.overhead_dim != NUM_LEVELS:
                raise InvalidInputError(
                    f"[geomap] distribution overhead input is {NUM_LEVELS} wide, "
                    f"network expects {self.overhead_dim}"
                )

    @property
    def input_dim(self) -> int:
        return self.network.input_dim

    @property
    def overhead_dim(self) -> int:
        return self.network.input_dim - self.k * NEIGHBOR_WIDTH

    @property
    def layer_dims(self) -> list[int]:
        return self.network.layer_dims

    def overhead_vector(self, overhead_features: np.ndarray) -> np.ndarray:
        if self.overhead_input is OverheadInput.DISTRIBUTION:
            return predict(self.overhead_scorer, overhead_features).probs
        return as_feature_vector(overhead_features)


def assemble_cvh_input(
    index: GroundIndex,
    lat: float,
    lon: float,
    overhead_vector: np.ndarray,
    k: int,
    sigma: float = DEFAULT_SIGMA,
    exclude_id: str | None = None,
) -> np.ndarray:
    """``[overhead | pred_1, w_1 | ... | pred_k, w_k]`` with neighbors nearest first."""
    context = index.neighbors(lat, lon, k, sigma, exclude_id)
    per_neighbor = np.column_stack([context.predictions, context.weights])
    return np.concatenate([as_feature_vector(overhead_vector), per_neighbor.ravel()])


def build_cvh_training_set(
    samples: Sequence[GeoSample],
    index: GroundIndex,
    overhead_vectors: Sequence[np.ndarray],
    k: int,
    sigma: float = DEFAULT_SIGMA,
) -> list[tuple[np.ndarray, RatingHistogram]]:
    """Fused inputs paired with ratings; a sample is never its own neighbor."""
    return [
        (
            assemble_cvh_input(index, s.lat, s.lon, vector, k, sigma, exclude_id=s.id),
            s.ratings,
        )
        for s, vector in zip(samples, overhead_vectors)
    ]


def train_cvh(
    training_pairs: Sequence[tuple[np.ndarray, RatingHistogram]],
    config: CvhTrainConfig = CvhTrainConfig(),
    overhead_scorer: ScorerModel | None = None,
) -> tuple[CvhModel, TrainReport]:
    """Fit the fusion network under the multinomial loss plus ``l2_weight * ||W||^2``."""
    if not training_pairs:
        raise InvalidInputError("[geomap] cannot train the CVH network on an empty set")
    inputs = np.array([as_feature_vector(x) for x, _ in training_pairs])
    targets = target_matrix([hist for _, hist in training_pairs], LossKind.MULTINOMIAL)

    rng = np.random.default_rng(config.seed)
    dims = [inputs.shape[1], *config.hidden_dims, NUM_LEVELS]
    initial = FeedForwardNetwork.initialize(dims, rng)
    log.info(
        f"[geomap] training CVH {dims} on {len(training_pairs)} samples, "
        f"k={config.k}, l2={config.l2_weight}"
    )
    run = fit_network(initial, inputs, targets, config, rng, config.l2_weight, tag="geomap")
    model = CvhModel(
        network=run.network,
        k=config.k,
        sigma=config.sigma,
        overhead_input=config.overhead_input,
        overhead_scorer=overhead_scorer,
    )
    report = TrainReport(
        loss_kind=LossKind.MULTINOMIAL.value,
        best_epoch=run.best_epoch,
        epochs=[EpochLoss(e.epoch, e.train_loss, e.validation_loss) for e in run.history],
    )
    return model, report


def cvh_predict(model: CvhModel, fused: np.ndarray) -> ScoreDistribution:
    fused = as_feature_vector(fused)
    if fused.size != model.input_dim:
        raise InvalidInputError(
            f"[geomap] fused input has {fused.size} values, model expects {model.input_dim}"
        )
    return ScoreDistribution(model.network.predict_proba(fused)[0])


def _overhead_features(samples: Sequence[GeoSample]) -> list[np.ndarray]:
    missing = [s.id for s in samples if s.overhead_features is None]
    if missing:
        raise InvalidInputError(
            f"[geomap] {len(missing)} samples lack overhead features, e.g. {missing[0]}"
        )
    return [s.overhead_features for s in samples]


def train_overhead_scorer(
    samples: Sequence[GeoSample],
    ground_model: ScorerModel | None,
    config: TrainConfig,
) -> tuple[ScorerModel, TrainReport]:
    """Cross-view training: overhead features supervised by co-located ground ratings.

    Starts from ``ground_model`` when its input width matches the overhead
    features, otherwise from a fresh initialization.
    """
    features = _overhead_features(samples)
    dim = features[0].size
    spec = FeaturizerSpec(kind=FeaturizerKind.PASSTHROUGH, dim=dim)
    initial = None
    if ground_model is not None and ground_model.input_dim == dim:
        initial = ScorerModel(ground_model.network, spec)
        log.info(
            f"[geomap] overhead scorer warm-starts from the ground scorer "
            f"{initial.layer_dims}"
        )
    else:
        log.info("[geomap] overhead scorer starts from a fresh initialization")
    return train(list(zip(features, (s.ratings for s in samples))), config, spec, initial)


def fit_cross_view(
    samples: Sequence[GeoSample],
    ground_model: ScorerModel,
    config: CvhTrainConfig = CvhTrainConfig(),
    overhead_config: TrainConfig | None = None,
    threads: int = 1,
) -> tuple[CvhModel, GroundIndex, TrainReport]:
    """Train a CVH model (and its overhead scorer when needed) from rated samples.

    Returns the model, the ground index it reads neighbors from, and the CVH
    training report.
    """
    index = GroundIndex.from_model(samples, ground_model, threads)
    features = _overhead_features(samples)
    overhead_scorer = None
    if config.overhead_input is OverheadInput.DISTRIBUTION:
        overhead_scorer, _ = train_overhead_scorer(
            samples, ground_model, overhead_config or TrainConfig(seed=config.seed)
        )
        vectors = [predict(overhead_scorer, f).probs for f in features]
    else:
        vectors = features
    pairs = build_cvh_training_set(samples, index, vectors, config.k, config.sigma)
    model, report = train_cvh(pairs, config, overhead_scorer)
    return model, index, report
