"""Seeded minibatch SGD with validation-based model selection."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from helper_lib.mlp.network import FeedForwardNetwork, cross_entropy, loss_and_gradient

log = logging.getLogger("helper_lib.mlp")


class TrainingDiverged(ArithmeticError):
    def __init__(self, message: str, epoch: int, batch: int):
        super().__init__(message)
        self.epoch = epoch
        self.batch = batch


@dataclass(frozen=True)
class SgdSchedule:
    learning_rate: float
    batch_size: int
    epochs: int
    validation_fraction: float


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    validation_loss: float | None


@dataclass
class TrainingRun:
    network: FeedForwardNetwork
    history: list[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0


def split_indices(
    count: int, validation_fraction: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Shuffle ``range(count)`` into (train, validation) index arrays."""
    order = rng.permutation(count)
    n_val = int(round(validation_fraction * count))
    if validation_fraction > 0 and count > 1:
        n_val = min(max(n_val, 1), count - 1)
    else:
        n_val = 0
    return np.sort(order[n_val:]), np.sort(order[:n_val])


def mean_loss(network: FeedForwardNetwork, inputs: np.ndarray, targets: np.ndarray) -> float:
    return float(np.mean(cross_entropy(network.predict_proba(inputs), targets)))


def train_network(
    initial: FeedForwardNetwork,
    inputs: np.ndarray,
    targets: np.ndarray,
    schedule: SgdSchedule,
    rng: np.random.Generator,
    l2_weight: float = 0.0,
    tag: str = "mlp",
) -> TrainingRun:
    """Run plain SGD and return the network with the lowest selection loss.

    The selection loss is the validation loss, or the training loss when no
    validation split is held out. Epoch 0 is the initial network. The L2
    penalty ``l2_weight * ||W||^2`` is spread over the training set, i.e.
    each minibatch adds ``l2_weight / n_train * ||W||^2``.
    """
    inputs = np.asarray(inputs, dtype=float)
    targets = np.asarray(targets, dtype=float)
    train_idx, val_idx = split_indices(len(inputs), schedule.validation_fraction, rng)
    x_train, t_train = inputs[train_idx], targets[train_idx]
    x_val, t_val = inputs[val_idx], targets[val_idx]
    l2_scale = l2_weight / len(train_idx) if l2_weight else 0.0

    def record(epoch: int, network: FeedForwardNetwork) -> EpochRecord:
        val = mean_loss(network, x_val, t_val) if len(val_idx) else None
        return EpochRecord(epoch, mean_loss(network, x_train, t_train), val)

    def selection(entry: EpochRecord) -> float:
        return entry.train_loss if entry.validation_loss is None else entry.validation_loss

    network = initial
    run = TrainingRun(network=initial, history=[record(0, initial)])
    best_loss = selection(run.history[0])
    log.debug(
        f"[{tag}] {len(train_idx)} train / {len(val_idx)} validation samples, "
        f"initial loss {best_loss:.4f}"
    )

    for epoch in range(1, schedule.epochs + 1):
        order = rng.permutation(len(train_idx))
        for batch, start in enumerate(range(0, len(order), schedule.batch_size)):
            rows = order[start : start + schedule.batch_size]
            loss, gradient = loss_and_gradient(network, x_train[rows], t_train[rows], l2_scale)
            if not np.isfinite(loss):
                raise TrainingDiverged(
                    f"[{tag}] non-finite loss at epoch {epoch}, batch {batch}", epoch, batch
                )
            try:
                network = network.updated(gradient, schedule.learning_rate)
            except ValueError as exc:
                raise TrainingDiverged(
                    f"[{tag}] non-finite parameters at epoch {epoch}, batch {batch}",
                    epoch,
                    batch,
                ) from exc

        entry = record(epoch, network)
        run.history.append(entry)
        if not np.isfinite(selection(entry)):
            raise TrainingDiverged(f"[{tag}] non-finite loss after epoch {epoch}", epoch, -1)
        if selection(entry) < best_loss:
            best_loss = selection(entry)
            run.network = network
            run.best_epoch = epoch
        log.debug(
            f"[{tag}] epoch {epoch}: train={entry.train_loss:.4f} "
            f"validation={entry.validation_loss if entry.validation_loss is not None else 'n/a'}"
        )

    log.info(f"[{tag}] best epoch {run.best_epoch} with selection loss {best_loss:.4f}")
    return run
