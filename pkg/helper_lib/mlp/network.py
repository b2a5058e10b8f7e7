"""Feed-forward tanh network with a softmax output and analytic gradients.

Every loss used by the toolkit has the form ``-sum_r t_r * log p_r`` for a
non-negative target weight vector ``t`` (one-hot, normalized histogram or raw
counts), so a single backward pass serves all of them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import softmax

LOG_CLAMP = 1e-12


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class FeedForwardNetwork:
    """Dense layers with tanh on hidden units and softmax on the output.

    ``weights[l]`` has shape ``(fan_in, fan_out)``.
    """

    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]

    def __post_init__(self):
        weights = tuple(_frozen(w) for w in self.weights)
        biases = tuple(_frozen(b) for b in self.biases)
        if not weights or len(weights) != len(biases):
            raise ValueError("[mlp] need one bias vector per weight matrix")
        for index, (w, b) in enumerate(zip(weights, biases)):
            if w.ndim != 2 or b.shape != (w.shape[1],):
                raise ValueError(f"[mlp] layer {index}: weight {w.shape} / bias {b.shape} mismatch")
            if index and w.shape[0] != weights[index - 1].shape[1]:
                raise ValueError(f"[mlp] layer {index} input does not match previous output")
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise ValueError(f"[mlp] layer {index} has non-finite parameters")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "biases", biases)

    @classmethod
    def zeros(cls, layer_dims: Sequence[int]) -> "FeedForwardNetwork":
        dims = list(layer_dims)
        return cls(
            tuple(np.zeros((a, b)) for a, b in zip(dims[:-1], dims[1:])),
            tuple(np.zeros(b) for b in dims[1:]),
        )

    @classmethod
    def initialize(cls, layer_dims: Sequence[int], rng: np.random.Generator) -> "FeedForwardNetwork":
        """Glorot-uniform weights in ``[-a, a]``, ``a = sqrt(6 / (fan_in + fan_out))``; zero biases."""
        dims = list(layer_dims)
        if len(dims) < 2 or any(d < 1 for d in dims):
            raise ValueError(f"[mlp] invalid layer dims {dims}")
        weights = []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            bound = np.sqrt(6.0 / (fan_in + fan_out))
            weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        return cls(tuple(weights), tuple(np.zeros(d) for d in dims[1:]))

    @property
    def layer_dims(self) -> list[int]:
        return [int(self.weights[0].shape[0])] + [int(w.shape[1]) for w in self.weights]

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    @property
    def output_dim(self) -> int:
        return self.layer_dims[-1]

    def activations(self, inputs: np.ndarray) -> list[np.ndarray]:
        """Layer outputs for a batch: ``[inputs, hidden..., logits]``."""
        outputs = [np.atleast_2d(np.asarray(inputs, dtype=float))]
        last = len(self.weights) - 1
        for index, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = outputs[-1] @ w + b
            outputs.append(z if index == last else np.tanh(z))
        return outputs

    def logits(self, inputs: np.ndarray) -> np.ndarray:
        return self.activations(inputs)[-1]

    def predict_proba(self, inputs: np.ndarray) -> np.ndarray:
        return softmax(self.logits(inputs), axis=1)

    def squared_weight_norm(self) -> float:
        return float(sum(np.sum(w * w) for w in self.weights))

    # ------------------------------------------------------------------
    # Flat parameter views
    # ------------------------------------------------------------------

    def flatten(self) -> np.ndarray:
        parts = []
        for w, b in zip(self.weights, self.biases):
            parts.extend([w.ravel(), b])
        return np.concatenate(parts)

    def with_flat(self, vector: np.ndarray) -> "FeedForwardNetwork":
        vector = np.asarray(vector, dtype=float)
        weights, biases, offset = [], [], 0
        for w, b in zip(self.weights, self.biases):
            weights.append(vector[offset : offset + w.size].reshape(w.shape))
            offset += w.size
            biases.append(vector[offset : offset + b.size])
            offset += b.size
        if offset != vector.size:
            raise ValueError(f"[mlp] expected {offset} parameters, got {vector.size}")
        return FeedForwardNetwork(tuple(weights), tuple(biases))

    def updated(self, gradient: "Gradient", step: float) -> "FeedForwardNetwork":
        """Plain SGD step ``theta - step * gradient``."""
        return FeedForwardNetwork(
            tuple(w - step * g for w, g in zip(self.weights, gradient.weights)),
            tuple(b - step * g for b, g in zip(self.biases, gradient.biases)),
        )


@dataclass(frozen=True, eq=False)
class Gradient:
    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]

    def flatten(self) -> np.ndarray:
        parts = []
        for w, b in zip(self.weights, self.biases):
            parts.extend([w.ravel(), b])
        return np.concatenate(parts)


def cross_entropy(probs: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Per-row ``-sum_r t_r log(max(p_r, eps))``."""
    return -np.sum(targets * np.log(np.maximum(probs, LOG_CLAMP)), axis=1)


def loss_and_gradient(
    network: FeedForwardNetwork,
    inputs: np.ndarray,
    targets: np.ndarray,
    l2_scale: float = 0.0,
) -> tuple[float, Gradient]:
    """Batch-mean cross-entropy (plus ``l2_scale * ||W||^2``) and its gradient.

    Softmax cross-entropy with unnormalized targets has the logit gradient
    ``sum(t) * p - t``. Ratings whose probability sits below the log clamp add a
    constant to the loss, so their targets are dropped from the gradient.
    """
    outputs = network.activations(inputs)
    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    batch = outputs[0].shape[0]
    probs = softmax(outputs[-1], axis=1)
    loss = float(np.mean(cross_entropy(probs, targets)))

    live = np.where(probs >= LOG_CLAMP, targets, 0.0)
    delta = (live.sum(axis=1, keepdims=True) * probs - live) / batch
    weight_grads: list[np.ndarray] = []
    bias_grads: list[np.ndarray] = []
    for layer in range(len(network.weights) - 1, -1, -1):
        weight_grads.append(outputs[layer].T @ delta)
        bias_grads.append(delta.sum(axis=0))
        if layer:
            hidden = outputs[layer]
            delta = (delta @ network.weights[layer].T) * (1.0 - hidden * hidden)
    weight_grads.reverse()
    bias_grads.reverse()

    if l2_scale:
        loss += l2_scale * network.squared_weight_norm()
        weight_grads = [g + 2.0 * l2_scale * w for g, w in zip(weight_grads, network.weights)]
    return loss, Gradient(tuple(weight_grads), tuple(bias_grads))
