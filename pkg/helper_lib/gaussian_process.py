"""Fixed-hyperparameter Gaussian-process regression and expected improvement."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.spatial.distance import cdist
from scipy.stats import norm

# Added to the kernel diagonal on top of the observation noise.
JITTER = 1e-10


def squared_exponential(a: np.ndarray, b: np.ndarray, length_scale: float) -> np.ndarray:
    """Unit-variance SE kernel ``exp(-|a - b|^2 / (2 l^2))``."""
    sq = cdist(np.atleast_2d(a), np.atleast_2d(b), metric="sqeuclidean")
    return np.exp(-0.5 * sq / (length_scale * length_scale))


@dataclass(frozen=True, eq=False)
class GaussianProcess:
    """Posterior of a zero-mean GP over standardized targets.

    Targets are centered and scaled before fitting; predictions are returned in
    the original units.
    """

    inputs: np.ndarray
    alpha: np.ndarray
    factor: tuple
    length_scale: float
    y_mean: float
    y_scale: float

    @classmethod
    def fit(
        cls, inputs: np.ndarray, targets: np.ndarray, length_scale: float, noise: float
    ) -> "GaussianProcess":
        inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
        targets = np.asarray(targets, dtype=float)
        if inputs.shape[0] != targets.size or targets.size == 0:
            raise ValueError("[gp] inputs and targets must be non-empty and aligned")
        y_mean = float(targets.mean())
        y_scale = float(targets.std())
        if y_scale <= 0.0:
            y_scale = 1.0
        standardized = (targets - y_mean) / y_scale
        kernel = squared_exponential(inputs, inputs, length_scale)
        kernel[np.diag_indices_from(kernel)] += noise + JITTER
        factor = cho_factor(kernel, lower=True)
        alpha = cho_solve(factor, standardized)
        return cls(inputs, alpha, factor, length_scale, y_mean, y_scale)

    def predict(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and standard deviation at ``points``."""
        cross = squared_exponential(points, self.inputs, self.length_scale)
        mean = cross @ self.alpha
        solved = cho_solve(self.factor, cross.T)
        variance = np.clip(1.0 - np.sum(cross * solved.T, axis=1), 0.0, None)
        return mean * self.y_scale + self.y_mean, np.sqrt(variance) * self.y_scale


def expected_improvement(mean: np.ndarray, std: np.ndarray, best: float) -> np.ndarray:
    """EI for maximization; zero where the posterior is certain."""
    mean = np.asarray(mean, dtype=float)
    std = np.asarray(std, dtype=float)
    improvement = mean - best
    ei = np.maximum(improvement, 0.0)
    positive = std > 0.0
    z = improvement[positive] / std[positive]
    ei[positive] = improvement[positive] * norm.cdf(z) + std[positive] * norm.pdf(z)
    return ei
