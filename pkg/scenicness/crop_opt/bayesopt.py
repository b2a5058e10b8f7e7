"""Constrained Bayesian optimization of the most scenic crop, plus an exhaustive grid oracle."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict

import numpy as np
from scipy.stats import qmc

from helper_lib.gaussian_process import GaussianProcess, expected_improvement
from scenicness.crop_opt.crops import (
    DEFAULT_MIN_SIDE,
    CropRect,
    CropScorer,
    check_min_sides,
    feasible_mask,
)
from scenicness.errors import ConfigError
from scenicness.featurize import Featurizer, ImageGrid
from scenicness.scorer import ScorerModel

log = logging.getLogger("scenicness.crop_opt")


@dataclass(frozen=True)
class BoConfig:
    """
    - init_samples: initial design size, including the full-image crop.
    - iterations: acquisition steps after the initial design.
    - gp_noise: observation noise added to the kernel diagonal.
    - length_scale: SE kernel length scale in normalized coordinates.
    - candidates: random feasible candidates scored by EI per step.
    - w_min, h_min: smallest crop side as a fraction of the image.
    """

    init_samples: int = 10
    iterations: int = 50
    gp_noise: float = 1e-6
    length_scale: float = 0.2
    candidates: int = 2048
    w_min: float = DEFAULT_MIN_SIDE
    h_min: float = DEFAULT_MIN_SIDE
    seed: int = 0

    def __post_init__(self):
        if self.init_samples < 2:
            raise ConfigError(f"[crop] init_samples must be >= 2, got {self.init_samples}")
        if self.iterations < 0:
            raise ConfigError(f"[crop] iterations must be >= 0, got {self.iterations}")
        if self.candidates < 1:
            raise ConfigError(f"[crop] candidates must be >= 1, got {self.candidates}")
        if self.gp_noise < 0 or self.length_scale <= 0:
            raise ConfigError("[crop] gp_noise must be >= 0 and length_scale > 0")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BoConfig":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"[crop] unknown options: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class Evaluation:
    rect: CropRect
    score: float
    best_score: float
    source: str


@dataclass
class CropResult:
    rect: CropRect
    score: float
    full_score: float
    trace: list[Evaluation] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {**self.rect.to_dict(), "score_full": self.full_score, "score_crop": self.score}


def unit_to_rects(unit: np.ndarray, w_min: float, h_min: float) -> np.ndarray:
    """Map points of the unit 4-cube onto feasible ``(cx, cy, w, h)`` crops.

    Size is drawn first, then the center within the box that keeps the crop inside.
    """
    u = np.atleast_2d(unit)
    w = w_min + u[:, 2] * (1.0 - w_min)
    h = h_min + u[:, 3] * (1.0 - h_min)
    cx = w / 2 + u[:, 0] * (1.0 - w)
    cy = h / 2 + u[:, 1] * (1.0 - h)
    return np.stack([cx, cy, w, h], axis=1)


def optimal_crop(
    model: ScorerModel,
    featurizer: Featurizer,
    image: ImageGrid,
    config: BoConfig = BoConfig(),
) -> CropResult:
    """Search for the crop with the highest weighted-average score.

    Every evaluated point is feasible. The full-image crop always belongs to
    the initial design, so the result never scores below the full image.
    """
    check_min_sides(config.w_min, config.h_min)
    scorer = CropScorer(model, featurizer, image)
    rng = np.random.default_rng(config.seed)
    full = CropRect.full()
    full_score = float(scorer.score_rects(full.as_array()[None, :])[0])
    trace = [Evaluation(full, full_score, full_score, "full")]
    if config.w_min >= 1.0 and config.h_min >= 1.0:
        log.info("[crop] only the full-image crop is feasible")
        return CropResult(full, full_score, full_score, trace)

    def record(rects: np.ndarray, scores: np.ndarray, source: str) -> None:
        for row, score in zip(rects, scores):
            best = max(trace[-1].best_score, float(score))
            trace.append(Evaluation(CropRect(*map(float, row)), float(score), best, source))

    design = qmc.LatinHypercube(d=4, seed=rng).random(config.init_samples - 1)
    initial = unit_to_rects(design, config.w_min, config.h_min)
    record(initial, scorer.score_rects(initial), "init")

    for step in range(config.iterations):
        points = np.array([e.rect.as_array() for e in trace])
        scores = np.array([e.score for e in trace])
        gp = GaussianProcess.fit(points, scores, config.length_scale, config.gp_noise)
        candidates = unit_to_rects(rng.random((config.candidates, 4)), config.w_min, config.h_min)
        candidates = candidates[feasible_mask(candidates, config.w_min, config.h_min)]
        mean, std = gp.predict(candidates)
        ei = expected_improvement(mean, std, trace[-1].best_score)
        choice = candidates[int(np.argmax(ei))][None, :]
        record(choice, scorer.score_rects(choice), "bo")
        log.debug(
            f"[crop] step {step + 1}: max EI {ei.max():.3g}, "
            f"score {trace[-1].score:.4f}, best {trace[-1].best_score:.4f}"
        )

    best = max(trace, key=lambda e: e.score)
    log.info(f"[crop] full image {full_score:.4f} -> best crop {best.score:.4f} ({best.rect})")
    return CropResult(best.rect, best.score, full_score, trace)


@dataclass(frozen=True)
class CropGridSpec:
    """Axis resolution of the exhaustive crop grid."""

    n_cx: int = 16
    n_cy: int = 16
    n_w: int = 8
    n_h: int = 8
    w_min: float = DEFAULT_MIN_SIDE
    h_min: float = DEFAULT_MIN_SIDE

    def __post_init__(self):
        for name in ("n_cx", "n_cy", "n_w", "n_h"):
            if getattr(self, name) < 1:
                raise ConfigError(f"[crop] {name} must be >= 1, got {getattr(self, name)}")

    def candidates(self) -> np.ndarray:
        """Feasible grid points in lexicographic ``(cx, cy, w, h)`` order."""

        def centers(n: int) -> np.ndarray:
            return np.linspace(0.0, 1.0, n) if n > 1 else np.array([0.5])

        def sizes(n: int, smallest: float) -> np.ndarray:
            return np.linspace(smallest, 1.0, n) if n > 1 else np.array([1.0])

        axes = np.meshgrid(
            centers(self.n_cx),
            centers(self.n_cy),
            sizes(self.n_w, self.w_min),
            sizes(self.n_h, self.h_min),
            indexing="ij",
        )
        grid = np.stack([axis.ravel() for axis in axes], axis=1)
        return grid[feasible_mask(grid, self.w_min, self.h_min)]


def grid_oracle_crop(
    model: ScorerModel,
    featurizer: Featurizer,
    image: ImageGrid,
    grid_spec: CropGridSpec = CropGridSpec(),
) -> tuple[CropRect, float]:
    """Best crop over every feasible grid point; ties keep the first in grid order."""
    check_min_sides(grid_spec.w_min, grid_spec.h_min)
    candidates = grid_spec.candidates()
    if candidates.size == 0:
        raise ConfigError("[crop] the crop grid has no feasible candidates")
    scores = CropScorer(model, featurizer, image).score_rects(candidates)
    best = int(np.argmax(scores))
    log.debug(f"[crop] grid oracle scored {len(candidates)} candidates")
    return CropRect(*map(float, candidates[best])), float(scores[best])
