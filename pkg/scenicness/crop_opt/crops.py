from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from helper_lib.imaging import draw_rectangle, write_png
from scenicness.errors import ConfigError, ConstraintViolationError
from scenicness.featurize import MIN_IMAGE_SIZE, Featurizer, ImageGrid
from scenicness.scorer import ScorerModel, predict_batch, weighted_average_scores

DEFAULT_MIN_SIDE = 0.3
FEASIBILITY_TOLERANCE = 1e-9

PixelBox = tuple[int, int, int, int]


@dataclass(frozen=True)
class CropRect:
    """Crop center and size in normalized image coordinates."""

    cx: float
    cy: float
    w: float
    h: float

    @classmethod
    def full(cls) -> "CropRect":
        return cls(0.5, 0.5, 1.0, 1.0)

    def as_array(self) -> np.ndarray:
        return np.array([self.cx, self.cy, self.w, self.h])

    def is_feasible(self, w_min: float = DEFAULT_MIN_SIDE, h_min: float = DEFAULT_MIN_SIDE) -> bool:
        return bool(feasible_mask(self.as_array()[None, :], w_min, h_min)[0])

    def check(self, w_min: float = DEFAULT_MIN_SIDE, h_min: float = DEFAULT_MIN_SIDE) -> "CropRect":
        if not self.is_feasible(w_min, h_min):
            raise ConstraintViolationError(
                f"[crop] {self} leaves the image or is smaller than {w_min}x{h_min}"
            )
        return self

    def pixel_box(self, width: int, height: int) -> PixelBox:
        return tuple(int(v) for v in pixel_boxes(self.as_array()[None, :], width, height)[0])

    def to_dict(self) -> dict:
        return {"cx": self.cx, "cy": self.cy, "w": self.w, "h": self.h}


def check_min_sides(w_min: float, h_min: float) -> None:
    for name, value in (("w_min", w_min), ("h_min", h_min)):
        if not 0.0 < value <= 1.0:
            raise ConfigError(f"[crop] {name} must be in (0, 1], got {value}; no crop is feasible")


def feasible_mask(rects: np.ndarray, w_min: float, h_min: float) -> np.ndarray:
    """Rows of ``(cx, cy, w, h)`` lying inside the image and meeting the minimum size."""
    cx, cy, w, h = np.asarray(rects, dtype=float).T
    tol = FEASIBILITY_TOLERANCE
    return (
        (w >= w_min - tol)
        & (h >= h_min - tol)
        & (w <= 1.0 + tol)
        & (h <= 1.0 + tol)
        & (cx - w / 2 >= -tol)
        & (cx + w / 2 <= 1.0 + tol)
        & (cy - h / 2 >= -tol)
        & (cy + h / 2 <= 1.0 + tol)
    )


def _pixel_span(lo: np.ndarray, hi: np.ndarray, size: int) -> tuple[np.ndarray, np.ndarray]:
    start = np.clip(np.floor(lo * size + 0.5), 0, size).astype(int)
    stop = np.clip(np.floor(hi * size + 0.5), 0, size).astype(int)
    short = stop - start < MIN_IMAGE_SIZE
    middle = (start + stop) // 2
    start = np.where(short, np.clip(middle - MIN_IMAGE_SIZE // 2, 0, size - MIN_IMAGE_SIZE), start)
    stop = np.where(short, start + MIN_IMAGE_SIZE, stop)
    return start, stop


def pixel_boxes(rects: np.ndarray, width: int, height: int) -> np.ndarray:
    """Integer ``(x0, y0, x1, y1)`` bounds, grown to at least 8x8 pixels."""
    cx, cy, w, h = np.asarray(rects, dtype=float).T
    x0, x1 = _pixel_span(cx - w / 2, cx + w / 2, width)
    y0, y1 = _pixel_span(cy - h / 2, cy + h / 2, height)
    return np.stack([x0, y0, x1, y1], axis=1)


class CropScorer:
    """Scores pixel boxes of one image, remembering every box already seen."""

    def __init__(self, model: ScorerModel, featurizer: Featurizer, image: ImageGrid):
        self.model = model
        self.featurizer = featurizer
        self.image = image
        self.cache: dict[PixelBox, float] = {}

    def score_boxes(self, boxes: Sequence[PixelBox]) -> np.ndarray:
        missing = list(dict.fromkeys(box for box in boxes if box not in self.cache))
        if missing:
            features = np.stack([self.featurizer(self.image.crop(*box)) for box in missing])
            scores = weighted_average_scores(predict_batch(self.model, features))
            self.cache.update(zip(missing, (float(s) for s in scores)))
        return np.array([self.cache[box] for box in boxes])

    def score_rects(self, rects: np.ndarray) -> np.ndarray:
        boxes = [tuple(int(v) for v in row) for row in pixel_boxes(rects, self.image.width, self.image.height)]
        return self.score_boxes(boxes)


def crop_score(
    model: ScorerModel,
    featurizer: Featurizer,
    image: ImageGrid,
    rect: CropRect,
    w_min: float = DEFAULT_MIN_SIDE,
    h_min: float = DEFAULT_MIN_SIDE,
) -> float:
    """Weighted-average scenicness of the pixels inside ``rect``."""
    rect.check(w_min, h_min)
    return float(CropScorer(model, featurizer, image).score_rects(rect.as_array()[None, :])[0])


def save_annotated_png(image: ImageGrid, rect: CropRect, path: str | Path) -> Path:
    """Write ``image`` with the crop outlined."""
    box = rect.pixel_box(image.width, image.height)
    return write_png(draw_rectangle(image.pixels, box), path)
