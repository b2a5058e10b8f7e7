"""Most-scenic crop search."""

from scenicness.crop_opt.bayesopt import (
    BoConfig,
    CropGridSpec,
    CropResult,
    Evaluation,
    grid_oracle_crop,
    optimal_crop,
    unit_to_rects,
)
from scenicness.crop_opt.crops import (
    DEFAULT_MIN_SIDE,
    CropRect,
    CropScorer,
    crop_score,
    feasible_mask,
    pixel_boxes,
    save_annotated_png,
)

__all__ = [
    "DEFAULT_MIN_SIDE",
    "BoConfig",
    "CropGridSpec",
    "CropRect",
    "CropResult",
    "CropScorer",
    "Evaluation",
    "crop_score",
    "feasible_mask",
    "grid_oracle_crop",
    "optimal_crop",
    "pixel_boxes",
    "save_annotated_png",
    "unit_to_rects",
]
