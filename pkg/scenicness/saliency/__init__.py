"""Occlusion saliency maps and binary masks."""

from scenicness.saliency.occlusion import (
    MASK_THRESHOLD,
    MID_GRAY,
    Difference,
    SaliencyConfig,
    SaliencyMap,
    binarize,
    cell_lattice,
    occlusion_saliency,
    save_mask_png,
)

__all__ = [
    "MASK_THRESHOLD",
    "MID_GRAY",
    "Difference",
    "SaliencyConfig",
    "SaliencyMap",
    "binarize",
    "cell_lattice",
    "occlusion_saliency",
    "save_mask_png",
]
