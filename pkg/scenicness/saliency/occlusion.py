"""Occlusion saliency: slide a gray mask over a cell lattice and measure the score change."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict

import numpy as np

from helper_lib.imaging import unit_to_gray, upscale_nearest, write_png
from helper_lib.workers import ordered_map
from scenicness.errors import ConfigError, InvalidInputError
from scenicness.featurize import Featurizer, ImageGrid
from scenicness.scorer import ScorerModel, predict_batch

log = logging.getLogger("scenicness.saliency")

MASK_THRESHOLD = 0.6
MID_GRAY = (128, 128, 128)


class Difference(enum.Enum):
    ARGMAX = "argmax"
    TOTAL_VARIATION = "total_variation"


@dataclass(frozen=True)
class SaliencyConfig:
    """
    - mask_cells: side of the square mask, in lattice cells.
    - stride_cells: window step, in lattice cells.
    - lattice: cells along the image's shorter side.
    - fill: RGB painted over the masked region.
    - difference: ``argmax`` compares the unmasked top label's probability,
      ``total_variation`` compares whole distributions.
    """

    mask_cells: int = 7
    stride_cells: int = 1
    lattice: int = 32
    fill: tuple[int, int, int] = MID_GRAY
    difference: Difference = Difference.ARGMAX
    threads: int = 1

    def __post_init__(self):
        if not isinstance(self.difference, Difference):
            try:
                object.__setattr__(self, "difference", Difference(self.difference))
            except ValueError as exc:
                raise ConfigError(f"[saliency] unknown difference {self.difference!r}") from exc
        for name in ("mask_cells", "stride_cells", "lattice", "threads"):
            if getattr(self, name) < 1:
                raise ConfigError(f"[saliency] {name} must be >= 1, got {getattr(self, name)}")
        object.__setattr__(self, "fill", tuple(int(c) for c in self.fill))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SaliencyConfig":
        known = {"mask_cells", "stride_cells", "lattice", "fill", "difference", "threads"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"[saliency] unknown options: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True, eq=False)
class SaliencyMap:
    """Per-cell saliency in [0, 1] plus the lattice it lives on.

    ``row_edges`` and ``col_edges`` are pixel boundaries of the cells.
    """

    values: np.ndarray
    raw: np.ndarray
    row_edges: np.ndarray
    col_edges: np.ndarray
    mask_cells: int
    stride_cells: int
    label: int
    image_id: str = ""

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def pixel_values(self) -> np.ndarray:
        """Cell values spread over the original pixel grid."""
        return upscale_nearest(self.values, self.row_edges, self.col_edges)

    def save_png(self, path: str | Path) -> Path:
        return write_png(unit_to_gray(self.pixel_values()), path)


def lattice_edges(size: int, cells: int) -> np.ndarray:
    return (np.arange(cells + 1) * size) // cells


def cell_lattice(image: ImageGrid, lattice: int) -> tuple[np.ndarray, np.ndarray]:
    """Pixel edges of a lattice whose cells are ``min_dim // lattice`` pixels (at least 1)."""
    cell = max(1, min(image.height, image.width) // lattice)
    return (
        lattice_edges(image.height, image.height // cell),
        lattice_edges(image.width, image.width // cell),
    )


def window_origins(cells: int, mask_cells: int, stride_cells: int) -> range:
    return range(0, cells - mask_cells + 1, stride_cells)


def occlusion_saliency(
    model: ScorerModel,
    featurizer: Featurizer,
    image: ImageGrid,
    config: SaliencyConfig = SaliencyConfig(),
    image_id: str = "",
) -> SaliencyMap:
    """Saliency of every lattice cell for ``image``.

    Each window position paints ``mask_cells x mask_cells`` cells with the fill
    color and records how far the prediction moves; a cell keeps the largest
    change among the windows covering it. Values are divided by the map maximum.
    """
    row_edges, col_edges = cell_lattice(image, config.lattice)
    n_rows, n_cols = row_edges.size - 1, col_edges.size - 1
    if n_rows < config.mask_cells or n_cols < config.mask_cells:
        raise InvalidInputError(
            f"[saliency] image lattice {n_cols}x{n_rows} is smaller than the "
            f"{config.mask_cells}x{config.mask_cells} mask"
        )

    baseline = predict_batch(model, featurizer(image))[0]
    label = int(np.argmax(baseline))
    windows = [
        (r, c)
        for r in window_origins(n_rows, config.mask_cells, config.stride_cells)
        for c in window_origins(n_cols, config.mask_cells, config.stride_cells)
    ]

    def masked_features(window: tuple[int, int]) -> np.ndarray:
        r, c = window
        masked = image.filled(
            col_edges[c],
            row_edges[r],
            col_edges[c + config.mask_cells],
            row_edges[r + config.mask_cells],
            config.fill,
        )
        return featurizer(masked)

    probs = predict_batch(model, np.stack(ordered_map(masked_features, windows, config.threads)))
    if config.difference is Difference.ARGMAX:
        deltas = np.abs(probs[:, label] - baseline[label])
    else:
        deltas = 0.5 * np.abs(probs - baseline).sum(axis=1)

    raw = np.zeros((n_rows, n_cols))
    for (r, c), delta in zip(windows, deltas):
        region = raw[r : r + config.mask_cells, c : c + config.mask_cells]
        np.maximum(region, delta, out=region)

    peak = raw.max()
    values = raw / peak if peak > 0.0 else np.zeros_like(raw)
    log.debug(
        f"[saliency] {len(windows)} windows on a {n_cols}x{n_rows} lattice, "
        f"label {label + 1}, peak change {peak:.6g}"
    )
    return SaliencyMap(
        values=values,
        raw=raw,
        row_edges=row_edges,
        col_edges=col_edges,
        mask_cells=config.mask_cells,
        stride_cells=config.stride_cells,
        label=label + 1,
        image_id=image_id,
    )


def binarize(saliency: SaliencyMap | np.ndarray, threshold: float = MASK_THRESHOLD) -> np.ndarray:
    """Cells at or above ``threshold``."""
    values = saliency.values if isinstance(saliency, SaliencyMap) else np.asarray(saliency)
    return values >= threshold


def save_mask_png(saliency: SaliencyMap, path: str | Path, threshold: float = MASK_THRESHOLD) -> Path:
    """Black/white PNG of :func:`binarize` at pixel resolution."""
    mask = binarize(saliency.pixel_values(), threshold)
    return write_png(np.where(mask, 255, 0).astype(np.uint8), path)
