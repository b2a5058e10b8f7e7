"""PNG and colormap helpers shared by saliency, cropping and map export."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.colors import LinearSegmentedColormap
from PIL import Image, ImageDraw

# Fixed false-color ramp for scenicness rasters: low scores blue, mid yellow, high red.
SCENICNESS_CMAP = LinearSegmentedColormap.from_list(
    "scenicness", ["#0000ff", "#ffff00", "#ff0000"], N=256
)
SCENICNESS_LUT = np.round(SCENICNESS_CMAP(np.linspace(0.0, 1.0, 256))[:, :3] * 255).astype(
    np.uint8
)


def read_rgb_png(path: str | Path) -> np.ndarray:
    """Decode a PNG into an ``(height, width, 3)`` uint8 array."""
    path = Path(path)
    if path.suffix.lower() != ".png":
        raise ValueError(f"[imaging] only PNG images are supported, got {path.name}")
    with Image.open(path) as im:
        if im.format != "PNG":
            raise ValueError(f"[imaging] {path} is not a PNG file")
        return np.asarray(im.convert("RGB"), dtype=np.uint8).copy()


def write_png(pixels: np.ndarray, path: str | Path) -> Path:
    """Encode a uint8 array (grayscale, RGB or RGBA) as PNG."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.ascontiguousarray(pixels, dtype=np.uint8)).save(path, format="PNG")
    return path


def upscale_nearest(grid: np.ndarray, row_edges: np.ndarray, col_edges: np.ndarray) -> np.ndarray:
    """Spread cell values over pixels; cell ``i`` spans ``edges[i]:edges[i + 1]``.

    Edges start at 0 and end at the pixel size; cells may differ in width.
    """
    row_index = np.searchsorted(row_edges, np.arange(row_edges[-1]), side="right") - 1
    col_index = np.searchsorted(col_edges, np.arange(col_edges[-1]), side="right") - 1
    return grid[row_index][:, col_index]


def unit_to_gray(values: np.ndarray) -> np.ndarray:
    """Map values in [0, 1] to 8-bit gray levels."""
    return np.round(np.clip(values, 0.0, 1.0) * 255).astype(np.uint8)


def apply_colormap(
    values: np.ndarray, valid: np.ndarray, vmin: float, vmax: float
) -> np.ndarray:
    """Color a raster with :data:`SCENICNESS_LUT`; invalid cells become transparent."""
    scaled = (np.where(valid, values, vmin) - vmin) / (vmax - vmin)
    index = np.clip(np.round(scaled * 255), 0, 255).astype(int)
    rgba = np.zeros(values.shape + (4,), dtype=np.uint8)
    rgba[..., :3] = SCENICNESS_LUT[index]
    rgba[..., 3] = np.where(valid, 255, 0)
    return rgba


def draw_rectangle(
    pixels: np.ndarray,
    box: tuple[int, int, int, int],
    color: tuple[int, int, int] = (0, 200, 0),
    width: int = 2,
) -> np.ndarray:
    """Return a copy of ``pixels`` with an outlined ``(x0, y0, x1, y1)`` box."""
    im = Image.fromarray(np.ascontiguousarray(pixels, dtype=np.uint8))
    x0, y0, x1, y1 = box
    ImageDraw.Draw(im).rectangle((x0, y0, x1 - 1, y1 - 1), outline=color, width=width)
    return np.asarray(im, dtype=np.uint8).copy()
