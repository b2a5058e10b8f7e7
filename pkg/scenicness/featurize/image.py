from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from helper_lib.imaging import read_rgb_png, write_png
from scenicness.errors import InvalidInputError

MIN_IMAGE_SIZE = 8


@dataclass(frozen=True, eq=False)
class ImageGrid:
    """Immutable 8-bit RGB image, at least 8x8 pixels."""

    pixels: np.ndarray

    def __post_init__(self):
        pixels = np.array(self.pixels, dtype=np.uint8)
        if pixels.ndim != 3 or pixels.shape[2] != 3:
            raise InvalidInputError(
                f"[featurize] expected an (height, width, 3) RGB array, got {pixels.shape}"
            )
        height, width = pixels.shape[:2]
        if height < MIN_IMAGE_SIZE or width < MIN_IMAGE_SIZE:
            raise InvalidInputError(
                f"[featurize] image is {width}x{height}, minimum is "
                f"{MIN_IMAGE_SIZE}x{MIN_IMAGE_SIZE}"
            )
        pixels.flags.writeable = False
        object.__setattr__(self, "pixels", pixels)

    @classmethod
    def from_png(cls, path: str | Path) -> "ImageGrid":
        try:
            return cls(read_rgb_png(path))
        except ValueError as exc:
            if isinstance(exc, InvalidInputError):
                raise
            raise InvalidInputError(str(exc)) from exc

    @classmethod
    def constant(cls, width: int, height: int, rgb: tuple[int, int, int]) -> "ImageGrid":
        return cls(np.broadcast_to(np.asarray(rgb, dtype=np.uint8), (height, width, 3)))

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    def crop(self, x0: int, y0: int, x1: int, y1: int) -> "ImageGrid":
        """Sub-image covering pixel columns ``x0:x1`` and rows ``y0:y1``."""
        return ImageGrid(self.pixels[y0:y1, x0:x1])

    def filled(self, x0: int, y0: int, x1: int, y1: int, rgb: tuple[int, int, int]) -> "ImageGrid":
        """Copy with the given pixel rectangle painted a solid color."""
        pixels = self.pixels.copy()
        pixels[y0:y1, x0:x1] = rgb
        return ImageGrid(pixels)

    def save_png(self, path: str | Path) -> Path:
        return write_png(self.pixels, path)
