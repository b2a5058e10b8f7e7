"""Image featurizers: color-name histograms and a passthrough for precomputed features."""

from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Sequence

import numpy as np

from scenicness.errors import ConfigError, InvalidInputError
from scenicness.featurize.image import ImageGrid

log = logging.getLogger("scenicness.featurize")

MAX_SPATIAL_GRID = 4

Featurizer = Callable[[ImageGrid], np.ndarray]


class ColorNameTable:
    """
    Nearest-centroid color naming over a fixed 11-entry RGB table.

    The table lives in ``color_names.json`` next to this module and is loaded
    once on first use.
    """

    def __init__(self, path: Path | None = None):
        self._path = path or Path(__file__).parent / "color_names.json"
        self._names: list[str] | None = None
        self._centroids: np.ndarray | None = None

    def _load(self) -> None:
        try:
            data = json.loads(self._path.read_text(encoding="utf-8"))
            entries = data["colorNames"]
            names = [entry["name"] for entry in entries]
            centroids = np.array([entry["rgb"] for entry in entries], dtype=np.int64)
        except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
            log.error(f"[featurize] failed to load color-name table {self._path}: {exc}")
            raise ConfigError(f"[featurize] unusable color-name table {self._path}") from exc
        if centroids.shape != (len(names), 3):
            raise ConfigError("[featurize] color-name centroids must be RGB triples")
        self._names = names
        self._centroids = centroids
        log.debug(f"[featurize] loaded {len(names)} color names from {self._path}")

    @property
    def names(self) -> list[str]:
        if self._names is None:
            self._load()
        return list(self._names)

    @property
    def centroids(self) -> np.ndarray:
        if self._centroids is None:
            self._load()
        return self._centroids

    def __len__(self) -> int:
        return len(self.names)

    def assign(self, pixels: np.ndarray) -> np.ndarray:
        """Color-name index for every pixel of an ``(..., 3)`` uint8 array.

        Integer arithmetic keeps the assignment bitwise reproducible; distance
        ties resolve to the lower index.
        """
        flat = np.asarray(pixels, dtype=np.int64).reshape(-1, 3)
        diff = flat[:, None, :] - self.centroids[None, :, :]
        distances = np.einsum("pkc,pkc->pk", diff, diff)
        return np.argmin(distances, axis=1).reshape(np.shape(pixels)[:-1])


COLOR_NAMES = ColorNameTable()
NUM_COLOR_NAMES = 11


def color_name_of(rgb: Sequence[int]) -> int:
    """Index (0..10) of the color name nearest to an RGB triple."""
    pixel = np.asarray(rgb, dtype=np.int64)
    if pixel.shape != (3,) or np.any(pixel < 0) or np.any(pixel > 255):
        raise InvalidInputError(f"[featurize] not an 8-bit RGB triple: {rgb!r}")
    return int(COLOR_NAMES.assign(pixel[None, :])[0])


class FeaturizerKind(enum.Enum):
    COLOR_NAMES = "color_names"
    COLOR_NAMES_SPATIAL = "color_names_spatial"
    PASSTHROUGH = "passthrough"


@dataclass(frozen=True)
class FeaturizerSpec:
    """Which featurizer to run and its parameters.

    - ``grid``: cells per side for the spatial variant (1..4).
    - ``dim``: feature length for passthrough features read from a manifest.
    """

    kind: FeaturizerKind = FeaturizerKind.COLOR_NAMES
    grid: int = 1
    dim: int | None = None

    def __post_init__(self):
        if not isinstance(self.kind, FeaturizerKind):
            try:
                object.__setattr__(self, "kind", FeaturizerKind(self.kind))
            except ValueError as exc:
                raise ConfigError(f"[featurize] unknown featurizer kind {self.kind!r}") from exc
        if not 1 <= self.grid <= MAX_SPATIAL_GRID:
            raise ConfigError(f"[featurize] grid must be in 1..{MAX_SPATIAL_GRID}, got {self.grid}")
        if self.kind is FeaturizerKind.PASSTHROUGH and (self.dim is None or self.dim < 1):
            raise ConfigError("[featurize] passthrough featurizer needs a positive dim")

    @property
    def output_dim(self) -> int:
        if self.kind is FeaturizerKind.PASSTHROUGH:
            return int(self.dim)
        if self.kind is FeaturizerKind.COLOR_NAMES_SPATIAL:
            return NUM_COLOR_NAMES * self.grid * self.grid
        return NUM_COLOR_NAMES

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "grid": self.grid, "dim": self.dim}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FeaturizerSpec":
        unknown = set(data) - {"kind", "grid", "dim"}
        if unknown:
            raise ConfigError(f"[featurize] unknown featurizer options: {sorted(unknown)}")
        return cls(
            kind=data.get("kind", FeaturizerKind.COLOR_NAMES.value),
            grid=int(data.get("grid", 1)),
            dim=None if data.get("dim") is None else int(data["dim"]),
        )

    @classmethod
    def parse(cls, text: str) -> "FeaturizerSpec":
        """Parse the CLI form ``color_names``, ``color_names_spatial:2`` or ``passthrough:8``."""
        kind, _, arg = text.partition(":")
        if kind == FeaturizerKind.COLOR_NAMES_SPATIAL.value:
            return cls(kind=kind, grid=int(arg or 2))
        if kind == FeaturizerKind.PASSTHROUGH.value:
            return cls(kind=kind, dim=int(arg) if arg else None)
        return cls(kind=kind)


def _histogram(names: np.ndarray) -> np.ndarray:
    counts = np.bincount(names.ravel(), minlength=NUM_COLOR_NAMES).astype(float)
    return counts / counts.sum()


def _cell_edges(size: int, cells: int) -> np.ndarray:
    return (np.arange(cells + 1) * size) // cells


def featurize(spec: FeaturizerSpec, image: ImageGrid) -> np.ndarray:
    """Feature vector of ``image`` under ``spec``; deterministic and read-only."""
    if spec.kind is FeaturizerKind.PASSTHROUGH:
        raise InvalidInputError(
            "[featurize] passthrough features come from the manifest, not from images"
        )
    if image.width * image.height == 0:
        raise InvalidInputError("[featurize] zero-area image")
    names = COLOR_NAMES.assign(image.pixels)
    if spec.kind is FeaturizerKind.COLOR_NAMES:
        features = _histogram(names)
    else:
        rows = _cell_edges(image.height, spec.grid)
        cols = _cell_edges(image.width, spec.grid)
        features = np.concatenate(
            [
                _histogram(names[rows[i] : rows[i + 1], cols[j] : cols[j + 1]])
                for i in range(spec.grid)
                for j in range(spec.grid)
            ]
        )
    features.flags.writeable = False
    return features


def build_featurizer(spec: FeaturizerSpec) -> Featurizer:
    """Bind ``spec`` into a one-argument featurizer callable."""

    def run(image: ImageGrid) -> np.ndarray:
        return featurize(spec, image)

    run.output_dim = spec.output_dim
    return run


def as_feature_vector(values, dim: int | None = None) -> np.ndarray:
    """Validate a feature vector: 1-D, non-empty, finite, optionally of length ``dim``."""
    vector = np.asarray(values, dtype=float)
    if vector.ndim != 1 or vector.size == 0:
        raise InvalidInputError("[featurize] feature vector must be 1-D and non-empty")
    if dim is not None and vector.size != dim:
        raise InvalidInputError(
            f"[featurize] feature dimension {vector.size} does not match expected {dim}"
        )
    if not np.all(np.isfinite(vector)):
        raise InvalidInputError("[featurize] feature vector has non-finite entries")
    return vector
