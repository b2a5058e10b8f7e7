"""Dense scenicness rasters over a lat/lon bounding box and their exports."""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Protocol, Sequence

import numpy as np
from scipy.spatial import cKDTree

from helper_lib.imaging import apply_colormap, write_png
from helper_lib.workers import ordered_map
from scenicness.errors import ConfigError, InvalidInputError
from scenicness.geomap.index import GeoSample
from scenicness.geomap.predictors import MapPredictor
from scenicness.ratings_core import NUM_LEVELS
from scenicness.scorer import weighted_average_score

log = logging.getLogger("scenicness.geomap")

RASTER_FORMAT_VERSION = "1.0"
# Absorbs float error when the bbox is an exact multiple of the cell size.
CELL_COUNT_TOLERANCE = 1e-9


class OverheadSource(Protocol):
    def features_at(self, lat: float, lon: float) -> np.ndarray | None: ...


@dataclass(frozen=True)
class MapSpec:
    """Bounding box in degrees and nominal cell size in degrees.

    Row 0 is the northernmost row; column 0 the westernmost. Cell counts round
    up, and the cells then shrink so the grid covers exactly the box.
    """

    lat_min: float
    lon_min: float
    lat_max: float
    lon_max: float
    cell_deg: float

    def __post_init__(self):
        if not self.cell_deg > 0:
            raise ConfigError(f"[geomap] cell size must be > 0, got {self.cell_deg}")
        if not (self.lat_min < self.lat_max and self.lon_min < self.lon_max):
            raise ConfigError(
                f"[geomap] empty bounding box {self.bbox}; expected min < max on both axes"
            )
        if self.lat_min < -90 or self.lat_max > 90 or self.lon_min < -180 or self.lon_max > 180:
            raise ConfigError(f"[geomap] bounding box {self.bbox} leaves WGS84 range")

    @classmethod
    def parse(cls, bbox: str, cell_deg: float) -> "MapSpec":
        """Build from ``lat_min,lon_min,lat_max,lon_max``."""
        try:
            values = [float(v) for v in bbox.split(",")]
        except ValueError as exc:
            raise ConfigError(f"[geomap] bounding box is not numeric: {bbox!r}") from exc
        if len(values) != 4:
            raise ConfigError(
                f"[geomap] bounding box needs lat_min,lon_min,lat_max,lon_max, got {bbox!r}"
            )
        return cls(*values, cell_deg=float(cell_deg))

    @property
    def bbox(self) -> list[float]:
        return [self.lat_min, self.lon_min, self.lat_max, self.lon_max]

    @property
    def rows(self) -> int:
        return max(1, math.ceil((self.lat_max - self.lat_min) / self.cell_deg - CELL_COUNT_TOLERANCE))

    @property
    def cols(self) -> int:
        return max(1, math.ceil((self.lon_max - self.lon_min) / self.cell_deg - CELL_COUNT_TOLERANCE))

    @property
    def lat_step(self) -> float:
        """Row height; equals ``cell_deg`` unless the span is not a multiple of it."""
        return (self.lat_max - self.lat_min) / self.rows

    @property
    def lon_step(self) -> float:
        return (self.lon_max - self.lon_min) / self.cols

    def cell_center(self, row: int, col: int) -> tuple[float, float]:
        """Center of a cell; the rows x cols lattice exactly tiles the box."""
        lat = self.lat_max - (row + 0.5) * self.lat_step
        lon = self.lon_min + (col + 0.5) * self.lon_step
        return lat, lon

    def cell_centers(self) -> list[tuple[float, float]]:
        """Centers in row-major order."""
        return [self.cell_center(r, c) for r in range(self.rows) for c in range(self.cols)]


@dataclass(frozen=True, eq=False)
class MapRaster:
    spec: MapSpec
    values: np.ndarray
    valid: np.ndarray
    method: str = ""

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def value_range(self) -> tuple[float | None, float | None]:
        if not self.valid.any():
            return None, None
        chosen = self.values[self.valid]
        return float(chosen.min()), float(chosen.max())

    def to_dict(self) -> Dict[str, Any]:
        low, high = self.value_range()
        return {
            "format_version": RASTER_FORMAT_VERSION,
            "method": self.method,
            "bbox": self.spec.bbox,
            "cell_size_deg": self.spec.cell_deg,
            "cell_step_deg": [self.spec.lat_step, self.spec.lon_step],
            "rows": self.spec.rows,
            "cols": self.spec.cols,
            "min": low,
            "max": high,
        }

    def save_png(self, path: str | Path) -> Path:
        """False color over the full rating range; invalid cells are transparent."""
        return write_png(apply_colormap(self.values, self.valid, 1.0, float(NUM_LEVELS)), path)

    def save_json(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")
        return path

    def save_csv(self, path: str | Path) -> Path:
        """One line per cell: row, col, center lat, center lon, score (empty if invalid)."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["row", "col", "lat", "lon", "score"])
            for r in range(self.spec.rows):
                for c in range(self.spec.cols):
                    lat, lon = self.spec.cell_center(r, c)
                    score = repr(float(self.values[r, c])) if self.valid[r, c] else ""
                    writer.writerow([r, c, repr(lat), repr(lon), score])
        return path


class RecordOverheadSource:
    """Overhead features of the closest record within ``max_distance`` degrees."""

    def __init__(self, samples: Sequence[GeoSample], max_distance: float):
        records = sorted(
            (s for s in samples if s.overhead_features is not None), key=lambda s: s.id
        )
        if not records:
            raise InvalidInputError("[geomap] no samples carry overhead features")
        self.features = [s.overhead_features for s in records]
        self.tree = cKDTree(np.array([s.position for s in records]))
        self.max_distance = max_distance

    def features_at(self, lat: float, lon: float) -> np.ndarray | None:
        distance, row = self.tree.query([lat, lon], k=1)
        if distance > self.max_distance:
            return None
        return self.features[int(row)]


def rasterize(
    predictor: MapPredictor,
    spec: MapSpec,
    overhead_source: OverheadSource | None = None,
    threads: int = 1,
) -> MapRaster:
    """Weighted-average score at every cell center.

    Predictors that need overhead features mark cells without any as invalid.
    """
    if predictor.requires_overhead and overhead_source is None:
        raise ConfigError(f"[geomap] the {predictor.name} predictor needs an overhead source")

    def cell_score(center: tuple[float, float]) -> float:
        lat, lon = center
        overhead = None
        if predictor.requires_overhead:
            overhead = overhead_source.features_at(lat, lon)
            if overhead is None:
                return math.nan
        return weighted_average_score(predictor.predict(lat, lon, overhead))

    scores = np.array(ordered_map(cell_score, spec.cell_centers(), threads), dtype=float)
    values = scores.reshape(spec.rows, spec.cols)
    valid = np.isfinite(values)
    missing = int((~valid).sum())
    if missing:
        log.warning(f"[geomap] {missing} of {values.size} cells have no overhead features")
    log.info(f"[geomap] {predictor.name} raster {spec.rows}x{spec.cols} done")
    return MapRaster(spec=spec, values=values, valid=valid, method=predictor.name)
