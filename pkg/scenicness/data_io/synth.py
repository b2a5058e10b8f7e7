"""Synthetic scenicness fields with known ground truth, for end-to-end checks."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict

import numpy as np
import yaml
from scipy.special import expit

from scenicness.data_io.manifest import Manifest, ManifestRecord
from scenicness.errors import ConfigError, CorruptModelFileError
from scenicness.ratings_core import NUM_LEVELS, RatingHistogram

log = logging.getLogger("scenicness.data_io")

FIELD_FORMAT_VERSION = "1.0"
# Local means average the field over a STENCIL x STENCIL grid across one cell.
STENCIL = 5
MID_SCALE = (1.0 + NUM_LEVELS) / 2.0
HALF_RANGE = (NUM_LEVELS - 1.0) / 2.0


def _pair(value, name: str, cast=float) -> tuple:
    try:
        low, high = (cast(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[synth] {name} must be a [low, high] pair, got {value!r}") from exc
    if low > high:
        raise ConfigError(f"[synth] {name} has low > high: {value!r}")
    return low, high


@dataclass(frozen=True)
class SynthSpec:
    """
    - bbox: lat_min, lon_min, lat_max, lon_max in degrees.
    - n_bumps: Gaussian bumps in the latent field (0 gives a constant field).
    - amplitude_range, width_range: bump amplitude and width (degrees) ranges.
    - n_samples: rated locations drawn uniformly in the bbox.
    - ratings_range: ratings per location, inclusive (default 5..15).
    - tau: rating noise std; with ``heteroscedastic`` it varies from
      ``tau_max`` at mid-scale to ``tau_min`` at the extremes.
    - feature_dim, feature_noise: width and noise of the linear feature encodings.
    - overhead_cell: cell side in degrees over which overhead features average the field.
    """

    bbox: tuple[float, float, float, float] = (51.0, -1.0, 51.5, -0.5)
    n_bumps: int = 5
    amplitude_range: tuple[float, float] = (-4.0, 4.0)
    width_range: tuple[float, float] = (0.04, 0.12)
    n_samples: int = 500
    ratings_range: tuple[int, int] = (5, 15)
    tau: float = 0.5
    heteroscedastic: bool = False
    tau_min: float = 0.3
    tau_max: float = 1.5
    feature_dim: int = 8
    feature_noise: float = 0.05
    overhead_cell: float = 0.01
    seed: int = 0

    def __post_init__(self):
        try:
            bbox = tuple(float(v) for v in self.bbox)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"[synth] bbox must be four numbers, got {self.bbox!r}") from exc
        if len(bbox) != 4 or not (bbox[0] < bbox[2] and bbox[1] < bbox[3]):
            raise ConfigError(f"[synth] bbox must be lat_min,lon_min,lat_max,lon_max: {bbox}")
        object.__setattr__(self, "bbox", bbox)
        object.__setattr__(self, "amplitude_range", _pair(self.amplitude_range, "amplitude_range"))
        object.__setattr__(self, "width_range", _pair(self.width_range, "width_range"))
        object.__setattr__(self, "ratings_range", _pair(self.ratings_range, "ratings_range", int))
        if self.n_samples < 1:
            raise ConfigError(f"[synth] n_samples must be >= 1, got {self.n_samples}")
        if self.n_bumps < 0:
            raise ConfigError(f"[synth] n_bumps must be >= 0, got {self.n_bumps}")
        if self.ratings_range[0] < 1:
            raise ConfigError("[synth] every location needs at least one rating")
        if self.width_range[0] <= 0:
            raise ConfigError("[synth] bump widths must be positive")
        if min(self.tau, self.tau_min, self.tau_max) < 0 or self.feature_noise < 0:
            raise ConfigError("[synth] noise levels must be >= 0")
        if self.feature_dim < 1 or self.overhead_cell <= 0:
            raise ConfigError("[synth] feature_dim must be >= 1 and overhead_cell > 0")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SynthSpec":
        if not isinstance(data, dict):
            raise ConfigError("[synth] spec must be a mapping")
        unknown = set(data) - {f.name for f in fields(cls)}
        if unknown:
            raise ConfigError(f"[synth] unknown spec keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path) -> "SynthSpec":
        """Read a YAML or JSON spec file."""
        text = Path(path).read_text(encoding="utf-8")
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"[synth] unable to parse spec {path}: {exc}") from exc
        return cls.from_dict(data or {})

    def rating_noise(self, field_values: np.ndarray) -> np.ndarray:
        if not self.heteroscedastic:
            return np.full_like(field_values, self.tau, dtype=float)
        spread = 1.0 - ((field_values - MID_SCALE) / HALF_RANGE) ** 2
        return self.tau_min + (self.tau_max - self.tau_min) * spread


@dataclass(frozen=True, eq=False)
class SyntheticField:
    """Ground-truth field ``1 + 9 * expit(sum of bumps)`` with its feature encoders.

    Encoders map ``[value, 1]`` to a feature vector; noise is added only when
    samples are generated, so :meth:`features_at` is noise-free.
    """

    centers: np.ndarray
    amplitudes: np.ndarray
    widths: np.ndarray
    ground_encoder: np.ndarray
    overhead_encoder: np.ndarray
    overhead_cell: float

    def value(self, lat, lon) -> np.ndarray:
        lat = np.asarray(lat, dtype=float)
        lon = np.asarray(lon, dtype=float)
        latent = np.zeros(np.broadcast(lat, lon).shape)
        for (c_lat, c_lon), amplitude, width in zip(self.centers, self.amplitudes, self.widths):
            sq = (lat - c_lat) ** 2 + (lon - c_lon) ** 2
            latent = latent + amplitude * np.exp(-sq / (2.0 * width * width))
        return 1.0 + (NUM_LEVELS - 1.0) * expit(latent)

    def local_mean(self, lat, lon) -> np.ndarray:
        """Mean field value over a stencil spanning one overhead cell."""
        offsets = np.linspace(-0.5, 0.5, STENCIL) * self.overhead_cell
        d_lat, d_lon = np.meshgrid(offsets, offsets, indexing="ij")
        lat = np.asarray(lat, dtype=float)[..., None]
        lon = np.asarray(lon, dtype=float)[..., None]
        return self.value(lat + d_lat.ravel(), lon + d_lon.ravel()).mean(axis=-1)

    @staticmethod
    def _encode(encoder: np.ndarray, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        return np.stack([values, np.ones_like(values)], axis=-1) @ encoder.T

    def ground_encoding(self, lat, lon) -> np.ndarray:
        return self._encode(self.ground_encoder, self.value(lat, lon))

    def overhead_encoding(self, lat, lon) -> np.ndarray:
        return self._encode(self.overhead_encoder, self.local_mean(lat, lon))

    def features_at(self, lat: float, lon: float) -> np.ndarray:
        return self.overhead_encoding(lat, lon)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "format_version": FIELD_FORMAT_VERSION,
            "bumps": [
                {"lat": float(c[0]), "lon": float(c[1]), "amplitude": float(a), "width": float(w)}
                for c, a, w in zip(self.centers, self.amplitudes, self.widths)
            ],
            "ground_encoder": self.ground_encoder.tolist(),
            "overhead_encoder": self.overhead_encoder.tolist(),
            "overhead_cell": self.overhead_cell,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SyntheticField":
        try:
            bumps = data["bumps"]
            return cls(
                centers=np.array([[b["lat"], b["lon"]] for b in bumps], dtype=float).reshape(-1, 2),
                amplitudes=np.array([b["amplitude"] for b in bumps], dtype=float),
                widths=np.array([b["width"] for b in bumps], dtype=float),
                ground_encoder=np.array(data["ground_encoder"], dtype=float),
                overhead_encoder=np.array(data["overhead_encoder"], dtype=float),
                overhead_cell=float(data["overhead_cell"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptModelFileError(f"[synth] malformed field description: {exc}") from exc

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: str | Path) -> "SyntheticField":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise CorruptModelFileError(f"[synth] {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)


def synthesize_ratings(
    field_values: np.ndarray, counts: np.ndarray, noise: np.ndarray, rng: np.random.Generator
) -> list[RatingHistogram]:
    """Discretized-normal ratings: ``floor(s + noise * z + 0.5)`` clipped to 1..10."""
    histograms = []
    for value, count, tau in zip(field_values, counts, noise):
        draws = value + tau * rng.standard_normal(int(count))
        ratings = np.clip(np.floor(draws + 0.5), 1, NUM_LEVELS).astype(int)
        histograms.append(RatingHistogram.from_ratings(ratings.tolist()))
    return histograms


def synth_generate(spec: SynthSpec) -> tuple[Manifest, SyntheticField]:
    """Deterministic manifest of rated, featurized locations plus the true field."""
    rng = np.random.default_rng(spec.seed)
    lat_min, lon_min, lat_max, lon_max = spec.bbox

    centers = np.column_stack(
        [rng.uniform(lat_min, lat_max, spec.n_bumps), rng.uniform(lon_min, lon_max, spec.n_bumps)]
    )
    field = SyntheticField(
        centers=centers,
        amplitudes=rng.uniform(*spec.amplitude_range, spec.n_bumps),
        widths=rng.uniform(*spec.width_range, spec.n_bumps),
        ground_encoder=rng.standard_normal((spec.feature_dim, 2)),
        overhead_encoder=rng.standard_normal((spec.feature_dim, 2)),
        overhead_cell=spec.overhead_cell,
    )

    lats = rng.uniform(lat_min, lat_max, spec.n_samples)
    lons = rng.uniform(lon_min, lon_max, spec.n_samples)
    values = field.value(lats, lons)
    counts = rng.integers(spec.ratings_range[0], spec.ratings_range[1] + 1, spec.n_samples)
    histograms = synthesize_ratings(values, counts, spec.rating_noise(values), rng)

    shape = (spec.n_samples, spec.feature_dim)
    ground = field.ground_encoding(lats, lons) + spec.feature_noise * rng.standard_normal(shape)
    overhead = field.overhead_encoding(lats, lons) + spec.feature_noise * rng.standard_normal(shape)

    width = len(str(spec.n_samples - 1))
    records = tuple(
        ManifestRecord(
            id=f"s{i:0{width}d}",
            lat=float(lats[i]),
            lon=float(lons[i]),
            ratings=histograms[i],
            ground_features=ground[i],
            overhead_features=overhead[i],
        )
        for i in range(spec.n_samples)
    )
    log.info(
        f"[synth] generated {spec.n_samples} samples over {spec.n_bumps} bumps "
        f"(seed {spec.seed}, field {values.min():.2f}..{values.max():.2f})"
    )
    return Manifest(records), field


def spec_to_dict(spec: SynthSpec) -> Dict[str, Any]:
    return {key: list(value) if isinstance(value, tuple) else value for key, value in asdict(spec).items()}
