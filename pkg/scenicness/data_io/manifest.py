"""Dataset manifests: one record per geotagged, rated ground image."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, Sequence

import numpy as np

from scenicness.errors import (
    DuplicateIdError,
    InvalidInputError,
    ManifestError,
    ManifestParseError,
    MissingFieldError,
    RatingRangeError,
)
from scenicness.featurize import Featurizer, ImageGrid
from scenicness.geomap import GeoSample
from scenicness.ratings_core import NUM_LEVELS, RatingHistogram

log = logging.getLogger("scenicness.data_io")

MANIFEST_FORMAT_VERSION = "1.0"
COLUMNS = (
    "id",
    "lat",
    "lon",
    "ratings",
    "ground_image",
    "overhead_image",
    "ground_features",
    "overhead_features",
)
LIST_SEPARATOR = ";"


def _same_vector(a: np.ndarray | None, b: np.ndarray | None) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return a.shape == b.shape and bool(np.array_equal(a, b))


@dataclass(frozen=True, eq=False)
class ManifestRecord:
    id: str
    lat: float
    lon: float
    ratings: RatingHistogram
    ground_image: str | None = None
    overhead_image: str | None = None
    ground_features: np.ndarray | None = None
    overhead_features: np.ndarray | None = None

    def __eq__(self, other) -> bool:
        if not isinstance(other, ManifestRecord):
            return NotImplemented
        return (
            (self.id, self.lat, self.lon, self.ratings, self.ground_image, self.overhead_image)
            == (
                other.id,
                other.lat,
                other.lon,
                other.ratings,
                other.ground_image,
                other.overhead_image,
            )
            and _same_vector(self.ground_features, other.ground_features)
            and _same_vector(self.overhead_features, other.overhead_features)
        )

    __hash__ = None


@dataclass(frozen=True)
class Manifest:
    records: tuple[ManifestRecord, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        validate_records(self.records)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def ids(self) -> list[str]:
        return [r.id for r in self.records]

    def histograms(self) -> list[RatingHistogram]:
        return [r.ratings for r in self.records]


def validate_records(records: Sequence[ManifestRecord]) -> None:
    """Dataset-level checks: unique ids, a ground source, consistent feature widths."""
    seen: set[str] = set()
    widths: dict[str, set[int]] = {"ground_features": set(), "overhead_features": set()}
    for record in records:
        if record.id in seen:
            raise DuplicateIdError(f"[data_io] duplicate record id {record.id!r}")
        seen.add(record.id)
        if record.ground_image is None and record.ground_features is None:
            raise MissingFieldError(
                f"[data_io] record {record.id!r} has neither ground_image nor ground_features"
            )
        if record.ratings.total < 1:
            raise MissingFieldError(f"[data_io] record {record.id!r} has no ratings")
        for name, bucket in widths.items():
            vector = getattr(record, name)
            if vector is not None:
                bucket.add(vector.size)
    for name, bucket in widths.items():
        if len(bucket) > 1:
            raise ManifestError(f"[data_io] inconsistent {name} widths: {sorted(bucket)}")


def _histogram(record_id: str, ratings: Iterable[Any], line: int | None) -> RatingHistogram:
    values = []
    for raw in ratings:
        try:
            value = int(str(raw).strip())
        except ValueError as exc:
            raise ManifestParseError(
                f"record {record_id!r}: rating {raw!r} is not an integer", line
            ) from exc
        if not 1 <= value <= NUM_LEVELS:
            raise RatingRangeError(
                f"[data_io] record {record_id!r}: rating {value} outside 1..{NUM_LEVELS}"
            )
        values.append(value)
    if not values:
        raise MissingFieldError(f"[data_io] record {record_id!r} has no ratings")
    return RatingHistogram.from_ratings(values)


def _vector(record_id: str, name: str, values, line: int | None) -> np.ndarray | None:
    if values is None or values == "" or values == []:
        return None
    if isinstance(values, str):
        values = values.split(LIST_SEPARATOR)
    try:
        vector = np.array([float(v) for v in values])
    except (TypeError, ValueError) as exc:
        raise ManifestParseError(f"record {record_id!r}: {name} is not numeric", line) from exc
    if not np.all(np.isfinite(vector)):
        raise ManifestParseError(f"record {record_id!r}: {name} has non-finite values", line)
    return vector


def _coordinate(record_id: str, name: str, value, line: int | None) -> float:
    if value is None or str(value).strip() == "":
        raise MissingFieldError(f"[data_io] record {record_id!r} has no {name}")
    try:
        return float(value)
    except (TypeError, ValueError) as exc:
        raise ManifestParseError(f"record {record_id!r}: {name} {value!r} is not a number", line) from exc


def _record(fields: Dict[str, Any], line: int | None) -> ManifestRecord:
    record_id = str(fields.get("id") or "").strip()
    if not record_id:
        raise MissingFieldError(f"[data_io] record on line {line} has no id")
    lat = _coordinate(record_id, "lat", fields.get("lat"), line)
    lon = _coordinate(record_id, "lon", fields.get("lon"), line)
    if not -90.0 <= lat <= 90.0 or not -180.0 <= lon <= 180.0:
        raise ManifestError(f"[data_io] record {record_id!r}: ({lat}, {lon}) is not a valid position")

    ratings = fields.get("ratings")
    if isinstance(ratings, str):
        ratings = [r for r in ratings.split(LIST_SEPARATOR) if r.strip()]
    if ratings is None and fields.get("counts") is not None:
        try:
            hist = RatingHistogram(tuple(int(c) for c in fields["counts"]))
        except (TypeError, ValueError) as exc:
            raise ManifestParseError(f"record {record_id!r}: invalid counts", line) from exc
        if hist.total < 1:
            raise MissingFieldError(f"[data_io] record {record_id!r} has no ratings")
    else:
        hist = _histogram(record_id, ratings or [], line)

    return ManifestRecord(
        id=record_id,
        lat=lat,
        lon=lon,
        ratings=hist,
        ground_image=fields.get("ground_image") or None,
        overhead_image=fields.get("overhead_image") or None,
        ground_features=_vector(record_id, "ground_features", fields.get("ground_features"), line),
        overhead_features=_vector(
            record_id, "overhead_features", fields.get("overhead_features"), line
        ),
    )


def _load_csv(text: str) -> list[ManifestRecord]:
    rows = csv.reader(text.splitlines())
    header = next(rows, None)
    if header is None or tuple(h.strip() for h in header) != COLUMNS:
        raise ManifestParseError(f"expected header {','.join(COLUMNS)}", 1)
    records = []
    for line, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != len(COLUMNS):
            raise ManifestParseError(f"expected {len(COLUMNS)} columns, got {len(row)}", line)
        records.append(_record(dict(zip(COLUMNS, row)), line))
    return records


def _load_json(text: str) -> list[ManifestRecord]:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestParseError(exc.msg, exc.lineno) from exc
    if not isinstance(document, dict) or not isinstance(document.get("records"), list):
        raise ManifestParseError("JSON manifest needs a 'records' list")
    if "format_version" not in document:
        raise MissingFieldError("[data_io] JSON manifest has no format_version")
    records = []
    for record in document["records"]:
        if not isinstance(record, dict):
            raise ManifestParseError("every JSON manifest record must be an object")
        records.append(_record(record, None))
    return records


def load_manifest(path: str | Path) -> Manifest:
    """Read a CSV manifest, or a JSON one when the suffix is ``.json``."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    records = _load_json(text) if path.suffix.lower() == ".json" else _load_csv(text)
    manifest = Manifest(tuple(records))
    log.info(f"[data_io] loaded {len(manifest)} records from {path}")
    return manifest


def _join(vector: np.ndarray | None) -> str:
    if vector is None:
        return ""
    return LIST_SEPARATOR.join(repr(float(v)) for v in vector)


def save_manifest(manifest: Manifest, path: str | Path) -> Path:
    """Write ``manifest`` as CSV (or JSON for a ``.json`` suffix); floats use ``repr``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix.lower() == ".json":
        document = {
            "format_version": MANIFEST_FORMAT_VERSION,
            "records": [
                {
                    "id": r.id,
                    "lat": r.lat,
                    "lon": r.lon,
                    "ratings": r.ratings.ratings(),
                    "ground_image": r.ground_image,
                    "overhead_image": r.overhead_image,
                    "ground_features": None if r.ground_features is None else r.ground_features.tolist(),
                    "overhead_features": None
                    if r.overhead_features is None
                    else r.overhead_features.tolist(),
                }
                for r in manifest
            ],
        }
        path.write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")
        return path

    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(COLUMNS)
        for r in manifest:
            writer.writerow(
                [
                    r.id,
                    repr(float(r.lat)),
                    repr(float(r.lon)),
                    LIST_SEPARATOR.join(str(v) for v in r.ratings.ratings()),
                    r.ground_image or "",
                    r.overhead_image or "",
                    _join(r.ground_features),
                    _join(r.overhead_features),
                ]
            )
    log.info(f"[data_io] wrote {len(manifest)} records to {path}")
    return path


def resolve_samples(
    manifest: Manifest,
    featurizer: Featurizer | None = None,
    base_dir: str | Path = ".",
    overhead_featurizer: Featurizer | None = None,
) -> list[GeoSample]:
    """Turn records into samples, featurizing image paths when no features are given.

    Image paths are relative to ``base_dir``; overhead images use
    ``overhead_featurizer`` when given, else ``featurizer``.
    """
    base_dir = Path(base_dir)
    overhead_featurizer = overhead_featurizer or featurizer

    def features(record, vector, image, run, view) -> np.ndarray | None:
        if vector is not None:
            return vector
        if image is None:
            return None
        if run is None:
            raise InvalidInputError(
                f"[data_io] record {record.id!r} needs a featurizer for its {view} image"
            )
        return run(ImageGrid.from_png(base_dir / image))

    return [
        GeoSample(
            id=r.id,
            lat=r.lat,
            lon=r.lon,
            ratings=r.ratings,
            ground_features=features(r, r.ground_features, r.ground_image, featurizer, "ground"),
            overhead_features=features(
                r, r.overhead_features, r.overhead_image, overhead_featurizer, "overhead"
            ),
        )
        for r in manifest
    ]


def manifest_from_samples(samples: Sequence[GeoSample]) -> Manifest:
    """Feature-only manifest of already-featurized samples."""
    return Manifest(
        tuple(
            ManifestRecord(
                id=s.id,
                lat=s.lat,
                lon=s.lon,
                ratings=s.ratings,
                ground_features=np.array(s.ground_features),
                overhead_features=None
                if s.overhead_features is None
                else np.array(s.overhead_features),
            )
            for s in samples
        )
    )
