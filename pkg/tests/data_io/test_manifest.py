import json

import numpy as np
import pytest

from scenicness.data_io import (
    COLUMNS,
    Manifest,
    ManifestRecord,
    load_manifest,
    manifest_from_samples,
    resolve_samples,
    save_manifest,
)
from scenicness.errors import (
    DuplicateIdError,
    InvalidInputError,
    ManifestError,
    ManifestParseError,
    MissingFieldError,
    RatingRangeError,
)
from scenicness.featurize import FeaturizerSpec, ImageGrid, build_featurizer
from scenicness.ratings_core import RatingHistogram

HEADER = ",".join(COLUMNS)

# -----------------------------------------------------------------------------
# Helpers
# -----------------------------------------------------------------------------


def _make_record(record_id="a", ratings=(5, 6, 6), ground=(0.1, 0.2), overhead=None, **kwargs):
    return ManifestRecord(
        id=record_id,
        lat=kwargs.pop("lat", 51.25),
        lon=kwargs.pop("lon", -0.75),
        ratings=RatingHistogram.from_ratings(list(ratings)),
        ground_features=None if ground is None else np.array(ground),
        overhead_features=None if overhead is None else np.array(overhead),
        **kwargs,
    )


def _make_manifest():
    return Manifest(
        (
            _make_record("a", overhead=(1.0, 2.0, 3.0)),
            _make_record("b", ratings=(1, 10, 10), ground=(0.1 + 0.2, 1e-17), overhead=(0.0, -1.5, 2.25)),
        )
    )


def _write_csv(tmp_path, *rows):
    path = tmp_path / "manifest.csv"
    path.write_text("\n".join([HEADER, *rows]) + "\n", encoding="utf-8")
    return path


# -----------------------------------------------------------------------------
# Round trips
# -----------------------------------------------------------------------------


class TestRoundTrip:
    @pytest.mark.parametrize("name", ["manifest.csv", "manifest.json"])
    def test_save_then_load(self, tmp_path, name):
        """Saving and loading returns an equal manifest, floats included."""
        manifest = _make_manifest()
        loaded = load_manifest(save_manifest(manifest, tmp_path / name))
        assert loaded == manifest
        np.testing.assert_array_equal(loaded.records[1].ground_features, [0.1 + 0.2, 1e-17])

    def test_ratings_are_a_multiset(self, tmp_path):
        """Ratings are written as a ';'-separated list in level order."""
        save_manifest(Manifest((_make_record("a", ratings=(7, 3, 7)),)), tmp_path / "m.csv")
        line = (tmp_path / "m.csv").read_text(encoding="utf-8").splitlines()[1]
        assert ",3;7;7," in line

    def test_image_paths(self, tmp_path):
        """Records may point at images instead of carrying features."""
        manifest = Manifest((_make_record("a", ground=None, ground_image="img/a.png"),))
        loaded = load_manifest(save_manifest(manifest, tmp_path / "m.csv"))
        assert loaded.records[0].ground_image == "img/a.png"
        assert loaded.records[0].ground_features is None

    def test_json_counts(self, tmp_path):
        """JSON records may give rating counts instead of a rating list."""
        path = tmp_path / "m.json"
        record = {"id": "x", "lat": 0, "lon": 0, "counts": [0, 0, 0, 0, 2, 1, 0, 0, 0, 0], "ground_features": [1]}
        path.write_text(json.dumps({"format_version": "1.0", "records": [record]}), encoding="utf-8")
        assert load_manifest(path).records[0].ratings.ratings() == [5, 5, 6]


# -----------------------------------------------------------------------------
# Validation
# -----------------------------------------------------------------------------


class TestValidation:
    def test_bad_header(self, tmp_path):
        """The header must match the documented columns."""
        path = tmp_path / "m.csv"
        path.write_text("id,lat,lon\n", encoding="utf-8")
        with pytest.raises(ManifestParseError) as excinfo:
            load_manifest(path)
        assert excinfo.value.line == 1

    def test_duplicate_id(self, tmp_path):
        """Ids must be unique."""
        path = _write_csv(tmp_path, "a,0,0,5,,,1,", "a,1,1,6,,,2,")
        with pytest.raises(DuplicateIdError):
            load_manifest(path)

    @pytest.mark.parametrize("ratings", ["0", "11", "5;12"])
    def test_rating_out_of_range(self, tmp_path, ratings):
        """Ratings live in 1..10."""
        with pytest.raises(RatingRangeError):
            load_manifest(_write_csv(tmp_path, f"a,0,0,{ratings},,,1,"))

    def test_non_integer_rating(self, tmp_path):
        """A rating that is not an integer is a parse error on its line."""
        with pytest.raises(ManifestParseError) as excinfo:
            load_manifest(_write_csv(tmp_path, "a,0,0,5,,,1,", "b,0,0,5.5,,,1,"))
        assert excinfo.value.line == 3

    @pytest.mark.parametrize(
        "row",
        ["a,0,0,,,,1,", "a,,0,5,,,1,", "a,0,0,5,,,,", ",0,0,5,,,1,"],
        ids=["no-ratings", "no-lat", "no-ground", "no-id"],
    )
    def test_missing_field(self, tmp_path, row):
        """Required fields must be present."""
        with pytest.raises(MissingFieldError):
            load_manifest(_write_csv(tmp_path, row))

    def test_wrong_column_count(self, tmp_path):
        """Rows must have every column."""
        with pytest.raises(ManifestParseError) as excinfo:
            load_manifest(_write_csv(tmp_path, "a,0,0,5"))
        assert excinfo.value.line == 2

    def test_inconsistent_feature_widths(self, tmp_path):
        """All ground feature vectors share one width."""
        with pytest.raises(ManifestError):
            load_manifest(_write_csv(tmp_path, "a,0,0,5,,,1;2,", "b,0,0,5,,,1,"))

    def test_invalid_position(self, tmp_path):
        """Latitudes beyond the poles are rejected."""
        with pytest.raises(ManifestError):
            load_manifest(_write_csv(tmp_path, "a,95,0,5,,,1,"))

    def test_json_without_version(self, tmp_path):
        """JSON manifests must say which format they use."""
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"records": []}), encoding="utf-8")
        with pytest.raises(MissingFieldError):
            load_manifest(path)

    def test_malformed_json(self, tmp_path):
        """Invalid JSON reports the failing line."""
        path = tmp_path / "m.json"
        path.write_text('{\n  "records": [\n', encoding="utf-8")
        with pytest.raises(ManifestParseError) as excinfo:
            load_manifest(path)
        assert excinfo.value.line is not None

    def test_missing_file(self, tmp_path):
        """I/O failures surface as OSError."""
        with pytest.raises(OSError):
            load_manifest(tmp_path / "absent.csv")


# -----------------------------------------------------------------------------
# Samples
# -----------------------------------------------------------------------------


class TestResolveSamples:
    def test_features_pass_through(self):
        """Records with features become samples unchanged."""
        samples = resolve_samples(_make_manifest())
        assert [s.id for s in samples] == ["a", "b"]
        np.testing.assert_array_equal(samples[0].overhead_features, [1.0, 2.0, 3.0])

    def test_featurizes_images(self, tmp_path):
        """Image paths are read relative to the base directory and featurized."""
        ImageGrid.constant(8, 8, (255, 0, 0)).save_png(tmp_path / "img" / "a.png")
        manifest = Manifest((_make_record("a", ground=None, ground_image="img/a.png"),))
        featurizer = build_featurizer(FeaturizerSpec())
        (sample,) = resolve_samples(manifest, featurizer, tmp_path)
        assert sample.ground_features.shape == (11,)
        assert sample.ground_features[8] == 1.0

    def test_image_without_featurizer(self):
        """Images cannot be used without a featurizer."""
        manifest = Manifest((_make_record("a", ground=None, ground_image="img/a.png"),))
        with pytest.raises(InvalidInputError):
            resolve_samples(manifest)

    def test_back_to_manifest(self):
        """Samples convert back into an equal feature-only manifest."""
        manifest = _make_manifest()
        assert manifest_from_samples(resolve_samples(manifest)) == manifest
