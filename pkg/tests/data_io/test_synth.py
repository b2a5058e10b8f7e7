import numpy as np
import pytest

from scenicness.data_io import (
    SynthSpec,
    SyntheticField,
    save_manifest,
    spec_to_dict,
    synth_generate,
    synthesize_ratings,
)
from scenicness.errors import ConfigError, CorruptModelFileError
from scenicness.ratings_core import mean_rating

SMALL = SynthSpec(n_samples=60, seed=11)


class TestSynthSpec:
    @pytest.mark.parametrize(
        "options",
        [
            {"bbox": (1.0, 0.0, 0.0, 1.0)},
            {"bbox": (0.0, 0.0, 1.0)},
            {"n_samples": 0},
            {"ratings_range": (0, 5)},
            {"tau": -0.1},
            {"width_range": (0.0, 0.1)},
            {"overhead_cell": 0.0},
        ],
    )
    def test_invalid(self, options):
        """Inconsistent generator settings are config errors."""
        with pytest.raises(ConfigError):
            SynthSpec(**options)

    def test_load_yaml(self, tmp_path):
        """Specs load from YAML with lists for ranges."""
        path = tmp_path / "spec.yaml"
        path.write_text("n_samples: 12\nbbox: [0, 0, 1, 1]\nheteroscedastic: true\n", encoding="utf-8")
        spec = SynthSpec.load(path)
        assert spec.n_samples == 12 and spec.bbox == (0.0, 0.0, 1.0, 1.0) and spec.heteroscedastic

    def test_unknown_key(self):
        """Typos in spec files are reported."""
        with pytest.raises(ConfigError):
            SynthSpec.from_dict({"n_sample": 3})

    def test_dict_round_trip(self):
        """spec_to_dict feeds back into from_dict."""
        assert SynthSpec.from_dict(spec_to_dict(SMALL)) == SMALL

    def test_heteroscedastic_noise(self):
        """Noise peaks at mid-scale and falls to tau_min at the extremes."""
        spec = SynthSpec(heteroscedastic=True, tau_min=0.3, tau_max=1.5)
        np.testing.assert_allclose(spec.rating_noise(np.array([1.0, 5.5, 10.0])), [0.3, 1.5, 0.3])


class TestSynthGenerate:
    def test_deterministic(self, tmp_path):
        """The same spec writes byte-identical manifests and fields."""
        for run in ("a", "b"):
            manifest, field = synth_generate(SMALL)
            save_manifest(manifest, tmp_path / f"{run}.csv")
            field.save(tmp_path / f"{run}.json")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_records_follow_spec(self):
        """Positions, rating counts and feature widths honor the SynthSpec."""
        manifest, _ = synth_generate(SMALL)
        assert len(manifest) == 60
        lat_min, lon_min, lat_max, lon_max = SMALL.bbox
        for record in manifest:
            assert lat_min <= record.lat <= lat_max and lon_min <= record.lon <= lon_max
            assert 5 <= record.ratings.total <= 15
            assert record.ground_features.shape == record.overhead_features.shape == (8,)

    def test_noise_free_ratings(self):
        """With tau 0 every rating is the rounded field value."""
        spec = SynthSpec(n_samples=40, tau=0.0, seed=5)
        manifest, field = synth_generate(spec)
        for record in manifest:
            expected = int(np.floor(field.value(record.lat, record.lon) + 0.5))
            assert set(record.ratings.ratings()) == {expected}

    def test_constant_field(self):
        """Without bumps the field sits at mid-scale everywhere."""
        manifest, field = synth_generate(SynthSpec(n_bumps=0, n_samples=10, tau=0.0))
        assert field.value(51.2, -0.7) == pytest.approx(5.5)
        assert {mean_rating(r.ratings) for r in manifest} == {6.0}

    def test_features_encode_the_field(self):
        """Overhead features are close to the noise-free encoding of the local mean."""
        manifest, field = synth_generate(SMALL)
        record = manifest.records[0]
        np.testing.assert_allclose(
            record.overhead_features, field.features_at(record.lat, record.lon), atol=0.3
        )


class TestSyntheticField:
    def test_save_load(self, tmp_path):
        """A saved field evaluates identically after loading."""
        _, field = synth_generate(SMALL)
        loaded = SyntheticField.load(field.save(tmp_path / "field.json"))
        lats, lons = np.linspace(51.0, 51.5, 7), np.linspace(-1.0, -0.5, 7)
        np.testing.assert_array_equal(loaded.value(lats, lons), field.value(lats, lons))
        np.testing.assert_array_equal(loaded.features_at(51.1, -0.9), field.features_at(51.1, -0.9))

    def test_value_range(self):
        """Field values stay within the rating scale."""
        _, field = synth_generate(SynthSpec(amplitude_range=(-20.0, 20.0), seed=2))
        grid = np.random.default_rng(0).uniform([51.0, -1.0], [51.5, -0.5], (500, 2))
        values = field.value(grid[:, 0], grid[:, 1])
        assert values.min() >= 1.0 and values.max() <= 10.0

    @pytest.mark.parametrize("content", ["{not json", '{"bumps": [{"lat": 1}]}'])
    def test_corrupt_file(self, tmp_path, content):
        """Unreadable field files are reported as corrupt."""
        path = tmp_path / "field.json"
        path.write_text(content, encoding="utf-8")
        with pytest.raises(CorruptModelFileError):
            SyntheticField.load(path)


class TestSynthesizeRatings:
    def test_clipped_to_scale(self):
        """Draws far outside 1..10 are clipped to the ends of the scale."""
        rng = np.random.default_rng(0)
        low, high = synthesize_ratings(np.array([-5.0, 20.0]), np.array([4, 3]), np.zeros(2), rng)
        assert low.ratings() == [1, 1, 1, 1]
        assert high.ratings() == [10, 10, 10]
