"""Manifests, synthetic datasets, model files and reports."""

from scenicness.data_io.manifest import (
    COLUMNS,
    Manifest,
    ManifestRecord,
    load_manifest,
    manifest_from_samples,
    resolve_samples,
    save_manifest,
)
from scenicness.data_io.model_files import (
    MODEL_FORMAT_VERSION,
    load_model,
    model_from_dict,
    model_to_dict,
    save_model,
)
from scenicness.data_io.reports import load_options, save_report
from scenicness.data_io.synth import (
    SynthSpec,
    SyntheticField,
    spec_to_dict,
    synth_generate,
    synthesize_ratings,
)

__all__ = [
    "COLUMNS",
    "MODEL_FORMAT_VERSION",
    "Manifest",
    "ManifestRecord",
    "SynthSpec",
    "SyntheticField",
    "load_manifest",
    "load_model",
    "load_options",
    "manifest_from_samples",
    "model_from_dict",
    "model_to_dict",
    "resolve_samples",
    "save_manifest",
    "save_model",
    "save_report",
    "spec_to_dict",
    "synth_generate",
    "synthesize_ratings",
]
