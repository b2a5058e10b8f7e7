"""Pluggable image featurizers."""

from scenicness.featurize.featurizer import (
    COLOR_NAMES,
    NUM_COLOR_NAMES,
    ColorNameTable,
    Featurizer,
    FeaturizerKind,
    FeaturizerSpec,
    as_feature_vector,
    build_featurizer,
    color_name_of,
    featurize,
)
from scenicness.featurize.image import MIN_IMAGE_SIZE, ImageGrid

__all__ = [
    "COLOR_NAMES",
    "MIN_IMAGE_SIZE",
    "NUM_COLOR_NAMES",
    "ColorNameTable",
    "Featurizer",
    "FeaturizerKind",
    "FeaturizerSpec",
    "ImageGrid",
    "as_feature_vector",
    "build_featurizer",
    "color_name_of",
    "featurize",
]
