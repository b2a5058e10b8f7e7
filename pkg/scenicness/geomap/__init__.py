"""Geospatial scenicness: 1NN and LWA baselines, the cross-view hybrid and map rasters."""

from scenicness.geomap.cvh import (
    CVH_HIDDEN_DIMS,
    CvhModel,
    CvhTrainConfig,
    OverheadInput,
    assemble_cvh_input,
    build_cvh_training_set,
    cvh_predict,
    fit_cross_view,
    train_cvh,
    train_overhead_scorer,
)
from scenicness.geomap.index import (
    DEFAULT_SIGMA,
    GeoSample,
    GroundIndex,
    NeighborContext,
    kernel_weights,
    lwa_predict,
    nn_predict,
)
from scenicness.geomap.predictors import (
    CrossViewHybridPredictor,
    LocallyWeightedPredictor,
    MappingReport,
    MapPredictor,
    NearestNeighborPredictor,
    OverheadPredictor,
    evaluate_mapping,
)
from scenicness.geomap.raster import (
    MapRaster,
    MapSpec,
    OverheadSource,
    RecordOverheadSource,
    rasterize,
)

__all__ = [
    "CVH_HIDDEN_DIMS",
    "DEFAULT_SIGMA",
    "CrossViewHybridPredictor",
    "CvhModel",
    "CvhTrainConfig",
    "GeoSample",
    "GroundIndex",
    "LocallyWeightedPredictor",
    "MapPredictor",
    "MapRaster",
    "MapSpec",
    "MappingReport",
    "NearestNeighborPredictor",
    "NeighborContext",
    "OverheadInput",
    "OverheadPredictor",
    "OverheadSource",
    "RecordOverheadSource",
    "assemble_cvh_input",
    "build_cvh_training_set",
    "cvh_predict",
    "evaluate_mapping",
    "fit_cross_view",
    "kernel_weights",
    "lwa_predict",
    "nn_predict",
    "rasterize",
    "train_cvh",
    "train_overhead_scorer",
]
