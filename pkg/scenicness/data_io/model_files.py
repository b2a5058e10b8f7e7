"""Versioned JSON files for scorer and cross-view hybrid models."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict

import numpy as np
from packaging.version import InvalidVersion, Version

from helper_lib.mlp import FeedForwardNetwork
from scenicness.errors import (
    ConfigError,
    CorruptModelFileError,
    InvalidInputError,
    ModelDimensionError,
    ModelFileError,
    ModelVersionError,
)
from scenicness.featurize import FeaturizerSpec
from scenicness.geomap import CvhModel, OverheadInput
from scenicness.scorer import ScorerModel
from scenicness.scorer.model import ACTIVATION

log = logging.getLogger("scenicness.data_io")

MODEL_FORMAT_VERSION = "1.0"
SCORER_KIND = "scorer"
CVH_KIND = "cvh"


def _network_dict(network: FeedForwardNetwork) -> Dict[str, Any]:
    return {
        "layer_dims": network.layer_dims,
        "activation": ACTIVATION,
        "weights": [w.tolist() for w in network.weights],
        "biases": [b.tolist() for b in network.biases],
    }


def model_to_dict(model: ScorerModel | CvhModel) -> Dict[str, Any]:
    if isinstance(model, CvhModel):
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "kind": CVH_KIND,
            **_network_dict(model.network),
            "k": model.k,
            "sigma": model.sigma,
            "overhead_input": model.overhead_input.value,
            "overhead_scorer": None
            if model.overhead_scorer is None
            else model_to_dict(model.overhead_scorer),
        }
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "kind": SCORER_KIND,
        **_network_dict(model.network),
        "featurizer": model.featurizer_spec.to_dict(),
    }


def save_model(model: ScorerModel | CvhModel, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = model_to_dict(model)
    path.write_text(json.dumps(data) + "\n", encoding="utf-8")
    log.info(f"[data_io] saved {data['kind']} model {model.layer_dims} to {path}")
    return path


def _check_version(data: Dict[str, Any]) -> None:
    raw = data.get("format_version")
    if raw is None:
        raise CorruptModelFileError("[data_io] model file has no format_version")
    try:
        found = Version(str(raw))
    except InvalidVersion as exc:
        raise ModelVersionError(f"[data_io] unreadable model format version {raw!r}") from exc
    current = Version(MODEL_FORMAT_VERSION)
    if found.major != current.major or found > current:
        raise ModelVersionError(
            f"[data_io] model format {found} is not supported (this build reads {current})"
        )


def _network(data: Dict[str, Any]) -> FeedForwardNetwork:
    try:
        dims = [int(d) for d in data["layer_dims"]]
        weights = [np.array(w, dtype=float) for w in data["weights"]]
        biases = [np.array(b, dtype=float) for b in data["biases"]]
    except KeyError as exc:
        raise CorruptModelFileError(f"[data_io] model file lacks {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise CorruptModelFileError(f"[data_io] malformed parameter arrays: {exc}") from exc
    if data.get("activation", ACTIVATION) != ACTIVATION:
        raise CorruptModelFileError(f"[data_io] unsupported activation {data['activation']!r}")
    if len(weights) != len(dims) - 1 or len(biases) != len(dims) - 1:
        raise ModelDimensionError(
            f"[data_io] {len(dims)} layer dims need {len(dims) - 1} weight matrices, "
            f"got {len(weights)} weights and {len(biases)} biases"
        )
    for i, (w, b) in enumerate(zip(weights, biases)):
        if w.shape != (dims[i], dims[i + 1]) or b.shape != (dims[i + 1],):
            raise ModelDimensionError(
                f"[data_io] layer {i}: expected weights {(dims[i], dims[i + 1])} and "
                f"biases {(dims[i + 1],)}, got {w.shape} and {b.shape}"
            )
    try:
        return FeedForwardNetwork(tuple(weights), tuple(biases))
    except ValueError as exc:
        raise CorruptModelFileError(f"[data_io] invalid parameters: {exc}") from exc


def model_from_dict(data: Dict[str, Any]) -> ScorerModel | CvhModel:
    if not isinstance(data, dict):
        raise CorruptModelFileError("[data_io] model file must hold a JSON object")
    _check_version(data)
    kind = data.get("kind")
    network = _network(data)
    try:
        if kind == SCORER_KIND:
            spec = FeaturizerSpec.from_dict(data.get("featurizer") or {})
            if spec.output_dim != network.input_dim:
                raise ModelDimensionError(
                    f"[data_io] featurizer produces {spec.output_dim} features, "
                    f"network expects {network.input_dim}"
                )
            return ScorerModel(network, spec)
        if kind == CVH_KIND:
            scorer = data.get("overhead_scorer")
            return CvhModel(
                network=network,
                k=int(data["k"]),
                sigma=float(data["sigma"]),
                overhead_input=OverheadInput(data["overhead_input"]),
                overhead_scorer=None if scorer is None else model_from_dict(scorer),
            )
    except KeyError as exc:
        raise CorruptModelFileError(f"[data_io] model file lacks {exc}") from exc
    except ModelFileError:
        raise
    except (ConfigError, InvalidInputError, ValueError) as exc:
        raise ModelDimensionError(f"[data_io] inconsistent model file: {exc}") from exc
    raise CorruptModelFileError(f"[data_io] unknown model kind {kind!r}")


def load_model(path: str | Path) -> ScorerModel | CvhModel:
    """Read a model file; nothing is returned unless the whole file validates."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptModelFileError(f"[data_io] {path} is not valid JSON: {exc}") from exc
    model = model_from_dict(data)
    log.info(f"[data_io] loaded {data['kind']} model {model.layer_dims} from {path}")
    return model
