"""``scenicness`` command line: synth, train, train-cvh, eval, saliency, crop, map, stats."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Sequence

from scenicness.crop_opt import BoConfig, optimal_crop, save_annotated_png
from scenicness.data_io import (
    SynthSpec,
    SyntheticField,
    load_manifest,
    load_model,
    load_options,
    resolve_samples,
    save_manifest,
    save_model,
    save_report,
    spec_to_dict,
    synth_generate,
)
from scenicness.errors import ConfigError, DivergedError
from scenicness.featurize import (
    FeaturizerKind,
    FeaturizerSpec,
    ImageGrid,
    build_featurizer,
)
from scenicness.geomap import (
    CrossViewHybridPredictor,
    CvhModel,
    CvhTrainConfig,
    GroundIndex,
    LocallyWeightedPredictor,
    MapSpec,
    NearestNeighborPredictor,
    OverheadPredictor,
    RecordOverheadSource,
    fit_cross_view,
    rasterize,
)
from scenicness.metrics import EvalConfig, evaluate
from scenicness.ratings_core import entropy_profile, partition_counts
from scenicness.saliency import SaliencyConfig, occlusion_saliency, save_mask_png
from scenicness.scorer import LossKind, ScorerModel, TrainConfig, train

log = logging.getLogger("scenicness.cli")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DIVERGED = 4


class UsageError(ConfigError):
    """Bad flag combination or an output path outside ``--out-dir``."""


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def output_paths(args: argparse.Namespace, defaults: Sequence[str]) -> list[Path]:
    """Resolve the comma-separated ``--out`` list inside ``--out-dir``.

    Missing entries fall back to ``defaults``; anything resolving outside the
    output directory is rejected.
    """
    names = [n.strip() for n in (args.out or "").split(",") if n.strip()]
    if len(names) > len(defaults):
        raise UsageError(f"[cli] --out takes at most {len(defaults)} paths, got {len(names)}")
    names += list(defaults[len(names) :])
    out_dir = Path(args.out_dir).resolve()
    paths = []
    for name in names:
        target = (out_dir / name).resolve()
        try:
            target.relative_to(out_dir)
        except ValueError:
            raise UsageError(f"[cli] output {name} escapes --out-dir {out_dir}") from None
        paths.append(target)
    return paths


def require_seed(args: argparse.Namespace) -> int:
    if args.seed is None:
        raise UsageError(f"[cli] {args.command} uses randomness; pass --seed")
    return args.seed


def load_scorer(path: str) -> ScorerModel:
    model = load_model(path)
    if not isinstance(model, ScorerModel):
        raise UsageError(f"[cli] {path} is not a scorer model")
    return model


def load_samples(path: str, model: ScorerModel | None = None):
    """Manifest samples, featurizing images with the model's featurizer when needed."""
    manifest = load_manifest(path)
    featurizer = None
    if model is not None and model.featurizer_spec.kind is not FeaturizerKind.PASSTHROUGH:
        featurizer = model.featurizer()
    return resolve_samples(manifest, featurizer, Path(path).parent)


def training_featurizer(manifest, requested: str) -> FeaturizerSpec:
    """Passthrough when the manifest carries ground features, else ``requested``."""
    widths = {r.ground_features.size for r in manifest if r.ground_features is not None}
    if widths:
        return FeaturizerSpec(kind=FeaturizerKind.PASSTHROUGH, dim=widths.pop())
    return FeaturizerSpec.parse(requested)


def hidden_dims(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v.strip())


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_synth(args: argparse.Namespace) -> None:
    spec_data = load_options(args.spec)
    spec_data["seed"] = require_seed(args)
    spec = SynthSpec.from_dict(spec_data)
    manifest_path, field_path = output_paths(args, ["manifest.csv", "field.json"])
    manifest, field = synth_generate(spec)
    save_manifest(manifest, manifest_path)
    save_report({**field.to_dict(), "spec": spec_to_dict(spec)}, field_path)


def cmd_train(args: argparse.Namespace) -> None:
    options = load_options(args.config) if args.config else {}
    flags = {
        "loss_kind": args.loss,
        "epochs": args.epochs,
        "learning_rate": args.lr,
        "batch_size": args.batch_size,
        "validation_fraction": args.validation_fraction,
        "hidden_dims": None if args.hidden is None else hidden_dims(args.hidden),
    }
    options.update({key: value for key, value in flags.items() if value is not None})
    options["seed"] = require_seed(args)
    config = TrainConfig.from_dict(options)
    model_path, report_path = output_paths(args, ["model.json", "train_report.json"])
    manifest = load_manifest(args.manifest)
    spec = training_featurizer(manifest, args.featurizer)
    featurizer = None if spec.kind is FeaturizerKind.PASSTHROUGH else build_featurizer(spec)
    samples = resolve_samples(manifest, featurizer, Path(args.manifest).parent)
    model, report = train([(s.ground_features, s.ratings) for s in samples], config, spec)
    save_model(model, model_path)
    save_report(report, report_path)


def cmd_train_cvh(args: argparse.Namespace) -> None:
    seed = require_seed(args)
    config = CvhTrainConfig(
        k=args.k,
        sigma=args.sigma,
        l2_weight=args.l2,
        overhead_input=args.overhead_input,
        learning_rate=args.lr,
        epochs=args.epochs,
        seed=seed,
    )
    overhead_config = TrainConfig(
        learning_rate=args.overhead_lr, epochs=args.overhead_epochs, seed=seed
    )
    model_path, report_path = output_paths(args, ["cvh.json", "cvh_report.json"])
    ground = load_scorer(args.model)
    samples = load_samples(args.manifest, ground)
    model, _, report = fit_cross_view(samples, ground, config, overhead_config, args.threads)
    save_model(model, model_path)
    save_report(report, report_path)


def cmd_eval(args: argparse.Namespace) -> None:
    config = EvalConfig(
        min_ratings=args.min_ratings,
        mc_samples=args.mc_samples,
        seed=require_seed(args),
        threads=args.threads,
    )
    (report_path,) = output_paths(args, ["report.json"])
    model = load_scorer(args.model)
    samples = load_samples(args.manifest, model)
    save_report(evaluate(model, samples, config), report_path)


def cmd_saliency(args: argparse.Namespace) -> None:
    config = SaliencyConfig(
        mask_cells=args.mask_cells,
        stride_cells=args.stride,
        lattice=args.lattice,
        difference=args.difference,
        threads=args.threads,
    )
    map_path, mask_path = output_paths(args, ["saliency.png", "mask.png"])
    model = load_scorer(args.model)
    image = ImageGrid.from_png(args.image)
    saliency = occlusion_saliency(
        model, model.featurizer(), image, config, Path(args.image).stem
    )
    saliency.save_png(map_path)
    save_mask_png(saliency, mask_path, args.threshold)


def cmd_crop(args: argparse.Namespace) -> None:
    config = BoConfig(
        init_samples=args.init_samples,
        iterations=args.bo_iters,
        w_min=args.w_min,
        h_min=args.h_min,
        seed=require_seed(args),
    )
    crop_path, annotated_path = output_paths(args, ["crop.json", "annotated.png"])
    model = load_scorer(args.model)
    image = ImageGrid.from_png(args.image)
    result = optimal_crop(model, model.featurizer(), image, config)
    save_report(result, crop_path)
    save_annotated_png(image, result.rect, annotated_path)


def cmd_map(args: argparse.Namespace) -> None:
    spec = MapSpec.parse(args.bbox, args.cell_deg)
    defaults = ["map.png", "map.json"] + (["map.csv"] if args.csv else [])
    paths = output_paths(args, defaults)
    if args.method == "cvh" and not args.cvh_model:
        raise UsageError("[cli] --method cvh needs --cvh-model")
    if args.method == "overhead" and not args.overhead_model:
        raise UsageError("[cli] --method overhead needs --overhead-model")

    ground = load_scorer(args.model)
    samples = load_samples(args.manifest, ground)
    index = GroundIndex.from_model(samples, ground, args.threads)
    if args.method == "1nn":
        predictor = NearestNeighborPredictor(index)
    elif args.method == "lwa":
        predictor = LocallyWeightedPredictor(index, args.sigma)
    elif args.method == "overhead":
        predictor = OverheadPredictor(load_scorer(args.overhead_model))
    else:
        cvh = load_model(args.cvh_model)
        if not isinstance(cvh, CvhModel):
            raise UsageError(f"[cli] {args.cvh_model} is not a CVH model")
        predictor = CrossViewHybridPredictor(cvh, index)

    source = None
    if predictor.requires_overhead:
        if args.field:
            source = SyntheticField.load(args.field)
        else:
            source = RecordOverheadSource(samples, spec.cell_deg / 2.0)
    raster = rasterize(predictor, spec, source, args.threads)
    raster.save_png(paths[0])
    raster.save_json(paths[1])
    if args.csv:
        raster.save_csv(paths[2])


def cmd_stats(args: argparse.Namespace) -> None:
    (stats_path,) = output_paths(args, ["stats.json"])
    histograms = load_manifest(args.manifest).histograms()
    counts = partition_counts(histograms)
    save_report(
        {
            "images": len(histograms),
            "ratings": int(sum(h.total for h in histograms)),
            "partitions": {p.value: n for p, n in counts.items()},
            "entropy_profile": [
                {"level": e.level, "images": e.images, "mean_entropy": e.mean_entropy}
                for e in entropy_profile(histograms)
            ],
        },
        stats_path,
    )


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="seed for every random draw")
    common.add_argument("--threads", type=int, default=1, help="worker pool size")
    common.add_argument("--out-dir", default=".", help="directory for every output file")
    common.add_argument("--out", default="", help="comma-separated output file names")
    common.add_argument("--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(prog="scenicness", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, handler: Callable, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(handler=handler)
        return p

    p = command("synth", cmd_synth, "generate a synthetic manifest and its true field")
    p.add_argument("--spec", required=True, help="YAML or JSON synthetic-data spec")

    p = command("train", cmd_train, "train a rating-distribution scorer")
    p.add_argument("--manifest", required=True)
    p.add_argument("--loss", choices=[k.value for k in LossKind], help="default multinomial")
    p.add_argument("--epochs", type=int, help="default 50")
    p.add_argument("--lr", type=float, help="default 1e-4")
    p.add_argument("--batch-size", type=int, help="default 40")
    p.add_argument("--validation-fraction", type=float, help="default 0.10")
    p.add_argument("--hidden", help="hidden widths, e.g. 32 or 64,32; empty for linear")
    p.add_argument("--featurizer", default="color_names", help="used when the manifest has images only")
    p.add_argument("--config", help="YAML or JSON file with further training options")

    p = command("train-cvh", cmd_train_cvh, "train the cross-view hybrid map model")
    p.add_argument("--manifest", required=True)
    p.add_argument("--model", required=True, help="ground scorer model file")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--sigma", type=float, default=0.01)
    p.add_argument("--l2", type=float, default=0.5)
    p.add_argument("--overhead-input", choices=["distribution", "features"], default="distribution")
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--overhead-lr", type=float, default=1e-3)
    p.add_argument("--overhead-epochs", type=int, default=50)

    p = command("eval", cmd_eval, "nDCG, K-S pass rate and AUC on a test manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--min-ratings", type=int, default=10)
    p.add_argument("--mc-samples", type=int, default=10_000)

    p = command("saliency", cmd_saliency, "occlusion saliency map and mask of one image")
    p.add_argument("--image", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--stride", type=int, default=1, help="window step in cells")
    p.add_argument("--mask-cells", type=int, default=7)
    p.add_argument("--lattice", type=int, default=32)
    p.add_argument("--difference", choices=["argmax", "total_variation"], default="argmax")
    p.add_argument("--threshold", type=float, default=0.6)

    p = command("crop", cmd_crop, "most scenic crop by constrained Bayesian optimization")
    p.add_argument("--image", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--bo-iters", type=int, default=50)
    p.add_argument("--init-samples", type=int, default=10)
    p.add_argument("--w-min", type=float, default=0.3)
    p.add_argument("--h-min", type=float, default=0.3)

    p = command("map", cmd_map, "rasterize predicted scenicness over a bounding box")
    p.add_argument("--manifest", required=True)
    p.add_argument("--model", required=True, help="ground scorer model file")
    p.add_argument("--method", choices=["1nn", "lwa", "cvh", "overhead"], default="lwa")
    p.add_argument("--bbox", required=True, help="lat_min,lon_min,lat_max,lon_max")
    p.add_argument("--cell-deg", type=float, required=True)
    p.add_argument("--sigma", type=float, default=0.01)
    p.add_argument("--cvh-model")
    p.add_argument("--overhead-model")
    p.add_argument("--field", help="field-truth JSON used as the overhead feature source")
    p.add_argument("--csv", action="store_true", help="also write raw cell values")

    p = command("stats", cmd_stats, "partition counts and entropy profile of a manifest")
    p.add_argument("--manifest", required=True)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.threads < 1:
        log.error("[cli] --threads must be >= 1")
        return EXIT_USAGE
    try:
        args.handler(args)
    except DivergedError as exc:
        log.error(f"[cli] training diverged: {exc}")
        return EXIT_DIVERGED
    except ValueError as exc:
        log.error(f"[cli] {exc}")
        return EXIT_USAGE
    except OSError as exc:
        log.error(f"[cli] I/O error: {exc}")
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
