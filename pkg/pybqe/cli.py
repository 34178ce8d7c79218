# -*- coding: utf-8 -*-
"""
The command line: one subcommand per pipeline stage. Every command writes a JSON manifest
next to its outputs recording the arguments, inputs, outputs and run time.
"""

import os
import sys
import glob
import time
import logging
import argparse
import attr
import numpy as np
import pandas as pd

from typing import List, Sequence, Tuple
from sklearn.pipeline import Pipeline
from pybqe.data_models.config import ABLATIONS, ModelConfig, RunManifest, TrainingConfig, load_config, save_json
from pybqe.data_models.frame import PointCloudFrame
from pybqe.enhancement.transformers import SequenceEnhancer
from pybqe.enhancement.validator import SequenceValidator
from pybqe.interface import get_sequence_enhancement_pipeline
from pybqe.metrics.curves import compare_tables, delta_psnr_breakdown, format_report, plot_rd_curves, read_rd_csv
from pybqe.metrics.quality import delta_psnr
from pybqe.networks.checkpoint import load_checkpoint, save_checkpoint
from pybqe.networks.layers import configure_torch
from pybqe.point_cloud.color import extract_component, rgb_to_ycbcr, ycbcr_to_rgb
from pybqe.point_cloud.patches import generate_patches
from pybqe.point_cloud.ply import load_ply, save_ply
from pybqe.point_cloud.recolor import recolor
from pybqe.point_cloud.toy import make_toy_sequence
from pybqe.training.dataset import build_dataset_from_pairs, read_pairs_manifest, train_validation_split
from pybqe.training.degradation import degrade
from pybqe.training.trainer import BqeTrainer, QeTrainer, evaluate_qe_accuracy, write_training_log
from pybqe.constants import COMPONENTS, DEFAULT_QPS

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
"""
The manifest file name used by commands writing into a directory.
"""


def _version() -> str:
    with open(os.path.join(os.path.dirname(__file__), "VERSION"), "r") as fh:
        return fh.read().strip()


def _parse_qps(value: str) -> Tuple[int, ...]:

    try:
        return tuple(int(qp) for qp in value.split(","))

    except ValueError:
        raise argparse.ArgumentTypeError("QPs have to be comma-separated integers (got `{}`).".format(value))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pybqe", description="Blind quality enhancement of point cloud attributes.")
    parser.add_argument("--config", help="JSON configuration file", default=None)
    parser.add_argument("--seed", type=int, default=None, help="overrides the configured seed")
    parser.add_argument("--component", choices=COMPONENTS, default="y")
    parser.add_argument("--deterministic", action="store_true", help="enforce deterministic torch kernels")
    parser.add_argument("--verbose", "-v", action="store_true")
    commands = parser.add_subparsers(dest="command", required=True)

    toy = commands.add_parser("make-toy-data", help="synthesise a clean sequence and its degraded versions")
    toy.add_argument("--output", required=True)
    toy.add_argument("--frames", type=int, default=5)
    toy.add_argument("--points", type=int, default=512)
    toy.add_argument("--qps", type=_parse_qps, default=DEFAULT_QPS)

    recolor = commands.add_parser("recolor", help="transfer reference attributes onto a target geometry")
    recolor.add_argument("--reference", required=True)
    recolor.add_argument("--target", required=True)
    recolor.add_argument("--output", required=True)

    patch = commands.add_parser("patch", help="cut a frame into overlapping patches")
    patch.add_argument("--input", required=True)
    patch.add_argument("--output", required=True)

    train_qe = commands.add_parser("train-qe", help="stage one: train the quality estimator")
    train_qe.add_argument("--pairs", required=True, help="CSV of clean_path,degraded_path,qp,frame_index")
    train_qe.add_argument("--output", required=True, help="checkpoint file")
    train_qe.add_argument("--log", default=None, help="training log CSV")

    train = commands.add_parser("train", help="stage two: train the enhancement model")
    train.add_argument("--pairs", required=True, help="CSV of clean_path,degraded_path,qp,frame_index")
    train.add_argument("--output", required=True, help="checkpoint file")
    train.add_argument("--qe-checkpoint", default=None)
    train.add_argument("--ablation", choices=ABLATIONS, default=None)
    train.add_argument("--no-qe", action="store_true", help="train without a quality estimator")
    train.add_argument("--radius", type=int, default=None, help="overrides the window radius")
    train.add_argument("--log", default=None, help="training log CSV")

    enhance = commands.add_parser("enhance", help="enhance a decoded sequence")
    enhance.add_argument("--checkpoint", action="append", required=True, help="one per enhanced component")
    enhance.add_argument("--input", required=True, help="directory of decoded PLY frames")
    enhance.add_argument("--output", required=True)
    enhance.add_argument("--originals", default=None, help="directory of original PLY frames")
    enhance.add_argument("--start", type=int, default=0)
    enhance.add_argument("--end", type=int, default=None, help="exclusive end position")

    evaluate = commands.add_parser("evaluate", help="compare two rate-distortion CSV files")
    evaluate.add_argument("--anchor", required=True)
    evaluate.add_argument("--test", required=True)
    evaluate.add_argument("--output", default=None, help="report CSV")
    evaluate.add_argument("--plot-dir", default=None)
    return parser


def _configs(args) -> Tuple[TrainingConfig, ModelConfig]:
    if args.config is not None:
        config, model_config = load_config(args.config)

    else:
        config = TrainingConfig()
        model_config = config.model_config()

    if args.seed is not None:
        config = attr.evolve(config, seed=args.seed)
        model_config = attr.evolve(model_config, seed=args.seed)

    if args.deterministic:
        config = attr.evolve(config, deterministic=True)

    return config, attr.evolve(model_config, component=args.component)


def _ensure_dir(path: str) -> str:

    try:
        os.makedirs(path, exist_ok=True)

    except OSError as error:
        raise OSError("Cannot create output directory `{path}`: {error}".format(path=path, error=error)) from error

    return path


def _ensure_parent(path: str) -> str:
    parent = os.path.dirname(os.path.abspath(path))
    _ensure_dir(parent)
    return path


def _read_sequence(directory: str) -> List[PointCloudFrame]:
    """
    Loads every PLY file of a directory; frames are ordered by file name.

    :raises: :any:`ValueError` if the directory holds no frames
    """

    paths = sorted(glob.glob(os.path.join(directory, "*.ply")))

    if len(paths) == 0:
        raise ValueError("No PLY frames found in `{}`.".format(directory))

    return [load_ply(path, frame_index=position) for position, path in enumerate(paths)]


def cmd_make_toy_data(args, config: TrainingConfig, model_config: ModelConfig) -> Tuple[List[str], List[str]]:
    clean_dir = _ensure_dir(os.path.join(args.output, "clean"))
    frames = make_toy_sequence(n_frames=args.frames, n_points=args.points, seed=config.seed)
    outputs, pairs = [], []

    for frame in frames:
        path = os.path.join(clean_dir, "frame_{:03d}.ply".format(frame.frame_index))
        save_ply(frame, path)
        outputs.append(path)

    clean_paths = list(outputs)

    for qp in args.qps:
        qp_dir = _ensure_dir(os.path.join(args.output, "degraded", "qp{}".format(qp)))

        for frame, clean_path in zip(frames, clean_paths):
            path = os.path.join(qp_dir, "frame_{:03d}.ply".format(frame.frame_index))
            save_ply(ycbcr_to_rgb(degrade(rgb_to_ycbcr(frame), qp, qps=config.qps)), path)
            outputs.append(path)
            pairs.append((os.path.abspath(clean_path), os.path.abspath(path), qp, frame.frame_index))

    pairs_path = os.path.join(args.output, "pairs.csv")
    pd.DataFrame(pairs, columns=["clean_path", "degraded_path", "qp", "frame_index"]).to_csv(pairs_path, index=False)
    outputs.append(pairs_path)
    logger.info("Wrote %d clean and %d degraded frames.", len(frames), len(frames) * len(args.qps))
    return [], outputs


def cmd_recolor(args, config: TrainingConfig, model_config: ModelConfig) -> Tuple[List[str], List[str]]:
    reference = load_ply(args.reference)
    target = load_ply(args.target)
    virtual = recolor(reference, target.geometry, k_r=config.recolor_neighbours, kernel=config.recolor_kernel)
    save_ply(virtual, _ensure_parent(args.output))
    return [args.reference, args.target], [args.output]


def cmd_patch(args, config: TrainingConfig, model_config: ModelConfig) -> Tuple[List[str], List[str]]:
    frame = load_ply(args.input)
    output_dir = _ensure_dir(args.output)
    patches = generate_patches(frame, config.patch_size, config.stride_fraction)
    outputs = []

    for position, patch in enumerate(patches.patches):
        path = os.path.join(output_dir, "patch_{:03d}.ply".format(position))
        save_ply(frame.subset(patch), path)
        outputs.append(path)

    logger.info("Cut %d points into %d patches.", frame.n_points, len(patches))
    return [args.input], outputs


def _training_data(args, config: TrainingConfig):
    """
    The training and held-out samples of a pairs manifest; the last frames of the sequence
    are held out.
    """

    entries = read_pairs_manifest(args.pairs)
    frame_indices = sorted(set(entry.frame_index for entry in entries))
    training, held_out = train_validation_split(len(frame_indices), config.validation_fraction)
    training_frames = set(frame_indices[position] for position in training)
    held_out_frames = set(frame_indices[position] for position in held_out)
    dataset = build_dataset_from_pairs(
        [entry for entry in entries if entry.frame_index in training_frames],
        config,
        component=args.component
    )
    validation = []

    if len(held_out_frames) > 0:
        validation = build_dataset_from_pairs(
            [entry for entry in entries if entry.frame_index in held_out_frames],
            config,
            component=args.component
        )

    inputs = [args.pairs] + sorted(set(path for entry in entries for path in (entry.clean_path, entry.degraded_path)))
    return dataset, validation, inputs


def cmd_train_qe(args, config: TrainingConfig, model_config: ModelConfig) -> Tuple[List[str], List[str]]:
    dataset, validation, inputs = _training_data(args, config)
    trainer = QeTrainer(config, model_config).fit(dataset)
    save_checkpoint(trainer.model_, _ensure_parent(args.output))
    outputs = [args.output]

    if len(validation) > 0:
        logger.info("Held-out level accuracy: %.3f.", evaluate_qe_accuracy(trainer.model_, validation, config))

    if args.log is not None:
        write_training_log(trainer.history_, _ensure_parent(args.log))
        outputs.append(args.log)

    return inputs, outputs


def cmd_train(args, config: TrainingConfig, model_config: ModelConfig) -> Tuple[List[str], List[str]]:
    ablation = "no-qe" if args.no_qe else args.ablation

    if args.no_qe and args.ablation not in (None, "no-qe"):
        raise ValueError("`--no-qe` cannot be combined with the `{}` ablation.".format(args.ablation))

    elif ablation != "no-qe" and args.qe_checkpoint is None:
        raise ValueError("Stage two needs `--qe-checkpoint` from `train-qe`, or `--no-qe`.")

    if args.radius is not None:
        config = attr.evolve(config, radius=args.radius)
        model_config = attr.evolve(model_config, radius=args.radius)

    model_config = attr.evolve(model_config, ablation=ablation)
    quality_estimator = None
    extra_inputs = []

    if ablation != "no-qe":
        quality_estimator = load_checkpoint(args.qe_checkpoint, kind="qe")
        extra_inputs.append(args.qe_checkpoint)

        if quality_estimator.config.component != model_config.component:
            raise ValueError("The quality estimator was trained for component `{got}`, not `{want}`.".format(
                got=quality_estimator.config.component,
                want=model_config.component
            ))

        model_config = attr.evolve(
            model_config,
            qe_width=quality_estimator.config.qe_width,
            qe_na_layers=quality_estimator.config.qe_na_layers
        )

    dataset, _, inputs = _training_data(args, config)
    trainer = BqeTrainer(config, model_config, quality_estimator).fit(dataset)
    save_checkpoint(trainer.model_, _ensure_parent(args.output))
    outputs = [args.output]

    if args.log is not None:
        write_training_log(trainer.history_, _ensure_parent(args.log))
        outputs.append(args.log)

    return inputs + extra_inputs, outputs


def _load_models(paths: Sequence[str], component: str):
    models = {}

    for path in paths:
        model = load_checkpoint(path, kind="bqe")

        if model.config.component in models:
            raise ValueError("Two checkpoints enhance component `{}`.".format(model.config.component))

        models[model.config.component] = model

    if len(paths) == 1 and component not in models:
        raise ValueError("Checkpoint `{path}` enhances component `{got}`, not `{want}`.".format(
            path=paths[0],
            got=next(iter(models)),
            want=component
        ))

    return models


def cmd_enhance(args, config: TrainingConfig, model_config: ModelConfig) -> Tuple[List[str], List[str]]:
    models = _load_models(args.checkpoint, args.component)
    sequence = _read_sequence(args.input)
    end = len(sequence) if args.end is None else args.end

    if not 0 <= args.start < end <= len(sequence):
        raise ValueError("Frame range [{start}, {end}) is outside a sequence of {n} frames.".format(
            start=args.start,
            end=end,
            n=len(sequence)
        ))

    sequence = sequence[args.start:end]
    settings = dict(
        patch_size=config.patch_size,
        stride_fraction=config.stride_fraction,
        recolor_neighbours=config.recolor_neighbours,
        recolor_kernel=config.recolor_kernel
    )

    if sequence[0].n_channels == 3:
        pipeline = get_sequence_enhancement_pipeline(models, **settings)

    else:
        pipeline = Pipeline([
            ('validator', SequenceValidator(n_channels=1)),
            ('enhancer', SequenceEnhancer(models=models, **settings))
        ])

    enhanced = pipeline.fit_transform(sequence)
    output_dir = _ensure_dir(args.output)
    input_paths = sorted(glob.glob(os.path.join(args.input, "*.ply")))[args.start:end]
    outputs = []

    for frame, input_path in zip(enhanced, input_paths):
        path = os.path.join(output_dir, os.path.basename(input_path))
        save_ply(frame, path)
        outputs.append(path)

    if args.originals is not None:
        originals = _read_sequence(args.originals)

        if len(originals) < end:
            raise ValueError("`{dir}` holds {n} original frames, {want} are needed.".format(
                dir=args.originals,
                n=len(originals),
                want=end
            ))

        for component in sorted(models):
            gains = []

            for original, decoded, improved in zip(originals[args.start:end], sequence, enhanced):
                gain = delta_psnr(
                    extract_component(improved, component).attributes,
                    extract_component(decoded, component).attributes,
                    extract_component(original, component).attributes
                )
                gains.append(gain)
                print("frame {index:4d}  {component:>2}  dPSNR {gain:+.4f} dB".format(
                    index=decoded.frame_index,
                    component=component,
                    gain=gain
                ))

            logger.info("Mean dPSNR (%s): %+.4f dB.", component, float(np.mean(gains)))

    return input_paths + list(args.checkpoint), outputs


def cmd_evaluate(args, config: TrainingConfig, model_config: ModelConfig) -> Tuple[List[str], List[str]]:
    anchor = read_rd_csv(args.anchor)
    test = read_rd_csv(args.test)
    report = compare_tables(anchor, test)
    print(format_report(report, delta_psnr_breakdown(anchor, test)))
    outputs = []

    if args.output is not None:
        report.to_csv(_ensure_parent(args.output), index=False)
        outputs.append(args.output)

    if args.plot_dir is not None:
        outputs.extend(plot_rd_curves(anchor, test, _ensure_dir(args.plot_dir)))

    return [args.anchor, args.test], outputs


COMMANDS = {
    "make-toy-data": cmd_make_toy_data,
    "recolor": cmd_recolor,
    "patch": cmd_patch,
    "train-qe": cmd_train_qe,
    "train": cmd_train,
    "enhance": cmd_enhance,
    "evaluate": cmd_evaluate
}


def _manifest_path(args) -> str:
    """
    Where the manifest of a run goes: inside output directories, next to output files, and
    next to the tested table for an `evaluate` run without `--output`.
    """

    output = getattr(args, "output", None)

    if output is None:
        return args.test + ".manifest.json"

    elif args.command in ("make-toy-data", "patch", "enhance"):
        return os.path.join(output, MANIFEST_NAME)

    return output + ".manifest.json"


def main(argv: Sequence[str] = None) -> int:
    """
    Runs one command.

    :param argv: the arguments, without the program name; `sys.argv` if absent
    :return: the exit code, 0 on success and 1 on failure
    """

    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )
    started = time.perf_counter()

    try:
        config, model_config = _configs(args)

        if args.command not in ("make-toy-data", "evaluate"):
            configure_torch(config.seed, config.deterministic)

        inputs, outputs = COMMANDS[args.command](args, config, model_config)
        save_json(
            RunManifest(
                command=args.command,
                config_path=args.config,
                seed=config.seed,
                inputs=inputs,
                outputs=outputs,
                version=_version(),
                wall_clock_seconds=time.perf_counter() - started,
                arguments=argv
            ),
            _manifest_path(args)
        )

    except (ValueError, OSError, FloatingPointError, KeyError, RuntimeError) as error:
        logger.error("%s failed: %s", args.command, error)
        return 1

    return 0


if __name__ == "__main__":
    sys.exit(main())
