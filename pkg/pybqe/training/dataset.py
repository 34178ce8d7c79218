# -*- coding: utf-8 -*-
"""
Assembly of training samples. Every frame of every sequence becomes a target once per QP:
the window around it is degraded, recoloured onto the target geometry and cut into patches,
and every patch is paired with the clean target attributes.
"""

import logging
import numpy as np
import pandas as pd

from typing import Dict, List, Optional, Sequence, Tuple
from pybqe.data_models.config import TrainingConfig
from pybqe.data_models.frame import PointCloudFrame
from pybqe.data_models.training import PairEntry, TrainingSample
from pybqe.point_cloud.color import extract_component
from pybqe.point_cloud.neighborhood import knn
from pybqe.point_cloud.patches import generate_patches
from pybqe.point_cloud.ply import load_ply
from pybqe.point_cloud.recolor import compensate_window
from pybqe.point_cloud.window import make_window
from pybqe.training.degradation import degrade
from pybqe.constants import DEFAULT_VALIDATION_FRACTION

logger = logging.getLogger(__name__)

PAIR_COLUMNS = ("clean_path", "degraded_path", "qp", "frame_index")
"""
The columns of a pairs manifest.
"""


def train_validation_split(
        n_frames: int,
        fraction: float = DEFAULT_VALIDATION_FRACTION
) -> Tuple[range, range]:
    """
    Holds out the last frames of a sequence. At least one frame stays in training.

    :param n_frames: the sequence length
    :param fraction: the share of frames held out
    :return: the training and validation frame positions
    """

    if n_frames < 1:
        raise ValueError("Cannot split an empty sequence.")

    held_out = min(int(round(n_frames * fraction)), n_frames - 1)
    return range(0, n_frames - held_out), range(n_frames - held_out, n_frames)


def window_samples(
        clean: Sequence[PointCloudFrame],
        degraded: Sequence[PointCloudFrame],
        qp: int,
        config: TrainingConfig
) -> List[TrainingSample]:
    """
    The samples of one sequence degraded at one QP.

    :param clean: the original frames
    :param degraded: the same frames after compression, on the same geometry
    :param qp: the QP of the degraded frames
    :param config: the run configuration
    :return: one sample per target frame and patch, in frame order
    """

    samples = []

    for t, original in enumerate(clean):

        if not np.array_equal(original.geometry, degraded[t].geometry):
            raise ValueError("Frame {} changes geometry between original and degraded versions.".format(
                original.frame_index
            ))

        window = compensate_window(
            make_window(degraded, t, config.radius),
            k_r=config.recolor_neighbours,
            kernel=config.recolor_kernel
        )

        for patch in generate_patches(window.target, config.patch_size, config.stride_fraction).patches:
            restricted = window.subset(patch)
            geometry = restricted.target.geometry
            samples.append(
                TrainingSample(
                    window=restricted,
                    original=original.attributes[patch],
                    qp=qp,
                    neighbors=knn(geometry, geometry, min(config.neighbours, geometry.shape[0]))
                )
            )

    return samples


def _shuffle(samples: List[TrainingSample], seed: int) -> List[TrainingSample]:
    order = np.random.default_rng(seed).permutation(len(samples))
    return [samples[position] for position in order]


def build_dataset(
        sequences: Sequence[Sequence[PointCloudFrame]],
        qps: Sequence[int],
        config: TrainingConfig,
        component: Optional[str] = None
) -> List[TrainingSample]:
    """
    Builds samples with the synthetic degradation.

    :param sequences: the clean sequences
    :param qps: the QPs every frame is degraded with
    :param config: the run configuration; its seed fixes the shuffling
    :param component: the colour component to extract first, if any
    :return: the shuffled samples
    :raises: :any:`ValueError` for no sequences or an empty one
    """

    if len(sequences) == 0 or any(len(sequence) == 0 for sequence in sequences):
        raise ValueError("Training needs at least one non-empty sequence.")

    samples = []

    for sequence in sequences:
        clean = [extract_component(frame, component) for frame in sequence] if component else list(sequence)

        for qp in qps:
            degraded = [degrade(frame, qp, qps=config.qps) for frame in clean]
            samples.extend(window_samples(clean, degraded, qp, config))

    logger.info("Built %d samples from %d sequences at %d QPs.", len(samples), len(sequences), len(qps))
    return _shuffle(samples, config.seed)


def read_pairs_manifest(path: str) -> List[PairEntry]:
    """
    Reads a CSV manifest with the columns clean_path, degraded_path, qp, frame_index.
    Relative paths are kept as they are written.

    :param path: the manifest file
    :return: the entries
    :raises: :any:`ValueError` for missing columns
    """

    table = pd.read_csv(path)
    missing = [column for column in PAIR_COLUMNS if column not in table.columns]

    if len(missing) > 0:
        raise ValueError("The pairs manifest `{path}` lacks columns {missing}.".format(path=path, missing=missing))

    return [
        PairEntry(
            clean_path=str(row.clean_path),
            degraded_path=str(row.degraded_path),
            qp=row.qp,
            frame_index=row.frame_index
        )
        for row in table.itertuples(index=False)
    ]


def build_dataset_from_pairs(
        entries: Sequence[PairEntry],
        config: TrainingConfig,
        component: Optional[str] = None
) -> List[TrainingSample]:
    """
    Builds samples from frames that were degraded elsewhere. Entries sharing a QP form one
    sequence, ordered by frame index.

    :param entries: the manifest entries
    :param config: the run configuration
    :param component: the colour component to extract, if any
    :return: the shuffled samples
    """

    if len(entries) == 0:
        raise ValueError("The pairs manifest is empty.")

    by_qp: Dict[int, List[PairEntry]] = {}

    for entry in entries:
        by_qp.setdefault(entry.qp, []).append(entry)

    samples = []

    for qp, group in sorted(by_qp.items()):
        group = sorted(group, key=lambda entry: entry.frame_index)
        clean = [_load(entry.clean_path, entry.frame_index, None, component) for entry in group]
        degraded = [_load(entry.degraded_path, entry.frame_index, qp, component) for entry in group]
        samples.extend(window_samples(clean, degraded, qp, config))

    logger.info("Built %d samples from %d frame pairs.", len(samples), len(entries))
    return _shuffle(samples, config.seed)


def _load(path: str, frame_index: int, qp: Optional[int], component: Optional[str]) -> PointCloudFrame:
    frame = load_ply(path, frame_index=frame_index, qp=qp)
    # decoders may reorder points
    frame = frame.subset(np.lexsort(frame.geometry.T[::-1]))
    return extract_component(frame, component) if component else frame
