# -*- coding: utf-8 -*-
"""
Constants used throughout the package.
"""

import math

NUMERIC_ACCURACY = 1e-6
"""
The minimun difference between floats needed to deem them equal, e.g. when checking
that a probability vector sums to one.
"""

ATTRIBUTE_PEAK = 255.
"""
The peak value of an 8-bit attribute channel. Used as the PSNR peak and as the attribute
scale inside the networks.
"""

PSNR_INFINITY = math.inf
"""
The sentinel returned by PSNR when the two signals are identical.
"""

COMPONENTS = ("y", "cb", "cr")
"""
The colour components a per-component model can be trained for, in channel order.
"""

BT709_KR = 0.2126
"""
The red luma coefficient of the ITU-R BT.709 colour matrix.
"""

BT709_KB = 0.0722
"""
The blue luma coefficient of the ITU-R BT.709 colour matrix.
"""

CHROMA_OFFSET = 128.
"""
The full-range offset added to both chroma channels.
"""

DEFAULT_RADIUS = 2
"""
The temporal window radius R; a window holds 2R+1 frames.
"""

DEFAULT_NEIGHBOURS = 20
"""
The number of nearest neighbours k used by the neighbourhood attention module.
"""

DEFAULT_RECOLOR_NEIGHBOURS = 3
"""
The number of reference points used when recolouring one target point.
"""

DEFAULT_RECOLOR_KERNEL = "idw"
"""
The weighting kernel used for recolouring, either `idw` or `gaussian`.
"""

DEFAULT_PATCH_SIZE = 2048
"""
The maximum number of points in one patch.
"""

DEFAULT_STRIDE_FRACTION = 0.5
"""
The seed spacing of patch generation as a fraction of the patch size. Lower values give
more overlap.
"""

BRUTE_FORCE_KNN_LIMIT = 2 ** 22
"""
The largest query-by-support pair count that is searched by brute force; larger searches go
through a k-d tree.
"""

KNN_CHUNK_SIZE = 1024
"""
The number of query rows handled at once by the brute force search.
"""

KNN_CHUNK_PAIRS = 2 ** 20
"""
The number of query-support pairs whose distances are held in memory at once.
"""

KNN_TREE_MARGIN = 8
"""
The number of extra candidates requested from the k-d tree to resolve distance ties.
"""

LEAKY_RELU_SLOPE = 0.01
"""
The negative slope of every LeakyReLU in the networks.
"""

LOG_CLAMP = 1e-12
"""
The lower bound applied to probabilities before taking their logarithm.
"""

DEFAULT_SIGMA = 5.
"""
The width of the Gaussian kernel used for soft distortion-level labels.
"""

DEFAULT_QP_GROUPS = {
    "L": (28, 22),
    "M": (40, 34),
    "H": (51, 46)
}
"""
The QPs grouped into low, medium and high distortion levels.
"""

MODIFIED_QP_GROUPS = {
    "L": (31, 25),
    "M": (43, 37),
    "H": (54, 49)
}
"""
The shifted QP set used to check robustness to QPs unseen in training.
"""

DISTORTION_LEVELS = ("L", "M", "H")
"""
The distortion levels, in the order used by quality vectors and soft labels.
"""

DEFAULT_QPS = (51, 46, 40, 34, 28, 22)
"""
The six rate points, from the highest QP (lowest rate) to the lowest.
"""

REFERENCE_QP = 22
"""
The QP at which the synthetic quantiser has unit step size.
"""

QP_STEP_DOUBLING = 6.
"""
The QP increment that doubles the quantisation step size.
"""

DEFAULT_EPOCHS = 50
"""
The number of training epochs.
"""

DEFAULT_BATCH_SIZE = 10
"""
The number of samples per optimiser step.
"""

DEFAULT_LEARNING_RATE = 1e-4
"""
The Adam learning rate.
"""

LR_SCHEDULES = ("constant", "cosine")
"""
The learning rate schedules: a constant rate, or cosine annealing to zero over the planned
optimiser steps.
"""

DEFAULT_LR_SCHEDULE = "constant"
"""
The learning rate schedule used when none is configured.
"""

QE_DIFFERENCE_EDGES = (0.5, 1.5, 3., 6., 12., 24., 48., 96.)
"""
The bin edges, in raw attribute units, of the histogram of absolute differences between a
point and its neighbours that the quality estimator pools. The first bin holds exact
repeats, which coarse quantisers produce in bulk.
"""

QE_SHARE_FLOOR = 1e-2
"""
The floor added to pooled histogram shares before taking their logarithm.
"""

DEFAULT_VALIDATION_FRACTION = 0.2
"""
The fraction of frames at the end of every sequence kept out of training.
"""

DEFAULT_SEED = 0
"""
The seed used when the user does not provide one.
"""

YCBCR_PSNR_WEIGHTS = (6., 1., 1.)
"""
The Y, Cb and Cr weights of the aggregated colour PSNR.
"""

BD_MIN_POINTS = 4
"""
The minimum number of rate points needed for a cubic Bjontegaard fit.
"""

CHECKPOINT_FORMAT_VERSION = 1
"""
The version written into every checkpoint container.
"""

NUM_THREADS_ENV_VAR = "BQE_NUM_THREADS"
"""
The environment variable capping the number of threads used by `torch`.
"""
