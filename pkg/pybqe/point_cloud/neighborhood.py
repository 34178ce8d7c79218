# -*- coding: utf-8 -*-
"""
Exact k nearest neighbour search. Distances are Euclidean in voxel units and ties are broken
by the lower support index, so results do not depend on the platform or on the search path.
"""

import numpy as np

from scipy.spatial import cKDTree
from pybqe.data_models.neighborhood import NeighborIndex
from pybqe.constants import BRUTE_FORCE_KNN_LIMIT, KNN_CHUNK_PAIRS, KNN_CHUNK_SIZE, KNN_TREE_MARGIN


def knn(query: np.ndarray, support: np.ndarray, k: int) -> NeighborIndex:
    """
    Finds the `k` nearest support points of every query point.

    :param query: the m x 3 query coordinates
    :param support: the n x 3 support coordinates
    :param k: the number of neighbours
    :return: the neighbour index, nearest first
    :raises: :any:`ValueError` for an empty support set or `k` larger than it
    """

    query = np.asarray(query, dtype=np.float64).reshape(-1, 3)
    support = np.asarray(support, dtype=np.float64).reshape(-1, 3)

    if support.shape[0] == 0:
        raise ValueError("The support set is empty.")

    elif not 1 <= k <= support.shape[0]:
        raise ValueError("Cannot find {k} neighbours among {n} support points.".format(k=k, n=support.shape[0]))

    elif not (np.all(np.isfinite(query)) and np.all(np.isfinite(support))):
        raise ValueError("Coordinates have to be finite.")

    if query.shape[0] * support.shape[0] <= BRUTE_FORCE_KNN_LIMIT:
        indices, squared = _brute_force(query, support, k)

    else:
        indices, squared = _tree_search(query, support, k)

    return NeighborIndex(indices=indices, distances=np.sqrt(squared))


def _squared_distances(query: np.ndarray, support: np.ndarray) -> np.ndarray:
    return ((query[:, None, :] - support[None, :, :]) ** 2).sum(axis=-1)


def _brute_force(query: np.ndarray, support: np.ndarray, k: int):
    """
    Sorts all distances. A stable sort of an index-ordered row leaves tied points in
    increasing index order.

    :param query: the m x 3 query coordinates
    :param support: the n x 3 support coordinates
    :param k: the number of neighbours
    :return: the m x k indices and squared distances
    """

    indices = np.empty((query.shape[0], k), dtype=np.int64)
    squared = np.empty((query.shape[0], k), dtype=np.float64)
    chunk = max(1, min(KNN_CHUNK_SIZE, KNN_CHUNK_PAIRS // support.shape[0]))

    for start in range(0, query.shape[0], chunk):
        distances = _squared_distances(query[start:start + chunk], support)
        order = np.argsort(distances, axis=1, kind="stable")[:, :k]
        indices[start:start + chunk] = order
        squared[start:start + chunk] = np.take_along_axis(distances, order, axis=1)

    return indices, squared


def _tree_search(query: np.ndarray, support: np.ndarray, k: int):
    """
    Asks a k-d tree for a few more candidates than needed, recomputes their distances exactly
    and re-sorts them by (distance, index). Rows whose k-th distance ties with the farthest
    candidate may have tied points the tree did not return; those rows are redone with a ball
    query that returns every point within the k-th distance.

    :param query: the m x 3 query coordinates
    :param support: the n x 3 support coordinates
    :param k: the number of neighbours
    :return: the m x k indices and squared distances
    """

    tree = cKDTree(support)
    n_candidates = min(k + KNN_TREE_MARGIN, support.shape[0])
    _, candidates = tree.query(query, k=n_candidates)
    candidates = candidates.reshape(query.shape[0], n_candidates)
    squared = ((support[candidates] - query[:, None, :]) ** 2).sum(axis=-1)
    order = np.lexsort((candidates, squared), axis=1)
    candidates = np.take_along_axis(candidates, order, axis=1)
    squared = np.take_along_axis(squared, order, axis=1)
    ambiguous = np.flatnonzero(
        (squared[:, k - 1] == squared[:, -1]) & (n_candidates < support.shape[0])
    )

    for row in ambiguous:
        radius = np.sqrt(squared[row, k - 1]) * (1. + 1e-9) + 1e-9
        ball = np.array(sorted(tree.query_ball_point(query[row], r=radius)), dtype=np.int64)
        ball_squared = ((support[ball] - query[row]) ** 2).sum(axis=-1)
        ball_order = np.lexsort((ball, ball_squared))[:n_candidates]
        candidates[row, :ball_order.size] = ball[ball_order]
        squared[row, :ball_order.size] = ball_squared[ball_order]

    return candidates[:, :k], squared[:, :k]
