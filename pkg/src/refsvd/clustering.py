"""User clustering and cluster-based fills.

Users are points in item space.  Clusters come from Lloyd's K-means,
normally started from principal components.  A missing entry is then
predicted either from the other members of the user's cluster, weighted by
``1 / (1 + d**2)`` in their Euclidean distance ``d``, or directly from the
user's centroid.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import ConfigError

DEFAULT_MAX_ITERS = 100
DEFAULT_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class ClusterModel:
    k: int
    centroids: np.ndarray
    assignment: np.ndarray
    objective: float
    iterations_run: int
    history: tuple = ()

    def members(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == cluster)

    def neighbors(self, u: int) -> np.ndarray:
        idx = self.members(self.assignment[u])
        return idx[idx != u]


@dataclass(frozen=True, eq=False)
class NeighborWeights:
    user: int
    neighbors: np.ndarray
    distances: np.ndarray
    weights: np.ndarray


def _sq_dists(points, centroids):
    return cdist(points, centroids, "sqeuclidean")


def _assign(points, centroids):
    # argmin returns the first minimum, i.e. ties go to the lowest cluster index.
    return np.argmin(_sq_dists(points, centroids), axis=1)


def _objective(points, centroids, labels) -> float:
    diff = points - centroids[labels]
    return float(np.sum(diff * diff))


def _repair_empty(points, centroids, labels, k):
    """Move each empty cluster's centroid onto the point farthest from its own centroid."""
    counts = np.bincount(labels, minlength=k)
    for j in np.flatnonzero(counts == 0):
        d = np.sum((points - centroids[labels]) ** 2, axis=1)
        # only steal from clusters that keep at least one member
        d[counts[labels] <= 1] = -1.0
        p = int(np.argmax(d))
        counts[labels[p]] -= 1
        counts[j] += 1
        labels[p] = j
        centroids[j] = points[p]
    return centroids, labels


def _means(points, labels, k):
    sums = np.zeros((k, points.shape[1]))
    np.add.at(sums, labels, points)
    return sums / np.bincount(labels, minlength=k)[:, None]


def kmeans(points: np.ndarray, initial_centroids: np.ndarray, max_iters: int = DEFAULT_MAX_ITERS,
           tol: float = DEFAULT_TOL) -> ClusterModel:
    """Lloyd iteration from the given centroids.

    Stops when the assignment no longer changes, when the relative objective
    improvement drops below ``tol``, or after ``max_iters`` iterations.
    ``history`` records the objective after every iteration.
    """
    points = np.asarray(points, dtype=float)
    centroids = np.array(initial_centroids, dtype=float, copy=True)
    if centroids.ndim != 2 or centroids.shape[1] != points.shape[1]:
        raise ConfigError(f"initial centroids must have shape (k, {points.shape[1]})")
    k = centroids.shape[0]
    if k < 1:
        raise ConfigError("k must be >= 1")
    if k > points.shape[0]:
        raise ConfigError(f"k={k} exceeds number of points {points.shape[0]}")
    if max_iters < 1:
        raise ConfigError("max_iters must be >= 1")

    labels = _assign(points, centroids)
    history = []
    it = 0
    for it in range(1, max_iters + 1):
        centroids, labels = _repair_empty(points, centroids, labels, k)
        centroids = _means(points, labels, k)
        obj = _objective(points, centroids, labels)
        history.append(obj)
        new_labels = _assign(points, centroids)
        if np.array_equal(new_labels, labels):
            break
        if len(history) > 1 and history[-2] - obj <= tol * history[-2]:
            break
        if it == max_iters:
            break
        labels = new_labels

    centroids.flags.writeable = False
    labels.flags.writeable = False
    return ClusterModel(k, centroids, labels, history[-1], it, tuple(history))


def random_centroids(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k distinct rows of ``points``; a control for principal-component seeding."""
    idx = rng.choice(points.shape[0], size=k, replace=False)
    return np.asarray(points, dtype=float)[idx].copy()


def weights_for(points: np.ndarray, model: ClusterModel, u: int) -> NeighborWeights:
    points = np.asarray(points, dtype=float)
    nb = model.neighbors(u)
    d = np.sqrt(np.sum((points[nb] - points[u]) ** 2, axis=1))
    return NeighborWeights(u, nb, d, 1.0 / (1.0 + d * d))


def predict_weighted(points: np.ndarray, model: ClusterModel, missing_mask: np.ndarray) -> np.ndarray:
    """Fill missing entries with the weighted mean of cluster neighbours' values.

    Neighbour values are read from ``points`` as-is, placeholders included.
    A user alone in its cluster keeps its own value.
    """
    points = np.asarray(points, dtype=float)
    missing_mask = np.asarray(missing_mask, dtype=bool)
    out = points.copy()
    for c in range(model.k):
        idx = model.members(c)
        if len(idx) < 2:
            continue
        block = points[idx]
        w = 1.0 / (1.0 + _sq_dists(block, block))
        np.fill_diagonal(w, 0.0)
        est = (w @ block) / w.sum(axis=1)[:, None]
        sub = missing_mask[idx]
        out[idx] = np.where(sub, est, block)
    return out


def predict_centroid(points: np.ndarray, model: ClusterModel, missing_mask: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    return np.where(missing_mask, model.centroids[model.assignment], points)


def save_assignment_csv(model: ClusterModel, path, user_ids=None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("user_id,cluster_id\n")
        for u, c in enumerate(model.assignment.tolist()):
            fh.write(f"{user_ids[u] if user_ids is not None else u},{c}\n")
