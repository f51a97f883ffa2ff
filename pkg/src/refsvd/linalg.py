"""Normalization statistics, truncated SVD and principal components.

The SVD itself is LAPACK's (through :func:`numpy.linalg.svd`), which is
deterministic for a given input and thread count.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, EmptyRatingsError, RankError
from .ratings import RatingsMatrix

SIGMA_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class NormalizationStats:
    mu: np.ndarray
    sigma: np.ndarray


@dataclass(frozen=True, eq=False)
class TruncatedSVD:
    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray

    @property
    def rank(self) -> int:
        return len(self.singular_values)

    def truncate(self, c: int) -> "TruncatedSVD":
        if not 1 <= c <= self.rank:
            raise RankError(f"rank {c} outside 1..{self.rank}")
        return TruncatedSVD(self.U[:, :c], self.singular_values[:c], self.V[:, :c])


def observed_item_means(train: RatingsMatrix) -> np.ndarray:
    """Per-item mean of observed ratings; the global mean for unrated items."""
    if len(train) == 0:
        raise EmptyRatingsError("empty ratings matrix")
    r = train.ratings.astype(float)
    sums = np.bincount(train.items, weights=r, minlength=train.num_items)
    counts = np.bincount(train.items, minlength=train.num_items)
    means = np.full(train.num_items, float(r.mean()))
    seen = counts > 0
    means[seen] = sums[seen] / counts[seen]
    return means


def mean_fill(train: RatingsMatrix) -> np.ndarray:
    means = observed_item_means(train)
    out = np.repeat(means[None, :], train.num_users, axis=0)
    out[train.users, train.items] = train.ratings
    return out


def global_mean_fill(train: RatingsMatrix) -> np.ndarray:
    if len(train) == 0:
        raise EmptyRatingsError("empty ratings matrix")
    out = np.full(train.shape, float(train.ratings.mean()))
    out[train.users, train.items] = train.ratings
    return out


def compute_stats(filled: np.ndarray, placeholders: np.ndarray | None = None) -> NormalizationStats:
    """Column mean and population standard deviation of a filled matrix.

    If the matrix was filled with per-column ``placeholders`` equal to the
    observed column means (see :func:`mean_fill`), pass them: they equal the
    column means mathematically, and using them verbatim makes the filled
    positions normalize to exactly zero.
    """
    filled = np.asarray(filled, dtype=float)
    mu = filled.mean(axis=0) if placeholders is None else np.array(placeholders, dtype=float)
    sigma = np.sqrt(np.mean((filled - mu) ** 2, axis=0))
    sigma[sigma < SIGMA_FLOOR] = 1.0
    return NormalizationStats(mu, sigma)


def normalize(m: np.ndarray, stats: NormalizationStats) -> np.ndarray:
    return (np.asarray(m, dtype=float) - stats.mu) / stats.sigma


def denormalize(m: np.ndarray, stats: NormalizationStats) -> np.ndarray:
    return np.asarray(m, dtype=float) * stats.sigma + stats.mu


def full_svd(m: np.ndarray) -> TruncatedSVD:
    """Thin SVD of ``m`` keeping all ``min(M, N)`` components."""
    m = np.asarray(m, dtype=float)
    try:
        u, s, vt = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"SVD did not converge: {exc}", residual=float("nan")) from exc
    return TruncatedSVD(u, s, vt.T)


def truncated_svd(m: np.ndarray, c: int) -> TruncatedSVD:
    m = np.asarray(m, dtype=float)
    if not 1 <= c <= min(m.shape):
        raise RankError(f"rank {c} outside 1..{min(m.shape)} for a {m.shape[0]}x{m.shape[1]} matrix")
    return full_svd(m).truncate(c)


def reconstruct(svd: TruncatedSVD) -> np.ndarray:
    return (svd.U * svd.singular_values) @ svd.V.T


def principal_components(m: np.ndarray, k: int) -> np.ndarray:
    """Top-``k`` right singular vectors of ``m`` as rows of a ``k x N`` array.

    Each vector is unit norm with its largest-magnitude coordinate positive.
    ``m`` is expected to be column-centred already.
    """
    m = np.asarray(m, dtype=float)
    if not 1 <= k <= min(m.shape):
        raise RankError(f"number of components {k} outside 1..{min(m.shape)}")
    pcs = full_svd(m).V[:, :k].T.copy()
    lead = np.argmax(np.abs(pcs), axis=1)
    signs = np.sign(pcs[np.arange(k), lead])
    signs[signs == 0] = 1.0
    return pcs * signs[:, None]
