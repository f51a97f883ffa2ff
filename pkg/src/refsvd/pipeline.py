"""Refined SVD: blended initial fill followed by a truncated SVD.

Stages, in order:

1. corrected-averages fill ``R_corr`` and item-mean fill ``R_mean``;
2. per-item mean/std from ``R_mean``, used to normalize both fills;
3. principal components of normalized ``R_mean`` seed K-means on users;
4. cluster-weighted fill ``R_w`` of the missing entries;
5. missing entries set to ``lam * R_corr + (1 - lam) * R_w`` (normalized space);
6. rank-C reconstruction, then denormalization.

The ablations replace step 5: ``corrected_only`` uses ``R_corr`` alone,
``kmeans_only`` uses ``R_w`` alone, ``centroid_variant`` swaps ``R_w`` for the
assigned centroid's coordinates, and ``baseline_svd`` skips steps 1, 3-5 and
fills with the global mean rating.
"""
from __future__ import annotations

import csv
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Iterable

import numpy as np

from . import baseline, clustering, linalg
from .errors import ConfigError, RankError
from .ratings import MAX_RATING, MIN_RATING, RatingsMatrix

VARIANTS = ("refined", "baseline_svd", "corrected_only", "kmeans_only", "centroid_variant")
_NEEDS_CLUSTERS = {"refined": "weighted", "kmeans_only": "weighted", "centroid_variant": "centroid"}


@dataclass(frozen=True)
class PipelineConfig:
    lam: float = 0.6
    k_clusters: int = 7
    svd_rank: int = 28
    k1: float = baseline.DEFAULT_K1
    k2: float = baseline.DEFAULT_K2
    seed: int = 42
    kmeans_max_iters: int = clustering.DEFAULT_MAX_ITERS
    kmeans_tol: float = clustering.DEFAULT_TOL
    clamp_output: bool = False
    variant: str = "refined"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        if not 0.0 <= self.lam <= 1.0:
            raise ConfigError(f"lambda must be in [0, 1], got {self.lam}")
        if self.k_clusters < 1:
            raise ConfigError("number of clusters must be >= 1")
        if self.svd_rank < 1:
            raise ConfigError("SVD rank must be >= 1")
        if self.k1 < 0 or self.k2 < 0:
            raise ConfigError("k1 and k2 must be non-negative")
        if self.kmeans_max_iters < 1 or self.kmeans_tol < 0:
            raise ConfigError("invalid K-means iteration controls")

    def check_shape(self, num_users: int, num_items: int, rank: bool = True) -> None:
        limit = min(num_users, num_items)
        if rank and self.svd_rank > limit:
            raise RankError(f"SVD rank {self.svd_rank} exceeds min(M, N) = {limit}")
        if self.variant in _NEEDS_CLUSTERS and self.k_clusters > limit:
            raise RankError(f"{self.k_clusters} clusters need as many principal components; min(M, N) = {limit}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class PredictionResult:
    predictions: np.ndarray
    config: PipelineConfig
    timings: dict = field(default_factory=dict)
    clusters: clustering.ClusterModel | None = None


@dataclass(eq=False)
class InitialFills:
    """Normalized fills shared by all variants for one training matrix."""

    stats: linalg.NormalizationStats
    missing: np.ndarray
    mean_fill: np.ndarray
    corrected: np.ndarray | None = None
    global_fill: np.ndarray | None = None
    cluster_fill: np.ndarray | None = None
    clusters: clustering.ClusterModel | None = None
    timings: dict = field(default_factory=dict)


class _Timer:
    def __init__(self, timings, name):
        self.timings, self.name = timings, name

    def __enter__(self):
        self.t0 = time.perf_counter()

    def __exit__(self, *exc):
        self.timings[self.name] = self.timings.get(self.name, 0.0) + time.perf_counter() - self.t0


def blend(corr: np.ndarray, omega: np.ndarray, mask: np.ndarray, lam: float) -> np.ndarray:
    """``lam * corr + (1 - lam) * omega`` on masked entries, ``corr`` elsewhere."""
    if not 0.0 <= lam <= 1.0:
        raise ConfigError(f"lambda must be in [0, 1], got {lam}")
    corr = np.asarray(corr, dtype=float)
    omega = np.asarray(omega, dtype=float)
    if corr.shape != omega.shape or corr.shape != np.shape(mask):
        raise ConfigError("blend inputs must share one shape")
    return np.where(mask, lam * corr + (1.0 - lam) * omega, corr)


def compute_fills(train: RatingsMatrix, cfg: PipelineConfig) -> InitialFills:
    """Run every stage before the blend that ``cfg.variant`` needs."""
    cfg.check_shape(*train.shape, rank=False)
    timings: dict = {}
    with _Timer(timings, "normalize"):
        placeholders = linalg.observed_item_means(train)
        r_mean = linalg.mean_fill(train)
        stats = linalg.compute_stats(r_mean, placeholders=placeholders)
        missing = ~train.observed_mask()
        fills = InitialFills(stats, missing, linalg.normalize(r_mean, stats), timings=timings)

    if cfg.variant == "baseline_svd":
        with _Timer(timings, "global_fill"):
            fills.global_fill = linalg.normalize(linalg.global_mean_fill(train), stats)
        return fills

    with _Timer(timings, "corrected_averages"):
        model = baseline.fit_corrected_averages(train, cfg.k1, cfg.k2)
        fills.corrected = linalg.normalize(baseline.fill_corrected(train, model), stats)

    how = _NEEDS_CLUSTERS.get(cfg.variant)
    if how is None:
        return fills
    with _Timer(timings, "pca"):
        seeds = linalg.principal_components(fills.mean_fill, cfg.k_clusters)
    with _Timer(timings, "kmeans"):
        fills.clusters = clustering.kmeans(fills.mean_fill, seeds, cfg.kmeans_max_iters, cfg.kmeans_tol)
    with _Timer(timings, "cluster_fill"):
        if how == "weighted":
            fills.cluster_fill = clustering.predict_weighted(fills.mean_fill, fills.clusters, missing)
        else:
            fills.cluster_fill = clustering.predict_centroid(fills.mean_fill, fills.clusters, missing)
    return fills


def initial_matrix(fills: InitialFills, variant: str, lam: float) -> np.ndarray:
    """Normalized matrix handed to the SVD for ``variant``."""
    if variant == "baseline_svd":
        return fills.global_fill
    if variant == "corrected_only":
        return fills.corrected
    if variant == "kmeans_only":
        return np.where(fills.missing, fills.cluster_fill, fills.corrected)
    if variant in ("refined", "centroid_variant"):
        return blend(fills.corrected, fills.cluster_fill, fills.missing, lam)
    raise ConfigError(f"unknown variant {variant!r}")


def finish(svd: linalg.TruncatedSVD, stats, clamp: bool = False) -> np.ndarray:
    """Reconstruct, denormalize and optionally clamp to the rating scale."""
    out = linalg.denormalize(linalg.reconstruct(svd), stats)
    if clamp:
        np.clip(out, MIN_RATING, MAX_RATING, out=out)
    return out


def run_variant(train: RatingsMatrix, cfg: PipelineConfig) -> PredictionResult:
    cfg.check_shape(*train.shape)
    fills = compute_fills(train, cfg)
    timings = fills.timings
    with _Timer(timings, "blend"):
        init = initial_matrix(fills, cfg.variant, cfg.lam)
    with _Timer(timings, "svd"):
        svd = linalg.truncated_svd(init, cfg.svd_rank)
        pred = finish(svd, fills.stats, cfg.clamp_output)
    return PredictionResult(pred, cfg, dict(timings), fills.clusters)


def run_refined(train: RatingsMatrix, cfg: PipelineConfig = PipelineConfig()) -> PredictionResult:
    return run_variant(train, replace(cfg, variant="refined"))


def predictions_over_ranks(train: RatingsMatrix, cfg: PipelineConfig, ranks: Iterable[int]) -> dict[int, np.ndarray]:
    """Predictions for several SVD ranks from a single decomposition.

    Identical to separate :func:`run_variant` calls with ``svd_rank`` set,
    since truncation just slices the full thin SVD.
    """
    ranks = sorted(set(int(c) for c in ranks))
    for c in ranks:
        replace(cfg, svd_rank=c).check_shape(*train.shape)
    fills = compute_fills(train, cfg)
    full = linalg.full_svd(initial_matrix(fills, cfg.variant, cfg.lam))
    return {c: finish(full.truncate(c), fills.stats, cfg.clamp_output) for c in ranks}


def predictions_over_lambdas(train: RatingsMatrix, cfg: PipelineConfig, lams: Iterable[float]) -> dict[float, np.ndarray]:
    """Predictions for several refinement factors sharing one clustering."""
    lams = sorted(set(float(x) for x in lams))
    for x in lams:
        replace(cfg, lam=x)  # validates
    cfg.check_shape(*train.shape)
    fills = compute_fills(train, cfg)
    out = {}
    for x in lams:
        svd = linalg.truncated_svd(initial_matrix(fills, cfg.variant, x), cfg.svd_rank)
        out[x] = finish(svd, fills.stats, cfg.clamp_output)
    return out


def write_predictions_csv(predictions: np.ndarray, query: RatingsMatrix, path) -> None:
    """Predictions at the (user, item) pairs of ``query``, with raw ids."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("user_id", "item_id", "prediction"))
        for u, i in zip(query.users.tolist(), query.items.tolist()):
            w.writerow((query.user_ids[u], query.item_ids[i], repr(float(predictions[u, i]))))
