"""Collaborative filtering by truncated SVD over a blended initial fill.

The missing ratings are first estimated twice, by corrected (shrunken)
averages and by a distance-weighted average over K-means cluster
neighbours.  The two estimates are mixed with a refinement factor and the
filled matrix is replaced by its best low-rank approximation.
"""
from .baseline import CorrectedAveragesModel, fill_corrected, fit_corrected_averages, predict_corrected
from .clustering import ClusterModel, NeighborWeights, kmeans, predict_centroid, predict_weighted, weights_for
from .errors import ConfigError, ConvergenceError, DataError, RankError, RefSVDError
from .linalg import (
    NormalizationStats,
    TruncatedSVD,
    compute_stats,
    denormalize,
    mean_fill,
    normalize,
    principal_components,
    reconstruct,
    truncated_svd,
)
from .pipeline import PipelineConfig, PredictionResult, blend, run_refined, run_variant
from .ratings import RatingsMatrix, SplitPair, load_pair, load_ratings, rating_histograms, rmse, split

__version__ = "0.1.0"
