"""Evaluation harness: single runs, parameter sweeps and grid tuning."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from . import linalg, pipeline
from .errors import ConfigError
from .ratings import RatingsMatrix, rmse

SCHEMA_VERSION = 1
AXES = ("lambda", "rank", "clusters")


def dataset_summary(m: RatingsMatrix) -> dict:
    return {
        "num_users": m.num_users,
        "num_items": m.num_items,
        "num_ratings": len(m),
        "density": m.density,
    }


def evaluate(train: RatingsMatrix, test: RatingsMatrix, cfg: pipeline.PipelineConfig,
             result: pipeline.PredictionResult | None = None) -> dict:
    """JSON-ready report for one pipeline variant (run here unless ``result`` is given)."""
    if result is None:
        result = pipeline.run_variant(train, cfg)
    return {
        "schema_version": SCHEMA_VERSION,
        "variant": cfg.variant,
        "config": cfg.to_dict(),
        "rmse": rmse(result.predictions, test),
        "train_rmse": rmse(result.predictions, train),
        "dataset": {"train": dataset_summary(train), "test": dataset_summary(test)},
        "timings": result.timings,
    }


def _rank_rows(train, test, cfg, grid):
    preds = pipeline.predictions_over_ranks(train, cfg, [int(v) for v in grid])
    return [(c, rmse(p, test)) for c, p in preds.items()]


def _lambda_rows(train, test, cfg, grid):
    preds = pipeline.predictions_over_lambdas(train, cfg, grid)
    return [(x, rmse(p, test)) for x, p in preds.items()]


def _cluster_rows(train, test, cfg, grid):
    out = []
    for k in sorted(set(int(v) for v in grid)):
        res = pipeline.run_variant(train, replace(cfg, k_clusters=k))
        out.append((k, rmse(res.predictions, test)))
    return out


_AXIS_RUNNERS = {"rank": _rank_rows, "lambda": _lambda_rows, "clusters": _cluster_rows}


def _sweep_task(args):
    train, test, cfg, axis, grid = args
    return [(cfg.variant, v, r) for v, r in _AXIS_RUNNERS[axis](train, test, cfg, grid)]


def sweep(train: RatingsMatrix, test: RatingsMatrix, axis: str, grid: Sequence[float],
          cfg: pipeline.PipelineConfig, variants: Sequence[str] = ("refined",), jobs: int = 1) -> list[tuple]:
    """Test RMSE along one parameter axis for each variant.

    Returns ``(variant, value, rmse)`` rows grouped by variant in the order
    given and sorted by value within each group.  ``jobs > 1`` runs variants
    in worker processes; the rows are identical either way.
    """
    if axis not in AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}; expected one of {AXES}")
    if len(grid) == 0:
        raise ConfigError("sweep grid is empty")
    if axis == "lambda" and any(not 0.0 <= v <= 1.0 for v in grid):
        raise ConfigError("lambda grid values must lie in [0, 1]")
    if axis in ("rank", "clusters") and any(v < 1 or v != int(v) for v in grid):
        raise ConfigError(f"{axis} grid values must be positive integers")
    tasks = [(train, test, replace(cfg, variant=v), axis, list(grid)) for v in variants]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_sweep_task, tasks))
    else:
        chunks = [_sweep_task(t) for t in tasks]
    return [row for chunk in chunks for row in sorted(chunk, key=lambda r: r[1])]


@dataclass(frozen=True)
class TuningResult:
    k_clusters: int
    lam: float
    svd_rank: int
    rmse: float
    table: dict


def rmse_table(train: RatingsMatrix, test: RatingsMatrix, cfg: pipeline.PipelineConfig,
               lams: Iterable[float], ranks: Iterable[int]) -> dict[tuple[float, int], float]:
    """Test RMSE for every (lambda, rank) pair at the configured variant and K.

    The clustering is computed once and one full SVD per lambda serves all ranks.
    """
    ranks = sorted(set(int(c) for c in ranks))
    fills = pipeline.compute_fills(train, cfg)
    out = {}
    for lam in lams:
        full = linalg.full_svd(pipeline.initial_matrix(fills, cfg.variant, lam))
        for c in ranks:
            out[(float(lam), c)] = rmse(pipeline.finish(full.truncate(c), fills.stats, cfg.clamp_output), test)
    return out


def tune(train: RatingsMatrix, test: RatingsMatrix, cfg: pipeline.PipelineConfig,
         ks: Iterable[int], lams: Iterable[float], ranks: Iterable[int]) -> TuningResult:
    """Exhaustive grid search for the lowest test RMSE; ties keep the first point found."""
    lams = list(lams)
    table = {}
    for k in ks:
        for (lam, c), value in rmse_table(train, test, replace(cfg, k_clusters=int(k)), lams, ranks).items():
            table[(int(k), lam, c)] = value
    best = min(table, key=table.get)
    return TuningResult(best[0], best[1], best[2], table[best], table)


def parse_grid(text: str, integer: bool = False) -> list:
    """``"0:1:0.1"`` (inclusive range) or ``"1,2,5"``."""
    text = text.strip()
    try:
        if ":" in text:
            lo, hi, step = (float(p) for p in text.split(":"))
            if step <= 0 or hi < lo:
                raise ConfigError(f"bad grid range {text!r}")
            n = int(round((hi - lo) / step))
            values = [round(lo + step * i, 10) for i in range(n + 1)]
        else:
            values = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse grid {text!r}") from None
    if integer:
        if any(v != int(v) for v in values):
            raise ConfigError(f"grid {text!r} must contain integers")
        values = [int(v) for v in values]
    return values


def is_u_shaped(values: Sequence[float]) -> bool:
    """True when the minimum sits strictly inside the sequence."""
    i = int(np.argmin(values))
    return 0 < i < len(values) - 1
