import numpy as np
import pytest

from refsvd import experiments, synthetic
from refsvd.errors import ConfigError
from refsvd.pipeline import PipelineConfig
from refsvd.ratings import split


@pytest.fixture(scope="module")
def pair():
    return split(synthetic.generate(synthetic.SyntheticSpec(seed=2)), 0.8, 42)


def test_parse_grid():
    assert experiments.parse_grid("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert experiments.parse_grid("0:1:0.1")[3] == 0.3
    assert experiments.parse_grid("3, 1,2", integer=True) == [3, 1, 2]
    with pytest.raises(ConfigError):
        experiments.parse_grid("1:x:1")
    with pytest.raises(ConfigError):
        experiments.parse_grid("1.5", integer=True)


def test_u_shape_helper():
    assert experiments.is_u_shaped([3, 1, 2])
    assert not experiments.is_u_shaped([1, 2, 3])
    assert not experiments.is_u_shaped([3, 2, 1])


def test_rank_sweep_is_u_shaped(pair):
    rows = experiments.sweep(pair.train, pair.test, "rank", list(range(1, 41)),
                             PipelineConfig(variant="baseline_svd"), ["baseline_svd"])
    assert [r[1] for r in rows] == list(range(1, 41))
    assert experiments.is_u_shaped([r[2] for r in rows])


def test_tune_finds_table_minimum(pair):
    res = experiments.tune(pair.train, pair.test, PipelineConfig(), [2, 3], [0.3, 0.6], [3, 5, 8])
    assert len(res.table) == 12
    assert res.rmse == min(res.table.values())
    assert res.table[(res.k_clusters, res.lam, res.svd_rank)] == res.rmse


def test_evaluate_report(pair):
    rep = experiments.evaluate(pair.train, pair.test, PipelineConfig(k_clusters=3, svd_rank=5))
    assert rep["dataset"]["train"]["num_ratings"] == len(pair.train)
    assert np.isfinite(rep["rmse"])
