import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from conftest import random_ratings
from refsvd.baseline import (
    DEFAULT_K1,
    DEFAULT_K2,
    fill_corrected,
    fit_corrected_averages,
    predict_corrected,
    save_model_csv,
)
from refsvd.errors import ConfigError, EmptyRatingsError
from refsvd.ratings import RatingsMatrix


def assert_matches_oracle(m, k1, k2):
    model = fit_corrected_averages(m, k1, k2)
    g, items, off, users = oracles.corrected_averages(m.num_users, m.num_items, m.triples(), k1, k2)
    assert model.global_mean == pytest.approx(g, abs=1e-12)
    np.testing.assert_allclose(model.item_corrected_mean, items, rtol=0, atol=1e-12)
    assert model.global_offset == pytest.approx(off, abs=1e-12)
    np.testing.assert_allclose(model.user_corrected_offset, users, rtol=0, atol=1e-12)
    expected = oracles.corrected_fill(m.num_users, m.num_items, m.triples(), k1, k2)
    np.testing.assert_allclose(fill_corrected(m, model), expected, rtol=0, atol=1e-12)
    return model


def test_defaults():
    assert (DEFAULT_K1, DEFAULT_K2) == (25, 10)


def test_tiny_against_oracle(tiny):
    model = assert_matches_oracle(tiny, 25, 10)
    _, items, _, users = oracles.corrected_averages(3, 2, tiny.triples(), 25, 10)
    assert predict_corrected(model, 0, 1) == pytest.approx(items[1] + users[0], abs=1e-12)


def test_tiny_hand_values(tiny):
    # global mean 3; item 0: (25*3 + 8) / 27; item 1: (25*3 + 1) / 26
    model = fit_corrected_averages(tiny, 25, 10)
    assert model.global_mean == 3.0
    assert model.item_corrected_mean[0] == pytest.approx(83 / 27, abs=1e-14)
    assert model.item_corrected_mean[1] == pytest.approx(76 / 26, abs=1e-14)


def test_unrated_item_and_user_fall_back_exactly():
    m = RatingsMatrix.from_triples([(0, 0, 4), (1, 0, 2), (0, 1, 5)], num_users=3, num_items=3)
    model = fit_corrected_averages(m)
    assert model.item_corrected_mean[2] == model.global_mean
    assert model.user_corrected_offset[2] == model.global_offset
    assert predict_corrected(model, 2, 2) == model.global_mean + model.global_offset


def test_zero_pseudocounts_with_unrated_item():
    m = RatingsMatrix.from_triples([(0, 0, 4)], num_users=2, num_items=2)
    model = fit_corrected_averages(m, 0, 0)
    assert np.all(np.isfinite(model.item_corrected_mean))
    assert model.item_corrected_mean[1] == 4.0


def test_large_k1_limit(rng):
    m = random_ratings(rng, 8, 6)
    model = fit_corrected_averages(m, k1=1e12)
    np.testing.assert_allclose(model.item_corrected_mean, model.global_mean, atol=1e-6)


def test_zero_k_recovers_plain_means(rng):
    m = random_ratings(rng, 10, 6, 0.7)
    assert (m.item_counts() > 0).all() and (m.user_counts() > 0).all()
    model = fit_corrected_averages(m, 0, 0)
    d = m.to_dense()
    np.testing.assert_allclose(model.item_corrected_mean, np.nanmean(d, axis=0), atol=1e-12)


def test_fill_keeps_known_entries(rng):
    m = random_ratings(rng, 8, 6)
    filled = fill_corrected(m, fit_corrected_averages(m))
    assert np.array_equal(filled[m.users, m.items], m.ratings.astype(float))


def test_fully_observed_fill_is_dense_input():
    m = RatingsMatrix.from_triples([(u, i, 1 + (u + i) % 5) for u in range(3) for i in range(4)])
    assert np.array_equal(fill_corrected(m, fit_corrected_averages(m)), m.to_dense())


def test_empty_row_fill(rng):
    m = RatingsMatrix.from_triples([(0, 0, 4), (0, 1, 2), (1, 1, 5)], num_users=3, num_items=2)
    model = fit_corrected_averages(m)
    row = fill_corrected(m, model)[2]
    np.testing.assert_array_equal(row, model.item_corrected_mean + model.global_offset)


def test_errors():
    with pytest.raises(EmptyRatingsError):
        fit_corrected_averages(RatingsMatrix(2, 2, [], [], []))
    with pytest.raises(ConfigError):
        fit_corrected_averages(RatingsMatrix.from_triples([(0, 0, 1)]), k1=-1)


def test_random_against_oracle():
    for seed in range(25):
        rng = np.random.default_rng(seed)
        m = random_ratings(rng, int(rng.integers(2, 9)), int(rng.integers(2, 7)), 0.5)
        assert_matches_oracle(m, float(rng.uniform(0, 30)), float(rng.uniform(0, 15)))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_shrinkage_monotone_in_k1(seed):
    m = random_ratings(np.random.default_rng(seed), 6, 5, 0.5)
    gaps = []
    for k1 in [0, 0.5, 1, 2, 5, 10, 25, 100, 1e4]:
        model = fit_corrected_averages(m, k1=k1)
        gaps.append(np.abs(model.item_corrected_mean - model.global_mean))
    gaps = np.array(gaps)
    assert np.all(np.diff(gaps, axis=0) <= 1e-12)


def test_model_csv(tmp_path, tiny):
    save_model_csv(fit_corrected_averages(tiny), tmp_path / "m.csv")
    lines = (tmp_path / "m.csv").read_text().splitlines()
    assert lines[0] == "section,index,value"
    assert sum(l.startswith("item,") for l in lines) == 2
    assert sum(l.startswith("user,") for l in lines) == 3
