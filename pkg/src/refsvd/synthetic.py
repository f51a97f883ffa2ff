"""Seeded synthetic ratings with low-rank structure and user archetypes."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .ratings import MAX_RATING, MIN_RATING, RatingsMatrix


@dataclass(frozen=True)
class SyntheticSpec:
    num_users: int = 500
    num_items: int = 80
    latent_rank: int = 5
    archetypes: int = 4
    density: float = 0.15
    noise: float = 0.5
    archetype_spread: float = 0.5
    item_bias_scale: float = 0.5
    user_bias_scale: float = 0.5
    seed: int = 0


def latent_scores(spec: SyntheticSpec) -> tuple[np.ndarray, np.ndarray]:
    """Noise-free real-valued scores and each user's archetype."""
    rng = np.random.default_rng(spec.seed)
    item_f = rng.normal(size=(spec.num_items, spec.latent_rank))
    centers = rng.normal(size=(spec.archetypes, spec.latent_rank))
    archetype = rng.integers(spec.archetypes, size=spec.num_users)
    user_f = centers[archetype] + spec.archetype_spread * rng.normal(size=(spec.num_users, spec.latent_rank))
    item_bias = spec.item_bias_scale * rng.normal(size=spec.num_items)
    user_bias = spec.user_bias_scale * rng.normal(size=spec.num_users)
    interaction = user_f @ item_f.T / np.sqrt(spec.latent_rank)
    scores = 3.5 + user_bias[:, None] + item_bias[None, :] + interaction
    return scores, archetype


def generate(spec: SyntheticSpec = SyntheticSpec()) -> RatingsMatrix:
    """Sample ``density * M * N`` entries uniformly; ratings are the rounded,
    clipped scores plus Gaussian noise of standard deviation ``spec.noise``."""
    if not 0.0 < spec.density <= 1.0:
        raise ConfigError("density must be in (0, 1]")
    if spec.latent_rank < 1 or spec.archetypes < 1 or spec.noise < 0:
        raise ConfigError("invalid synthetic parameters")
    scores, _ = latent_scores(spec)
    rng = np.random.default_rng([spec.seed, 1])
    total = spec.num_users * spec.num_items
    n = max(1, int(round(spec.density * total)))
    flat = np.sort(rng.choice(total, size=n, replace=False))
    users, items = np.divmod(flat, spec.num_items)
    noisy = scores[users, items] + spec.noise * rng.normal(size=n)
    ratings = np.clip(np.rint(noisy), MIN_RATING, MAX_RATING).astype(np.int64)
    return RatingsMatrix(spec.num_users, spec.num_items, users, items, ratings)
