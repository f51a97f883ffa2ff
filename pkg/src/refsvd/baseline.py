"""Corrected (shrunken) averages.

Item means are pulled towards the global mean with a pseudo-count ``k1``;
user offsets from those item means are pulled towards the global offset
with a pseudo-count ``k2``.  An unseen item therefore predicts the global
mean and an unseen user the global offset.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, EmptyRatingsError
from .ratings import RatingsMatrix

DEFAULT_K1 = 25.0
DEFAULT_K2 = 10.0


@dataclass(frozen=True, eq=False)
class CorrectedAveragesModel:
    global_mean: float
    item_corrected_mean: np.ndarray
    global_offset: float
    user_corrected_offset: np.ndarray
    k1: float = DEFAULT_K1
    k2: float = DEFAULT_K2

    def predict(self, u: int, i: int) -> float:
        return float(self.item_corrected_mean[i] + self.user_corrected_offset[u])

    def predict_all(self) -> np.ndarray:
        return self.user_corrected_offset[:, None] + self.item_corrected_mean[None, :]


def fit_corrected_averages(train: RatingsMatrix, k1: float = DEFAULT_K1, k2: float = DEFAULT_K2) -> CorrectedAveragesModel:
    if len(train) == 0:
        raise EmptyRatingsError("cannot fit corrected averages on an empty matrix")
    if k1 < 0 or k2 < 0:
        raise ConfigError("k1 and k2 must be non-negative")
    r = train.ratings.astype(float)
    global_mean = float(r.mean())

    item_sum = np.bincount(train.items, weights=r, minlength=train.num_items)
    item_n = np.bincount(train.items, minlength=train.num_items)
    item_mean = np.empty(train.num_items)
    seen = item_n > 0
    # Evaluated separately so that k1 == 0 with no ratings does not divide 0/0.
    item_mean[~seen] = global_mean
    item_mean[seen] = (k1 * global_mean + item_sum[seen]) / (k1 + item_n[seen])

    resid = r - item_mean[train.items]
    global_offset = float(resid.mean())

    user_sum = np.bincount(train.users, weights=resid, minlength=train.num_users)
    user_n = np.bincount(train.users, minlength=train.num_users)
    user_off = np.empty(train.num_users)
    seen = user_n > 0
    user_off[~seen] = global_offset
    user_off[seen] = (k2 * global_offset + user_sum[seen]) / (k2 + user_n[seen])

    item_mean.flags.writeable = False
    user_off.flags.writeable = False
    return CorrectedAveragesModel(global_mean, item_mean, global_offset, user_off, float(k1), float(k2))


def predict_corrected(model: CorrectedAveragesModel, u: int, i: int) -> float:
    return model.predict(u, i)


def fill_corrected(train: RatingsMatrix, model: CorrectedAveragesModel) -> np.ndarray:
    """Dense matrix: observed ratings where known, corrected-average prediction elsewhere."""
    out = model.predict_all()
    out[train.users, train.items] = train.ratings
    return out


def save_model_csv(model: CorrectedAveragesModel, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("section", "index", "value"))
        w.writerow(("globals", "global_mean", repr(model.global_mean)))
        w.writerow(("globals", "global_offset", repr(model.global_offset)))
        w.writerow(("globals", "k1", repr(model.k1)))
        w.writerow(("globals", "k2", repr(model.k2)))
        for i, v in enumerate(model.item_corrected_mean.tolist()):
            w.writerow(("item", i, repr(v)))
        for u, v in enumerate(model.user_corrected_offset.tolist()):
            w.writerow(("user", u, repr(v)))
