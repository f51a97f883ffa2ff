"""Sparse ratings storage, file I/O, train/test splitting and RMSE.

Unknown ratings are never stored.  A :class:`RatingsMatrix` only holds the
observed ``(user, item, rating)`` triples together with the matrix shape and
the raw identifiers each dense index was assigned from.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (
    ConfigError,
    DataError,
    DuplicateRatingError,
    EmptyRatingsError,
    MetricError,
    ParseError,
    RatingDomainError,
)

MIN_RATING = 1
MAX_RATING = 5
FORMATS = ("csv_triples", "movielens_tab")
_CSV_HEADER = ("user", "item", "rating")


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True).reshape(-1)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class RatingsMatrix:
    """Observed entries of an ``num_users x num_items`` ratings matrix."""

    num_users: int
    num_items: int
    users: np.ndarray
    items: np.ndarray
    ratings: np.ndarray
    user_ids: tuple = field(default=())
    item_ids: tuple = field(default=())

    def __post_init__(self):
        users = _frozen(self.users, np.int64)
        items = _frozen(self.items, np.int64)
        ratings = _frozen(self.ratings, np.int64)
        object.__setattr__(self, "users", users)
        object.__setattr__(self, "items", items)
        object.__setattr__(self, "ratings", ratings)
        if not self.user_ids:
            object.__setattr__(self, "user_ids", tuple(str(u + 1) for u in range(self.num_users)))
        if not self.item_ids:
            object.__setattr__(self, "item_ids", tuple(str(i + 1) for i in range(self.num_items)))
        object.__setattr__(self, "user_ids", tuple(self.user_ids))
        object.__setattr__(self, "item_ids", tuple(self.item_ids))

        if not (len(users) == len(items) == len(ratings)):
            raise DataError("users, items and ratings must have equal length")
        if len(self.user_ids) != self.num_users or len(self.item_ids) != self.num_items:
            raise DataError("id maps do not match matrix shape")
        if len(users):
            if users.min() < 0 or users.max() >= self.num_users:
                raise DataError("user index out of range")
            if items.min() < 0 or items.max() >= self.num_items:
                raise DataError("item index out of range")
            bad = (ratings < MIN_RATING) | (ratings > MAX_RATING)
            if bad.any():
                raise RatingDomainError(f"rating {ratings[bad][0]} outside {MIN_RATING}..{MAX_RATING}")
            keys = users * self.num_items + items
            if len(np.unique(keys)) != len(keys):
                raise DuplicateRatingError("duplicate (user, item) entry")

    @classmethod
    def from_triples(cls, triples: Iterable[tuple[int, int, int]], num_users=None, num_items=None, **ids):
        arr = np.array(list(triples), dtype=np.int64).reshape(-1, 3)
        if num_users is None:
            num_users = int(arr[:, 0].max()) + 1 if len(arr) else 0
        if num_items is None:
            num_items = int(arr[:, 1].max()) + 1 if len(arr) else 0
        return cls(num_users, num_items, arr[:, 0], arr[:, 1], arr[:, 2], **ids)

    def __len__(self):
        return len(self.ratings)

    @property
    def shape(self):
        return (self.num_users, self.num_items)

    @property
    def density(self) -> float:
        return len(self) / (self.num_users * self.num_items)

    def triples(self) -> set[tuple[int, int, int]]:
        return set(zip(self.users.tolist(), self.items.tolist(), self.ratings.tolist()))

    def entries_equal(self, other: "RatingsMatrix") -> bool:
        return self.shape == other.shape and self.triples() == other.triples()

    def to_dense(self, fill=np.nan) -> np.ndarray:
        out = np.full(self.shape, fill, dtype=float)
        out[self.users, self.items] = self.ratings
        return out

    def observed_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        mask[self.users, self.items] = True
        return mask

    def item_counts(self) -> np.ndarray:
        return np.bincount(self.items, minlength=self.num_items)

    def user_counts(self) -> np.ndarray:
        return np.bincount(self.users, minlength=self.num_users)

    def take(self, index) -> "RatingsMatrix":
        """Sub-matrix holding only the entries at ``index``; shape and ids are kept."""
        index = np.asarray(index, dtype=np.int64)
        return RatingsMatrix(
            self.num_users, self.num_items,
            self.users[index], self.items[index], self.ratings[index],
            self.user_ids, self.item_ids,
        )

    def resized(self, user_ids: Sequence[str], item_ids: Sequence[str]) -> "RatingsMatrix":
        """Same entries embedded in a larger id space (existing ids must be a prefix)."""
        if tuple(user_ids[: self.num_users]) != self.user_ids or tuple(item_ids[: self.num_items]) != self.item_ids:
            raise DataError("resized id maps must extend the existing ones")
        return RatingsMatrix(
            len(user_ids), len(item_ids), self.users, self.items, self.ratings,
            tuple(user_ids), tuple(item_ids),
        )


# -- I/O ---------------------------------------------------------------------

def _parse_rating(token: str, lineno: int) -> int:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"rating {token!r} is not a number", lineno) from None
    if not math.isfinite(value) or value != int(value) or not MIN_RATING <= value <= MAX_RATING:
        raise RatingDomainError(f"rating {token!r} outside integer scale {MIN_RATING}..{MAX_RATING}", lineno)
    return int(value)


def _records(path: Path, fmt: str):
    with open(path, encoding="utf-8", newline="") as fh:
        first = True
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if fmt == "csv_triples":
                fields = [f.strip() for f in line.split(",")]
                if first and tuple(f.lower() for f in fields) == _CSV_HEADER:
                    first = False
                    continue
                if len(fields) != 3:
                    raise ParseError(f"expected 3 comma-separated fields, got {len(fields)}", lineno)
            else:
                fields = line.split("\t")
                if len(fields) != 4:
                    raise ParseError(f"expected 4 tab-separated fields, got {len(fields)}", lineno)
            first = False
            user, item, rating = fields[0], fields[1], fields[2]
            if not user or not item:
                raise ParseError("empty user or item id", lineno)
            yield lineno, user, item, _parse_rating(rating, lineno)


def load_ratings(path, fmt: str = "csv_triples", user_ids: Sequence[str] = (), item_ids: Sequence[str] = ()) -> RatingsMatrix:
    """Read a ratings file and re-index raw ids densely in first-seen order.

    ``user_ids``/``item_ids`` pre-seed the id maps, so a test file can be read
    in the index space of its training file; unseen ids are appended.
    """
    if fmt not in FORMATS:
        raise ConfigError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    path = Path(path)
    umap = {u: n for n, u in enumerate(user_ids)}
    imap = {i: n for n, i in enumerate(item_ids)}
    seen: dict[tuple[int, int], int] = {}
    users, items, ratings = [], [], []
    for lineno, user, item, rating in _records(path, fmt):
        u = umap.setdefault(user, len(umap))
        i = imap.setdefault(item, len(imap))
        if (u, i) in seen:
            raise DuplicateRatingError(
                f"duplicate rating for user {user!r}, item {item!r} (first at line {seen[u, i]})", lineno
            )
        seen[u, i] = lineno
        users.append(u)
        items.append(i)
        ratings.append(rating)
    if not ratings:
        raise EmptyRatingsError(f"{path}: no ratings found")
    return RatingsMatrix(len(umap), len(imap), users, items, ratings, tuple(umap), tuple(imap))


def load_pair(train_path, test_path, fmt: str = "csv_triples") -> tuple[RatingsMatrix, RatingsMatrix]:
    """Load a train/test pair into one shared index space.

    Ids that appear only in the test file get fresh indices after the
    training ones, so they behave as never-rated users/items in training.
    """
    train = load_ratings(train_path, fmt)
    test = load_ratings(test_path, fmt, train.user_ids, train.item_ids)
    train = train.resized(test.user_ids, test.item_ids)
    return train, test


def save_ratings(matrix: RatingsMatrix, path, comments: Sequence[str] = ()) -> None:
    """Write ``csv_triples`` with raw ids, in stored entry order."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_CSV_HEADER)
        for u, i, r in zip(matrix.users.tolist(), matrix.items.tolist(), matrix.ratings.tolist()):
            writer.writerow((matrix.user_ids[u], matrix.item_ids[i], r))


def save_id_maps(matrix: RatingsMatrix, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("kind", "index", "raw_id"))
        for n, raw in enumerate(matrix.user_ids):
            writer.writerow(("user", n, raw))
        for n, raw in enumerate(matrix.item_ids):
            writer.writerow(("item", n, raw))


# -- splitting & evaluation --------------------------------------------------

@dataclass(frozen=True, eq=False)
class SplitPair:
    train: RatingsMatrix
    test: RatingsMatrix
    seed: int
    train_fraction: float


def split(src: RatingsMatrix, train_fraction: float = 0.8, seed: int = 42) -> SplitPair:
    """Uniformly random partition of the observed entries.

    Both halves keep the full index space, and each half lists its entries
    in the source order.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ConfigError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n = len(src)
    if n < 2:
        raise DataError("need at least 2 ratings to split")
    n_train = min(max(int(round(train_fraction * n)), 1), n - 1)
    perm = np.random.default_rng(seed).permutation(n)
    train_idx = np.sort(perm[:n_train])
    test_idx = np.sort(perm[n_train:])
    return SplitPair(src.take(train_idx), src.take(test_idx), seed, train_fraction)


def rmse(predictions: np.ndarray, truth: RatingsMatrix) -> float:
    if len(truth) == 0:
        raise MetricError("RMSE of an empty truth set is undefined")
    predictions = np.asarray(predictions, dtype=float)
    if predictions.shape[0] < truth.num_users or predictions.shape[1] < truth.num_items:
        raise DataError(f"predictions {predictions.shape} do not cover truth {truth.shape}")
    err = predictions[truth.users, truth.items] - truth.ratings
    return float(np.sqrt(np.mean(err * err)))


class Histogram(NamedTuple):
    edges: np.ndarray
    counts: np.ndarray

    def rows(self):
        return [(float(lo), float(hi), int(c)) for lo, hi, c in zip(self.edges[:-1], self.edges[1:], self.counts)]


def _count_histogram(values: np.ndarray, bins: int) -> Histogram:
    # Equal-width bins over [0, max]; bins are right-closed (lo, hi], the first also takes 0.
    hi = max(int(values.max()) if len(values) else 0, 1)
    edges = np.linspace(0.0, hi, bins + 1)
    idx = np.searchsorted(edges[1:-1], values, side="left")
    return Histogram(edges, np.bincount(idx, minlength=bins))


def rating_histograms(src: RatingsMatrix, bins: int = 50) -> tuple[Histogram, Histogram]:
    """Histograms of ratings received per item and ratings given per user."""
    if bins < 1:
        raise ConfigError("bins must be >= 1")
    return _count_histogram(src.item_counts(), bins), _count_histogram(src.user_counts(), bins)


def write_histogram_csv(hist: Histogram, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("bin_lo", "bin_hi", "count"))
        for lo, hi, c in hist.rows():
            writer.writerow((repr(lo), repr(hi), c))
