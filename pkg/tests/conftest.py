import numpy as np
import pytest

from refsvd.ratings import RatingsMatrix


def random_ratings(rng, num_users, num_items, density=0.5, min_entries=1):
    """Random 1..5 ratings with roughly the requested density."""
    mask = rng.random((num_users, num_items)) < density
    if mask.sum() < min_entries:
        flat = rng.choice(num_users * num_items, size=min_entries, replace=False)
        mask.flat[flat] = True
    users, items = np.nonzero(mask)
    vals = rng.integers(1, 6, size=len(users))
    return RatingsMatrix(num_users, num_items, users, items, vals)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def tiny():
    # 3 users x 2 items; user 0 and item 1 are sparse
    return RatingsMatrix.from_triples([(0, 0, 5), (1, 0, 3), (2, 1, 1)], num_users=3, num_items=2)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
