"""Shared fixtures and helpers for the test suite."""

import numpy as np
import pytest

from lowrank_cones import RandomSource
from lowrank_cones.limits import _random_rank_matrix


@pytest.fixture
def rng():
    return RandomSource(0)


def random_rank_matrix(m, n, r, seed_or_rng):
    """Seeded m x n matrix of exact rank r with singular-value gaps 0.5."""
    src = seed_or_rng if isinstance(seed_or_rng, RandomSource) else RandomSource(seed_or_rng)
    return _random_rank_matrix(m, n, r, src)


def assert_orthonormal(B, atol=1e-10):
    B = np.asarray(B)
    p = B.shape[1]
    assert np.allclose(B.T @ B, np.eye(p), atol=atol)
