"""Tests for distances, truncations and membership of bounded-rank sets."""

import numpy as np
import pytest

from lowrank_cones import InvalidRank, distance_to_variety, is_member, numerical_rank, truncate_rank

from conftest import random_rank_matrix


def test_distance_oracle_sqrt5():
    # diag(3, 2, 1) at rank bound 1: the removed tail is sqrt(2^2 + 1^2).
    X = np.diag([3.0, 2.0, 1.0])
    assert distance_to_variety(X, 1) == pytest.approx(np.sqrt(5.0), abs=1e-12)
    assert distance_to_variety(X, 3) == 0.0
    assert distance_to_variety(X, 0) == pytest.approx(np.sqrt(14.0), abs=1e-12)


def test_truncate_rank_is_best_approximation():
    X = random_rank_matrix(5, 4, 4, 0)
    T = truncate_rank(X, 2)
    assert numerical_rank(T) == 2
    assert np.linalg.norm(X - T) == pytest.approx(distance_to_variety(X, 2), abs=1e-12)


def test_truncate_rank_noop_at_full_budget():
    X = random_rank_matrix(4, 4, 2, 1)
    assert np.allclose(truncate_rank(X, 3), X, atol=1e-12)


def test_numerical_rank():
    assert numerical_rank(np.zeros((3, 3))) == 0
    assert numerical_rank(random_rank_matrix(6, 5, 3, 7)) == 3


def test_is_member():
    X = random_rank_matrix(4, 4, 2, 3)
    assert is_member(X, 2)
    assert is_member(X, 3)
    assert not is_member(X, 1)


def test_rank_bounds_validated():
    X = np.eye(3)
    with pytest.raises(InvalidRank):
        distance_to_variety(X, -1)
    with pytest.raises(InvalidRank):
        distance_to_variety(X, 4)
    with pytest.raises(InvalidRank):
        truncate_rank(X, -2)
