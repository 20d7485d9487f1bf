"""Tests for the matrix core: SVD conventions, ranks, RNG, text format."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lowrank_cones import InvalidInput, RandomSource
from lowrank_cones import matcore

from conftest import assert_orthonormal, random_rank_matrix


def test_as_matrix_accepts_2d_float():
    A = matcore.as_matrix([[1, 2], [3, 4]])
    assert A.dtype == np.float64
    assert A.shape == (2, 2)


def test_as_matrix_rejects_bad_inputs():
    with pytest.raises(InvalidInput):
        matcore.as_matrix([1.0, 2.0])
    with pytest.raises(InvalidInput):
        matcore.as_matrix(np.array([[np.nan, 0.0], [0.0, 1.0]]))
    with pytest.raises(InvalidInput):
        matcore.as_matrix(np.array([[np.inf, 0.0], [0.0, 1.0]]))


def test_svd_reconstructs_and_is_sign_fixed():
    X = random_rank_matrix(5, 4, 3, 11)
    f = matcore.svd(X)
    assert np.allclose(f.reconstruct(), X, atol=1e-12)
    assert_orthonormal(f.U)
    assert_orthonormal(f.V)
    # Sign convention: the largest-magnitude entry of every left singular
    # vector is positive, so the factorization is deterministic.
    for j in range(f.U.shape[1]):
        col = f.U[:, j]
        assert col[np.argmax(np.abs(col))] > 0


def test_svd_full_square_factors():
    X = random_rank_matrix(5, 3, 2, 3)
    W, sigma, Z = matcore.svd_full(X)
    assert W.shape == (5, 5) and Z.shape == (3, 3)
    assert_orthonormal(W)
    assert_orthonormal(Z)
    S = np.zeros((5, 3))
    S[: len(sigma), : len(sigma)] = np.diag(sigma)
    assert np.allclose(W @ S @ Z.T, X, atol=1e-12)


def test_rank_from_sigma_relative_cut():
    assert matcore.rank_from_sigma(np.array([1.0, 0.5, 1e-12])) == 2
    assert matcore.rank_from_sigma(np.array([0.0])) == 0
    assert matcore.rank_from_sigma(np.array([], dtype=float)) == 0


def test_rank_from_sigma_absolute_floor_for_numerical_zero():
    # A numerically-zero matrix must report rank 0 even though its own
    # leading singular value is positive rounding noise.
    assert matcore.rank_from_sigma(np.array([3e-16, 2e-16, 1e-17])) == 0


def test_orth_complement_spans_and_edge_cases():
    X = random_rank_matrix(5, 5, 2, 4)
    U = matcore.svd(X).U[:, :2]
    W = matcore.orth_complement(U)
    assert W.shape == (5, 3)
    assert_orthonormal(np.hstack([U, W]))
    assert np.allclose(matcore.orth_complement(np.zeros((4, 0))), np.eye(4))
    assert matcore.orth_complement(np.eye(3)).shape == (3, 0)


def test_orth_complement_rejects_non_orthonormal():
    with pytest.raises(InvalidInput):
        matcore.orth_complement(np.array([[1.0], [1.0]]))


def test_orthonormalize_qr():
    A = np.array([[1.0, 1.0], [0.0, 1.0], [0.0, 2.0]])
    Q = matcore.orthonormalize(A)
    assert_orthonormal(Q)
    # Same column span.
    assert np.allclose(Q @ (Q.T @ A), A, atol=1e-12)
    with pytest.raises(InvalidInput):
        matcore.orthonormalize(np.array([[1.0, 2.0], [2.0, 4.0]]))


def test_random_source_deterministic_and_path_separated():
    a = RandomSource(42).generator().standard_normal(5)
    b = RandomSource(42).generator().standard_normal(5)
    assert np.array_equal(a, b)
    c = RandomSource(42).derive(1).generator().standard_normal(5)
    d = RandomSource(42).derive(2).generator().standard_normal(5)
    assert not np.array_equal(c, d)
    # Derivation paths compose.
    e = RandomSource(42).derive(1, 2).generator().standard_normal(3)
    f = RandomSource(42).derive(1).derive(2).generator().standard_normal(3)
    assert np.array_equal(e, f)


def test_random_source_validates_seed():
    with pytest.raises(InvalidInput):
        RandomSource(-1)
    with pytest.raises(InvalidInput):
        RandomSource(2**64)


def test_haar_orthogonal_is_orthogonal():
    Q = matcore.haar_orthogonal(6, RandomSource(5))
    assert Q.shape == (6, 6)
    assert_orthonormal(Q)


def test_reversal_is_anti_identity():
    J = matcore.reversal(3)
    assert np.array_equal(J, np.array([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]])[::-1].T[::-1].T)
    assert np.array_equal(J @ J, np.eye(3))


def test_norms():
    X = np.array([[3.0, 0.0], [0.0, 4.0]])
    assert matcore.spectral_norm(X) == pytest.approx(4.0)
    assert matcore.frobenius_norm(X) == pytest.approx(5.0)
    assert matcore.frobenius_norm(np.zeros((0, 3))) == 0.0


def test_matrix_text_roundtrip_exact():
    X = random_rank_matrix(4, 3, 2, 9) * np.pi
    text = matcore.format_matrix_text(X)
    Y = matcore.parse_matrix_text(text)
    # %.17g is a shortest-exact decimal rendering: roundtrip is bitwise.
    assert np.array_equal(X, Y)
    assert text.splitlines()[0] == "4 3"


def test_matrix_text_parse_errors():
    with pytest.raises(InvalidInput):
        matcore.parse_matrix_text("2 2\n1 2\n3\n")
    with pytest.raises(InvalidInput):
        matcore.parse_matrix_text("not a header\n")
    with pytest.raises(InvalidInput):
        matcore.parse_matrix_text("2 2\n1 2\n")


def test_matrix_text_file_roundtrip(tmp_path):
    X = random_rank_matrix(3, 5, 1, 2)
    path = tmp_path / "x.txt"
    matcore.write_matrix_text(path, X)
    assert np.array_equal(matcore.read_matrix_text(path), X)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**64 - 1))
def test_haar_orthogonality_property(seed):
    Q = matcore.haar_orthogonal(4, RandomSource(seed))
    assert np.allclose(Q.T @ Q, np.eye(4), atol=1e-10)
