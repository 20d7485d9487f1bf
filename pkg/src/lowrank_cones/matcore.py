"""Dense real-matrix kernel with pinned conventions.

Everything else in the package sits on this module: singular value
decomposition with a fixed sign convention, Moore-Penrose pseudoinverse,
orthonormal complements, seeded orthogonal sampling, the anti-identity,
and the plain-text matrix format used by the command-line tools.

Determinism is part of every contract here: the same input (and, where
randomness is involved, the same :class:`RandomSource`) produces the same
floats on a given platform, bit for bit.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidInput

__all__ = [
    "RANK_RTOL",
    "RANK_FLOOR",
    "SvdFactors",
    "RandomSource",
    "as_matrix",
    "svd",
    "svd_full",
    "rank_from_sigma",
    "pinv",
    "orth_complement",
    "orthonormalize",
    "haar_orthogonal",
    "reversal",
    "spectral_norm",
    "frobenius_norm",
    "format_matrix_text",
    "parse_matrix_text",
    "write_matrix_text",
    "read_matrix_text",
]

# Singular-value cutoff: sigma_i counts toward the rank iff
# sigma_i > max(RANK_RTOL * sigma_1, RANK_FLOOR).  The absolute floor keeps
# numerically-zero matrices at rank 0.
RANK_RTOL = 1e-9
RANK_FLOOR = 1e-12


def as_matrix(A, name: str = "matrix") -> np.ndarray:
    """Validate and convert ``A`` to a 2-d float array.

    Parameters
    ----------
    A : array_like
        Candidate matrix.
    name : str
        Name used in error messages.

    Returns
    -------
    numpy.ndarray
        ``A`` as a C-contiguous float64 array.

    Raises
    ------
    InvalidInput
        If ``A`` is not 2-dimensional or contains non-finite entries.
    """
    M = np.asarray(A, dtype=float)
    if M.ndim != 2:
        raise InvalidInput(f"{name} must be 2-dimensional, got shape {M.shape}")
    if M.size and not np.all(np.isfinite(M)):
        raise InvalidInput(f"{name} contains non-finite entries")
    return M


def _fix_signs(U: np.ndarray, V: np.ndarray | None) -> tuple[np.ndarray, np.ndarray | None]:
    """Make the largest-magnitude entry of each column of ``U`` positive.

    When ``V`` is given, its columns are flipped in tandem so that any
    product ``U @ diag(s) @ V.T`` is unchanged.
    """
    U = U.copy()
    V = None if V is None else V.copy()
    for j in range(U.shape[1]):
        col = U[:, j]
        i = int(np.argmax(np.abs(col)))
        if col[i] < 0.0:
            U[:, j] = -col
            if V is not None and j < V.shape[1]:
                V[:, j] = -V[:, j]
    return U, V


@dataclass(frozen=True)
class SvdFactors:
    """Thin singular value decomposition ``A = U @ diag(sigma) @ V.T``.

    Attributes
    ----------
    U : numpy.ndarray
        ``rows x k`` column-orthonormal left factor, ``k = min(rows, cols)``.
    sigma : numpy.ndarray
        The ``k`` singular values, nonincreasing and nonnegative.
    V : numpy.ndarray
        ``cols x k`` column-orthonormal right factor.
    """

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray

    def rank(self, tol: float = RANK_RTOL) -> int:
        """Numerical rank of the decomposed matrix at relative cutoff ``tol``."""
        return rank_from_sigma(self.sigma, tol)

    def reconstruct(self) -> np.ndarray:
        """Return ``U @ diag(sigma) @ V.T``."""
        return (self.U * self.sigma) @ self.V.T


def svd(A) -> SvdFactors:
    """Thin SVD with the package sign convention.

    The largest-magnitude entry of each column of ``U`` is made positive
    (the paired column of ``V`` is flipped with it), which pins a unique
    representative whenever the singular values are simple.

    Parameters
    ----------
    A : array_like
        Matrix with at least one row and one column.

    Returns
    -------
    SvdFactors

    Raises
    ------
    InvalidInput
        If ``A`` is empty, not 2-dimensional, or has non-finite entries.
    """
    M = as_matrix(A)
    if M.shape[0] == 0 or M.shape[1] == 0:
        raise InvalidInput(f"matrix must have positive dimensions, got {M.shape}")
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    U, V = _fix_signs(U, Vt.T)
    return SvdFactors(U=U, sigma=s, V=V)


def svd_full(A) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full SVD ``A = W @ diag(sigma) @ Z.T`` with square orthogonal factors.

    The first ``min(rows, cols)`` columns of ``W`` and ``Z`` follow the same
    paired sign convention as :func:`svd`; trailing columns (null-space
    completions) are sign-fixed independently, which changes nothing in the
    product because they multiply zero singular values.

    Returns
    -------
    (W, sigma, Z)
        ``W`` is ``rows x rows``, ``Z`` is ``cols x cols``, ``sigma`` has
        length ``min(rows, cols)``.
    """
    M = as_matrix(A)
    if M.shape[0] == 0 or M.shape[1] == 0:
        raise InvalidInput(f"matrix must have positive dimensions, got {M.shape}")
    W, s, Zt = np.linalg.svd(M, full_matrices=True)
    Z = Zt.T
    k = s.shape[0]
    Wk, Zk = _fix_signs(W[:, :k], Z[:, :k])
    Wtail, _ = _fix_signs(W[:, k:], None)
    Ztail, _ = _fix_signs(Z[:, k:], None)
    return np.hstack([Wk, Wtail]), s, np.hstack([Zk, Ztail])


def rank_from_sigma(sigma: np.ndarray, tol: float = RANK_RTOL) -> int:
    """Count singular values above the cutoff ``max(tol * sigma_1, RANK_FLOOR)``.

    The relative part scales with the matrix; the absolute floor
    :data:`RANK_FLOOR` keeps numerically-zero matrices (whose own leading
    singular value is rounding noise) at rank 0.
    """
    s = np.asarray(sigma, dtype=float)
    if s.size == 0:
        return 0
    cut = max(tol * s[0], RANK_FLOOR)
    return int(np.count_nonzero(s > cut))


def pinv(A, tol: float = RANK_RTOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse via the thin SVD.

    Singular values at or below the :func:`rank_from_sigma` cutoff are
    treated as zero, so the result of a rank-deficient input is exact
    rather than noise-amplifying.
    """
    f = svd(A)
    r = rank_from_sigma(f.sigma, tol)
    if r == 0:
        return np.zeros((f.V.shape[0], f.U.shape[0]))
    return (f.V[:, :r] / f.sigma[:r]) @ f.U[:, :r].T


def orth_complement(U) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of ``span(U)``.

    Parameters
    ----------
    U : array_like
        ``n x p`` column-orthonormal matrix, ``0 <= p <= n``.

    Returns
    -------
    numpy.ndarray
        ``n x (n - p)`` column-orthonormal ``W`` with ``U.T @ W == 0`` up to
        1e-10.  ``p == 0`` returns the identity; ``p == n`` returns an
        ``n x 0`` matrix.

    Raises
    ------
    InvalidInput
        If ``U`` has more columns than rows or is not column-orthonormal.
    """
    M = as_matrix(U, "frame")
    n, p = M.shape
    if p > n:
        raise InvalidInput(f"frame has more columns than rows: {M.shape}")
    if p == 0:
        return np.eye(n)
    if not np.allclose(M.T @ M, np.eye(p), atol=1e-8):
        raise InvalidInput("frame is not column-orthonormal")
    if p == n:
        return np.zeros((n, 0))
    W, _, _ = np.linalg.svd(M, full_matrices=True)
    comp, _ = _fix_signs(W[:, p:], None)
    return comp


def orthonormalize(A) -> np.ndarray:
    """Column-orthonormalize a full-column-rank matrix via QR.

    The R diagonal signs are absorbed so that an already-orthonormal input
    is returned unchanged (up to floating noise) and the result is a pure
    function of the input.

    Raises
    ------
    InvalidInput
        If the columns are numerically dependent.
    """
    M = as_matrix(A, "frame")
    n, p = M.shape
    if p == 0:
        return M.copy()
    if p > n:
        raise InvalidInput(f"frame has more columns than rows: {M.shape}")
    Q, R = np.linalg.qr(M)
    diag = np.diag(R)
    if np.min(np.abs(diag)) <= RANK_RTOL * max(np.max(np.abs(diag)), RANK_FLOOR):
        raise InvalidInput("columns are numerically dependent; cannot orthonormalize")
    d = np.sign(diag)
    d[d == 0.0] = 1.0
    return Q * d


@dataclass(frozen=True)
class RandomSource:
    """Seeded, named random stream with collision-free derived substreams.

    Attributes
    ----------
    seed : int
        Root seed, ``0 <= seed < 2**64``.
    path : tuple of int
        Derivation path; :meth:`derive` appends to it.  Two sources with
        different paths produce statistically independent streams, and the
        same ``(seed, path)`` always reproduces the same draws.
    algorithm : str
        Generator family tag; only ``"pcg64"`` is supported.
    """

    seed: int
    path: tuple = ()
    algorithm: str = "pcg64"

    def __post_init__(self) -> None:
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise InvalidInput(f"seed must be an integer in [0, 2**64), got {self.seed!r}")
        if self.algorithm != "pcg64":
            raise InvalidInput(f"unsupported generator algorithm {self.algorithm!r}")
        object.__setattr__(self, "path", tuple(int(k) for k in self.path))

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.path)
        return np.random.Generator(np.random.PCG64(ss))

    def derive(self, *key: int) -> "RandomSource":
        """Child source for the given integer key path (e.g. trial, index)."""
        return replace(self, path=self.path + tuple(int(k) for k in key))


def haar_orthogonal(n: int, rng) -> np.ndarray:
    """Draw an ``n x n`` orthogonal matrix from the Haar distribution.

    Uses the QR factorization of a standard Gaussian matrix with the R
    diagonal signs absorbed into Q, which makes the law exactly Haar and
    the draw a pure function of the stream state.

    Parameters
    ----------
    n : int
        Positive dimension.
    rng : RandomSource or numpy.random.Generator
        Stream to draw from.  A :class:`RandomSource` is opened at its
        start; a generator is consumed in place.
    """
    if n < 1:
        raise InvalidInput(f"dimension must be positive, got {n}")
    gen = rng.generator() if isinstance(rng, RandomSource) else rng
    G = gen.standard_normal((n, n))
    Q, R = np.linalg.qr(G)
    d = np.sign(np.diag(R))
    d[d == 0.0] = 1.0
    return Q * d


def reversal(l: int) -> np.ndarray:
    """The ``l x l`` anti-identity (ones on the anti-diagonal).

    ``l == 0`` returns an empty matrix.  Multiplying on the right reverses
    column order; on the left, row order.
    """
    if l < 0:
        raise InvalidInput(f"size must be nonnegative, got {l}")
    return np.fliplr(np.eye(l))


def spectral_norm(A) -> float:
    """Largest singular value; 0.0 for a matrix with an empty dimension."""
    M = as_matrix(A)
    if M.size == 0:
        return 0.0
    return float(np.linalg.svd(M, compute_uv=False)[0])


def frobenius_norm(A) -> float:
    """Frobenius norm; 0.0 for a matrix with an empty dimension."""
    M = np.asarray(A, dtype=float)
    return float(np.linalg.norm(M)) if M.size else 0.0


def format_matrix_text(A) -> str:
    """Serialize a matrix to the package text format.

    Line 1 is ``"<rows> <cols>"``; each subsequent line holds one row of
    space-separated entries printed with ``%.17g`` (17 significant digits,
    lossless float64 round-trip).
    """
    M = as_matrix(A)
    rows, cols = M.shape
    out = io.StringIO()
    out.write(f"{rows} {cols}\n")
    for i in range(rows):
        out.write(" ".join(f"{x:.17g}" for x in M[i]))
        out.write("\n")
    return out.getvalue()


def parse_matrix_text(text: str) -> np.ndarray:
    """Parse the package matrix text format (inverse of
    :func:`format_matrix_text`).

    Raises
    ------
    InvalidInput
        On a malformed header, wrong row/entry counts, or entries that do
        not parse as finite floats.
    """
    lines = [ln for ln in text.splitlines()]
    if not lines:
        raise InvalidInput("empty matrix text")
    head = lines[0].split()
    if len(head) != 2:
        raise InvalidInput(f"malformed header line {lines[0]!r}; expected '<rows> <cols>'")
    try:
        rows, cols = int(head[0]), int(head[1])
    except ValueError as exc:
        raise InvalidInput(f"malformed header line {lines[0]!r}") from exc
    if rows < 0 or cols < 0:
        raise InvalidInput(f"negative dimensions in header: {rows} {cols}")
    body = lines[1:]
    # Trailing blank lines are tolerated; blank body lines for cols == 0 are meaningful.
    while len(body) > rows and (not body[-1].strip()):
        body.pop()
    if len(body) != rows:
        raise InvalidInput(f"expected {rows} rows of data, found {len(body)}")
    data = np.zeros((rows, cols))
    for i, ln in enumerate(body):
        parts = ln.split()
        if len(parts) != cols:
            raise InvalidInput(f"row {i} has {len(parts)} entries, expected {cols}")
        try:
            vals = [float(p) for p in parts]
        except ValueError as exc:
            raise InvalidInput(f"row {i} has a non-numeric entry") from exc
        data[i] = vals
    if data.size and not np.all(np.isfinite(data)):
        raise InvalidInput("matrix text contains non-finite entries")
    return data


def write_matrix_text(path, A) -> None:
    """Write ``A`` to ``path`` in the package text format."""
    text = format_matrix_text(A)
    with open(os.fspath(path), "w", encoding="ascii") as fh:
        fh.write(text)


def read_matrix_text(path) -> np.ndarray:
    """Read a matrix from ``path`` in the package text format.

    Raises
    ------
    OSError
        If the file cannot be opened or read.
    InvalidInput
        If the contents are malformed.
    """
    with open(os.fspath(path), "r", encoding="ascii") as fh:
        return parse_matrix_text(fh.read())
