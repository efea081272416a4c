"""Synthetic Robinson and circular-Robinson similarity matrices.

Matrices are plain ``numpy`` arrays (dense) or ``scipy.sparse`` matrices;
permutations are integer arrays listing a bijection of ``0..n-1``.
"""
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import (
    DimensionMismatch,
    DisconnectedWarning,
    InvalidDimension,
    InvalidParameter,
    NotBijective,
    NotMonotone,
)


@dataclass(frozen=True)
class NoiseSpec:
    """Uniform noise of amplitude ``amplitude`` drawn from ``seed``."""

    amplitude: float
    seed: int = 0

    def __post_init__(self):
        if not self.amplitude >= 0:
            raise InvalidParameter("noise amplitude must be >= 0")


def as_dense(A):
    """Return ``A`` as a float64 ndarray (sparse input is densified)."""
    if sp.issparse(A):
        return A.toarray().astype(np.float64)
    return np.asarray(A, dtype=np.float64)


def check_similarity(A, atol=1e-9):
    """Validate the SimilarityMatrix invariants and return a dense copy."""
    A = as_dense(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidDimension("similarity matrix must be square, got %r" % (A.shape,))
    if A.shape[0] < 2:
        raise InvalidDimension("similarity matrix needs n >= 2")
    if not np.allclose(A, A.T, rtol=0, atol=atol):
        raise InvalidParameter("similarity matrix is not symmetric")
    if (A < 0).any():
        raise InvalidParameter("similarity matrix has negative entries")
    return A


def check_permutation(p, n=None):
    """Return ``p`` as an int64 array, raising NotBijective if it is not one."""
    p = np.asarray(p)
    if p.ndim != 1 or (p.size and not np.issubdtype(p.dtype, np.integer)):
        if p.ndim == 1 and np.all(np.mod(p, 1) == 0):
            p = p.astype(np.int64)
        else:
            raise NotBijective("permutation must be a 1-d integer array")
    p = p.astype(np.int64)
    if n is not None and p.size != n:
        raise DimensionMismatch("permutation has length %d, expected %d" % (p.size, n))
    seen = np.zeros(p.size, dtype=bool)
    if p.size and (p.min() < 0 or p.max() >= p.size):
        raise NotBijective("permutation entries must lie in 0..%d" % (p.size - 1))
    seen[p] = True
    if not seen.all():
        raise NotBijective("permutation has repeated entries")
    return p


def inverse_permutation(p):
    p = check_permutation(p)
    inv = np.empty_like(p)
    inv[p] = np.arange(p.size)
    return inv


def _check_n(n):
    if int(n) != n or n < 2:
        raise InvalidDimension("n must be an integer >= 2, got %r" % (n,))
    return int(n)


def _warn_if_disconnected(A):
    # A Toeplitz matrix is connected iff its first off-diagonal is positive.
    if A.shape[0] > 1 and not (np.diag(A, 1) > 0).all():
        warnings.warn(
            "generated matrix has a disconnected similarity graph",
            DisconnectedWarning,
            stacklevel=3,
        )


def gen_linear_banded(n, c):
    """Banded Robinson Toeplitz matrix ``A_ij = max(c - |i-j|, 0)``."""
    n = _check_n(n)
    if not c > 0:
        raise InvalidParameter("band parameter c must be > 0")
    idx = np.arange(n)
    A = np.maximum(c - np.abs(idx[:, None] - idx[None, :]), 0.0).astype(np.float64)
    _warn_if_disconnected(A)
    return A


def gen_kms(n, alpha):
    """Kac-Murdock-Szego matrix ``A_ij = exp(-alpha |i-j|)``."""
    n = _check_n(n)
    if not alpha > 0:
        raise InvalidParameter("alpha must be > 0")
    idx = np.arange(n)
    return np.exp(-alpha * np.abs(idx[:, None] - idx[None, :]).astype(np.float64))


def gen_circulant(n, b):
    """Symmetric circulant matrix with ``A_ij = b[min(|i-j|, n-|i-j|)]``.

    Parameters
    ----------
    n : int
        Matrix size.
    b : array_like
        Nonnegative, non-increasing coefficients, length ``n // 2 + 1``.

    Raises
    ------
    NotMonotone
        If ``b`` increases anywhere.
    """
    n = _check_n(n)
    b = np.asarray(b, dtype=np.float64)
    if b.ndim != 1 or b.size != n // 2 + 1:
        raise InvalidParameter(
            "b must have length floor(n/2)+1 = %d, got %d" % (n // 2 + 1, b.size)
        )
    if (b < 0).any():
        raise InvalidParameter("circulant coefficients must be nonnegative")
    if (np.diff(b) > 0).any():
        raise NotMonotone("circulant coefficients must be non-increasing")
    idx = np.arange(n)
    gap = np.abs(idx[:, None] - idx[None, :])
    return b[np.minimum(gap, n - gap)]


def gen_circular_banded(n, c):
    n = _check_n(n)
    if not c > 0:
        raise InvalidParameter("band parameter c must be > 0")
    k = np.arange(n // 2 + 1)
    A = gen_circulant(n, np.maximum(c - k, 0.0))
    _warn_if_disconnected(A)
    return A


def gen_circular_kms(n, alpha):
    n = _check_n(n)
    if not alpha > 0:
        raise InvalidParameter("alpha must be > 0")
    return gen_circulant(n, np.exp(-alpha * np.arange(n // 2 + 1)))


GENERATORS = {
    "banded": gen_linear_banded,
    "kms": gen_kms,
    "circular_banded": gen_circular_banded,
    "circular_kms": gen_circular_kms,
}

CIRCULAR_KINDS = frozenset({"circular_banded", "circular_kms"})


def generate(kind, n, param):
    """Dispatch to a generator by name (see ``GENERATORS``)."""
    try:
        gen = GENERATORS[kind]
    except KeyError:
        raise InvalidParameter(
            "unknown matrix kind %r (expected one of %s)" % (kind, ", ".join(GENERATORS))
        ) from None
    return gen(n, param)


def random_permutation(n, seed=None):
    """Uniformly random permutation of ``0..n-1``, deterministic given ``seed``."""
    if int(n) != n or n < 1:
        raise InvalidDimension("n must be >= 1")
    return np.random.default_rng(seed).permutation(int(n)).astype(np.int64)


def permute_matrix(A, p):
    """Return ``B`` with ``B[i, j] = A[p[i], p[j]]``."""
    n = A.shape[0]
    if A.shape[0] != A.shape[1]:
        raise InvalidDimension("matrix must be square")
    p = check_permutation(p)
    if p.size != n:
        raise DimensionMismatch("permutation length %d != matrix size %d" % (p.size, n))
    if sp.issparse(A):
        A = A.tocsr()
        return A[p][:, p]
    return np.asarray(A)[np.ix_(p, p)]


def add_noise(A, spec, normalization="max"):
    """Add symmetric nonnegative uniform noise to ``A``.

    ``H~`` is drawn i.i.d. Uniform[0, 1], symmetrized as ``(H~ + H~.T) / 2``,
    its diagonal zeroed, then rescaled. With ``normalization="max"`` (the
    default) the largest entry of ``H`` equals ``a * ||A||_F / n``; with
    ``"frobenius"`` the Frobenius norm of ``H`` equals ``a * ||A||_F``.
    """
    A = as_dense(A)
    n = A.shape[0]
    a = float(spec.amplitude)
    if a == 0:
        return A.copy()
    rng = np.random.default_rng(spec.seed)
    H = rng.random((n, n))
    H = 0.5 * (H + H.T)
    np.fill_diagonal(H, 0.0)
    fro = np.linalg.norm(A, "fro")
    if normalization == "max":
        H *= a * fro / n / H.max()
    elif normalization == "frobenius":
        H *= a * fro / np.linalg.norm(H, "fro")
    else:
        raise InvalidParameter("unknown noise normalization %r" % (normalization,))
    return A + H
