"""Graph Laplacians, a dense symmetric eigensolver and Laplacian embeddings.

The eigensolver reduces the matrix to tridiagonal form with Householder
reflections and then runs the implicit-shift QL iteration, accumulating the
rotations into the eigenvector matrix. It is O(n^3) and meant for the
few-hundred to few-thousand element regime.
"""
import enum
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg.blas import drot
from scipy.sparse.csgraph import connected_components as _cc

from .errors import (
    DimensionMismatch,
    InvalidParameter,
    NoConvergence,
    NotConnected,
    ZeroDegree,
)
from .matgen import as_dense


class LaplacianMode(enum.Enum):
    UNNORMALIZED = "unnormalized"
    RANDOM_WALK = "random_walk"
    SYMMETRIC = "symmetric"


@dataclass(frozen=True)
class Scaling:
    """Column weights of a scaled embedding.

    ``kind`` is one of ``"none"``, ``"ctd"``, ``"heuristic"``, ``"diffusion"``;
    ``t`` is the diffusion time (only used by ``"diffusion"``).
    """

    kind: str = "none"
    t: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "ctd", "heuristic", "diffusion"):
            raise InvalidParameter("unknown scaling %r" % (self.kind,))
        if self.kind == "diffusion" and not self.t >= 0:
            raise InvalidParameter("diffusion time must be >= 0")

    @classmethod
    def parse(cls, text):
        """Parse ``none``, ``ctd``, ``heuristic`` or ``diffusion:<t>``."""
        if isinstance(text, cls):
            return text
        text = str(text).strip().lower()
        if text.startswith("diffusion"):
            _, _, t = text.partition(":")
            try:
                return cls("diffusion", float(t) if t else 1.0)
            except ValueError:
                raise InvalidParameter("bad diffusion time in %r" % text) from None
        return cls(text)

    def weights(self, eigenvalues):
        lam = np.asarray(eigenvalues, dtype=np.float64)
        k = np.arange(1, lam.size + 1)
        if self.kind == "none":
            return np.ones_like(lam)
        if self.kind == "heuristic":
            return 1.0 / np.sqrt(k)
        if self.kind == "ctd":
            if (lam <= 0).any():
                raise InvalidParameter("CTD scaling needs positive eigenvalues")
            return lam ** -0.5
        return (1.0 - lam) ** self.t

    def __str__(self):
        if self.kind == "diffusion":
            return "diffusion:%g" % self.t
        return self.kind


@dataclass
class Embedding:
    """Rows of ``coords`` are the embedded points; eigenvalues exclude the trivial one."""

    coords: np.ndarray
    eigenvalues: np.ndarray
    mode: LaplacianMode
    scaling: Scaling
    vectors: np.ndarray = None  # unscaled eigenvectors, same shape as coords

    @property
    def n(self):
        return self.coords.shape[0]

    @property
    def d(self):
        return self.coords.shape[1]


def _as_mode(mode):
    return mode if isinstance(mode, LaplacianMode) else LaplacianMode(mode)


def degrees(A):
    """Row sums of ``A``."""
    if sp.issparse(A):
        return np.asarray(A.sum(axis=1), dtype=np.float64).ravel()
    return np.asarray(A, dtype=np.float64).sum(axis=1)


def _check_degrees(deg):
    if (deg <= 0).any():
        raise ZeroDegree("%d node(s) have zero degree" % int((deg <= 0).sum()))


def laplacian(A, mode=LaplacianMode.UNNORMALIZED):
    """Dense graph Laplacian of ``A``.

    ``RANDOM_WALK`` returns the symmetric normalization ``I - D^-1/2 A D^-1/2``,
    which is similar to ``I - D^-1 A`` and has the same eigenvalues; the
    random-walk eigenvectors are recovered in :func:`embed`.
    """
    mode = _as_mode(mode)
    W = as_dense(A)
    deg = W.sum(axis=1)
    if mode is LaplacianMode.UNNORMALIZED:
        L = -W
        L[np.diag_indices_from(L)] += deg
        return L
    _check_degrees(deg)
    s = 1.0 / np.sqrt(deg)
    L = -(s[:, None] * W * s[None, :])
    L[np.diag_indices_from(L)] += 1.0
    return 0.5 * (L + L.T)


def normalize_coifman(A):
    """Return ``D^-1 A D^-1``."""
    W = as_dense(A)
    deg = W.sum(axis=1)
    _check_degrees(deg)
    inv = 1.0 / deg
    return inv[:, None] * W * inv[None, :]


def connected_components(A):
    """Connected components of the graph whose edges are the positive entries.

    Returns a list of sorted index arrays, ordered by their smallest member.
    """
    if sp.issparse(A):
        G = sp.csr_matrix(A > 0)
    else:
        G = sp.csr_matrix(np.asarray(A) > 0)
    _, labels = _cc(G, directed=False)
    comps = {}
    for i, lab in enumerate(labels):
        comps.setdefault(lab, []).append(i)
    return sorted((np.array(c, dtype=np.int64) for c in comps.values()), key=lambda c: c[0])


def check_connected(A):
    comps = connected_components(A)
    if len(comps) > 1:
        raise NotConnected(comps)


# --------------------------------------------------------------------------
# dense symmetric eigensolver


def tridiagonalize(A):
    """Householder reduction ``A = Q T Q^T``.

    Returns ``(d, e, Q)`` with ``d`` the diagonal of ``T``, ``e[i] = T[i+1, i]``
    (length n-1) and ``Q`` orthogonal.
    """
    a = np.array(A, dtype=np.float64)
    n = a.shape[0]
    Q = np.eye(n)
    for k in range(n - 2):
        x = a[k + 1:, k]
        norm = np.linalg.norm(x)
        if norm == 0.0:
            continue
        alpha = -math.copysign(norm, x[0])
        v = x.copy()
        v[0] -= alpha
        vnorm = np.linalg.norm(v)
        if vnorm == 0.0:
            continue
        v /= vnorm
        sub = a[k + 1:, k + 1:]
        p = sub @ v
        q = p - (v @ p) * v
        sub -= 2.0 * (np.outer(v, q) + np.outer(q, v))
        a[k + 1:, k] = 0.0
        a[k, k + 1:] = 0.0
        a[k + 1, k] = a[k, k + 1] = alpha
        Qs = Q[:, k + 1:]
        Qs -= 2.0 * np.outer(Qs @ v, v)
    d = np.diag(a).copy()
    e = np.diag(a, -1).copy()
    return d, e, Q


def tridiagonal_ql(d, e, Z=None, max_iter=None):
    """Implicit-shift QL on a symmetric tridiagonal matrix.

    Parameters
    ----------
    d : ndarray, shape (n,)
        Diagonal.
    e : ndarray, shape (n-1,)
        Sub-diagonal.
    Z : ndarray, shape (n, n), optional
        Basis the rotations are accumulated into (columns). Identity if None.
    max_iter : int, optional
        Cap on the total number of QL sweeps, default ``50 n``.

    Returns
    -------
    w : ndarray
        Eigenvalues (unsorted).
    Z : ndarray
        Eigenvectors as columns.
    """
    d = np.array(d, dtype=np.float64)
    n = d.size
    off = np.zeros(n)
    off[: n - 1] = e
    # rotations act on rows of Zt, which are contiguous
    Zt = np.eye(n) if Z is None else np.array(Z, dtype=np.float64).T.copy()
    if max_iter is None:
        max_iter = 50 * n
    eps = np.finfo(np.float64).eps
    sweeps = 0
    for l in range(n):
        while True:
            for m in range(l, n - 1):
                if abs(off[m]) <= eps * (abs(d[m]) + abs(d[m + 1])):
                    break
            else:
                m = n - 1
            if m == l:
                break
            sweeps += 1
            if sweeps > max_iter:
                raise NoConvergence("QL iteration did not converge in %d sweeps" % max_iter)
            g = (d[l + 1] - d[l]) / (2.0 * off[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + off[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * off[i]
                b = c * off[i]
                r = math.hypot(f, g)
                off[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    off[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                # (z[i+1], z[i]) <- (c z[i+1] + s z[i], c z[i] - s z[i+1]) in place
                drot(Zt[i + 1], Zt[i], c, s, overwrite_x=True, overwrite_y=True)
            if underflow:
                continue
            d[l] -= p
            off[l] = g
            off[m] = 0.0
    return d, Zt.T


def eigh(M, max_iter=None):
    """All eigenpairs of the symmetric matrix ``M``, eigenvalues ascending."""
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch("eigh needs a square matrix")
    n = M.shape[0]
    if n == 1:
        return M[0].copy(), np.ones((1, 1))
    d, e, Q = tridiagonalize(0.5 * (M + M.T))
    w, Z = tridiagonal_ql(d, e, Q, max_iter=max_iter)
    order = np.argsort(w, kind="stable")
    return w[order], Z[:, order]


def eigen_smallest(L, count):
    """The ``count`` smallest eigenpairs of the symmetric matrix ``L``.

    Within a multiple eigenvalue the returned basis is an arbitrary
    orthonormal basis of the eigenspace.
    """
    L = as_dense(L)
    n = L.shape[0]
    if not 1 <= count <= n:
        raise InvalidParameter("count must lie in 1..%d" % n)
    w, V = eigh(L)
    return w[:count], V[:, :count]


def embed(A, d, mode=LaplacianMode.RANDOM_WALK, scaling=None):
    """d-dimensional Laplacian embedding of ``A``.

    Column k (1-based) holds the eigenvector of the (k+1)-th smallest
    eigenvalue of the chosen Laplacian, multiplied by the weight given by
    ``scaling``. For ``RANDOM_WALK`` the eigenvectors of ``I - D^-1 A`` are
    obtained as ``D^-1/2 u`` from the symmetric form and renormalized.
    """
    mode = _as_mode(mode)
    scaling = Scaling() if scaling is None else Scaling.parse(scaling)
    W = as_dense(A)
    n = W.shape[0]
    if not 1 <= d <= n - 1:
        raise InvalidParameter("embedding dimension must lie in 1..%d" % (n - 1))
    check_connected(W)
    L = laplacian(W, mode)
    lam, U = eigen_smallest(L, d + 1)
    lam, U = lam[1:], U[:, 1:]
    if mode is LaplacianMode.RANDOM_WALK:
        U = U / np.sqrt(W.sum(axis=1))[:, None]
        U /= np.linalg.norm(U, axis=0)
    coords = U * scaling.weights(lam)[None, :]
    return Embedding(coords=coords, eigenvalues=lam, mode=mode, scaling=scaling, vectors=U)
