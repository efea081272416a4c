"""Closed-form spectra of Toeplitz/circulant similarity matrices and checkers.

These are the numerical counterparts of the structural results on
(circular) Robinson matrices: circulant and tridiagonal spectra, the KMS
frequency interlacing, the circle embedding of circulant circular-Robinson
matrices, and the perturbation bounds for the 2-d embedding.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, IntervalViolation
from .linalg import LaplacianMode, eigh, embed, laplacian
from .matgen import as_dense, check_permutation
from .metrics import circular_kendall_tau
from .seriation import angles, circular_order


# --------------------------------------------------------------------------
# Robinson structure


def is_robinson(A, atol=0.0):
    """True if ``A`` is symmetric and its entries do not increase away from the diagonal."""
    A = as_dense(A)
    if not np.allclose(A, A.T, rtol=0, atol=atol):
        return False
    # diff[i, j] = A[i, j+1] - A[i, j]: >= 0 left of the diagonal, <= 0 right of it
    n = A.shape[0]
    diff = np.diff(A, axis=1)
    j = np.arange(n - 1)[None, :]
    i = np.arange(n)[:, None]
    left = j < i
    ok = np.where(left, diff >= -atol, diff <= atol)
    return bool(ok.all())


def _valley(seq, atol):
    # non-increasing to a minimum, then non-decreasing
    diff = np.diff(seq)
    up = np.nonzero(diff > atol)[0]
    if up.size == 0:
        return True
    return bool((diff[up[0]:] >= -atol).all())


def is_circular_robinson(A, atol=0.0):
    """True if every row, read from the diagonal outward in both directions, is unimodal."""
    A = as_dense(A)
    n = A.shape[0]
    if not np.allclose(A, A.T, rtol=0, atol=atol):
        return False
    for i in range(n):
        if not _valley(A[i, i::-1], atol) or not _valley(A[i:, i], atol):
            return False
    return True


# --------------------------------------------------------------------------
# circulant spectrum


@dataclass
class CirculantSpectrum:
    """Spectrum of a symmetric circulant matrix, indexed by frequency ``m = 0..n//2``."""

    n: int
    b: np.ndarray
    eigenvalues: np.ndarray
    multiplicities: np.ndarray

    def vectors(self, m):
        """Orthonormal eigenvectors of frequency ``m`` as columns."""
        n = self.n
        r = np.arange(n)
        if m == 0:
            return np.full((n, 1), 1.0 / math.sqrt(n))
        if n % 2 == 0 and m == n // 2:
            return ((-1.0) ** r / math.sqrt(n))[:, None]
        phase = 2 * np.pi * m * r / n
        return math.sqrt(2.0 / n) * np.stack([np.cos(phase), np.sin(phase)], axis=1)

    def all_eigenvalues(self):
        """Eigenvalue multiset, repeated by multiplicity, sorted ascending."""
        return np.sort(np.repeat(self.eigenvalues, self.multiplicities))

    def dominance_margin(self):
        """``min_{m >= 2} (nu_1 - nu_m)`` (``inf`` when there is no such m)."""
        if self.eigenvalues.size <= 2:
            return math.inf
        return float((self.eigenvalues[1] - self.eigenvalues[2:]).min())


def circulant_spectrum(b, n):
    """Closed-form eigenvalues and eigenvectors of the circulant built from ``b``.

    For odd ``n`` every frequency ``m >= 1`` is a double eigenvalue; for even
    ``n`` the highest frequency ``m = n/2`` is simple, as is ``m = 0``.
    """
    b = np.asarray(b, dtype=np.float64)
    n = int(n)
    p = n // 2
    if b.ndim != 1 or b.size != p + 1:
        raise InvalidParameter("b must have length floor(n/2)+1 = %d" % (p + 1))
    m = np.arange(p + 1)
    k = np.arange(1, p + 1)
    cos = np.cos(2 * np.pi * np.outer(m, k) / n)
    weights = 2.0 * b[1:]
    if n % 2 == 0 and p >= 1:
        weights[-1] = b[p]  # the k = p term appears once
    nu = b[0] + cos @ weights
    mult = np.full(p + 1, 2, dtype=np.int64)
    mult[0] = 1
    if n % 2 == 0:
        mult[p] = 1
    return CirculantSpectrum(n=n, b=b, eigenvalues=nu, multiplicities=mult)


# --------------------------------------------------------------------------
# tridiagonal Toeplitz and KMS


@dataclass
class TridiagonalSpectrum:
    eigenvalues: np.ndarray  # nu_m for m = 1..n
    vectors: np.ndarray  # column m-1 is the sine vector of frequency m


def tridiag_toeplitz_spectrum(b0, b1, n):
    """Spectrum of the tridiagonal Toeplitz matrix with diagonal ``b0`` and off-diagonal ``b1``."""
    n = int(n)
    if n < 1:
        raise InvalidParameter("n must be >= 1")
    if not b0 > b1 > 0:
        raise InvalidParameter("need b0 > b1 > 0")
    m = np.arange(1, n + 1)
    nu = b0 + 2.0 * b1 * np.cos(m * np.pi / (n + 1))
    r = np.arange(1, n + 1)
    Y = math.sqrt(2.0 / (n + 1)) * np.sin(np.outer(r, m) * np.pi / (n + 1))
    return TridiagonalSpectrum(eigenvalues=nu, vectors=Y)


def kms_eigenvalue(theta, rho):
    """``(1 - rho^2) / (1 - 2 rho cos(theta) + rho^2)``, decreasing on (0, pi)."""
    return (1.0 - rho * rho) / (1.0 - 2.0 * rho * np.cos(theta) + rho * rho)


def kms_vectors(theta, n):
    r = np.arange(1, n + 1)
    arg = (n - 2 * r + 1) * theta / 2.0
    return np.stack([np.cos(arg), np.sin(arg)], axis=1)


def subspace_angle(U, V):
    """Largest principal angle between the column spans of ``U`` and ``V``.

    When the dimensions differ this is the angle by which the smaller span
    fails to lie inside the larger one.
    """
    Qu = _orth(U)
    Qv = _orth(V)
    if Qu.shape[1] > Qv.shape[1]:
        Qu, Qv = Qv, Qu
    resid = Qu - Qv @ (Qv.T @ Qu)
    s = np.linalg.norm(resid, 2) if resid.size else 0.0
    return float(math.asin(min(1.0, s)))


def _orth(X, rtol=1e-10):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    U, s, _ = np.linalg.svd(X, full_matrices=False)
    keep = s > rtol * max(s.max(initial=0.0), 1e-300)
    return U[:, keep]


@dataclass
class KmsThetaTable:
    """Per-eigenvalue frequencies of a KMS matrix, ``m = 1..n`` (eigenvalues descending)."""

    rho: float
    n: int
    eigenvalues: np.ndarray
    thetas: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    vector_angles: np.ndarray

    def rows(self):
        for m in range(self.n):
            yield (m + 1, self.eigenvalues[m], self.lower[m], self.thetas[m],
                   self.upper[m], self.vector_angles[m])


def kms_theta_recover(rho, n, tol=1e-12):
    """Recover the frequencies ``theta_m`` of the KMS matrix ``rho^|i-j|``.

    The eigenvalues are computed numerically. Each ``theta_m`` is found by
    bisection of the decreasing map ``theta -> kms_eigenvalue(theta, rho)``
    on ``((m-1) pi / n, m pi / n)``, and the eigenvector is compared with the
    span of the cosine and sine forms at that frequency.

    Raises
    ------
    IntervalViolation
        If for some ``m`` no root lies in its interval.
    """
    if not 0 < rho < 1:
        raise InvalidParameter("rho must lie in (0, 1)")
    n = int(n)
    idx = np.arange(n)
    A = rho ** np.abs(idx[:, None] - idx[None, :]).astype(np.float64)
    w, V = eigh(A)
    w, V = w[::-1], V[:, ::-1]
    lower = np.arange(n) * np.pi / n
    upper = np.arange(1, n + 1) * np.pi / n
    thetas = np.empty(n)
    vec_angles = np.empty(n)
    for m in range(n):
        lo, hi = lower[m], upper[m]
        f = lambda t: kms_eigenvalue(t, rho) - w[m]  # noqa: E731
        if not (f(lo) > 0 > f(hi)):
            raise IntervalViolation(
                "no theta for eigenvalue %d (%.17g) in (%g, %g)" % (m + 1, w[m], lo, hi)
            )
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if f(mid) > 0:
                lo = mid
            else:
                hi = mid
        thetas[m] = 0.5 * (lo + hi)
        vec_angles[m] = subspace_angle(V[:, m], kms_vectors(thetas[m], n))
    return KmsThetaTable(rho=rho, n=n, eigenvalues=w, thetas=thetas, lower=lower,
                         upper=upper, vector_angles=vec_angles)


# --------------------------------------------------------------------------
# circle embedding and perturbation bounds


@dataclass
class CircleReport:
    max_radius_dev: float
    max_angle_gap_dev: float


def check_circle_embedding(A, laplacian_mode=LaplacianMode.RANDOM_WALK):
    """Measure how far the 2-d embedding of ``A`` is from equally spaced points on a circle."""
    emb = embed(A, 2, mode=laplacian_mode)
    P = emb.vectors
    radius = np.hypot(P[:, 0], P[:, 1])
    theta = np.sort(angles(P))
    gaps = np.diff(np.append(theta, theta[0] + 2 * np.pi))
    n = P.shape[0]
    return CircleReport(
        max_radius_dev=float(np.abs(radius - radius.mean()).max()),
        max_angle_gap_dev=float(np.abs(gaps - 2 * np.pi / n).max()),
    )


def _embedding_2d(A):
    L = laplacian(A, LaplacianMode.UNNORMALIZED)
    w, U = eigh(L)
    return w, U[:, 1:3]


def eigengap(w):
    """``min(lambda_1, lambda_3 - lambda_2)`` for ascending Laplacian eigenvalues ``w``.

    This separates the eigenspace of the two smallest nonzero eigenvalues
    from the constant vector below and the rest of the spectrum above.
    """
    return float(min(w[1], w[3] - w[2])) if w.size > 3 else float(w[1])


def procrustes(Vt, V):
    """Orthogonal ``O`` minimizing ``||V - Vt O||_F``."""
    U, _, Wt = np.linalg.svd(Vt.T @ V)
    return U @ Wt


def _laplacian_norms(H):
    LH = laplacian(H, LaplacianMode.UNNORMALIZED)
    spec = np.abs(eigh(LH)[0]).max()
    return float(spec), float(np.linalg.norm(LH, "fro"))


# computed eigenvectors carry roundoff even for a zero perturbation
BOUND_SLACK = 1e-10


@dataclass
class DavisKahanReport:
    lhs: float
    bound: float
    holds: bool
    sup_lhs: float
    sup_bound: float
    sup_holds: bool
    gap: float


def davis_kahan_check(A, deltaA):
    """Compare the 2-d embeddings of ``A`` and ``A + deltaA`` with the perturbation bounds.

    ``lhs = ||V - Vt O||_F / sqrt(n)`` for the best orthogonal ``O`` is checked
    against ``||deltaA||_F / gap``, both up to an absolute ``BOUND_SLACK``. The row-wise variant
    ``max_i ||V_i - (Vt O)_i||`` is checked against
    ``2^{3/2} min(sqrt(2) ||L_H||_2, ||L_H||_F) / gap``. ``gap`` is
    :func:`eigengap` of the unperturbed Laplacian.
    """
    A = as_dense(A)
    H = as_dense(deltaA)
    n = A.shape[0]
    w, V = _embedding_2d(A)
    _, Vt = _embedding_2d(A + H)
    gap = eigengap(w)
    aligned = Vt @ procrustes(Vt, V)
    lhs = np.linalg.norm(V - aligned, "fro") / math.sqrt(n)
    bound = np.linalg.norm(H, "fro") / gap if gap > 0 else math.inf
    sup_lhs = float(np.linalg.norm(V - aligned, axis=1).max())
    spec, fro = _laplacian_norms(H)
    sup_bound = 2 ** 1.5 * min(math.sqrt(2) * spec, fro) / gap if gap > 0 else math.inf
    return DavisKahanReport(
        lhs=float(lhs), bound=float(bound), holds=bool(lhs <= bound + BOUND_SLACK),
        sup_lhs=sup_lhs, sup_bound=float(sup_bound), sup_holds=bool(sup_lhs <= sup_bound + BOUND_SLACK),
        gap=gap,
    )


def recovery_threshold(A):
    """``2^{-3/2} sin(pi/n) gap`` for the unnormalized Laplacian of ``A``."""
    A = as_dense(A)
    w = eigh(laplacian(A, LaplacianMode.UNNORMALIZED))[0]
    return 2 ** -1.5 * math.sin(math.pi / A.shape[0]) * eigengap(w)


def perturbation_size(H):
    """``min(sqrt(2) ||L_H||_2, ||L_H||_F)``."""
    spec, fro = _laplacian_norms(H)
    return min(math.sqrt(2) * spec, fro)


@dataclass
class RecoveryReport:
    condition_met: bool
    size: float
    threshold: float
    recovered: bool = None  # only evaluated when the condition holds


def exact_recovery_condition(A, deltaA, truth=None,
                             laplacian_mode=LaplacianMode.UNNORMALIZED):
    """Test the noise condition guaranteeing exact circular recovery, and the recovery itself.

    ``truth`` is the ground-truth circular ordering of ``A``; by default the
    ordering read off the unperturbed embedding is used.
    """
    A = as_dense(A)
    H = as_dense(deltaA)
    threshold = recovery_threshold(A)
    size = perturbation_size(H)
    report = RecoveryReport(condition_met=bool(size <= threshold), size=size, threshold=threshold)
    if report.condition_met:
        if truth is None:
            truth = circular_order(A, laplacian=laplacian_mode)
        truth = check_permutation(truth, A.shape[0])
        found = circular_order(A + H, laplacian=laplacian_mode)
        report.recovered = circular_kendall_tau(found, truth) == 1.0
    return report
