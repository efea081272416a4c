"""Baseline spectral orderings for linear and circular seriation."""
import numpy as np

from .errors import DegenerateAngle
from .linalg import LaplacianMode, embed


def spectral_order(A, laplacian=LaplacianMode.UNNORMALIZED):
    """Sort the items by the Fiedler vector of ``A``.

    Returns the ordering ``sigma`` (``sigma[0]`` is the first item). Ties are
    broken by ascending original index; the result is only defined up to
    global reversal.

    Raises
    ------
    NotConnected
        If ``A`` is not connected.
    """
    n = A.shape[0]
    if n == 1:
        return np.zeros(1, dtype=np.int64)
    emb = embed(A, 1, mode=laplacian)
    return np.argsort(emb.vectors[:, 0], kind="stable").astype(np.int64)


def angles(coords):
    """Angles in ``[0, 2 pi)`` of the first two embedding columns."""
    x, y = coords[:, 0], coords[:, 1]
    radius = np.hypot(x, y)
    if (radius <= 1e-12).any():
        raise DegenerateAngle(
            "embedded point %d sits at the origin" % int(np.argmin(radius))
        )
    return np.mod(np.arctan2(y, x), 2 * np.pi)


def order_by_angle(coords):
    return np.argsort(angles(coords), kind="stable").astype(np.int64)


def circular_order(A, laplacian=LaplacianMode.RANDOM_WALK):
    """Sort the items by their angle in the 2-d Laplacian embedding of ``A``.

    The ordering is defined up to a cyclic shift and a reversal.
    """
    n = A.shape[0]
    if n <= 2:
        return np.arange(n, dtype=np.int64)
    emb = embed(A, 2, mode=laplacian)
    return order_by_angle(emb.vectors)
