"""Kendall-Tau scores between orderings, including a shift-invariant variant.

An ordering lists items from first to last. Two orderings are compared
through the positions they assign to every item, so ``kendall_tau(p, q)``
counts, over all item pairs, whether ``p`` and ``q`` put the pair in the
same relative order.
"""
import numpy as np

from .errors import DimensionMismatch
from .matgen import check_permutation, inverse_permutation


def _concordance(x, y):
    """Integer sum of sign(x_i - x_j) * sign(y_i - y_j) over pairs i < j."""
    n = x.size
    total = 0
    # chunk rows to keep the pairwise block small for large n
    step = max(1, 2_000_000 // max(n, 1))
    for start in range(0, n, step):
        sl = slice(start, min(n, start + step))
        dx = np.sign(x[sl, None] - x[None, :])
        dy = np.sign(y[sl, None] - y[None, :])
        total += int((dx * dy).sum())
    return total // 2


def _positions(p, q):
    p = check_permutation(p)
    q = check_permutation(q)
    if p.size != q.size:
        raise DimensionMismatch("orderings have lengths %d and %d" % (p.size, q.size))
    return inverse_permutation(p), inverse_permutation(q)


def kendall_tau(p, q):
    """(concordant - discordant) / (n (n-1) / 2) between orderings ``p`` and ``q``."""
    rp, rq = _positions(p, q)
    n = rp.size
    if n < 2:
        return 1.0
    return _concordance(rp, rq) / (n * (n - 1) / 2)


def linear_score(p, q):
    """Direction-free Kendall-Tau: the better of ``q`` and ``q`` reversed."""
    rp, rq = _positions(p, q)
    n = rp.size
    if n < 2:
        return 1.0
    # reversing q negates every concordance term
    return abs(_concordance(rp, rq)) / (n * (n - 1) / 2)


def _best_shift(rp, rq):
    # Shifting q left by one moves its first item u to the last position,
    # flipping the sign of the n-1 terms involving u. Before the shift u
    # precedes everyone in q, so its terms sum to (n-1) - 2 rp[u].
    n = rp.size
    s = _concordance(rp, rq)
    best = s
    first = np.argsort(rq)  # q as a sequence
    for u in first[:-1]:
        s += 2 * (2 * int(rp[u]) - (n - 1))
        best = max(best, s)
    return best


def circular_kendall_tau(p, q, reversal=True):
    """Best Kendall-Tau between ``p`` and all cyclic shifts of ``q``.

    With ``reversal=True`` (default) the reversed shifts of ``q`` are scanned
    as well, since circular orderings carry no direction. ``reversal=False``
    scans shifts only.
    """
    rp, rq = _positions(p, q)
    n = rp.size
    if n < 2:
        return 1.0
    best = _best_shift(rp, rq)
    if reversal:
        best = max(best, _best_shift(rp, (n - 1) - rq))
    return best / (n * (n - 1) / 2)
