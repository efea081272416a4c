"""Ordering recovery from the filamentary structure of a Laplacian embedding.

The embedding of serial data concentrates along a curve. Each point's
neighbourhood is fitted by a line, distances along that line are turned into
similarities, and the rebuilt similarity matrix is ordered with the baseline
spectral method. Disconnected rebuilt matrices are ordered per component and
the pieces are merged back using the input similarities.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateNeighborhood, InvalidParameter, MergeIncomplete
from .linalg import (
    LaplacianMode,
    Scaling,
    check_connected,
    connected_components,
    embed,
    normalize_coifman,
)
from .matgen import as_dense
from .seriation import circular_order, spectral_order

UPDATES = ("inverse_distance", "exp_neg_distance", "neg_distance_shifted", "neg_distance_offset")


@dataclass(frozen=True)
class MdsoParams:
    """Parameters of the multidimensional ordering.

    ``update`` selects how a distance ``D`` along a local line is turned into
    a similarity increment: ``inverse_distance`` adds ``1/D``,
    ``exp_neg_distance`` adds ``exp(-D)``, ``neg_distance_shifted`` adds
    ``-D`` and shifts all touched entries so their minimum is 0 at the end,
    and ``neg_distance_offset`` adds ``max(D) - D`` within each neighbourhood.
    """

    k: int = 10
    d: int = 10
    scaling: Scaling = field(default_factory=lambda: Scaling("heuristic"))
    kind: str = "linear"
    update: str = "neg_distance_offset"
    laplacian: LaplacianMode = LaplacianMode.RANDOM_WALK
    coifman: bool = False
    merge_h: int = None

    def __post_init__(self):
        if self.k < 2:
            raise InvalidParameter("neighbourhood size k must be >= 2")
        if self.d < 1:
            raise InvalidParameter("embedding dimension d must be >= 1")
        if self.kind not in ("linear", "circular"):
            raise InvalidParameter("kind must be 'linear' or 'circular'")
        if self.update not in UPDATES:
            raise InvalidParameter("unknown similarity update %r" % (self.update,))
        object.__setattr__(self, "scaling", Scaling.parse(self.scaling))
        if not isinstance(self.laplacian, LaplacianMode):
            object.__setattr__(self, "laplacian", LaplacianMode(self.laplacian))


def _pairwise_sq_distances(Y):
    sq = (Y * Y).sum(axis=1)
    D2 = sq[:, None] + sq[None, :] - 2.0 * (Y @ Y.T)
    np.maximum(D2, 0.0, out=D2)
    return D2


def knn_all(Y, k):
    """k nearest neighbours of every row of ``Y`` (self excluded).

    Ties are broken by smaller index. Returns an ``(n, k)`` index array.
    """
    Y = np.asarray(Y, dtype=np.float64)
    n = Y.shape[0]
    if not 1 <= k < n:
        raise InvalidParameter("k must lie in 1..%d" % (n - 1))
    D2 = _pairwise_sq_distances(Y)
    np.fill_diagonal(D2, np.inf)
    return np.argsort(D2, axis=1, kind="stable")[:, :k]


def knn(E, i, k):
    """Indices of the ``k`` nearest neighbours of point ``i`` of an embedding."""
    Y = getattr(E, "coords", E)
    Y = np.asarray(Y, dtype=np.float64)
    n = Y.shape[0]
    if not 1 <= k < n:
        raise InvalidParameter("k must lie in 1..%d" % (n - 1))
    dist = ((Y - Y[i]) ** 2).sum(axis=1)
    dist[i] = np.inf
    return np.argsort(dist, kind="stable")[:k]


def fit_line_direction(points):
    """Unit direction of the leading principal axis of ``points`` (rows).

    Raises
    ------
    DegenerateNeighborhood
        If fewer than two points are given or all points coincide.
    """
    X = np.asarray(points, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise DegenerateNeighborhood("need at least two points to fit a line")
    X = X - X.mean(axis=0)
    scale = np.abs(X).max()
    if scale == 0.0 or not np.isfinite(scale):
        raise DegenerateNeighborhood("all points coincide")
    _, _, Vt = np.linalg.svd(X / scale, full_matrices=False)
    return Vt[0]


def filament_similarity(A, params=None, embedding=None):
    """Rebuild a similarity matrix from local line fits in the embedding.

    ``S`` starts as the identity. For every point ``i``, its ``k`` nearest
    neighbours together with ``i`` are projected on their fitted line and
    every pair ``u != v`` of that neighbourhood receives an increment that
    does not increase with their distance along the line.
    """
    params = MdsoParams() if params is None else params
    if embedding is None:
        W = as_dense(A)
        check_connected(W)
        if params.coifman:
            W = normalize_coifman(W)
        d = min(params.d, W.shape[0] - 1)
        embedding = embed(W, d, mode=params.laplacian, scaling=params.scaling)
    Y = embedding.coords
    n = Y.shape[0]
    k = min(params.k, n - 1)
    nbrs = knn_all(Y, k)
    acc = np.zeros((n, n))
    touched = np.zeros((n, n), dtype=bool)
    for i in range(n):
        V = np.unique(np.append(nbrs[i], i))
        try:
            w = fit_line_direction(Y[V])
        except DegenerateNeighborhood:
            continue
        proj = Y[V] @ w
        D = np.abs(proj[:, None] - proj[None, :])
        off = ~np.eye(V.size, dtype=bool)
        if params.update == "inverse_distance":
            inc = 1.0 / np.maximum(D, 1e-12)
        elif params.update == "exp_neg_distance":
            inc = np.exp(-D)
        elif params.update == "neg_distance_shifted":
            inc = -D
        else:
            inc = D[off].max() - D
        inc[~off] = 0.0
        block = np.ix_(V, V)
        acc[block] += inc
        touched[block] |= off
    if params.update == "neg_distance_shifted" and touched.any():
        acc[touched] -= acc[touched].min()
    S = acc
    S[~touched] = 0.0
    S[np.diag_indices(n)] = 1.0
    return 0.5 * (S + S.T)


def _ends(seq, h):
    h = min(h, max(1, len(seq) // 2))
    return {"-": seq[:h], "+": seq[-h:]}


# order in which the four end combinations are scanned, used for tie-breaking
_ORIENTATIONS = (("+", "+"), ("+", "-"), ("-", "+"), ("-", "-"))


def default_merge_window(partition):
    shortest = min(len(c) for c in partition)
    return max(1, min(20, shortest // 2))


def merge_components(partition, A, h=None):
    """Greedily merge ordered sub-sequences using end-to-end similarities.

    At each step the pair of sequences whose ends share the largest total
    similarity in ``A`` is concatenated, with each piece reversed as needed
    so that the matching ends meet. Stops when one sequence is left or no
    two sequences share any similarity.

    Parameters
    ----------
    partition : sequence of sequences of int
        Disjoint ordered index sequences.
    A : array_like
        Similarity matrix the sequences index into.
    h : int, optional
        Number of items considered at each end of a sequence. Defaults to
        ``min(20, shortest // 2)``, at least 1.

    Returns
    -------
    list of ndarray
        The remaining sequences (a single one when merging completed).
    """
    seqs = [np.asarray(c, dtype=np.int64) for c in partition if len(c)]
    if len(seqs) <= 1:
        return seqs
    W = as_dense(A)
    if h is None:
        h = default_merge_window(seqs)
    h = max(1, int(h))
    while len(seqs) > 1:
        ends = [_ends(c, h) for c in seqs]
        best = (0.0, None)
        for i in range(len(seqs)):
            for j in range(i + 1, len(seqs)):
                for ei, ej in _ORIENTATIONS:
                    val = W[np.ix_(ends[i][ei], ends[j][ej])].sum()
                    if val > best[0]:
                        best = (val, (i, j, ei, ej))
        if best[1] is None:
            break
        i, j, ei, ej = best[1]
        ci, cj = seqs[i], seqs[j]
        if ei == "-":
            ci = ci[::-1]
        if ej == "+":
            cj = cj[::-1]
        merged = np.concatenate([ci, cj])
        seqs = [c for t, c in enumerate(seqs) if t not in (i, j)]
        seqs.append(merged)
    return seqs


def mdso_order(A, params=None):
    """Order the items of ``A`` through the rebuilt similarity of its embedding.

    Raises
    ------
    NotConnected
        If ``A`` itself is disconnected.
    MergeIncomplete
        If the rebuilt matrix is disconnected and its components cannot all
        be merged back; the partial orderings are attached to the error.
    """
    params = MdsoParams() if params is None else params
    W = as_dense(A)
    check_connected(W)
    S = filament_similarity(W, params)
    comps = connected_components(S)
    if len(comps) == 1:
        if params.kind == "circular":
            return circular_order(S)
        return spectral_order(S)
    pieces = []
    for comp in comps:
        if comp.size <= 2:
            pieces.append(comp)
            continue
        sub = S[np.ix_(comp, comp)]
        pieces.append(comp[spectral_order(sub)])
    merged = merge_components(pieces, W, params.merge_h)
    if len(merged) > 1:
        raise MergeIncomplete(merged)
    return merged[0]
