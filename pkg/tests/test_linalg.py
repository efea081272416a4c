import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from specorder.errors import InvalidParameter, NoConvergence, NotConnected, ZeroDegree
from specorder.linalg import (
    LaplacianMode,
    Scaling,
    connected_components,
    degrees,
    eigen_smallest,
    eigh,
    embed,
    laplacian,
    normalize_coifman,
    tridiagonal_ql,
    tridiagonalize,
)
from specorder.matgen import gen_circulant, gen_circular_banded, gen_linear_banded
from specorder.theory import subspace_angle


def random_symmetric(rng, n):
    X = rng.normal(size=(n, n))
    return X + X.T


def random_similarity(rng, n):
    X = rng.uniform(size=(n, n))
    A = X + X.T
    np.fill_diagonal(A, 0.0)
    return A


def union_find_components(A):
    n = A.shape[0]
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in zip(*np.nonzero(A > 0)):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(sorted(g) for g in groups.values())


def test_degrees_dense_and_sparse(rng):
    A = sp.random(40, 40, density=0.1, random_state=1)
    A = A + A.T
    expected = [sum(A.toarray()[i]) for i in range(40)]
    assert np.allclose(degrees(A), expected)
    assert np.allclose(degrees(A.toarray()), expected)


def test_laplacian_forms(rng):
    A = random_similarity(rng, 12)
    L = laplacian(A)
    assert np.allclose(L.sum(axis=1), 0)
    assert np.allclose(L, L.T)
    assert np.linalg.eigvalsh(L).min() > -1e-10
    Ls = laplacian(A, LaplacianMode.SYMMETRIC)
    d = A.sum(axis=1)
    assert np.allclose(Ls, np.eye(12) - A / np.sqrt(np.outer(d, d)))
    assert np.allclose(laplacian(A, "random_walk"), Ls)


def test_laplacian_ignores_diagonal(rng):
    A = random_similarity(rng, 8)
    B = A + np.diag(rng.uniform(size=8))
    assert np.allclose(laplacian(A), laplacian(B))


def test_laplacian_zero_degree():
    A = np.zeros((3, 3))
    A[0, 1] = A[1, 0] = 1.0
    with pytest.raises(ZeroDegree):
        laplacian(A, LaplacianMode.SYMMETRIC)


def test_coifman(rng):
    A = random_similarity(rng, 10)
    W = normalize_coifman(A)
    d = A.sum(axis=1)
    assert np.allclose(W, W.T)
    assert W[2, 5] == pytest.approx(A[2, 5] / (d[2] * d[5]))


def test_tridiagonalize_reconstructs(rng):
    M = random_symmetric(rng, 15)
    d, e, Q = tridiagonalize(M)
    T = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    assert np.allclose(Q @ T @ Q.T, M, atol=1e-12)
    assert np.allclose(Q.T @ Q, np.eye(15), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 40), st.integers(0, 2**32 - 1))
def test_eigh_matches_lapack(n, seed):
    rng = np.random.default_rng(seed)
    M = random_symmetric(rng, n)
    w, V = eigh(M)
    w_ref, V_ref = np.linalg.eigh(M)
    assert np.allclose(w, w_ref, atol=1e-8)
    assert np.allclose(V.T @ V, np.eye(n), atol=1e-10)
    assert np.allclose(M @ V, V * w, atol=1e-8)
    for i in range(n):
        cluster = np.abs(w_ref - w[i]) <= 1e-8
        assert subspace_angle(V[:, i], V_ref[:, cluster]) <= 1e-6


def test_eigh_multiplicity_two_circulant():
    A = gen_circular_banded(21, 5)
    w, V = eigh(laplacian(A))
    assert w[1] == pytest.approx(w[2], abs=1e-12)
    assert np.allclose(V.T @ V, np.eye(21), atol=1e-12)


def test_eigh_diagonal_and_1x1():
    w, V = eigh(np.diag([3.0, 1.0, 2.0]))
    assert w.tolist() == [1.0, 2.0, 3.0]
    assert eigh(np.array([[5.0]]))[0].tolist() == [5.0]


def test_ql_iteration_cap():
    d = np.array([1.0, 2.0, 3.0, 4.0])
    e = np.array([1.0, 1.0, 1.0])
    with pytest.raises(NoConvergence):
        tridiagonal_ql(d, e, max_iter=1)


def test_eigen_smallest(rng):
    M = random_symmetric(rng, 20)
    w, V = eigen_smallest(M, 3)
    assert np.allclose(w, np.linalg.eigvalsh(M)[:3])
    with pytest.raises(InvalidParameter):
        eigen_smallest(M, 0)


def test_connected_components_vs_union_find(rng):
    for _ in range(20):
        n = int(rng.integers(2, 40))
        A = (rng.uniform(size=(n, n)) < 0.05).astype(float)
        A = np.maximum(A, A.T)
        got = [c.tolist() for c in connected_components(A)]
        assert got == union_find_components(A)


def test_embed_unnormalized_invariants():
    A = gen_linear_banded(30, 4)
    emb = embed(A, 4, mode=LaplacianMode.UNNORMALIZED)
    assert emb.coords.shape == (30, 4)
    assert np.allclose(np.linalg.norm(emb.vectors, axis=0), 1.0)
    assert np.allclose(emb.vectors.sum(axis=0), 0.0, atol=1e-8)
    assert (np.diff(emb.eigenvalues) >= -1e-12).all()


def test_embed_random_walk_eigenvectors(rng):
    A = random_similarity(rng, 15)
    emb = embed(A, 3, mode=LaplacianMode.RANDOM_WALK)
    P = A / A.sum(axis=1)[:, None]
    Lrw = np.eye(15) - P
    for k in range(3):
        f = emb.vectors[:, k]
        assert np.allclose(Lrw @ f, emb.eigenvalues[k] * f, atol=1e-10)
        assert np.linalg.norm(f) == pytest.approx(1.0)


def test_scalings():
    A = gen_linear_banded(30, 4)
    base = embed(A, 5, scaling="none")
    heur = embed(A, 5, scaling="heuristic")
    ratio = heur.coords / base.coords
    assert np.allclose(ratio, 1.0 / np.sqrt(np.arange(1, 6))[None, :])
    ctd = embed(A, 5, scaling="ctd")
    assert np.allclose(ctd.coords, base.coords * base.eigenvalues ** -0.5)
    diff = embed(A, 5, scaling=Scaling.parse("diffusion:2"))
    assert np.allclose(diff.coords, base.coords * (1 - base.eigenvalues) ** 2)


def test_scaling_parse():
    assert Scaling.parse("diffusion:0.5") == Scaling("diffusion", 0.5)
    assert str(Scaling.parse("Heuristic")) == "heuristic"
    with pytest.raises(InvalidParameter):
        Scaling.parse("bogus")
    with pytest.raises(InvalidParameter):
        Scaling("diffusion", -1.0)


def test_embed_circle():
    A = gen_circulant(21, np.maximum(6 - np.arange(11), 0).astype(float))
    emb = embed(A, 2)
    r = np.hypot(emb.vectors[:, 0], emb.vectors[:, 1])
    assert np.ptp(r) <= 1e-8


def test_embed_errors():
    A = gen_linear_banded(6, 2)
    with pytest.raises(InvalidParameter):
        embed(A, 6)
    B = np.zeros((4, 4))
    B[0, 1] = B[1, 0] = B[2, 3] = B[3, 2] = 1.0
    with pytest.raises(NotConnected) as info:
        embed(B, 1)
    assert info.value.n_components == 2
