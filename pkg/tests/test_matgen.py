import warnings

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from specorder.errors import (
    DimensionMismatch,
    DisconnectedWarning,
    InvalidDimension,
    InvalidParameter,
    NotBijective,
    NotMonotone,
)
from specorder.matgen import (
    NoiseSpec,
    add_noise,
    check_permutation,
    gen_circulant,
    gen_circular_banded,
    gen_circular_kms,
    gen_kms,
    gen_linear_banded,
    generate,
    inverse_permutation,
    permute_matrix,
    random_permutation,
)


def test_banded_rows():
    A = gen_linear_banded(4, 2)
    assert A[0].tolist() == [2, 1, 0, 0]
    assert A[1].tolist() == [1, 2, 1, 0]
    assert (A == A.T).all()


def test_banded_errors():
    with pytest.raises(InvalidDimension):
        gen_linear_banded(1, 2)
    with pytest.raises(InvalidParameter):
        gen_linear_banded(5, 0)


def test_banded_width_one_warns_disconnected():
    with pytest.warns(DisconnectedWarning):
        gen_linear_banded(5, 1)


def test_kms_entries_and_norm():
    A = gen_kms(500, 0.1)
    assert A[3, 7] == pytest.approx(np.exp(-0.4))
    # independent summation over the diagonals of the Toeplitz structure
    total = 500.0 + 2.0 * sum((500 - k) * np.exp(-0.2 * k) for k in range(1, 500))
    assert np.linalg.norm(A, "fro") == pytest.approx(np.sqrt(total), rel=1e-12)
    with pytest.raises(InvalidParameter):
        gen_kms(5, 0.0)


def test_circulant_structure():
    A = gen_circulant(5, [2, 1, 0])
    assert A[0].tolist() == [2, 1, 0, 0, 1]
    assert (np.roll(A, 1, axis=(0, 1)) == A).all()
    assert (gen_circular_banded(5, 2) == A).all()


def test_circulant_even_n():
    A = gen_circulant(4, [2, 1, 0])
    assert A[0].tolist() == [2, 1, 0, 1]


def test_circulant_errors():
    with pytest.raises(InvalidParameter):
        gen_circulant(5, [2, 1])
    with pytest.raises(NotMonotone):
        gen_circulant(5, [1, 2, 0])
    with pytest.raises(InvalidParameter):
        gen_circulant(5, [1, 0, -1])


def test_circular_kms():
    A = gen_circular_kms(7, 0.5)
    assert A[0, 6] == pytest.approx(np.exp(-0.5))
    assert A[0, 3] == pytest.approx(np.exp(-1.5))


def test_generate_dispatch():
    assert (generate("banded", 6, 3) == gen_linear_banded(6, 3)).all()
    with pytest.raises(InvalidParameter):
        generate("nope", 6, 3)


def test_random_permutation_deterministic():
    assert (random_permutation(10, 7) == random_permutation(10, 7)).all()
    assert sorted(random_permutation(10, 7)) == list(range(10))


def test_random_permutation_uniform_positions():
    # chi-square test of the value in position 0 over many seeds
    rng = np.random.default_rng(0)
    counts = np.zeros((10, 10))
    for _ in range(20000):
        p = random_permutation(10, rng.integers(2**63))
        counts[np.arange(10), p] += 1
    expected = 2000.0
    chi2 = ((counts - expected) ** 2 / expected).sum(axis=1)
    # 9 degrees of freedom per position; 0.999 quantile is about 27.9
    assert (chi2 < 27.9).all()


def test_permute_matrix():
    A = gen_linear_banded(5, 3)
    assert (permute_matrix(A, np.arange(5)) == A).all()
    p = np.array([2, 0, 4, 1, 3])
    B = permute_matrix(A, p)
    assert B[1, 3] == A[0, 1]
    # permuting by the inverse undoes it
    assert (permute_matrix(B, inverse_permutation(p)) == A).all()
    S = permute_matrix(sp.csr_matrix(A), p)
    assert (S.toarray() == B).all()
    with pytest.raises(DimensionMismatch):
        permute_matrix(A, np.arange(4))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 30), st.integers(0, 2**32 - 1))
def test_permutation_preserves_spectrum(n, seed):
    rng = np.random.default_rng(seed)
    X = rng.uniform(size=(n, n))
    A = X + X.T
    B = permute_matrix(A, random_permutation(n, seed))
    assert np.allclose(np.linalg.eigvalsh(A), np.linalg.eigvalsh(B), atol=1e-8)


def test_check_permutation():
    with pytest.raises(NotBijective):
        check_permutation([0, 0, 1])
    with pytest.raises(NotBijective):
        check_permutation([0, 3, 1])
    assert check_permutation([2.0, 0.0, 1.0]).dtype == np.int64


def test_noise_properties():
    A = gen_linear_banded(30, 4)
    N = add_noise(A, NoiseSpec(1.5, seed=3))
    H = N - A
    assert np.allclose(H, H.T)
    assert H.min() >= 0
    assert (np.diag(H) == 0).all()
    assert H.max() == pytest.approx(1.5 * np.linalg.norm(A, "fro") / 30)
    assert (add_noise(A, NoiseSpec(0.0)) == A).all()
    assert (add_noise(A, NoiseSpec(1.5, seed=3)) == N).all()


def test_noise_frobenius_normalization():
    A = gen_linear_banded(30, 4)
    H = add_noise(A, NoiseSpec(0.5, 1), normalization="frobenius") - A
    assert np.linalg.norm(H, "fro") == pytest.approx(0.5 * np.linalg.norm(A, "fro"))


def test_noise_spec_validation():
    with pytest.raises(InvalidParameter):
        NoiseSpec(-1.0)


def test_generators_quiet_when_connected():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        gen_linear_banded(10, 3)
        gen_circular_banded(10, 3)
