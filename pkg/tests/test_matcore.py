import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from maxnorm.errors import InvalidRank, NoConvergence, RankDeficient, ShapeMismatch
from maxnorm.matcore import (
    LowRankFactors,
    as_matrix,
    factors_from_product,
    format_matrix,
    fro_norm,
    householder_qr,
    jacobi_svd,
    make_rng,
    max_norm,
    parse_matrix,
    qr_thin,
    read_matrix,
    rsvd_truncate,
    spectral_norm,
    substream_seed,
    svd_dense,
    write_matrix,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
shapes = st.tuples(st.integers(1, 7), st.integers(1, 7))
matrices = shapes.flatmap(lambda s: arrays(np.float64, s, elements=finite))


# -- norms -------------------------------------------------------------------


def test_max_norm_examples():
    assert max_norm(np.eye(3)) == 1.0
    h = 1 / math.sqrt(2)
    assert max_norm(np.array([[h, -h], [h, h]])) == pytest.approx(h, abs=0)
    A = np.array([[1.0, -7.0], [3.0, 2.0]])
    assert max_norm(A) == max_norm(-A) == 7.0


def test_rotation_changes_max_norm():
    # the norm is not unitarily invariant
    h = 1 / math.sqrt(2)
    assert max_norm(np.array([[h, -h], [h, h]])) != max_norm(np.eye(2))


@pytest.mark.parametrize("n", [1, 4, 9])
def test_fro_identity(n):
    assert fro_norm(np.eye(n)) == pytest.approx(math.sqrt(n))


def test_fro_examples():
    assert fro_norm(np.zeros((3, 2))) == 0.0
    assert fro_norm(np.diag([3.0, 4.0])) == 5.0


@given(matrices)
def test_norm_sandwich(A):
    m, n = A.shape
    mx, fr = max_norm(A), fro_norm(A)
    assert mx <= fr * (1 + 1e-12) + 1e-300
    assert fr <= math.sqrt(m * n) * mx * (1 + 1e-12) + 1e-300


@given(matrices)
def test_spikiness_range(A):
    s = spectral_norm(A)
    if s == 0:
        return
    m, n = A.shape
    gamma = math.sqrt(m * n) * max_norm(A) / s
    assert 1 - 1e-9 <= gamma <= math.sqrt(m * n) * (1 + 1e-9)


def test_as_matrix_rejects():
    with pytest.raises(ValueError):
        as_matrix([[1.0, np.nan]])
    with pytest.raises(ShapeMismatch):
        as_matrix(np.zeros(3))
    with pytest.raises(ShapeMismatch):
        as_matrix(np.zeros((0, 3)))


# -- QR ----------------------------------------------------------------------


@pytest.mark.parametrize("method", ["lapack", "householder"])
def test_qr_orthonormal_input(method, rng):
    A, _ = np.linalg.qr(rng.standard_normal((10, 4)))
    Q, R = qr_thin(A, method=method)
    assert np.allclose(np.abs(Q), np.abs(A), atol=1e-12)
    assert np.allclose(R, np.eye(4), atol=1e-12)


@pytest.mark.parametrize("method", ["lapack", "householder"])
def test_qr_diagonal_stack(method):
    A = np.array([[2.0, 0.0], [0.0, 0.0], [0.0, 3.0]])
    _, R = qr_thin(A, method=method)
    assert np.allclose(R, np.diag([2.0, 3.0]), atol=1e-14)


@pytest.mark.parametrize("method", ["lapack", "householder"])
def test_qr_random_gaussian(method, rng):
    A = rng.standard_normal((64, 8))
    Q, R = qr_thin(A, method=method)
    assert np.abs(A - Q @ R).max() <= 1e-10 * max_norm(A) * 8
    assert np.abs(Q.T @ Q - np.eye(8)).max() <= 1e-10
    assert np.all(np.diag(R) >= 0)
    assert np.allclose(np.tril(R, -1), 0)


def test_householder_matches_lapack(rng):
    A = rng.standard_normal((30, 12))
    Q1, R1 = qr_thin(A, method="lapack")
    Q2, R2 = qr_thin(A, method="householder")
    assert np.allclose(Q1, Q2, atol=1e-12)
    assert np.allclose(R1, R2, atol=1e-12)


def test_qr_rank_deficient(rng):
    A = rng.standard_normal((10, 3))
    A[:, 2] = A[:, 0] + A[:, 1]
    with pytest.raises(RankDeficient) as info:
        qr_thin(A)
    assert info.value.column == 2
    qr_thin(A, check=False)


def test_qr_wide_rejected():
    with pytest.raises(ShapeMismatch):
        qr_thin(np.ones((2, 3)))


@given(st.integers(2, 12), st.integers(1, 6), st.integers(0, 2**32))
@settings(max_examples=30)
def test_qr_property(m, k, seed):
    k = min(k, m)
    A = make_rng(seed).standard_normal((m, k))
    Q, R = qr_thin(A)
    assert np.abs(Q.T @ Q - np.eye(k)).max() <= 1e-10
    assert np.abs(A - Q @ R).max() <= 1e-10 * max(1.0, max_norm(A))


# -- SVD ---------------------------------------------------------------------


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_svd_diag(method):
    f = svd_dense(np.diag([3.0, 2.0, 1.0]), method=method)
    assert np.allclose(f.s, [3, 2, 1])


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_svd_rank_one(method, rng):
    u, v = rng.standard_normal(5), rng.standard_normal(4)
    f = svd_dense(np.outer(u, v), method=method)
    assert f.s[0] == pytest.approx(np.linalg.norm(u) * np.linalg.norm(v), rel=1e-12)
    assert np.all(f.s[1:] <= 1e-12 * f.s[0])
    assert f.orthonormality_error() <= 1e-10


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_svd_random_against_eigen_oracle(method, rng):
    A = rng.standard_normal((8, 6))
    f = svd_dense(A, method=method)
    assert np.abs(A - f.to_dense()).max() <= 1e-9 * f.s[0]
    # independent route: eigenvalues of the Gram matrix
    eig = np.sort(np.linalg.eigvalsh(A.T @ A))[::-1]
    assert np.allclose(f.s, np.sqrt(np.clip(eig, 0, None)), atol=1e-8)
    assert np.all(np.diff(f.s) <= 0)


def test_jacobi_matches_lapack_wide(rng):
    A = rng.standard_normal((5, 11))
    a = svd_dense(A, method="jacobi")
    b = svd_dense(A, method="lapack")
    assert np.allclose(a.s, b.s, atol=1e-12)
    assert np.abs(A - a.to_dense()).max() <= 1e-12
    assert a.orthonormality_error() <= 1e-12


def test_jacobi_sweep_cap(rng):
    with pytest.raises(NoConvergence):
        jacobi_svd(rng.standard_normal((6, 6)), max_sweeps=1)


@given(st.integers(1, 9), st.integers(1, 9), st.integers(0, 2**32))
@settings(max_examples=30)
def test_svd_transpose_invariance(m, n, seed):
    A = make_rng(seed).standard_normal((m, n))
    assert np.allclose(svd_dense(A).s, svd_dense(A.T).s, atol=1e-10)


# -- randomized SVD ----------------------------------------------------------


@pytest.mark.parametrize("r", [1, 3, 5])
def test_rsvd_exact_rank(r, rng):
    X = rng.standard_normal((40, r)) @ rng.standard_normal((r, 30))
    Y = rsvd_truncate(X, r, rng=make_rng(1))
    s2 = svd_dense(X).s[0]
    assert np.abs(X - Y.to_dense()).max() <= 1e-8 * s2
    assert Y.orthonormality_error() <= 1e-10


def test_rsvd_diag_spectral_error():
    A = np.diag([3.0, 2.0, 1.0, 0.5])
    Y = rsvd_truncate(A, 2, q=2, rng=make_rng(3))
    exact = svd_dense(A).truncate(2).to_dense()
    err = np.linalg.norm(A - Y.to_dense(), 2)
    assert err <= 1.5 * np.linalg.norm(A - exact, 2)
    assert np.linalg.norm(A - exact, 2) == pytest.approx(1.0)


def test_rsvd_full_rank_reproduces(rng):
    A = rng.standard_normal((12, 7))
    Y = rsvd_truncate(A, 7, rng=make_rng(0))
    assert np.abs(A - Y.to_dense()).max() <= 1e-8


def test_rsvd_spectral_contract(rng):
    # ||A - Y||_2 <= 1.5 sigma_{r+1} under defaults, checked over seeds
    A = rng.standard_normal((120, 80)) * np.linspace(1, 0.01, 80)
    sigma = svd_dense(A).s
    hits = sum(np.linalg.norm(A - rsvd_truncate(A, 10, rng=make_rng(s)).to_dense(), 2) <= 1.5 * sigma[10] for s in range(100))
    assert hits >= 99


def test_rsvd_reproducible(rng):
    A = rng.standard_normal((50, 40))
    a = rsvd_truncate(A, 5, rng=make_rng(42)).to_dense()
    b = rsvd_truncate(A, 5, rng=make_rng(42)).to_dense()
    assert np.array_equal(a, b)


def test_rsvd_invalid_rank():
    with pytest.raises(InvalidRank):
        rsvd_truncate(np.eye(3), 4)
    with pytest.raises(InvalidRank):
        rsvd_truncate(np.eye(3), 0)


# -- spectral norm -----------------------------------------------------------


def test_spectral_identity():
    assert spectral_norm(np.eye(100)) == pytest.approx(1.0, rel=1e-10)


def test_spectral_padded_diag():
    A = np.zeros((90, 70))
    A[0, 0], A[1, 1] = 3.0, 4.0
    assert spectral_norm(A) == pytest.approx(4.0, rel=1e-8)
    assert spectral_norm(A[:3, :2]) == pytest.approx(4.0)


def test_spectral_power_iteration_vs_svd(rng):
    A = rng.standard_normal((100, 80))
    assert spectral_norm(A) == pytest.approx(svd_dense(A).s[0], rel=1e-6)


def test_spectral_no_convergence(rng):
    A = rng.standard_normal((100, 80))
    with pytest.raises(NoConvergence) as info:
        spectral_norm(A, max_iter=2)
    assert 0 < info.value.estimate <= svd_dense(A).s[0] * (1 + 1e-12)


# -- rng and factors ---------------------------------------------------------


def test_rng_streams():
    a = make_rng(7, 1).standard_normal(5)
    assert np.array_equal(a, make_rng(7, 1).standard_normal(5))
    assert not np.array_equal(a, make_rng(7, 2).standard_normal(5))
    assert substream_seed(7, 1) == substream_seed(7, 1) != substream_seed(7, 2)
    assert 0 <= substream_seed(7, 1) < 2**64


def test_factors_from_product_degenerate(rng):
    A = rng.standard_normal((10, 3))
    B = rng.standard_normal((8, 3))
    B[:, 2] = B[:, 1]
    A[:, 2] = A[:, 1]
    f = factors_from_product(A, B)
    assert f.rank == 2
    assert np.allclose(f.to_dense(), A @ B.T)


def test_zero_factors():
    z = LowRankFactors.zeros(3, 4)
    assert z.rank == 0 and z.shape == (3, 4)
    assert np.array_equal(z.to_dense(), np.zeros((3, 4)))


# -- file format -------------------------------------------------------------


@given(matrices)
def test_matrix_text_round_trip(A):
    assert np.array_equal(parse_matrix(format_matrix(A)), A)


def test_matrix_file(tmp_path, rng):
    A = rng.standard_normal((3, 5)) / 3
    write_matrix(A, tmp_path / "a.txt")
    assert (tmp_path / "a.txt").read_text().splitlines()[0] == "3 5"
    assert np.array_equal(read_matrix(tmp_path / "a.txt"), A)


@pytest.mark.parametrize("text", ["", "2 2\n1 2\n", "2\n1 2\n", "1 2\n1 2 3\n"])
def test_matrix_text_malformed(text):
    with pytest.raises(ValueError):
        parse_matrix(text)
