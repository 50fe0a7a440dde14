"""In-house dense linear algebra against independent oracles."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from pepv.errors import Singular, ValidationError, ZeroLeadingCoefficient
from pepv.linalg import (
    det,
    eig_dense,
    lu_factor,
    lu_solve,
    poly_roots,
    qr,
    random_unitary,
    svd,
)
from pepv.rng import SplitMix64

from conftest import match_sets, random_cmatrix

CONICS_RESULTANT = [3, -4, 8, 22, 14, -23, -78, -108, -100, -53, -1, 12, 4]


def test_lu_identity():
    B = random_cmatrix(SplitMix64(1), 3, 2)
    assert_allclose(lu_solve(np.eye(3), B), B)


def test_lu_diagonal():
    X = lu_solve(np.diag([2.0, 4.0]), np.array([2.0, 4.0]))
    assert_allclose(X, [1.0, 1.0])


def test_lu_residual_random():
    rs = SplitMix64(2)
    A = random_cmatrix(rs, 20)
    B = random_cmatrix(rs, 20, 3)
    X = lu_solve(A, B)
    assert np.max(np.abs(A @ X - B)) / np.max(np.abs(B)) < 1e-12


def test_lu_reconstruction():
    rs = SplitMix64(3)
    A = random_cmatrix(rs, 12)
    lu, swaps, _ = lu_factor(A)
    L = np.tril(lu, -1) + np.eye(12)
    U = np.triu(lu)
    PA = A.copy()
    for k, p in swaps:
        PA[[k, p]] = PA[[p, k]]
    assert np.max(np.abs(L @ U - PA)) < 1e-13 * np.max(np.abs(A))


def test_lu_singular_detected():
    A = np.array([[1.0, 2.0], [2.0, 4.0]], dtype=complex)
    with pytest.raises(Singular):
        lu_solve(A, np.ones(2))
    assert det(A) == 0


def test_qr_and_random_unitary():
    rs = SplitMix64(4)
    A = random_cmatrix(rs, 7)
    Q, R = qr(A)
    assert np.max(np.abs(Q @ R - A)) < 1e-13
    assert np.max(np.abs(Q.conj().T @ Q - np.eye(7))) < 1e-13
    U = random_unitary(6, rs)
    assert np.max(np.abs(U.conj().T @ U - np.eye(6))) < 1e-13


def test_svd_diagonal():
    _, s, _ = svd(np.diag([3.0, 1.0]).astype(complex))
    assert_allclose(s, [3.0, 1.0])


def test_svd_zero_matrix():
    U, s, V = svd(np.zeros((4, 3), dtype=complex))
    assert_allclose(s, 0.0)
    assert np.max(np.abs(U.conj().T @ U - np.eye(3))) < 1e-14
    assert np.max(np.abs(V.conj().T @ V - np.eye(3))) < 1e-14


@pytest.mark.parametrize("shape", [(12, 12), (10, 6), (6, 10)])
def test_svd_random(shape):
    A = random_cmatrix(SplitMix64(shape[0] * 100 + shape[1]), *shape)
    U, s, V = svd(A)
    assert np.all(np.diff(s) <= 1e-12 * s[0])
    assert np.max(np.abs(U @ np.diag(s) @ V.conj().T - A)) < 1e-12 * s[0]
    k = min(shape)
    assert np.max(np.abs(U.conj().T @ U - np.eye(U.shape[1]))) < 1e-12
    assert np.max(np.abs(V.conj().T @ V - np.eye(V.shape[1]))) < 1e-12
    assert U.shape[1] == k or U.shape[1] == max(shape)


def test_svd_cross_validates_eig():
    # Singular values must match the square roots of the eigenvalues of A^H A
    # computed by the independent QR eigensolver.
    A = random_cmatrix(SplitMix64(77), 6)
    _, s, _ = svd(A)
    vals, _ = eig_dense(A.conj().T @ A, compute_vectors=False)
    assert match_sets(np.sort(s**2), np.sort(vals.real)) < 1e-9 * s[0] ** 2


def test_eig_diagonal():
    vals, _ = eig_dense(np.diag([0.3, 5.0]).astype(complex))
    assert match_sets(vals, [0.3, 5.0]) < 1e-13


def test_eig_symmetric_flip():
    vals, _ = eig_dense(np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex))
    assert match_sets(vals, [1.0, -1.0]) < 1e-13


def test_eig_residuals_random():
    A = random_cmatrix(SplitMix64(15), 15)
    vals, vecs = eig_dense(A)
    scale = np.max(np.abs(A))
    for i in range(15):
        r = A @ vecs[:, i] - vals[i] * vecs[:, i]
        assert np.sqrt(np.vdot(r, r).real) < 1e-10 * scale


def test_eig_trace_and_det_identities():
    A = random_cmatrix(SplitMix64(16), 9)
    vals, _ = eig_dense(A, compute_vectors=False)
    assert abs(vals.sum() - np.trace(A)) < 1e-10 * np.abs(np.trace(A))
    assert abs(np.prod(vals) - det(A)) < 1e-8 * abs(det(A))


def test_poly_roots_quadratics():
    r = np.sort(poly_roots([-2, 2, 1]).real)
    assert_allclose(r, [-1 - np.sqrt(3), -1 + np.sqrt(3)], rtol=1e-12)
    # 2z^3 + 8z^2 - 3z = z (2z^2 + 8z - 3)
    r = poly_roots([0, -3, 8, 2])
    expected = [0.0, -2 + np.sqrt(22) / 2, -2 - np.sqrt(22) / 2]
    assert match_sets(r, expected) < 1e-10


def test_poly_roots_degree12_reference():
    roots = poly_roots(CONICS_RESULTANT)
    assert len(roots) == 12
    assert min(abs(roots - 0.5919305292430951)) < 1e-10
    assert min(abs(roots - 2.384515485243024)) < 1e-10


def test_poly_roots_vieta():
    rs = SplitMix64(9)
    coeffs = np.array([rs.complex_normal() for _ in range(7)])
    roots = poly_roots(coeffs)
    # Rebuild the monic polynomial from the roots and compare coefficients.
    rebuilt = np.array([1.0 + 0j])
    for r in roots:
        rebuilt = np.convolve(rebuilt, [-r, 1.0])
    assert_allclose(rebuilt, coeffs / coeffs[-1], rtol=1e-8, atol=1e-10)


def test_poly_roots_validation():
    with pytest.raises(ZeroLeadingCoefficient):
        poly_roots([1.0, 2.0, 0.0])
    with pytest.raises(ValidationError):
        poly_roots([1.0])


def test_nonfinite_rejected():
    bad = np.array([[1.0, np.inf], [0.0, 1.0]], dtype=complex)
    with pytest.raises(ValidationError):
        lu_solve(bad, np.ones(2))
    with pytest.raises(ValidationError):
        eig_dense(bad)
    with pytest.raises(ValidationError):
        svd(bad)
