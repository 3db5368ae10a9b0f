import numpy as np
import pytest

from sdcount import numerics

from helpers import brute_determinant


def test_sym_eig_identity():
    out = numerics.sym_eig(np.eye(3))
    assert np.allclose(out.eigenvalues, [1.0, 1.0, 1.0])


def test_sym_eig_diagonal_sorted_descending():
    out = numerics.sym_eig(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(out.eigenvalues, [3.0, 2.0, 1.0], atol=1e-14)
    # eigenvectors are the coordinate axes up to sign
    for col, axis in enumerate([0, 2, 1]):
        vec = out.eigenvectors[:, col]
        assert abs(abs(vec[axis]) - 1.0) < 1e-12
        assert np.sum(np.abs(vec)) < 1.0 + 1e-12


def test_sym_eig_reconstruction_random():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = rng.standard_normal((5, 5))
        a = a + a.T
        out = numerics.sym_eig(a)
        rebuilt = out.eigenvectors @ np.diag(out.eigenvalues) @ out.eigenvectors.T
        assert np.linalg.norm(rebuilt - a) <= 1e-10 * np.linalg.norm(a)
        q = out.eigenvectors
        assert np.max(np.abs(q.T @ q - np.eye(5))) < 1e-12


def test_sym_eig_trace_and_determinant_oracles():
    rng = np.random.default_rng(4)
    for n in (2, 3, 4):
        for _ in range(10):
            a = rng.standard_normal((n, n))
            a = a + a.T
            w = numerics.sym_eig(a).eigenvalues
            assert abs(w.sum() - np.trace(a)) <= 1e-9 * max(abs(np.trace(a)), 1.0)
            det = brute_determinant(a)
            assert abs(np.prod(w) - det) <= 1e-9 * max(abs(det), 1.0)


def test_sym_eig_rejects_bad_input():
    with pytest.raises(ValueError):
        numerics.sym_eig(np.ones((2, 3)))
    asym = np.array([[1.0, 2.0], [0.5, 1.0]])
    with pytest.raises(ValueError):
        numerics.sym_eig(asym)
    with pytest.raises(ValueError):
        numerics.sym_eig(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_svd_identity_and_diag():
    assert np.allclose(numerics.svd(np.eye(4)).d, np.ones(4))
    out = numerics.svd(np.diag([2.0, 0.0]))
    assert np.allclose(out.d, [2.0, 0.0])


def test_svd_reconstruction_random():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((7, 4))
    out = numerics.svd(a)
    rebuilt = out.u @ np.diag(out.d) @ out.v.T
    assert np.linalg.norm(rebuilt - a) <= 1e-10 * np.linalg.norm(a)
    assert np.max(np.abs(out.u.T @ out.u - np.eye(4))) < 1e-12
    assert np.max(np.abs(out.v.T @ out.v - np.eye(4))) < 1e-12


def test_svd_transpose_swaps_factors():
    rng = np.random.default_rng(6)
    a = rng.standard_normal((6, 3))
    fwd = numerics.svd(a)
    bwd = numerics.svd(a.T)
    assert np.allclose(fwd.d, bwd.d, atol=1e-12)
    # columns may only differ by a joint sign flip of (u, v) pairs
    for k in range(3):
        sign = np.sign(fwd.u[:, k] @ bwd.v[:, k])
        assert np.allclose(fwd.u[:, k], sign * bwd.v[:, k], atol=1e-10)
        assert np.allclose(fwd.v[:, k], sign * bwd.u[:, k], atol=1e-10)


def test_psd_sqrt_identity_and_diag():
    assert np.allclose(numerics.psd_sqrt(np.eye(3)), np.eye(3))
    assert np.allclose(numerics.psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))


def test_psd_sqrt_tridiagonal_round_trip():
    sigma2 = 1e-3
    cov = sigma2 * (np.eye(6) + 0.1 * np.eye(6, k=1) + 0.1 * np.eye(6, k=-1))
    root = numerics.psd_sqrt(cov)
    assert np.allclose(root, root.T)
    assert np.linalg.norm(root @ root.T - cov) <= 1e-9 * np.linalg.norm(cov)


def test_psd_sqrt_idempotent():
    rng = np.random.default_rng(7)
    b = rng.standard_normal((4, 4))
    a = b @ b.T
    root = numerics.psd_sqrt(a)
    again = numerics.psd_sqrt(root @ root.T)
    assert np.linalg.norm(again - root) <= 1e-8 * np.linalg.norm(root)


def test_psd_sqrt_rejects_indefinite():
    with pytest.raises(ValueError):
        numerics.psd_sqrt(np.diag([1.0, -0.5]))
