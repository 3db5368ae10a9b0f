"""Dense linear-algebra primitives shared by the rest of the package.

Everything is float64. Eigenvalues and singular values are always reported
in decreasing order; symmetric inputs are symmetrized by averaging with the
transpose before decomposition so that round-off accumulated in sample
covariances cannot leak into the factorizations.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["SymEig", "Svd", "sym_eig", "svd", "psd_sqrt"]

# relative tolerance for declaring an input "symmetric"
SYMMETRY_RTOL = 1e-10
# eigenvalues of a nominally-PSD matrix may undershoot zero by this much
PSD_RTOL = 1e-10


@dataclass(frozen=True)
class SymEig:
    """Eigendecomposition of a symmetric matrix, eigenvalues descending."""

    eigenvalues: np.ndarray   # shape (n,), sorted descending
    eigenvectors: np.ndarray  # shape (n, n), orthonormal columns


@dataclass(frozen=True)
class Svd:
    """Thin singular value decomposition, a = u @ diag(d) @ v.T."""

    u: np.ndarray
    d: np.ndarray  # singular values, descending
    v: np.ndarray


def _as_matrix(a, name="matrix"):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got ndim={a.ndim}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"{name} must have positive dimensions, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} must contain only finite entries")
    return a


def sym_eig(a):
    """Eigendecomposition of a symmetric matrix.

    Parameters
    ----------
    a : (n, n) array_like
        Square matrix, symmetric up to a relative tolerance of 1e-10.
        It is symmetrized as ``(a + a.T) / 2`` before decomposition.

    Returns
    -------
    SymEig
        Eigenvalues in decreasing order with matching orthonormal
        eigenvector columns, so ``q @ diag(w) @ q.T`` reproduces ``a``.

    Raises
    ------
    ValueError
        If the input is not square or not symmetric within tolerance.
    """
    a = _as_matrix(a)
    n, m = a.shape
    if n != m:
        raise ValueError(f"sym_eig requires a square matrix, got {a.shape}")
    scale = np.linalg.norm(a)
    if np.linalg.norm(a - a.T) > SYMMETRY_RTOL * max(scale, 1e-300):
        raise ValueError("sym_eig input is not symmetric within tolerance")
    sym = 0.5 * (a + a.T)
    w, q = np.linalg.eigh(sym)
    return SymEig(eigenvalues=w[::-1].copy(), eigenvectors=q[:, ::-1].copy())


def svd(a):
    """Thin SVD with singular values in decreasing order.

    Returns an `Svd` such that ``u @ diag(d) @ v.T`` reproduces the input;
    ``u`` and ``v`` have orthonormal columns.
    """
    a = _as_matrix(a)
    u, d, vt = np.linalg.svd(a, full_matrices=False)
    return Svd(u=u, d=d, v=vt.T.copy())


def psd_sqrt(a):
    """Symmetric square root of a positive semi-definite matrix.

    The result ``s`` is symmetric and satisfies ``s @ s.T == a`` up to
    round-off. Eigenvalues are allowed to undershoot zero by at most
    ``1e-10 * max |eigenvalue|`` (and are clamped to zero); anything more
    negative raises.

    Raises
    ------
    ValueError
        If the input has a significantly negative eigenvalue.
    """
    eig = sym_eig(a)
    w = eig.eigenvalues
    top = np.max(np.abs(w)) if w.size else 0.0
    if np.any(w < -PSD_RTOL * top):
        raise ValueError(
            "psd_sqrt input is not positive semi-definite "
            f"(most negative eigenvalue {w.min():.3e})"
        )
    w = np.maximum(w, 0.0)
    q = eig.eigenvectors
    root = (q * np.sqrt(w)) @ q.T
    return 0.5 * (root + root.T)
