"""Shared test oracles, independent of the library code paths they check."""

import numpy as np


def amari_index(g):
    """Permutation-distance score of a mixing-unmixing product.

    Zero iff ``g`` is a scaled permutation matrix; the usual normalization
    keeps the score in [0, 1].
    """
    p = np.abs(np.asarray(g, dtype=np.float64))
    n = p.shape[0]
    rows = np.sum(p.sum(axis=1) / p.max(axis=1) - 1.0)
    cols = np.sum(p.sum(axis=0) / p.max(axis=0) - 1.0)
    return (rows + cols) / (2.0 * n * (n - 1))


def brute_dcov_sq(x, y):
    """Double-centering oracle for the squared distance covariance.

    Builds the dense centering projector and the elementwise sum directly
    from the definition; deliberately avoids every shortcut the library
    takes.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    t = x.shape[1]
    d_x = np.zeros((t, t))
    d_y = np.zeros((t, t))
    for i in range(t):
        for j in range(t):
            d_x[i, j] = np.sqrt(np.sum((x[:, i] - x[:, j]) ** 2))
            d_y[i, j] = np.sqrt(np.sum((y[:, i] - y[:, j]) ** 2))
    p = np.eye(t) - np.ones((t, t)) / t
    a = p @ d_x @ p
    b = p @ d_y @ p
    return float(np.sum(a * b)) / t**2


def brute_determinant(a):
    """Laplace-expansion determinant, for small matrices only."""
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[0]
    if n == 1:
        return a[0, 0]
    total = 0.0
    for j in range(n):
        minor = np.delete(np.delete(a, 0, axis=0), j, axis=1)
        total += (-1.0) ** j * a[0, j] * brute_determinant(minor)
    return total


def random_orthogonal(n, rng):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def nearest_scaled_permutation_gap(g):
    """Largest entry magnitude of ``g`` outside its per-row peaks.

    Small values mean ``g`` is within that tolerance of a scaled
    permutation (assuming the peaks land in distinct columns, which is
    checked separately).
    """
    g = np.asarray(g, dtype=np.float64)
    peaks = np.argmax(np.abs(g), axis=1)
    off = np.abs(g).copy()
    for row, col in enumerate(peaks):
        off[row, col] = 0.0
    return float(off.max()), peaks
