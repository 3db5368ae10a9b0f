"""JADE-style independent component analysis under a source-count hypothesis.

The separator runs the classical pipeline: PCA whitening of the sensor
data down to the hypothesized number of components, estimation of the
fourth-order cumulant matrices of the whitened data, and orthogonal joint
diagonalization of that matrix set by Jacobi rotations. JADE is used
because it is deterministic (no nonlinearity choice, no random restarts)
and consistent for non-Gaussian sources.

Row order and signs of an ICA solution are not identifiable, so `separate`
fixes a convention: rows are sorted by decreasing magnitude of excess
kurtosis (the most Gaussian-looking estimate comes last) and each row is
flipped so that its largest-magnitude sample is positive.

References
----------
Cardoso, Souloumiac, "Blind beamforming for non-Gaussian signals",
IEE Proceedings F 140(6), 1993.
Cardoso, Souloumiac, "Jacobi angles for simultaneous diagonalization",
SIAM J. Matrix Anal. Appl. 17(1), 1996.
"""

from dataclasses import dataclass

import numpy as np

from . import numerics

__all__ = [
    "RankDeficiencyError",
    "WhiteningResult",
    "SeparationResult",
    "whiten",
    "cumulant_matrices",
    "joint_diagonalize",
    "separate",
]

DEFAULT_ANGLE_THRESHOLD = 1e-8
MAX_SWEEPS = 100


class RankDeficiencyError(ValueError):
    """Raised when the data cannot support the requested component count."""


@dataclass(frozen=True)
class WhiteningResult:
    projector: np.ndarray             # (components, sensors)
    whitened: np.ndarray              # (components, samples), identity covariance
    retained_eigenvalues: np.ndarray  # descending positives


@dataclass(frozen=True)
class SeparationResult:
    hypothesis: int
    unmixing: np.ndarray   # (hypothesis, sensors)
    sources: np.ndarray    # (hypothesis, samples), exactly unmixing @ x
    sort_keys: np.ndarray  # per-row |excess kurtosis|, descending


def _as_sensor_data(x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"sensor data must be 2-dimensional, got ndim={x.ndim}")
    if not np.all(np.isfinite(x)):
        raise ValueError("sensor data must contain only finite entries")
    return x


def whiten(x, n):
    """Project ``(sensors, samples)`` data onto its top ``n`` principal axes.

    Columns are mean-removed, the sample covariance ``(1/T) X X'`` is
    eigendecomposed, and the projector ``diag(w[:n])^(-1/2) @ Q[:, :n].T``
    is applied so the retained rows have identity sample covariance.

    Raises
    ------
    RankDeficiencyError
        If the n-th eigenvalue is at or below ``1e-12`` of the largest.
    """
    x = _as_sensor_data(x)
    sensors, samples = x.shape
    if not 1 <= n <= sensors:
        raise ValueError(f"component count must be in [1, {sensors}], got {n}")
    if samples <= sensors:
        raise ValueError(f"need more samples than sensors, got {x.shape}")
    centered = x - x.mean(axis=1, keepdims=True)
    cov = (centered @ centered.T) / samples
    eig = numerics.sym_eig(cov)
    w = eig.eigenvalues
    if w[n - 1] <= 1e-12 * w[0]:
        raise RankDeficiencyError(
            f"covariance eigenvalue {n} of {sensors} is numerically zero; "
            f"the data do not support {n} components"
        )
    projector = (eig.eigenvectors[:, :n] / np.sqrt(w[:n])).T
    return WhiteningResult(
        projector=projector,
        whitened=projector @ centered,
        retained_eigenvalues=w[:n].copy(),
    )


def cumulant_matrices(z):
    """Fourth-order cumulant matrices of whitened data.

    For each index pair ``i <= j`` returns the symmetric matrix with
    entries ``cum(z_i, z_j, z_k, z_l)`` estimated from sample moments,
    ``n (n + 1) / 2`` matrices in total. For Gaussian data every matrix
    tends to zero as the sample count grows.
    """
    z = _as_sensor_data(z)
    n, samples = z.shape
    r = (z @ z.T) / samples
    mats = []
    for i in range(n):
        for j in range(i, n):
            w = z[i] * z[j]
            q = (z * w) @ z.T / samples
            q -= r * r[i, j]
            q -= np.outer(r[:, i], r[j, :])
            q -= np.outer(r[:, j], r[i, :])
            mats.append(0.5 * (q + q.T))
    return mats


def joint_diagonalize(mats, angle_threshold=DEFAULT_ANGLE_THRESHOLD,
                      max_sweeps=MAX_SWEEPS):
    """Orthogonal rotation jointly diagonalizing a set of symmetric matrices.

    Jacobi sweeps visit every index pair and apply the closed-form optimal
    Givens rotation whenever ``|sin(angle)|`` exceeds ``angle_threshold``;
    iteration stops after a sweep that applies no rotation, or after
    ``max_sweeps`` sweeps. The summed off-diagonal energy of the rotated
    set is non-increasing from sweep to sweep.

    Returns the accumulated rotation ``v`` with ``v.T @ m @ v``
    approximately diagonal for every input matrix.
    """
    if len(mats) == 0:
        raise ValueError("need at least one matrix to diagonalize")
    stack = np.stack([np.asarray(m, dtype=np.float64) for m in mats])
    if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
        raise ValueError("matrices must be square and equally sized")
    n = stack.shape[1]
    v = np.eye(n)
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                h_diag = stack[:, p, p] - stack[:, q, q]
                h_off = stack[:, p, q] + stack[:, q, p]
                g_on = np.dot(h_diag, h_diag) - np.dot(h_off, h_off)
                g_off = 2.0 * np.dot(h_diag, h_off)
                theta = 0.5 * np.arctan2(g_off, g_on + np.hypot(g_on, g_off))
                s = np.sin(theta)
                if abs(s) <= angle_threshold:
                    continue
                rotated = True
                c = np.cos(theta)
                col_p = stack[:, :, p].copy()
                stack[:, :, p] = c * col_p + s * stack[:, :, q]
                stack[:, :, q] = c * stack[:, :, q] - s * col_p
                row_p = stack[:, p, :].copy()
                stack[:, p, :] = c * row_p + s * stack[:, q, :]
                stack[:, q, :] = c * stack[:, q, :] - s * row_p
                v_p = v[:, p].copy()
                v[:, p] = c * v_p + s * v[:, q]
                v[:, q] = c * v[:, q] - s * v_p
        if not rotated:
            break
    return v


def _excess_kurtosis(rows):
    centered = rows - rows.mean(axis=1, keepdims=True)
    m2 = (centered**2).mean(axis=1)
    m4 = (centered**4).mean(axis=1)
    return m4 / m2**2 - 3.0


def separate(x, n):
    """Estimate ``n`` sources from ``(sensors, samples)`` mixtures.

    Returns a `SeparationResult` whose unmixing matrix is the joint
    diagonalizer composed with the whitening projector. Source rows have
    unit sample variance, are ordered by decreasing ``|excess kurtosis|``
    and carry the sign convention described in the module docstring.
    The Jacobi angle threshold is ``1 / (100 sqrt(samples))``.

    All-Gaussian inputs are accepted but carry no separation guarantee
    (temporally white Gaussian signals are not separable); the spurious
    components obtained for hypotheses above the true source count are
    near-Gaussian and therefore land in the trailing rows.
    """
    x = _as_sensor_data(x)
    sensors, samples = x.shape
    if not 2 <= n <= sensors:
        raise ValueError(f"hypothesis must be in [2, {sensors}], got {n}")
    if samples <= 10 * sensors:
        raise ValueError(
            f"need more than 10 * sensors samples, got {samples} for {sensors} sensors"
        )
    whitening = whiten(x, n)
    mats = cumulant_matrices(whitening.whitened)
    rotation = joint_diagonalize(
        mats, angle_threshold=1.0 / (100.0 * np.sqrt(samples))
    )
    unmixing = rotation.T @ whitening.projector
    raw = unmixing @ x
    kurt = _excess_kurtosis(raw)
    order = np.argsort(-np.abs(kurt), kind="stable")
    unmixing = unmixing[order]
    raw = raw[order]
    signs = np.ones(n)
    for row in range(n):
        peak = np.argmax(np.abs(raw[row]))
        if raw[row, peak] < 0.0:
            signs[row] = -1.0
    unmixing = signs[:, np.newaxis] * unmixing
    sources = unmixing @ x
    return SeparationResult(
        hypothesis=n,
        unmixing=unmixing,
        sources=sources,
        sort_keys=np.abs(kurt[order]),
    )
