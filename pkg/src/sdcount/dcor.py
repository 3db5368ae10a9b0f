"""Empirical distance covariance, variance and correlation.

The statistics operate on sample sets stored as ``(dim, count)`` arrays
whose columns are observations; a 1-D array of length ``count`` is accepted
as a scalar-variable shorthand. With ``d_x`` and ``d_y`` the matrices of
pairwise Euclidean distances between columns and ``p`` the centering
projector ``I - (1/T) 1 1'``, the squared empirical distance covariance is

    (1/T^2) * trace(p @ d_x @ p @ d_y),

the squared distance variance is the same expression with ``d_y = d_x``,
and the squared distance correlation is their normalized ratio, which lies
in [0, 1] and vanishes (in the large-sample limit) exactly when the two
variables are independent.

The centering projector is idempotent, so the trace equals the elementwise
product of the two double-centered distance matrices. Centering is always
performed by row/column mean subtraction, never by dense projector
multiplication. For a pair of scalar variables the double-centered product
is accumulated by a compiled kernel straight from the samples (same
arithmetic, nothing materialized), which is what makes the Monte-Carlo
studies in this package affordable; multivariate inputs take the
materialized route. The O(T log T) unbiased estimator from the fast-dCov
literature is deliberately not implemented.

References
----------
Szekely, Rizzo, Bakirov, "Measuring and testing dependence by correlation
of distances", Annals of Statistics 35(6), 2007.
Szekely, Rizzo, "Partial distance correlation with methods for
dissimilarities", Annals of Statistics 42(6), 2014.
"""

import numba
import numpy as np
from scipy.spatial.distance import cdist

__all__ = [
    "SAMPLE_CAP",
    "pairwise_distances",
    "centering_projector",
    "double_center",
    "dcov_sq",
    "dvar_sq",
    "dcor",
]

# default ceiling on the number of samples a single statistic may consume;
# the materialized route stores T x T distance matrices
SAMPLE_CAP = 20000

# dvar_sq below 1e-14 * (mean pairwise distance)^2 counts as the exact-zero
# branch of the dcor definition
ZERO_DVAR_RTOL = 1e-14

# round-off may drive the (provably nonnegative) statistics slightly
# negative; anything within -1e-12 * scale is clamped to zero
NEGATIVE_CLAMP_RTOL = 1e-12


def _as_samples(x, name="samples"):
    a = np.asarray(x, dtype=np.float64)
    if a.ndim == 1:
        a = a[np.newaxis, :]
    if a.ndim != 2:
        raise ValueError(f"{name} must be a (dim, count) array, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} must contain only finite entries")
    return a


def _check_count(t, max_samples):
    if t < 2:
        raise ValueError(f"distance statistics need at least 2 samples, got {t}")
    if t > max_samples:
        raise ValueError(
            f"sample count {t} exceeds the configured cap of {max_samples}"
        )


def pairwise_distances(x, max_samples=SAMPLE_CAP):
    """Matrix of pairwise Euclidean distances between the columns of ``x``.

    Returns a symmetric nonnegative ``(count, count)`` array with zero
    diagonal. Raises ``ValueError`` for fewer than two samples.
    """
    a = _as_samples(x)
    _check_count(a.shape[1], max_samples)
    return cdist(a.T, a.T)


def centering_projector(count):
    """Dense centering projector ``I - (1/count) 1 1'``.

    Exists for verification paths only; the statistics below never build it.
    """
    if count < 1:
        raise ValueError("projector size must be positive")
    return np.eye(count) - np.full((count, count), 1.0 / count)


def double_center(d):
    """Subtract row and column means and add back the grand mean.

    Equivalent to conjugating ``d`` by the centering projector.
    """
    d = np.asarray(d, dtype=np.float64)
    row = d.mean(axis=1, keepdims=True)
    col = d.mean(axis=0, keepdims=True)
    return d - row - col + d.mean()


@numba.njit(cache=True, nogil=True)
def _scalar_pair_sums(x, y):
    """Raw distance-product sums for a pair of scalar sample vectors.

    Returns the full (diagonal-inclusive) sums of d_x*d_y, d_x*d_x and
    d_y*d_y over all index pairs, plus the row sums of each distance
    matrix. Row-level partial accumulation keeps the summation error of
    the O(T^2) scan well below the tolerances used anywhere downstream.
    """
    t = x.shape[0]
    sum_xy = 0.0
    sum_xx = 0.0
    sum_yy = 0.0
    row_x = np.zeros(t)
    row_y = np.zeros(t)
    for i in range(t):
        part_xy = 0.0
        part_xx = 0.0
        part_yy = 0.0
        xi = x[i]
        yi = y[i]
        for j in range(i + 1, t):
            dx = abs(xi - x[j])
            dy = abs(yi - y[j])
            part_xy += dx * dy
            part_xx += dx * dx
            part_yy += dy * dy
            row_x[i] += dx
            row_x[j] += dx
            row_y[i] += dy
            row_y[j] += dy
        sum_xy += part_xy
        sum_xx += part_xx
        sum_yy += part_yy
    return 2.0 * sum_xy, 2.0 * sum_xx, 2.0 * sum_yy, row_x, row_y


def _combine_scalar(raw_sum, row_a, row_b, grand_a, grand_b, t):
    # sum of products of the two double-centered matrices, expressed
    # through the raw product sum and the row/grand sums
    return raw_sum - (2.0 / t) * np.dot(row_a, row_b) + grand_a * grand_b / t**2


def _joint_stats(a, b, max_samples):
    """Shared core: centered product sums and mean distances for a pair.

    Returns ``(num, dxx, dyy, mean_dist_a, mean_dist_b)`` where ``num`` is
    the unclamped squared distance covariance and ``dxx``/``dyy`` the
    squared distance variances.
    """
    t = a.shape[1]
    if t != b.shape[1]:
        raise ValueError(
            f"sample counts must match, got {t} and {b.shape[1]}"
        )
    _check_count(t, max_samples)
    if a.shape[0] == 1 and b.shape[0] == 1:
        sxy, sxx, syy, row_a, row_b = _scalar_pair_sums(a[0], b[0])
        grand_a = row_a.sum()
        grand_b = row_b.sum()
        num = _combine_scalar(sxy, row_a, row_b, grand_a, grand_b, t)
        dxx = _combine_scalar(sxx, row_a, row_a, grand_a, grand_a, t)
        dyy = _combine_scalar(syy, row_b, row_b, grand_b, grand_b, t)
        scale = float(t) ** 2
        return num / scale, dxx / scale, dyy / scale, grand_a / scale, grand_b / scale
    d_a = cdist(a.T, a.T)
    d_b = cdist(b.T, b.T)
    mean_a = d_a.mean()
    mean_b = d_b.mean()
    for d in (d_a, d_b):
        row = d.mean(axis=1, keepdims=True)
        grand = row.mean()
        d -= row
        d -= row.T
        d += grand
    scale = float(t) ** 2
    return (
        np.vdot(d_a, d_b) / scale,
        np.vdot(d_a, d_a) / scale,
        np.vdot(d_b, d_b) / scale,
        mean_a,
        mean_b,
    )


def _clamp_nonnegative(value, scale):
    if value >= 0.0:
        return value
    if value >= -NEGATIVE_CLAMP_RTOL * scale:
        return 0.0
    raise ArithmeticError(
        f"distance statistic came out significantly negative ({value:.3e}); "
        "this indicates corrupted input or an internal fault"
    )


def dcov_sq(x, y, max_samples=SAMPLE_CAP):
    """Squared empirical distance covariance between two sample sets.

    The sample sets must share the same number of columns (observations);
    their dimensions may differ. The result is nonnegative; round-off
    negatives within ``1e-12`` of the product of mean pairwise distances
    are clamped to zero.
    """
    a = _as_samples(x, "x")
    b = _as_samples(y, "y")
    num, _, _, mean_a, mean_b = _joint_stats(a, b, max_samples)
    return _clamp_nonnegative(num, mean_a * mean_b)


def dvar_sq(x, max_samples=SAMPLE_CAP):
    """Squared empirical distance variance, ``dcov_sq(x, x)``."""
    return dcov_sq(x, x, max_samples=max_samples)


def dcor(x, y, max_samples=SAMPLE_CAP):
    """Squared empirical distance correlation, a value in [0, 1].

    Computed as ``dcov_sq(x, y) / sqrt(dvar_sq(x) * dvar_sq(y))`` whenever
    both distance variances exceed the zero threshold
    ``1e-14 * (mean pairwise distance)^2``; exactly 0 otherwise (in
    particular for constant arguments). The ratio is clamped to [0, 1].
    """
    a = _as_samples(x, "x")
    b = _as_samples(y, "y")
    num, dxx, dyy, mean_a, mean_b = _joint_stats(a, b, max_samples)
    dxx = _clamp_nonnegative(dxx, mean_a * mean_a)
    dyy = _clamp_nonnegative(dyy, mean_b * mean_b)
    if dxx <= ZERO_DVAR_RTOL * mean_a**2 or dyy <= ZERO_DVAR_RTOL * mean_b**2:
        return 0.0
    num = _clamp_nonnegative(num, mean_a * mean_b)
    return min(num / np.sqrt(dxx * dyy), 1.0)
