"""Truncated (type II) fractional differencing and cumulation.

The operator (1 - L)^d is expanded into binomial weights pi_j(d) and applied
with all pre-sample values treated as zero, so the inverse operator exists
for every d and the transforms are exact lower-triangular Toeplitz maps.
"""

import numpy as np

__all__ = ["frac_coeffs", "frac_diff", "frac_cumulate"]


def frac_coeffs(d, n):
    """Weights pi_0, ..., pi_{n-1} of the expansion of (1 - L)^d.

    Computed by the recursion pi_0 = 1, pi_j = pi_{j-1} * (j - d - 1) / j,
    which is overflow-free for large j (unlike the Gamma-ratio closed form).

    Parameters
    ----------
    d : float
        Differencing order. Negative values give cumulation weights.
    n : int
        Number of weights, n >= 1.

    Returns
    -------
    ndarray of shape (n,)
    """
    if not np.isfinite(d):
        raise ValueError(f"d must be finite, got {d}")
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    j = np.arange(1, n, dtype=float)
    return np.concatenate(([1.0], np.cumprod((j - d - 1.0) / j)))


def frac_diff(series, d):
    """Apply the truncated fractional difference of order d to a series.

    output[t] = sum_{j=0}^{t} pi_j(d) * series[t-j], i.e. the convolution of
    the series with the pi weights cut off at the sample start.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise ValueError("series must be one-dimensional")
    if x.size == 0:
        raise ValueError("series must not be empty")
    if d == 0:
        return x.copy()
    pi = frac_coeffs(d, x.size)
    return np.convolve(x, pi)[: x.size]


def frac_cumulate(series, d):
    """Invert the truncated fractional difference: frac_diff(series, -d)."""
    return frac_diff(series, -d)
