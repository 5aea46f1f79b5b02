"""Panel container for multivariate time series with per-series metadata."""

from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import DataError

__all__ = ["Panel", "apply_transforms"]

TRANSFORM_NONE = 1
TRANSFORM_LOG = 2


@dataclass
class Panel:
    """T x N observation matrix plus per-series metadata.

    Attributes
    ----------
    values : ndarray of shape (T, N)
        Observations, rows indexed by time. Must be finite everywhere.
    names : list of str
        Series labels, length N, unique.
    transform_codes : ndarray of int
        Per-series code: 1 = no transform, 2 = natural logarithm.
    est_orders : ndarray or None
        Estimated integration orders d_i, filled in by estimation steps.
    period_index : sequence
        Strictly increasing time labels, length T.
    diff_codes : ndarray of int or None
        Optional integer pre-differencing orders k_i used by the
        principal-components benchmarks.
    """

    values: np.ndarray
    names: list = None
    transform_codes: np.ndarray = None
    est_orders: np.ndarray = None
    period_index: list = field(default=None, repr=False)
    diff_codes: np.ndarray = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise ValueError("values must be a T x N matrix")
        T, N = self.values.shape
        if not np.all(np.isfinite(self.values)):
            t, i = np.argwhere(~np.isfinite(self.values))[0]
            name = self.names[i] if self.names else f"column {i}"
            raise DataError(f"non-finite value in series {name!r} at row {t}")
        if self.names is None:
            self.names = [f"y{i}" for i in range(N)]
        self.names = list(self.names)
        if len(self.names) != N:
            raise ValueError(f"names has length {len(self.names)}, expected {N}")
        if len(set(self.names)) != N:
            raise ValueError("series names must be unique")
        if self.transform_codes is None:
            self.transform_codes = np.ones(N, dtype=int)
        self.transform_codes = np.asarray(self.transform_codes, dtype=int)
        if self.transform_codes.shape != (N,):
            raise ValueError("transform_codes must have one entry per series")
        if not np.all(np.isin(self.transform_codes, [TRANSFORM_NONE, TRANSFORM_LOG])):
            raise ValueError("transform codes must be 1 (none) or 2 (log)")
        if self.est_orders is not None:
            self.est_orders = np.asarray(self.est_orders, dtype=float)
            if self.est_orders.shape != (N,):
                raise ValueError("est_orders must have one entry per series")
        if self.period_index is None:
            self.period_index = list(range(T))
        self.period_index = list(self.period_index)
        if len(self.period_index) != T:
            raise ValueError("period_index must have one entry per row")
        if any(b <= a for a, b in zip(self.period_index, self.period_index[1:])):
            raise ValueError("period_index must be strictly increasing")
        if self.diff_codes is not None:
            self.diff_codes = np.asarray(self.diff_codes, dtype=int)
            if self.diff_codes.shape != (N,):
                raise ValueError("diff_codes must have one entry per series")

    @property
    def shape(self):
        return self.values.shape

    @property
    def n_periods(self):
        return self.values.shape[0]

    @property
    def n_series(self):
        return self.values.shape[1]

    def window(self, stop):
        """Panel restricted to the first `stop` rows."""
        return replace(self, values=self.values[:stop],
                       period_index=self.period_index[:stop])


def apply_transforms(panel, detrend=False):
    """Apply per-series transform codes, optionally removing linear trends.

    Code 2 takes natural logs (requires strictly positive data), code 1
    leaves the series unchanged.  With ``detrend`` set, an OLS fit on
    (1, t) is removed from every series after the code transform.

    Returns a new Panel; transform codes are reset to 1 on the output so the
    transform is not applied twice.
    """
    values = panel.values.copy()
    for i, code in enumerate(panel.transform_codes):
        if code == TRANSFORM_LOG:
            col = values[:, i]
            bad = np.nonzero(col <= 0)[0]
            if bad.size:
                raise DataError(
                    f"log transform of non-positive value in series "
                    f"{panel.names[i]!r} at row {bad[0]}"
                )
            values[:, i] = np.log(col)
    if detrend:
        T = values.shape[0]
        X = np.column_stack([np.ones(T), np.arange(T, dtype=float)])
        beta, *_ = np.linalg.lstsq(X, values, rcond=None)
        values = values - X @ beta
    return replace(panel, values=values,
                   transform_codes=np.ones(panel.n_series, dtype=int))
