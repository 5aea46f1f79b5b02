"""Finite ARMA approximations to the truncated fractional difference operator.

For a given sample length T, the operator (1 - L)^b is approximated by a
ratio of low-order lag polynomials a(L, b) / m(L, b).  The coefficients are
chosen per grid value of b to make the impulse response of the inverse
filter m(L)/a(L) match the cumulation weights pi_j(-b) in weighted mean
square over the sample, then smoothed across b with cubic splines so that
any interior b can be evaluated.
"""

import hashlib
import json
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import least_squares, minimize

from ._arutils import (ar_is_stable, ar_to_unconstrained, project_stable,
                       unconstrained_to_ar)
from .exceptions import EstimationError
from .fracdiff import frac_coeffs

__all__ = ["ApproxSpec", "ApproxTable", "arma_wold", "approx_loss",
           "fit_table", "eval_approx", "default_grid", "load_table",
           "fit_table_cached"]

SCHEMA_VERSION = 1


def default_grid(lo=0.0, hi=1.5, step=0.05):
    """Default integration-order grid, 0.00 to 1.50 in steps of 0.05."""
    n = int(round((hi - lo) / step))
    return np.round(lo + step * np.arange(n + 1), 10)


@dataclass(frozen=True, eq=False)
class ApproxSpec:
    """Orders (v AR, w MA), target sample length and b-grid for a table."""

    v: int
    w: int
    T: int
    grid: np.ndarray = field(default_factory=default_grid)

    def __eq__(self, other):
        if not isinstance(other, ApproxSpec):
            return NotImplemented
        return ((self.v, self.w, self.T) == (other.v, other.w, other.T)
                and np.array_equal(self.grid, other.grid))

    def __post_init__(self):
        object.__setattr__(self, "grid", np.asarray(self.grid, dtype=float))
        if self.v < 0 or self.w < 0 or self.v + self.w == 0:
            raise ValueError("need at least one AR or MA coefficient")
        if self.T < 1:
            raise ValueError("T must be positive")
        if self.grid.size == 0 or np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be nonempty and strictly increasing")

    def key(self):
        """Stable hash identifying (v, w, T, grid) for disk caching."""
        h = hashlib.sha256()
        h.update(f"{self.v},{self.w},{self.T},".encode())
        h.update(self.grid.tobytes())
        return h.hexdigest()[:12]


def arma_wold(a, m, n):
    """First n impulse-response weights of the filter m(L) / a(L).

    a holds AR coefficients (1 - a_1 L - ...), m holds MA coefficients
    (1 + m_1 L + ...).  psi_0 = 1 and
    psi_j = m_j + sum_k a_k psi_{j-k} with m_j = 0 beyond the MA order.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    m = np.atleast_1d(np.asarray(m, dtype=float))
    n = int(n)
    if n < 1:
        raise ValueError("n must be positive")
    if not ar_is_stable(a):
        raise ValueError("AR polynomial is not stable")
    psi = np.zeros(n)
    psi[0] = 1.0
    v = a.size
    for j in range(1, n):
        acc = m[j - 1] if j <= m.size else 0.0
        k = min(j, v)
        if k:
            acc += a[:k] @ psi[j - k:j][::-1]
        psi[j] = acc
    return psi


def approx_loss(params, b, T, v, w):
    """Weighted mean squared gap between the approximating filter and pi(-b).

    Equals (1/T) * sum_{t=1..T} sum_{j=0..t-1} (psi_j(-b) - pi_j(-b))^2,
    collapsed to a single weighted sum over j.
    """
    params = np.asarray(params, dtype=float)
    if params.size != v + w:
        raise ValueError(f"expected {v + w} parameters, got {params.size}")
    T = int(T)
    if T < 1:
        raise ValueError("T must be positive")
    psi = arma_wold(params[:v], params[v:], T)
    err = psi - frac_coeffs(-b, T)
    weights = T - np.arange(T, dtype=float)
    return float(weights @ (err * err) / T)


@dataclass
class ApproxTable:
    """Fitted coefficient table with per-coefficient cubic splines over b."""

    spec: ApproxSpec
    coeffs: np.ndarray          # G x (v + w)
    losses: np.ndarray          # G

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        self.losses = np.asarray(self.losses, dtype=float)
        self._splines = None

    @property
    def splines(self):
        if self._splines is None:
            grid = self.spec.grid
            self._splines = [CubicSpline(grid, self.coeffs[:, i])
                             for i in range(self.coeffs.shape[1])]
        return self._splines

    @property
    def b_min(self):
        return float(self.spec.grid[0])

    @property
    def b_max(self):
        return float(self.spec.grid[-1])

    def ar_ma(self, b):
        """Split eval_approx output into (AR coefficients, MA coefficients)."""
        params = eval_approx(self, b)
        return params[:self.spec.v], params[self.spec.v:]

    def to_json(self):
        return json.dumps({
            "schema_version": SCHEMA_VERSION,
            "kind": "arma-approx-table",
            "v": self.spec.v,
            "w": self.spec.w,
            "T": self.spec.T,
            "grid": self.spec.grid.tolist(),
            "coeffs": self.coeffs.tolist(),
            "losses": self.losses.tolist(),
        }, indent=1)

    @classmethod
    def from_json(cls, text):
        rec = json.loads(text)
        if rec.get("kind") != "arma-approx-table":
            raise ValueError("not an approximation-table record")
        if rec.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {rec.get('schema_version')}")
        spec = ApproxSpec(rec["v"], rec["w"], rec["T"], np.asarray(rec["grid"]))
        return cls(spec, np.asarray(rec["coeffs"]), np.asarray(rec["losses"]))

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(fh.read())


def load_table(path):
    return ApproxTable.load(path)


def _transformed_loss(x, b, T, v, w):
    a = unconstrained_to_ar(x[:v]) if v else np.empty(0)
    params = np.concatenate([a, x[v:]])
    return approx_loss(params, b, T, v, w)


def _residuals(x, target, weights, v):
    a = unconstrained_to_ar(x[:v]) if v else np.empty(0)
    psi = arma_wold(a, x[v:], target.size)
    return weights * (psi - target)


def _ma_matched(a, b, T, w):
    """MA coefficients that make the first w Wold weights exact given a."""
    pi = frac_coeffs(-b, max(w + 1, 2))
    m = np.zeros(w)
    for j in range(1, w + 1):
        acc = pi[j]
        for k in range(1, min(j, a.size) + 1):
            acc -= a[k - 1] * pi[j - k]
        m[j - 1] = acc
    return m


def _fit_point(b, T, v, w, starts, maxiter):
    """Best fit over a set of starting points.

    Gauss-Newton least squares on the weighted coefficient residuals is the
    workhorse; a short simplex run backs it up in case the residual solver
    stalls.  Simplex alone proved both slower and less reliable here.
    """
    target = frac_coeffs(-b, T)
    weights = np.sqrt((T - np.arange(T, dtype=float)) / T)
    best_x, best_loss = None, np.inf
    for x0 in starts:
        try:
            res = least_squares(_residuals, x0, args=(target, weights, v),
                                method="lm", xtol=1e-14, ftol=1e-14,
                                max_nfev=maxiter)
            x, loss = res.x, float(2.0 * res.cost)
        except Exception:
            continue
        if np.isfinite(loss) and loss < best_loss:
            best_loss, best_x = loss, x
    if best_x is None:  # every residual solve failed; fall back to simplex
        res = minimize(_transformed_loss, starts[0], args=(b, T, v, w),
                       method="Nelder-Mead",
                       options={"maxiter": maxiter, "fatol": 1e-14})
        if not np.isfinite(res.fun):
            raise EstimationError(f"approximation fit failed at b = {b}")
        best_x, best_loss = res.x, float(res.fun)
    return best_x, best_loss


def fit_table(spec, maxiter=4000, n_restarts=2, seed=0):
    """Fit ARMA coefficients on every b-grid point, warm-started along the grid.

    Each grid point starts from the previous point's solution plus a
    moment-matched MA refinement and a few perturbed restarts.  The AR part
    is optimized through a partial-autocorrelation transform, so every
    fitted polynomial is stable by construction.
    """
    v, w, T = spec.v, spec.w, spec.T
    rng = np.random.default_rng(seed)
    G = spec.grid.size
    coeffs = np.zeros((G, v + w))
    losses = np.zeros(G)
    prev = np.zeros(v + w)
    for g, b in enumerate(spec.grid):
        if abs(b) < 1e-12:
            # identity operator: the zero filter is exact
            coeffs[g] = 0.0
            losses[g] = approx_loss(coeffs[g], b, T, v, w)
            continue
        starts = [prev]
        if w:
            a_prev = unconstrained_to_ar(prev[:v]) if v else np.empty(0)
            starts.append(np.concatenate([prev[:v], _ma_matched(a_prev, b, T, w)]))
        for _ in range(n_restarts):
            starts.append(prev + rng.normal(scale=0.3, size=v + w))
        x, loss = _fit_point(b, T, v, w, starts, maxiter)
        losses[g] = loss
        a = unconstrained_to_ar(x[:v]) if v else np.empty(0)
        coeffs[g] = np.concatenate([a, x[v:]])
        prev = x
    return ApproxTable(spec, coeffs, losses)


class ApproxStabilityWarning(UserWarning):
    """Spline-interpolated AR part needed a stability projection."""


def eval_approx(table, b):
    """Spline-evaluate the coefficient vector at b (no extrapolation).

    If the interpolated AR polynomial drifts outside the stable region the
    explosive roots are shrunk back inside and a warning is issued.
    """
    b = float(b)
    if b < table.b_min - 1e-12 or b > table.b_max + 1e-12:
        raise ValueError(
            f"b = {b} outside table range [{table.b_min}, {table.b_max}]")
    b = min(max(b, table.b_min), table.b_max)
    params = np.array([float(s(b)) for s in table.splines])
    v = table.spec.v
    if v and not ar_is_stable(params[:v]):
        warnings.warn(f"projected unstable AR part at b = {b}",
                      ApproxStabilityWarning, stacklevel=2)
        params[:v] = project_stable(params[:v], radius=1 - 1e-6)
    return params


def fit_table_cached(spec, cache_dir, **kwargs):
    """Fit a table or load it from a JSON cache keyed by (v, w, T, grid)."""
    from pathlib import Path

    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    path = cache_dir / f"approx_v{spec.v}w{spec.w}_T{spec.T}_{spec.key()}.json"
    if path.exists():
        return ApproxTable.load(path)
    table = fit_table(spec, **kwargs)
    table.save(path)
    return table
