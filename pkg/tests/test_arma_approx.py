import numpy as np
import pytest

from fracfactors.arma_approx import (ApproxSpec, ApproxTable, approx_loss,
                                     arma_wold, eval_approx, fit_table,
                                     fit_table_cached)
from fracfactors.fracdiff import frac_coeffs


def wold_oracle(a, m, n):
    """Brute-force Wold weights by polynomial long division of m(L)/a(L)."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    m = np.atleast_1d(np.asarray(m, dtype=float))
    psi = np.zeros(n)
    for j in range(n):
        acc = 1.0 if j == 0 else (m[j - 1] if j <= m.size else 0.0)
        for k in range(1, min(j, a.size) + 1):
            acc += a[k - 1] * psi[j - k]
        psi[j] = acc
    return psi


def test_wold_ar1():
    assert np.allclose(arma_wold([0.5], [], 3), [1, 0.5, 0.25])


def test_wold_ma1():
    assert np.allclose(arma_wold([], [0.3], 3), [1, 0.3, 0])


def test_wold_arma11():
    # psi_1 = a_1 + m_1 = 0.8, psi_2 = a_1 psi_1 = 0.4
    assert np.allclose(arma_wold([0.5], [0.3], 3), [1, 0.8, 0.4])


def test_wold_rejects_unstable():
    with pytest.raises(ValueError):
        arma_wold([1.1], [], 5)


def test_wold_matches_oracle_random():
    rng = np.random.default_rng(2)
    for _ in range(10):
        a = rng.uniform(-0.3, 0.3, size=4)
        m = rng.uniform(-0.5, 0.5, size=3)
        assert np.allclose(arma_wold(a, m, 60), wold_oracle(a, m, 60),
                           atol=1e-12)


def test_loss_zero_filter_at_b_zero():
    assert approx_loss(np.zeros(8), 0.0, 50, 4, 4) == 0.0


def test_loss_invariant_to_trailing_zero_ma():
    rng = np.random.default_rng(4)
    a = rng.uniform(-0.2, 0.2, size=2)
    m = rng.uniform(-0.4, 0.4, size=2)
    l1 = approx_loss(np.concatenate([a, m]), 0.3, 80, 2, 2)
    l2 = approx_loss(np.concatenate([a, m, [0.0, 0.0]]), 0.3, 80, 2, 4)
    assert np.isclose(l1, l2, rtol=0, atol=1e-15)


def test_loss_matches_double_sum_oracle():
    rng = np.random.default_rng(9)
    a = rng.uniform(-0.3, 0.3, size=3)
    m = rng.uniform(-0.4, 0.4, size=2)
    b, T = 0.4, 100
    got = approx_loss(np.concatenate([a, m]), b, T, 3, 2)
    psi = wold_oracle(a, m, T)
    pi = frac_coeffs(-b, T)
    want = sum((psi[j] - pi[j]) ** 2 for t in range(1, T + 1)
               for j in range(t)) / T
    assert np.isclose(got, want, rtol=1e-12)


@pytest.fixture(scope="module")
def small_table():
    return fit_table(ApproxSpec(2, 2, 120, np.array([0.0, 0.2, 0.4, 0.6])))


def test_fit_zero_at_grid_origin(small_table):
    assert small_table.losses[0] <= 1e-10


def test_fit_losses_finite_nonnegative(small_table):
    assert np.all(np.isfinite(small_table.losses))
    assert np.all(small_table.losses >= 0)


def test_fit_loss_nonincreasing_in_model_order():
    grid = np.array([0.2, 0.5, 0.8])
    small = fit_table(ApproxSpec(2, 1, 100, grid))
    large = fit_table(ApproxSpec(3, 2, 100, grid))
    assert np.all(large.losses <= small.losses + 1e-12)


def test_fitted_loss_matches_bruteforce(small_table):
    # stored loss must match the oracle-evaluated loss of stored coefficients
    spec = small_table.spec
    for g, b in enumerate(spec.grid):
        params = small_table.coeffs[g]
        psi = wold_oracle(params[:spec.v], params[spec.v:], spec.T)
        pi = frac_coeffs(-b, spec.T)
        wts = spec.T - np.arange(spec.T, dtype=float)
        want = float(wts @ ((psi - pi) ** 2) / spec.T)
        assert np.isclose(small_table.losses[g], want, rtol=1e-10, atol=1e-12)


def test_spline_exact_at_knots(small_table):
    for g, b in enumerate(small_table.spec.grid):
        assert np.allclose(eval_approx(small_table, b),
                           small_table.coeffs[g], atol=1e-10)


def test_spline_continuity(small_table):
    b = 0.31
    d = np.abs(eval_approx(small_table, b) - eval_approx(small_table, b + 1e-6))
    assert np.all(d <= 1e-4)


def test_spline_derivative_matches_finite_difference(small_table):
    b, h = 0.35, 1e-5
    fd = (np.array([s(b + h) for s in small_table.splines])
          - np.array([s(b - h) for s in small_table.splines])) / (2 * h)
    analytic = np.array([s(b, 1) for s in small_table.splines])
    assert np.max(np.abs(fd - analytic)) < 1e-5


def test_eval_rejects_out_of_range(small_table):
    with pytest.raises(ValueError):
        eval_approx(small_table, 0.7)
    with pytest.raises(ValueError):
        eval_approx(small_table, -0.1)


def test_json_roundtrip(tmp_path, small_table):
    path = tmp_path / "tab.json"
    small_table.save(path)
    back = ApproxTable.load(path)
    assert np.array_equal(back.coeffs, small_table.coeffs)
    assert np.array_equal(back.losses, small_table.losses)
    assert back.spec == small_table.spec


def test_cache_roundtrip(tmp_path):
    spec = ApproxSpec(1, 1, 60, np.array([0.0, 0.3]))
    t1 = fit_table_cached(spec, tmp_path)
    t2 = fit_table_cached(spec, tmp_path)
    assert np.array_equal(t1.coeffs, t2.coeffs)
    files = list(tmp_path.glob("approx_*.json"))
    assert len(files) == 1
