"""Shared helpers for autoregressive lag polynomials.

Conventions: an AR coefficient vector ``a`` of length p represents the
polynomial 1 - a_1 L - ... - a_p L^p; stability means all polynomial roots
lie outside the unit circle (companion eigenvalues inside).
"""

import numpy as np

__all__ = [
    "ar_roots", "ar_is_stable", "project_stable",
    "pacf_to_ar", "ar_to_pacf", "unconstrained_to_ar", "ar_to_unconstrained",
]


def ar_roots(a):
    """Companion eigenvalues of the AR polynomial (stable iff all < 1 in modulus)."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if a.size == 0:
        return np.empty(0, dtype=complex)
    return np.roots(np.concatenate(([1.0], -a)))


def ar_is_stable(a, tol=0.0):
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if a.size == 0:
        return True
    if not np.all(np.isfinite(a)):
        return False
    return bool(np.all(np.abs(ar_roots(a)) < 1.0 - tol))


def project_stable(a, radius=0.98):
    """Shrink any explosive companion eigenvalues to the given radius."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if a.size == 0 or ar_is_stable(a):
        return a
    lam = ar_roots(a)
    mod = np.abs(lam)
    lam[mod >= 1.0] *= radius / mod[mod >= 1.0]
    poly = np.real(np.poly(lam))
    return -poly[1:]


def pacf_to_ar(pac):
    """Map partial autocorrelations in (-1, 1) to a stable AR vector."""
    pac = np.atleast_1d(np.asarray(pac, dtype=float))
    y = np.zeros_like(pac)
    for k in range(pac.size):
        prev = y[:k].copy()
        y[k] = pac[k]
        y[:k] = prev - pac[k] * prev[::-1]
    return y


def ar_to_pacf(a):
    """Inverse of pacf_to_ar; requires a stable AR vector."""
    w = np.atleast_1d(np.asarray(a, dtype=float)).copy()
    p = w.size
    pac = np.zeros(p)
    for k in range(p - 1, -1, -1):
        pac[k] = w[k]
        if abs(pac[k]) >= 1.0:
            raise ValueError("AR polynomial is not stable")
        prev = w[:k].copy()
        w[:k] = (prev + pac[k] * prev[::-1]) / (1.0 - pac[k] ** 2)
    return pac


def unconstrained_to_ar(z):
    """R^p -> stable AR coefficients, via tanh to partial autocorrelations."""
    pac = np.tanh(np.atleast_1d(np.asarray(z, dtype=float)))
    # keep strictly inside the open interval so the polynomial stays stable
    return pacf_to_ar(np.clip(pac, -1 + 1e-10, 1 - 1e-10))


def ar_to_unconstrained(a):
    pac = ar_to_pacf(a)
    pac = np.clip(pac, -1 + 1e-12, 1 - 1e-12)
    return np.arctanh(pac)
