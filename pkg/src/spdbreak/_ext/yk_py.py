"""Pure-numpy Hartree screening potentials (fallback backend)."""

from __future__ import annotations

import numpy as np


def _interval(g: np.ndarray, idx: np.ndarray, wts: np.ndarray) -> np.ndarray:
    return (wts * g[idx]).sum(axis=1)


def _scatter(v: np.ndarray, idx: np.ndarray, wts: np.ndarray, n: int) -> np.ndarray:
    return np.bincount(idx.ravel(), weights=(wts * v[:, None]).ravel(), minlength=n)


def yk_forward(rho, k, r, idx, wts):
    """``Y_k[ρ](t) = t^{-k-1} ∫_0^t s^k ρ ds + t^k ∫_t^∞ s^{-k-1} ρ ds``."""
    inner = _interval(r ** (k + 1) * rho, idx, wts)
    outer = _interval(r ** (-k) * rho, idx, wts)
    below = np.concatenate(([0.0], np.cumsum(inner)))
    above = np.concatenate((np.cumsum(outer[::-1])[::-1], [0.0]))
    return r ** (-k - 1) * below + r**k * above


def yk_adjoint(y, k, r, idx, wts):
    """Transpose of :func:`yk_forward` with respect to the plain dot product."""
    n = len(r)
    z1 = r ** (-k - 1) * y
    z2 = r**k * y
    # (L^T z)_i = sum_{j > i} z_j ; (U^T z)_i = sum_{j <= i} z_j
    lt = np.cumsum(z1[::-1])[::-1][1:]
    ut = np.cumsum(z2)[:-1]
    return r ** (k + 1) * _scatter(lt, idx, wts, n) + r ** (-k) * _scatter(ut, idx, wts, n)


def yk_sym_batch(rho, ks, r, w, idx, wts):
    """Symmetrised potentials ``½(Aρ + W⁻¹Aᵀ(Wρ))`` for each row of ``rho``."""
    rho = np.atleast_2d(rho)
    out = np.empty_like(rho)
    for i, (row, k) in enumerate(zip(rho, ks)):
        k = int(k)
        out[i] = 0.5 * (yk_forward(row, k, r, idx, wts) + yk_adjoint(w * row, k, r, idx, wts) / w)
    return out
