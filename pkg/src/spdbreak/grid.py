"""Logarithmic radial grid, quadrature and finite-difference operators.

All radial functions live on ``r_j = exp(u_j)`` with ``u`` uniformly spaced.
Integrals ``∫ f(r) dr`` are evaluated as ``∫ f(r(u)) r(u) du`` with the
trapezoid rule in ``u``; for integrands that vanish at both ends of the mesh
(every bound-state product used here) this rule converges faster than any
power of the step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

DEFAULT_N_POINTS = 220
DEFAULT_R_MIN = 1.0e-5
DEFAULT_R_MAX = 60.0

QUADRATURE_RULE = "trapezoid-in-log(r)"
DERIVATIVE_ORDER = 8  # accuracy order of the derivative stencils in u
INTERVAL_ORDER = 6  # points per local interpolant for cumulative integrals


class GridError(ValueError):
    """Invalid grid parameters or mismatched grid samples."""


def fd_weights(x0: float, xs: np.ndarray, m: int) -> np.ndarray:
    """Fornberg finite-difference weights.

    Returns an array ``c`` of shape ``(m + 1, len(xs))`` where ``c[k] @ f(xs)``
    approximates the k-th derivative of ``f`` at ``x0``.
    """
    xs = np.asarray(xs, dtype=float)
    n = len(xs)
    c = np.zeros((m + 1, n))
    c1 = 1.0
    c4 = xs[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = xs[i] - x0
        for j in range(i):
            c3 = xs[i] - xs[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[k, i] = c1 * (k * c[k - 1, i - 1] - c5 * c[k, i - 1]) / c2
                c[0, i] = -c1 * c5 * c[0, i - 1] / c2
            for k in range(mn, 0, -1):
                c[k, j] = (c4 * c[k, j] - k * c[k - 1, j]) / c3
            c[0, j] = c4 * c[0, j] / c3
        c1 = c2
    return c


def _stencil_start(j: int, width: int, n: int) -> int:
    return min(max(j - (width - 1) // 2, 0), n - width)


def _interval_weights(n: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Index/weight tables for ∫_{u_j}^{u_{j+1}} g du in units of the step.

    Each interval uses a local polynomial through ``order`` nodes, centred on
    the interval when possible and shifted inwards at the mesh ends.
    """
    width = min(order, n)
    idx = np.empty((n - 1, width), dtype=np.intp)
    wts = np.empty((n - 1, width))
    cache: dict[int, np.ndarray] = {}
    for j in range(n - 1):
        start = min(max(j - (width // 2 - 1), 0), n - width)
        off = j - start
        if off not in cache:
            nodes = np.arange(width, dtype=float) - off
            # moments of x^p over [0, 1]; weights solve V^T c = moments
            vander = np.vander(nodes, width, increasing=True)
            moments = 1.0 / np.arange(1, width + 1)
            cache[off] = np.linalg.solve(vander.T, moments)
        idx[j] = np.arange(start, start + width)
        wts[j] = cache[off]
    return idx, wts


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Logarithmic radial mesh with quadrature weights.

    Attributes
    ----------
    r : ndarray
        Radii in bohr, strictly increasing and positive.
    w : ndarray
        Weights such that ``w @ f(r)`` approximates ``∫ f(r) dr``.
    h : float
        Uniform step in ``u = ln r``.
    """

    r: np.ndarray
    w: np.ndarray
    h: float
    r_min: float
    r_max: float
    rule: str = field(default=QUADRATURE_RULE)

    @property
    def n_points(self) -> int:
        return len(self.r)

    @cached_property
    def r2w(self) -> np.ndarray:
        """Weights of the L²(r²dr) inner product."""
        return self.w * self.r**2

    @cached_property
    def du_matrix(self) -> np.ndarray:
        """Dense d/du operator (order-8 stencils, one-sided at the ends)."""
        n = self.n_points
        width = min(DERIVATIVE_ORDER + 1, n)
        d = np.zeros((n, n))
        for j in range(n):
            s = _stencil_start(j, width, n)
            d[j, s : s + width] = fd_weights(float(j), np.arange(s, s + width), 1)[1]
        return d / self.h

    @cached_property
    def d2u_matrix(self) -> np.ndarray:
        n = self.n_points
        width = min(DERIVATIVE_ORDER + 2, n)
        d = np.zeros((n, n))
        for j in range(n):
            s = _stencil_start(j, width, n)
            d[j, s : s + width] = fd_weights(float(j), np.arange(s, s + width), 2)[2]
        return d / self.h**2

    @cached_property
    def interval_tables(self) -> tuple[np.ndarray, np.ndarray]:
        idx, wts = _interval_weights(self.n_points, INTERVAL_ORDER)
        return idx, wts * self.h

    @cached_property
    def kinetic_form(self) -> np.ndarray:
        """Symmetric matrix ``K`` with ``R @ K @ R == ∫ r² R'(r)² dr``."""
        du = self.du_matrix
        return du.T @ (self.w[:, None] * du)

    def metadata(self) -> dict:
        return {
            "n_points": self.n_points,
            "r_min": self.r_min,
            "r_max": self.r_max,
            "rule": self.rule,
            "derivative_order": DERIVATIVE_ORDER,
        }

    def check(self, f: np.ndarray) -> np.ndarray:
        """Return ``f`` as a float array, raising if it is not sampled on this grid."""
        f = np.asarray(f, dtype=float)
        if f.shape[-1] != self.n_points:
            raise GridError(
                f"function has {f.shape[-1]} samples, grid has {self.n_points}"
            )
        return f


def make_log_grid(
    n_points: int = DEFAULT_N_POINTS,
    r_min: float = DEFAULT_R_MIN,
    r_max: float = DEFAULT_R_MAX,
) -> RadialGrid:
    """Build a logarithmic grid from ``r_min`` to ``r_max`` (both included)."""
    if int(n_points) != n_points or n_points < 2:
        raise GridError(f"n_points must be an integer >= 2, got {n_points!r}")
    if not (np.isfinite(r_min) and np.isfinite(r_max)) or not 0 < r_min < r_max:
        raise GridError(f"need 0 < r_min < r_max, got r_min={r_min}, r_max={r_max}")
    n_points = int(n_points)
    u = np.linspace(np.log(r_min), np.log(r_max), n_points)
    h = float(u[1] - u[0])
    r = np.exp(u)
    r[0], r[-1] = r_min, r_max
    w = h * r
    w[0] *= 0.5
    w[-1] *= 0.5
    r.setflags(write=False)
    w.setflags(write=False)
    return RadialGrid(r=r, w=w, h=h, r_min=float(r_min), r_max=float(r_max))


def integrate(f: np.ndarray, grid: RadialGrid) -> float:
    """``∫ f(r) dr`` on the grid."""
    return float(grid.w @ grid.check(f))


def inner_r2(f: np.ndarray, g: np.ndarray, grid: RadialGrid) -> float:
    """``∫ f g r² dr``: the inner product of L²(r² dr)."""
    f = grid.check(f)
    g = grid.check(g)
    if f.shape != g.shape:
        raise GridError(f"shape mismatch {f.shape} vs {g.shape}")
    return float(grid.r2w @ (f * g))


def norm_r2(f: np.ndarray, grid: RadialGrid) -> float:
    return float(np.sqrt(inner_r2(f, f, grid)))


def radial_derivative(f: np.ndarray, grid: RadialGrid) -> np.ndarray:
    """``dR/dr`` via order-8 stencils in ``u`` (one-sided near the ends)."""
    return grid.du_matrix @ grid.check(f) / grid.r


def radial_second_derivative(f: np.ndarray, grid: RadialGrid) -> np.ndarray:
    """``d²R/dr²`` from the u-derivatives: ``(f_uu - f_u) / r²``."""
    f = grid.check(f)
    fu = grid.du_matrix @ f
    fuu = grid.d2u_matrix @ f
    return (fuu - fu) / grid.r**2


def kinetic_radial(R: np.ndarray, ell: int, grid: RadialGrid) -> float:
    """``½ ∫ [r² R'² + ℓ(ℓ+1) R²] dr`` in hartree."""
    R = grid.check(R)
    # r² (dR/dr)² dr = (dR/du)² r du, and w already carries the factor r
    du = grid.du_matrix @ R
    return 0.5 * float(grid.w @ du**2) + 0.5 * ell * (ell + 1) * float(grid.w @ R**2)
