"""Shared constructors for test inputs."""

import numpy as np

from spdbreak.grid import make_log_grid

GRID = make_log_grid()
SLOT_ELL = (0, 0, 1, 1, 2, 2)


def smooth(rng, ell, grid=GRID):
    r = grid.r
    alpha = rng.uniform(0.8, 3.0)
    poly = sum(rng.normal() * r**k for k in range(3))
    return r**ell * np.exp(-alpha * r) * (1.0 + 0.5 * poly)


def random_orbitals(rng, grid=GRID, n=6):
    """``n`` radial functions, orthonormal within each ℓ pair (R0,R1), (R2,R3), (R4,R5)."""
    w = grid.r2w
    out = []
    for s in range(n):
        f = smooth(rng, SLOT_ELL[s], grid)
        if s % 2 == 1:
            f = f - float(w @ (f * out[s - 1])) * out[s - 1]
        out.append(f / np.sqrt(float(w @ (f * f))))
    return np.array(out)


def oracle_energy(mode, X, coeffs, params, grid=GRID):
    """Brute-force ⟨Ψ|H|Ψ⟩ of the jj expansion via determinant rules."""
    from spdbreak.angular import JJ_ORDER, build_jj_config
    from spdbreak.slater_condon import matrix_element, orthonormal_expansion

    state = {}
    for c, label in zip(coeffs, JJ_ORDER):
        for det, v in build_jj_config(label).terms.items():
            state[det] = state.get(det, 0.0) + c * float(v)
    expanded, orb = orthonormal_expansion(state, {i: X[i] for i in range(len(X))}, grid)
    return matrix_element(expanded, expanded, orb, params, grid)


def random_state(rng, mode, params=None, grid=GRID):
    from spdbreak.energy import MCState, MixingVector
    from spdbreak.slater_condon import HamiltonianParams

    n, nc = (4, 2) if mode == "sp" else (6, 5)
    c = rng.normal(size=nc)
    return MCState(mode, random_orbitals(rng, grid, n), MixingVector(c / np.linalg.norm(c)), grid,
                   params or HamiltonianParams())


_SOLVES = {}


def solve(mode, symmetry):
    """Converged Be solution at default settings, computed once per session."""
    from spdbreak.solver import minimize_J1, minimize_symmetric

    key = (mode, symmetry)
    if key not in _SOLVES:
        if symmetry == "J1":
            _SOLVES[key] = minimize_J1(mode)
        else:
            _SOLVES[key] = minimize_symmetric(mode, symmetry)
    return _SOLVES[key]
