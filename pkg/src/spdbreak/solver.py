"""Constrained minimisation over radial orbitals and mixing coefficients.

Each iteration alternates an exact update of the mixing vector (lowest
eigenvector of the small Hamiltonian matrix at fixed orbitals) with a
preconditioned conjugate-gradient step on the orbitals.  Orbital steps move
along the tangent space of the constraint set (``R0``, ``R1`` orthonormal,
every other orbital normalised) and are retracted with
:func:`project_constraints`; an Armijo backtracking search makes every
accepted step lower the energy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt

import numpy as np
from scipy.linalg import cho_factor, cho_solve, eigh

from .angular import JJ_ORDER, JJ_RELATIONS, SymmetryClass, classify_symmetry
from .energy import (
    N_SLOTS,
    EnergyFunctional,
    EnergyReport,
    MCState,
    MixingVector,
    StateError,
    symmetric_to_jj,
    total_energy,
)
from .grid import RadialGrid, make_log_grid
from .slater_condon import SLOT_ELL, HamiltonianParams


class SolverError(RuntimeError):
    """Minimisation failed to reach its tolerances."""

    def __init__(self, message: str, solution: "Solution | None" = None):
        super().__init__(message)
        self.solution = solution


class DegenerateInputError(StateError):
    """An orbital has (numerically) zero norm after projection."""


@dataclass(frozen=True)
class SolveOptions:
    max_iter: int = 3000
    energy_tol: float = 1e-9
    gradient_tol: float = 1e-7
    shift: float = 0.5  # added to the kinetic preconditioner, hartree
    armijo: float = 1e-4
    backtrack: float = 0.5
    max_backtracks: int = 40
    seed: int = 0
    perturbation: float = 1e-2

    def __post_init__(self) -> None:
        for name in ("energy_tol", "gradient_tol", "shift", "armijo"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.backtrack < 1:
            raise ValueError("backtrack factor must lie in (0, 1)")
        if self.max_iter < 0:
            raise ValueError("max_iter must be non-negative")


@dataclass
class Solution:
    state: MCState
    report: EnergyReport
    trace: list = field(default_factory=list)  # (iteration, energy, residual)
    classification: SymmetryClass = SymmetryClass("mixed")
    converged: bool = False
    symmetry: str = "J1"
    amplitudes: np.ndarray | None = None  # LS amplitudes of a symmetric model

    @property
    def energy(self) -> float:
        return self.report.total

    @property
    def residual(self) -> float:
        return self.trace[-1][2] if self.trace else float("nan")


@dataclass(frozen=True)
class CIEigenvalues:
    """Eigen-decomposition of H over {¹P_sp, ¹P_pd, ³P_sp, ³P_pd, ³D_pd}."""

    lambda1_3P: float
    lambda2_3P: float
    lambda1_1P: float
    lambda2_1P: float
    lambda_3D: float
    matrix: np.ndarray
    vectors: np.ndarray  # columns in the order of the five eigenvalues above
    off_block: float

    BASIS = ("1P_sp", "1P_pd", "3P_sp", "3P_pd", "3D_pd")

    def as_dict(self) -> dict:
        return {
            "lambda1_3P1": self.lambda1_3P,
            "lambda2_3P1": self.lambda2_3P,
            "lambda1_1P1": self.lambda1_1P,
            "lambda2_1P1": self.lambda2_1P,
            "lambda_3D1": self.lambda_3D,
        }

    @property
    def hund_ordering(self) -> bool:
        return self.lambda1_3P < self.lambda1_1P


# --------------------------------------------------------------------------
# constraints


def _normalize(f, grid, what):
    n = sqrt(float(grid.r2w @ (f * f)))
    if not n > 1e-12:
        raise DegenerateInputError(f"{what} has zero norm")
    return f / n


def _project_orbitals(orb: np.ndarray, grid: RadialGrid, slots) -> np.ndarray:
    out = np.array(orb, dtype=float)
    for s in slots:
        if s == 1:
            out[1] = out[1] - float(grid.r2w @ (out[1] * out[0])) * out[0]
        out[s] = _normalize(out[s], grid, f"R{s}")
    return out


def project_constraints(state: MCState) -> MCState:
    """Normalise every orbital, make ``R1 ⊥ R0`` and normalise the mixing vector."""
    orb = _project_orbitals(state.orbitals, state.grid, range(len(state.orbitals)))
    c = state.coeffs
    n = float(np.linalg.norm(c))
    if not n > 1e-14:
        raise DegenerateInputError("mixing vector has zero norm")
    return state.replace(orbitals=orb, mixing=MixingVector(c / n))


def _tangent(X: np.ndarray, G: np.ndarray, grid: RadialGrid, slots) -> np.ndarray:
    """L²(r²dr)-orthogonal projection onto the constraint tangent space."""
    w = grid.r2w
    out = np.zeros_like(G)
    slots = list(slots)
    rest = [s for s in slots if s not in (0, 1)]
    if 0 in slots and 1 in slots:
        Y = X[[0, 1]]
        M = (G[[0, 1]] * w) @ Y.T  # M[i, j] = <G_i, R_j>
        sym = 0.5 * (M + M.T)
        out[[0, 1]] = G[[0, 1]] - sym @ Y
    else:
        rest = slots
        if 1 in slots:
            # R0 frozen: R1 stays on the unit sphere of R0's complement
            rest = [s for s in slots if s != 1]
            out[1] = G[1] - sum(float(w @ (G[1] * X[j])) * X[j] for j in (0, 1))
    for s in rest:
        out[s] = G[s] - float(w @ (G[s] * X[s])) * X[s]
    return out


# --------------------------------------------------------------------------
# initial guesses


def hydrogenic_orbitals(grid: RadialGrid, Z: float, n_slots: int = 6) -> np.ndarray:
    """Screened hydrogenic 1s, 2s, 2p, 2p, 3d, 3d (Z-0.3 for 1s, Z-2 otherwise)."""
    r = grid.r
    z1, z2 = max(Z - 0.3, 0.5), max(Z - 2.0, 0.5)
    raw = [
        np.exp(-z1 * r),
        (1 - z2 * r / 2) * np.exp(-z2 * r / 2),
        r * np.exp(-z2 * r / 2),
        r * np.exp(-z2 * r / 2),
        r * r * np.exp(-z2 * r / 3),
        r * r * np.exp(-z2 * r / 3),
    ][:n_slots]
    return _project_orbitals(np.array(raw), grid, range(n_slots))


def _smooth_noise(grid: RadialGrid, ell: int, rng: np.random.Generator) -> np.ndarray:
    r = grid.r
    z = rng.uniform(0.5, 2.0)
    poly = np.polynomial.polynomial.polyval(r, rng.normal(size=3))
    return r**ell * poly * np.exp(-z * r)


# --------------------------------------------------------------------------
# gauge fixing


def _leading_sign(f: np.ndarray) -> float:
    m = np.abs(f).max()
    if m == 0:
        return 1.0
    i = int(np.argmax(np.abs(f) > 1e-6 * m))
    return 1.0 if f[i] >= 0 else -1.0


JJ_SLOTS = {label: JJ_RELATIONS[label][1] for label in JJ_ORDER}


def gauge_fix_state(state: MCState) -> MCState:
    """Orbitals positive near the origin, first nonzero coefficient positive.

    Flipping an orbital flips the coefficient of every configuration in which
    it is singly occupied, so the energy is unchanged.
    """
    orb = np.array(state.orbitals)
    c = state.coeffs.copy()
    labels = JJ_ORDER[: len(c)]
    for s in range(len(orb)):
        if _leading_sign(orb[s]) < 0:
            orb[s] = -orb[s]
            for k, lab in enumerate(labels):
                if list(JJ_SLOTS[lab]).count(s) == 1:
                    c[k] = -c[k]
    nz = np.flatnonzero(np.abs(c) > 1e-12)
    if len(nz) and c[nz[0]] < 0:
        c = -c
    return state.replace(orbitals=orb, mixing=MixingVector(c))


# --------------------------------------------------------------------------
# optimiser core


class _Problem:
    """Energy, tangent projection and preconditioner for one model."""

    def __init__(self, fun: EnergyFunctional, slots, opts: SolveOptions):
        self.fun = fun
        self.grid = fun.grid
        self.slots = tuple(slots)
        self.opts = opts
        g = self.grid
        self._chol = {}
        for ell in {SLOT_ELL[s] for s in self.slots}:
            A = 0.5 * g.kinetic_form + np.diag(0.5 * ell * (ell + 1) * g.w + opts.shift * g.r2w)
            self._chol[ell] = cho_factor(A)
        kprims = {}
        for n, p in enumerate(fun.model.prims):
            if p[0] == "T" and p[2] == p[3]:
                kprims[p[2]] = n
        self._kin_prim = kprims

    def mixing(self, X, prev=None):
        H = self.fun.hamiltonian(X)
        vals, vecs = eigh(H)
        v = vecs[:, 0]
        if prev is not None and float(v @ prev) < 0:
            v = -v
        elif prev is None and v[np.argmax(np.abs(v) > 1e-12)] < 0:
            v = -v
        return v, float(vals[0])

    def evaluate(self, X, c):
        e, G, gvec = self.fun.energy_and_gradient(X, c)
        occ = self.occupations(X, c)
        return e, G, gvec, occ

    def occupations(self, X, c):
        # ∂E/∂T_ii is the effective occupation of slot i
        fun = self.fun
        ev, h, _ = fun.matrices(X)
        a = fun.amplitudes(c)
        gm = np.einsum("i,mij,j->m", a, fun.model.ham.sum(axis=0), a)
        vals = ev.values[fun.model.monomials]
        occ = {}
        for s, pi in self._kin_prim.items():
            tot = 0.0
            for pos in range(3):
                mask = fun.model.monomials[:, pos] == pi
                if mask.any():
                    others = np.prod(np.delete(vals[mask], pos, axis=1), axis=1)
                    tot += float(gm[mask] @ others)
            occ[s] = tot
        return occ

    def precondition(self, X, GT, occ):
        g = self.grid
        out = np.zeros_like(GT)
        top = max(abs(v) for v in occ.values()) if occ else 1.0
        for s in self.slots:
            o = max(abs(occ.get(s, 1.0)), 1e-3 * top)
            out[s] = cho_solve(self._chol[SLOT_ELL[s]], g.r2w * GT[s]) / o
        return _tangent(X, out, g, self.slots)

    def retract(self, X):
        return _project_orbitals(X, self.grid, self.slots)


def _line_search(problem: _Problem, X, c, e, D, slope, t, opts: SolveOptions):
    """Armijo backtracking along ``D``; returns ``(accepted, t, X_new, E_new)``."""
    Xn, en = X, e
    floor = 4.0 * np.finfo(float).eps * max(abs(e), 1.0)
    for _ in range(opts.max_backtracks):
        if t * abs(slope) < floor:
            break  # predicted decrease below energy resolution
        Xn = problem.retract(X + t * D)
        en = problem.fun.energy(Xn, c)
        # compare the difference: e + tiny rounds back to e
        if en - e <= opts.armijo * t * slope:
            return True, t, Xn, en
        t *= opts.backtrack
    return False, t, Xn, en


def _run(problem: _Problem, X, c, opts: SolveOptions, fix_mixing: bool = False):
    g = problem.grid
    w = g.r2w
    trace = []
    if not fix_mixing:
        c, _ = problem.mixing(X, c)
    e, G, _, occ = problem.evaluate(X, c)
    D_prev = GT_prev = PT_prev = None
    step = 1.0
    quiet = 0
    converged = False
    for it in range(opts.max_iter + 1):
        GT = _tangent(X, G, g, problem.slots)
        PT = problem.precondition(X, GT, occ)
        res = sqrt(max(float(np.sum(w * GT * PT)), 0.0))
        trace.append((it, e, res))
        # energy flat for several steps: accept once the gradient is small too
        if (
            res <= opts.gradient_tol
            or (quiet >= 5 and res <= 10 * opts.gradient_tol)
            or (quiet >= 30 and res <= 100 * opts.gradient_tol)
        ):
            converged = True
            break
        if it == opts.max_iter:
            break
        D = -PT
        if D_prev is not None:
            beta = float(np.sum(w * (GT - GT_prev) * PT)) / float(np.sum(w * GT_prev * PT_prev))
            beta = max(beta, 0.0)
            D = D + beta * _tangent(X, D_prev, g, problem.slots)
        slope = float(np.sum(w * GT * D))
        if slope >= 0:
            D, slope = -PT, -res * res
        accepted, t, Xn, en = _line_search(problem, X, c, e, D, slope, min(1.0, 2.0 * step), opts)
        if not accepted and D_prev is not None:
            # conjugate direction stalled: restart from the preconditioned gradient
            D, slope = -PT, -res * res
            accepted, t, Xn, en = _line_search(problem, X, c, e, D, slope, 1.0, opts)
        if not accepted:
            # no descent left at working precision
            converged = res <= 100 * opts.gradient_tol
            break
        step = t
        X = Xn
        if not fix_mixing:
            c, en = problem.mixing(X, c)
        de = e - en
        e, G, _, occ = problem.evaluate(X, c)
        quiet = quiet + 1 if de < opts.energy_tol else 0
        D_prev, GT_prev, PT_prev = D, GT, PT
    return X, c, trace, converged


# --------------------------------------------------------------------------
# public drivers


def _grid_or_default(grid):
    return grid if grid is not None else make_log_grid()


def _classify(state: MCState, tol: float = 1e-5) -> SymmetryClass:
    orb = state.orbitals
    w = state.grid.r2w

    def eq(i, j):
        for eps in (1, -1):
            d = orb[j] - eps * orb[i]
            if sqrt(float(w @ (d * d))) < tol:
                return eps
        return None

    eq45 = eq(4, 5) if len(orb) > 4 else None
    return classify_symmetry(state.coeffs, eq(2, 3), eq45, tol)


def _finish(state: MCState, trace, converged, symmetry, amplitudes=None) -> Solution:
    state = gauge_fix_state(state)
    if amplitudes is not None:
        amplitudes = symmetric_amplitudes(state, symmetry)
    return Solution(
        state=state,
        report=total_energy(state, tol=1e-8),
        trace=trace,
        classification=_classify(state),
        converged=converged,
        symmetry=symmetry,
        amplitudes=amplitudes,
    )


def symmetric_amplitudes(state: MCState, symmetry: str) -> np.ndarray:
    """LS amplitudes of a symmetric state (inverse of ``symmetric_to_jj``)."""
    c = np.zeros(5)
    c[: len(state.coeffs)] = state.coeffs
    if symmetry == "3D1":
        return np.array([float(symmetric_to_jj("3D1", [1.0]) @ c)])
    basis = np.array([symmetric_to_jj(symmetry, [1.0, 0.0]), symmetric_to_jj(symmetry, [0.0, 1.0])])
    return basis @ c


SYMMETRIC_SLOTS = {
    ("sp", "3P1"): (0, 1, 2),
    ("sp", "1P1"): (0, 1, 2),
    ("sp+pd", "3P1"): (0, 1, 2, 4),
    ("sp+pd", "1P1"): (0, 1, 2, 4),
    ("pd", "3D1"): (0, 2, 4),
    ("sp+pd", "3D1"): (0, 2, 4),
}


def _embed_symmetric(mode, symmetry, X, amps, grid, params) -> MCState:
    n = N_SLOTS[mode]
    orb = np.array(X[:n])
    orb[3] = orb[2]
    if n > 4:
        orb[5] = orb[4]
    if symmetry == "3D1":
        # R1 carries no weight; keep a valid 2s-like function
        orb[1] = hydrogenic_orbitals(grid, params.Z, 2)[1]
        orb[1] = orb[1] - float(grid.r2w @ (orb[1] * orb[0])) * orb[0]
        orb[1] /= sqrt(float(grid.r2w @ (orb[1] ** 2)))
    amps = list(amps) + [0.0] * (2 - len(amps)) if symmetry != "3D1" else list(amps)
    jj = symmetric_to_jj(symmetry, amps if symmetry == "3D1" else amps[:2])
    jj = jj[:2] if mode == "sp" else jj
    if mode == "sp":
        jj = jj / np.linalg.norm(jj)
    return MCState(mode, orb, MixingVector(jj), grid, params, symmetry=symmetry)


def minimize_symmetric(mode: str, symmetry: str, params: HamiltonianParams | None = None,
                       opts: SolveOptions | None = None, grid: RadialGrid | None = None,
                       init: np.ndarray | None = None) -> Solution:
    """Minimise within a symmetry-adapted manifold (orbitals ``R3=R2``, ``R5=R4``)."""
    params = params or HamiltonianParams()
    opts = opts or SolveOptions()
    grid = _grid_or_default(grid)
    key = (mode, symmetry)
    if key not in SYMMETRIC_SLOTS:
        raise ValueError(f"invalid combination: {symmetry} in {mode} mode")
    slots = SYMMETRIC_SLOTS[key]
    fun = EnergyFunctional(mode, symmetry, grid, params)
    X = hydrogenic_orbitals(grid, params.Z) if init is None else np.array(init, float)
    X = _project_orbitals(X, grid, slots)
    problem = _Problem(fun, slots, opts)
    c0 = np.ones(len(fun.model.basis)) / sqrt(len(fun.model.basis))
    X, amps, trace, ok = _run(problem, X, c0, opts)
    state = _embed_symmetric(mode, symmetry, X, amps, grid, params)
    sol = _finish(state, trace, ok, symmetry, amplitudes=amps)
    if not ok:
        raise SolverError(f"{symmetry} ({mode}) did not converge in {opts.max_iter} iterations", sol)
    return sol


def minimize_J1(mode: str, params: HamiltonianParams | None = None, opts: SolveOptions | None = None,
                init: MCState | str | None = None, grid: RadialGrid | None = None) -> Solution:
    """Minimise over all orbitals and jj coefficients with only J=1 imposed.

    ``init`` is a state, ``"hydrogenic"`` (default) or ``"random"`` (seeded
    smooth perturbation of every orbital and a random mixing vector).
    """
    params = params or HamiltonianParams()
    opts = opts or SolveOptions()
    if mode not in ("sp", "sp+pd"):
        raise ValueError(f"J=1 minimisation needs mode sp or sp+pd, got {mode!r}")
    n = N_SLOTS[mode]
    if isinstance(init, MCState):
        grid = init.grid
        if init.mode not in (mode, "pd") or len(init.orbitals) < n:
            raise StateError(f"initial state of mode {init.mode} incompatible with {mode}")
        X = np.array(init.orbitals[:n])
        c = init.coeffs[: (2 if mode == "sp" else 5)]
    else:
        grid = _grid_or_default(grid)
        X = hydrogenic_orbitals(grid, params.Z, n)
        c = None
        if init == "random":
            rng = np.random.default_rng(opts.seed)
            for s in range(n):
                X[s] = X[s] + 0.3 * _smooth_noise(grid, SLOT_ELL[s], rng)
            c = rng.normal(size=2 if mode == "sp" else 5)
        elif init not in (None, "hydrogenic"):
            raise ValueError(f"unknown init {init!r}")
    slots = tuple(range(n))
    X = _project_orbitals(X, grid, slots)
    fun = EnergyFunctional(mode, "J1", grid, params)
    problem = _Problem(fun, slots, opts)
    if c is None:
        c, _ = problem.mixing(X)
    c = np.asarray(c, float) / np.linalg.norm(c)
    X, c, trace, ok = _run(problem, X, c, opts)
    state = MCState(mode, X, MixingVector(c), grid, params, symmetry="J1")
    sol = _finish(state, trace, ok, "J1")
    if not ok:
        raise SolverError(f"J=1 ({mode}) did not converge in {opts.max_iter} iterations", sol)
    return sol


def perturbed_start(solution: Solution, opts: SolveOptions | None = None) -> MCState:
    """Symmetric minimiser with ``R3`` nudged along a direction orthogonal to ``R2``."""
    opts = opts or SolveOptions()
    st = solution.state
    grid = st.grid
    rng = np.random.default_rng(opts.seed)
    X = np.array(st.orbitals)
    d = _smooth_noise(grid, 1, rng)
    d = d - float(grid.r2w @ (d * X[2])) * X[2]
    d /= sqrt(float(grid.r2w @ (d * d)))
    X[3] = X[3] + opts.perturbation * d
    X = _project_orbitals(X, grid, range(len(X)))
    return st.replace(orbitals=X, symmetry="J1")


@dataclass
class MultiStartResult:
    best: Solution
    energies: list
    multi_basin: bool


def multi_start_J1(mode: str, base: Solution, params: HamiltonianParams | None = None,
                   opts: SolveOptions | None = None, n_starts: int = 5) -> MultiStartResult:
    """Run :func:`minimize_J1` from ``n_starts`` seeded perturbations of ``base``."""
    opts = opts or SolveOptions()
    sols = []
    for k in range(n_starts):
        o = SolveOptions(**{**opts.__dict__, "seed": opts.seed + k})
        sols.append(minimize_J1(mode, params, o, init=perturbed_start(base, o)))
    energies = [s.energy for s in sols]
    best = sols[int(np.argmin(energies))]
    return MultiStartResult(best, energies, max(energies) - min(energies) > 1e-6)


# --------------------------------------------------------------------------
# fixed-orbital diagonalisation


def ci_diagonalize(orbitals, params: HamiltonianParams | None = None,
                   grid: RadialGrid | None = None) -> CIEigenvalues:
    """Eigenvalues of H over the five LS functions at fixed ``R0, R1, R2, R4``.

    ``orbitals`` is a sequence ``(R0, R1, R2, R4)`` or a 6-row array
    (``R3``/``R5`` ignored).
    """
    params = params or HamiltonianParams()
    grid = _grid_or_default(grid)
    orbitals = np.asarray(orbitals, float)
    if len(orbitals) == 4:
        R0, R1, R2, R4 = orbitals
    else:
        R0, R1, R2, R4 = orbitals[[0, 1, 2, 4]]
    X = np.array([R0, R1, R2, R2, R4, R4])
    fun = EnergyFunctional("sp+pd", "CI", grid, params)
    H = fun.hamiltonian(X)
    blocks = {"3P": [2, 3], "1P": [0, 1], "3D": [4]}
    mask = np.zeros_like(H, dtype=bool)
    for idx in blocks.values():
        mask[np.ix_(idx, idx)] = True
    off = float(np.abs(H[~mask]).max())
    vals, vecs = {}, {}
    for name, idx in blocks.items():
        ev, V = eigh(H[np.ix_(idx, idx)])
        full = np.zeros((5, len(idx)))
        full[idx, :] = V
        vals[name], vecs[name] = ev, full
    vectors = np.column_stack([vecs["3P"], vecs["1P"], vecs["3D"]])
    return CIEigenvalues(
        lambda1_3P=float(vals["3P"][0]),
        lambda2_3P=float(vals["3P"][1]),
        lambda1_1P=float(vals["1P"][0]),
        lambda2_1P=float(vals["1P"][1]),
        lambda_3D=float(vals["3D"][0]),
        matrix=H,
        vectors=vectors,
        off_block=off,
    )


# --------------------------------------------------------------------------
# residual of the unrestricted problem


def _dual_metric(grid: RadialGrid, shift: float):
    chol = {}
    for ell in (0, 1, 2):
        A = 0.5 * grid.kinetic_form + np.diag(0.5 * ell * (ell + 1) * grid.w + shift * grid.r2w)
        chol[ell] = cho_factor(A)
    return chol


def full_residual(state: MCState, shift: float = SolveOptions.shift) -> dict:
    """Projected gradient of the J=1 energy with every parameter free.

    Orbital components are measured in the dual norm of the one-body metric
    ``½K_ℓ + shift``, i.e. ``sqrt(g·A⁻¹g)`` with ``g`` the raw gradient; this
    stays finite under mesh refinement, unlike the L² norm of a gradient
    with a ``1/r`` nuclear part.  ``l2_*`` entries give L²(r²dr) norms.
    The combined norm over all orbitals and the mixing vector is ``total``.
    """
    mode = "sp" if state.mode == "sp" else "sp+pd"
    fun = EnergyFunctional(mode, "J1", state.grid, state.params)
    X = state.orbitals
    _, G, gvec = fun.energy_and_gradient(X, state.coeffs)
    GT = _tangent(X, G, state.grid, range(len(X)))
    w = state.grid.r2w
    chol = _dual_metric(state.grid, shift)
    out = {}
    for s, g in enumerate(GT):
        raw = w * g
        out[f"R{s}"] = sqrt(max(float(raw @ cho_solve(chol[SLOT_ELL[s]], raw)), 0.0))
        out[f"l2_R{s}"] = sqrt(float(w @ (g * g)))
    c = state.coeffs
    out["mixing"] = float(np.linalg.norm(gvec - float(gvec @ c) * c))
    n = len(GT)
    out["total"] = sqrt(sum(out[f"R{s}"] ** 2 for s in range(n)) + out["mixing"] ** 2)
    out["l2_total"] = sqrt(sum(out[f"l2_R{s}"] ** 2 for s in range(n)) + out["mixing"] ** 2)
    return out


__all__ = [
    "SolveOptions",
    "Solution",
    "CIEigenvalues",
    "SolverError",
    "DegenerateInputError",
    "project_constraints",
    "minimize_symmetric",
    "minimize_J1",
    "multi_start_J1",
    "perturbed_start",
    "ci_diagonalize",
    "full_residual",
    "gauge_fix_state",
    "hydrogenic_orbitals",
    "symmetric_amplitudes",
]
