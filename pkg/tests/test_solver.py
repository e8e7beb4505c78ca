from math import sqrt
from types import SimpleNamespace

import numpy as np
import pytest
from helpers import GRID, random_orbitals, random_state, solve
from scipy.optimize import minimize_scalar

from spdbreak.energy import EnergyFunctional, MCState, MixingVector, total_energy
from spdbreak.slater_condon import HamiltonianParams, one_body_radial
from spdbreak.solver import (
    DegenerateInputError,
    SolveOptions,
    SolverError,
    ci_diagonalize,
    full_residual,
    gauge_fix_state,
    minimize_J1,
    minimize_symmetric,
    multi_start_J1,
    _line_search,
    perturbed_start,
    project_constraints,
)

P = HamiltonianParams()


# -- options and constraints ----------------------------------------------------


@pytest.mark.parametrize("kw", [{"energy_tol": 0.0}, {"gradient_tol": -1.0}, {"backtrack": 1.5}, {"max_iter": -1}])
def test_options_validated(kw):
    with pytest.raises(ValueError):
        SolveOptions(**kw)


def test_projection_is_idempotent_on_feasible_state():
    st = random_state(np.random.default_rng(0), "sp+pd")
    out = project_constraints(st)
    assert np.max(np.abs(out.orbitals - st.orbitals)) < 1e-14
    assert np.max(np.abs(out.coeffs - st.coeffs)) < 1e-14


def test_projection_of_random_input():
    rng = np.random.default_rng(1)
    X = random_orbitals(rng) * rng.uniform(0.5, 2.0, size=(6, 1))
    X[1] += 0.3 * X[0]
    st = MCState("sp+pd", X, MixingVector(rng.normal(size=5)), GRID)
    assert np.max(project_constraints(st).constraint_residuals()) < 1e-12


def test_projection_rejects_collapsed_R1():
    X = random_orbitals(np.random.default_rng(2))
    X[1] = X[0]
    st = MCState("sp+pd", X, MixingVector([1.0, 0, 0, 0, 0]), GRID)
    with pytest.raises(DegenerateInputError):
        project_constraints(st)


def test_gauge_fix_preserves_energy():
    st = random_state(np.random.default_rng(3), "sp+pd")
    X = np.array(st.orbitals)
    X[[2, 5]] *= -1
    c = st.coeffs * np.array([-1, 1, -1, 1, -1])
    flipped = st.replace(orbitals=X, mixing=MixingVector(c))
    fixed = gauge_fix_state(flipped)
    assert total_energy(flipped).total == pytest.approx(total_energy(st).total, abs=1e-12)
    assert total_energy(fixed).total == pytest.approx(total_energy(st).total, abs=1e-12)
    assert fixed.coeffs[np.flatnonzero(np.abs(fixed.coeffs) > 1e-12)[0]] > 0


def test_invalid_symmetric_combination():
    with pytest.raises(ValueError):
        minimize_symmetric("sp", "3D1")
    with pytest.raises(ValueError):
        minimize_J1("pd")


def test_zero_budget_reports_non_convergence():
    with pytest.raises(SolverError) as info:
        minimize_symmetric("sp", "3P1", opts=SolveOptions(max_iter=0))
    assert info.value.solution is not None
    assert not info.value.solution.converged


# -- converged Be solutions ----------------------------------------------------------


@pytest.mark.parametrize("key", [("sp", "3P1"), ("sp+pd", "3P1"), ("pd", "3D1"), ("sp+pd", "1P1"), ("sp", "J1"), ("sp+pd", "J1")])
def test_solutions_are_feasible_and_monotone(key):
    sol = solve(*key)
    assert sol.converged
    assert np.max(sol.state.constraint_residuals()) < 1e-10
    energies = np.array([e for _, e, _ in sol.trace])
    assert np.all(np.diff(energies) <= 1e-12)


def test_sp_3P1_energy():
    assert solve("sp", "3P1").energy == pytest.approx(-14.5115, abs=2e-3)


def test_sp_pd_3P1_energy_and_mixing():
    sol = solve("sp+pd", "3P1")
    a, c = sol.amplitudes
    assert sol.energy == pytest.approx(-14.5166, abs=2e-3)
    assert abs(a) == pytest.approx(0.9951963, abs=2e-3)
    assert abs(c) == pytest.approx(0.0978997, abs=2e-3)
    assert a * c < 0


def test_pd_3D1_energy():
    assert solve("pd", "3D1").energy == pytest.approx(-14.1889, abs=2e-3)


def test_sp_J1_collapses_to_triplet():
    sol = solve("sp", "J1")
    X, (a, b) = sol.state.orbitals, sol.state.coeffs
    eps = 1.0 if np.dot(X[2], X[3]) > 0 else -1.0
    assert abs(a - eps * sqrt(2) * b) < 1e-5
    assert sqrt(float(GRID.r2w @ (X[3] - eps * X[2]) ** 2)) < 1e-5
    assert sol.energy == pytest.approx(solve("sp", "3P1").energy, abs=1e-6)
    assert sol.classification.kind == "3P1"


def test_sp_J1_from_random_start():
    sol = minimize_J1("sp", init="random", opts=SolveOptions(seed=3))
    assert sol.energy == pytest.approx(solve("sp", "3P1").energy, abs=1e-6)


def test_inclusion_chain():
    e_full = solve("sp+pd", "J1").energy
    for key in (("sp+pd", "3P1"), ("sp+pd", "1P1"), ("pd", "3D1")):
        assert e_full <= solve(*key).energy + 1e-9
    assert solve("sp", "J1").energy <= solve("sp", "3P1").energy + 1e-9


def test_symmetric_minimisers_are_stationary_in_their_manifold():
    for key in (("sp+pd", "1P1"), ("pd", "3D1")):
        assert full_residual(solve(*key).state)["total"] < 1e-5


def test_line_search_refuses_steps_below_energy_resolution():
    # a flat energy must not be "decreased" by a step whose Armijo term rounds away
    e = -14.5
    flat = SimpleNamespace(retract=lambda X: X, fun=SimpleNamespace(energy=lambda X, c: e))
    X = np.zeros((2, 3))
    ok, *_ = _line_search(flat, X, None, e, np.ones_like(X), -1e-9, 1.0, SolveOptions())
    assert not ok


@pytest.mark.parametrize("seed", range(5))
def test_perturbed_J1_starts_converge(seed):
    opts = SolveOptions(seed=seed)
    sol = minimize_J1("sp+pd", init=perturbed_start(solve("sp+pd", "3P1"), opts), opts=opts)
    assert sol.converged and len(sol.trace) < 200
    assert sol.energy == pytest.approx(solve("sp+pd", "J1").energy, abs=1e-9)


def test_multi_start_from_perturbed_triplet():
    res = multi_start_J1("sp+pd", solve("sp+pd", "3P1"), n_starts=3)
    assert len(res.energies) == 3
    assert res.best.energy < solve("sp+pd", "3P1").energy - 1e-6
    assert not res.multi_basin


# -- fixed-orbital CI -------------------------------------------------------------------


def test_ci_block_structure_and_ordering():
    ci = ci_diagonalize(solve("sp+pd", "3P1").state.orbitals)
    assert ci.off_block < 1e-12
    assert ci.lambda1_3P <= ci.lambda2_3P and ci.lambda1_1P <= ci.lambda2_1P
    assert ci.hund_ordering
    assert np.trace(ci.matrix) == pytest.approx(sum(ci.as_dict().values()), abs=1e-10)


def test_ci_lowest_triplet_matches_angle_minimisation():
    X = solve("sp+pd", "3P1").state.orbitals
    ci = ci_diagonalize(X)
    fun = EnergyFunctional("sp+pd", "3P1", GRID, P)
    res = minimize_scalar(lambda t: fun.energy(X, [np.cos(t), np.sin(t)]), bounds=(-np.pi / 2, np.pi / 2),
                          method="bounded", options={"xatol": 1e-12})
    assert res.fun == pytest.approx(ci.lambda1_3P, abs=1e-10)


def test_ci_without_interaction_gives_one_body_sums():
    P0 = HamiltonianParams(Z=4.0, interaction=0.0)
    X = random_orbitals(np.random.default_rng(4))
    ci = ci_diagonalize(X, P0, GRID)
    h = [one_body_radial(X[s], X[s], ell, 4.0, GRID) for s, ell in ((0, 0), (1, 0), (2, 1), (4, 2))]
    sp_sum, pd_sum = 2 * h[0] + h[1] + h[2], 2 * h[0] + h[2] + h[3]
    want = sorted([sp_sum, pd_sum])
    assert sorted([ci.lambda1_3P, ci.lambda2_3P]) == pytest.approx(want, abs=1e-12)
    assert sorted([ci.lambda1_1P, ci.lambda2_1P]) == pytest.approx(want, abs=1e-12)
    assert ci.lambda_3D == pytest.approx(pd_sum, abs=1e-12)
