import numpy as np
import pytest
from helpers import GRID, random_orbitals, solve

from spdbreak.diagnostics import (
    FAILS,
    HOLDS,
    INCONCLUSIVE,
    DiagnosticError,
    check_condition_3D1,
    check_condition_3P1,
    check_hund,
    check_stationarity,
    check_symmetry_breaking,
    pair_exchange_integral,
    probe_set,
    saddle_escape,
    variation_measure,
)
from spdbreak.energy import MCState, MixingVector, symmetric_to_jj
from spdbreak.slater_condon import HamiltonianParams


def test_variation_measure():
    assert variation_measure(np.full(10, 3.0)) == 0.0
    assert variation_measure(np.array([1.0, 2.0, 3.0])) == pytest.approx(1.0)


def test_probes_are_orthonormal_to_R2():
    R2 = solve("sp+pd", "3P1").state.orbitals[2]
    P = probe_set(R2, GRID)
    assert np.max(np.abs(P @ (GRID.r2w * R2))) < 1e-12
    assert np.allclose(np.einsum("ij,ij,j->i", P, P, GRID.r2w), 1.0, atol=1e-12)


# -- ³P₁ ------------------------------------------------------------------------------


def test_3P1_condition_holds_at_be_minimiser():
    rep = check_condition_3P1(solve("sp+pd", "3P1"))
    assert rep.verdict == HOLDS
    assert rep.evidence["V"] > 0.05
    assert rep.evidence["pd_branch_sup"] > 0
    assert set(rep.profiles) == {"r", "F", "R2", "F_over_R2"}


def test_3P1_condition_fails_for_proportional_F():
    sol = solve("sp+pd", "3P1")
    rep = check_condition_3P1(sol, F=1.7 * sol.state.orbitals[2])
    assert rep.verdict == FAILS
    assert rep.evidence["V"] < 1e-12


def test_3P1_condition_needs_sp_pd():
    with pytest.raises(DiagnosticError):
        check_condition_3P1(solve("sp", "3P1"))


# -- ³D₁ ------------------------------------------------------------------------------


def test_3D1_condition_holds():
    rep = check_condition_3D1(solve("pd", "3D1"), solve("sp+pd", "3P1"))
    assert rep.verdict == HOLDS
    assert rep.evidence["E_3P_mixed"] <= rep.evidence["E_3P_sp"] + 1e-12
    assert rep.evidence["E_3P_mixed"] < rep.evidence["E_3D1"] - 1e-4


def test_3D1_condition_with_relaxed_R1():
    rep = check_condition_3D1(solve("pd", "3D1"), solve("sp+pd", "3P1"), relax=True)
    assert rep.verdict == HOLDS
    assert rep.evidence["E_3P_mixed"] > -15.0  # R1 stays orthogonal to the core


def test_3D1_tie_without_interaction_is_inconclusive():
    P0 = HamiltonianParams(Z=4.0, interaction=0.0)
    X = random_orbitals(np.random.default_rng(0))
    X[3], X[5] = X[2], X[4]
    # a fast-oscillating R1 pushes the sp entry above E(3D1)
    R1 = GRID.r * np.exp(-GRID.r) * np.cos(15 * GRID.r)
    R1 -= (GRID.r2w @ (R1 * X[0])) * X[0]
    X[1] = R1 / np.sqrt(GRID.r2w @ (R1 * R1))
    d = MCState("sp+pd", X, MixingVector(symmetric_to_jj("3D1", [1.0])), GRID, P0)
    t = MCState("sp+pd", X, MixingVector(symmetric_to_jj("3P1", [1.0, 0.0])), GRID, P0)
    ev = check_condition_3D1(d, t).evidence
    # without interaction the 3P block is diagonal and its pd entry is E(3D1)
    assert ev["E_3P_sp"] > ev["E_3D1"]
    assert ev["E_3P_mixed"] == pytest.approx(ev["E_3D1"], abs=1e-12)
    assert check_condition_3D1(d, t).verdict == INCONCLUSIVE


# -- stationarity ---------------------------------------------------------------------


@pytest.mark.parametrize("key", [("sp+pd", "1P1"), ("pd", "3D1"), ("sp+pd", "3P1")])
def test_stationarity_pattern(key):
    rep = check_stationarity(solve(*key))
    assert rep.verdict == HOLDS
    if key[1] == "3P1":
        assert rep.evidence["residual"] > 1e-3
    else:
        assert rep.evidence["residual"] < 1e-5


def test_saddle_escape_is_quadratic():
    out = saddle_escape(solve("sp+pd", "1P1"))
    assert out["orthogonal"] == pytest.approx(0.0, abs=1e-14)
    assert out["deviation"] < 1e-6
    assert out["E_triplet"] < out["E_psi"]
    assert all(e < out["E_psi"] for e in out["E_t"])


# -- Hund ------------------------------------------------------------------------------


def test_hund_strict_on_random_orbitals():
    rng = np.random.default_rng(1)
    for _ in range(50):
        rep = check_hund(random_orbitals(rng), GRID)
        ev = rep.evidence
        assert rep.verdict == HOLDS
        assert ev["difference"] == pytest.approx(ev["minus_4_cross"], abs=1e-10)
        assert ev["difference"] == pytest.approx(ev["four_pair_integral"], abs=1e-10)


def _bump(a, b):
    r = GRID.r
    f = np.where((r > a) & (r < b), ((r - a) * (b - r)) ** 4, 0.0)
    return f / np.sqrt(GRID.r2w @ (f * f))


def test_hund_disjoint_supports_tie():
    X = [_bump(0.05, 0.4), _bump(0.5, 1.0), _bump(3.0, 5.0)]
    assert pair_exchange_integral(X[1], X[2], GRID) == 0.0
    rep = check_hund(X, GRID)
    assert rep.evidence["difference"] == pytest.approx(0.0, abs=1e-14)
    assert rep.verdict == INCONCLUSIVE


def test_hund_at_be_minimiser():
    rep = check_hund(solve("sp+pd", "3P1").state.orbitals, GRID)
    assert rep.verdict == HOLDS
    assert rep.evidence["difference"] > 0.05


# -- symmetry breaking --------------------------------------------------------------


def test_sp_does_not_break_symmetry():
    rep = check_symmetry_breaking(solve("sp", "J1"), {"3P1": solve("sp", "3P1")})
    assert rep.verdict == FAILS
    assert not rep.evidence["energy_criterion"]


def test_symmetric_solution_is_not_broken():
    sym = solve("sp+pd", "3P1")
    rep = check_symmetry_breaking(sym, [sym, solve("sp+pd", "1P1")])
    assert rep.verdict == FAILS


def test_sp_pd_energy_and_mixed_parts():
    full = solve("sp+pd", "J1")
    syms = {k: solve(*k) for k in (("sp+pd", "3P1"), ("sp+pd", "1P1"), ("pd", "3D1"))}
    ev = check_symmetry_breaking(full, syms).evidence
    assert ev["energy_criterion"] and ev["gap"] > 1e-6
    assert ev["mixed_criterion"]
    assert ev["weight_1P"] > 1e-6 and ev["weight_3D"] > 0


@pytest.mark.xfail(strict=True, reason="3D weight of the J=1 minimiser stays below 1e-4 (see notes)")
def test_sp_pd_all_sectors_carry_weight():
    full = solve("sp+pd", "J1")
    ev = check_symmetry_breaking(full, [solve("sp+pd", "3P1")]).evidence
    print({k: ev[k] for k in ev if k.startswith("weight_")})
    assert ev["weight_criterion"]
