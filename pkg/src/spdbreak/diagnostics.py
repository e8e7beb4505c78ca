"""Named checks of the stationarity, Hund and symmetry-breaking statements.

Each check returns a :class:`ConditionReport` whose verdict is ``holds`` or
``fails`` only when the evidence clears its margin, and ``inconclusive``
otherwise.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from .angular import DOWN, UP, CSF, SpinOrbital
from .energy import SECTORS, EnergyFunctional, F_function, MCState, symmetric_to_jj, total_energy
from .grid import RadialGrid
from .slater_condon import HamiltonianParams, gaunt_ck, matrix_element, slater_Rk
from .solver import Solution, full_residual, symmetric_amplitudes

HOLDS, FAILS, INCONCLUSIVE = "holds", "fails", "inconclusive"

V_HOLDS = 0.05  # F/R2 variation above which the ³P₁ condition holds
V_FAILS = 0.005  # below this the ratio is constant within noise
ENERGY_MARGIN = 1e-4  # hartree
BREAKING_MARGIN = 1e-6  # hartree
SECTOR_WEIGHT_MIN = 1e-4
STATIONARY_MAX = 1e-5  # full residual of a stationary symmetric point
NONSTATIONARY_3P1_MIN = 1.0e-3  # frozen from the converged Be ³P₁ run (2.70e-3)
WINDOW = (1.0, 5.0)


class DiagnosticError(ValueError):
    """Inputs do not meet a check's preconditions."""


@dataclass
class ConditionReport:
    condition: str
    verdict: str
    evidence: dict = field(default_factory=dict)
    profiles: dict = field(default_factory=dict)  # name -> array, sampled on "r"

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS

    def to_text(self, header: str | None = None) -> str:
        buf = io.StringIO()
        if header:
            buf.write(f"# {header}\n")
        buf.write(f"condition = {self.condition}\n")
        buf.write(f"verdict = {self.verdict}\n")
        for k, v in self.evidence.items():
            if isinstance(v, (bool, np.bool_)):
                buf.write(f"{k} = {str(bool(v)).lower()}\n")
            elif isinstance(v, (float, np.floating)):
                buf.write(f"{k} = {float(v):.17g}\n")
            else:
                buf.write(f"{k} = {v}\n")
        return buf.getvalue()

    def profile_csv(self, header: str | None = None) -> str:
        if not self.profiles:
            return ""
        names = list(self.profiles)
        buf = io.StringIO()
        buf.write("# " + (header + " " if header else "") + "columns: " + ",".join(names) + "\n")
        cols = [np.asarray(self.profiles[n]) for n in names]
        for row in zip(*cols):
            buf.write(",".join(f"{x:.17g}" for x in row) + "\n")
        return buf.getvalue()


def _state(x) -> MCState:
    return x.state if isinstance(x, Solution) else x


def _symmetry_of(x) -> str:
    return x.symmetry if isinstance(x, Solution) else _state(x).symmetry


# --------------------------------------------------------------------------
# ³P₁: F/R₂ profile


def variation_measure(ratio: np.ndarray) -> float:
    """``(max - min) / median |ratio|``: zero for a constant profile."""
    med = float(np.median(np.abs(ratio)))
    if med == 0.0:
        return float("inf") if np.ptp(ratio) > 0 else 0.0
    return float(np.ptp(ratio)) / med


def probe_set(R2: np.ndarray, grid: RadialGrid, n: int = 20) -> np.ndarray:
    """Smooth variations orthogonal to ``R2``, normalised in L²(r²dr).

    Half are bumps ``r·exp(-(ln r - ln c)²)`` at log-spaced centres, half
    are ``r^k`` times the envelope of ``R2``.
    """
    r = grid.r
    w = grid.r2w
    out = []
    centres = np.geomspace(0.3, 8.0, n // 2)
    for c in centres:
        out.append(r * np.exp(-((np.log(r) - np.log(c)) ** 2)))
    env = np.abs(R2)
    for k in range(n - n // 2):
        out.append(r ** (k % 5) * env * (1 + 0.1 * k))
    P = []
    n2 = float(w @ (R2 * R2))
    for f in out:
        for _ in range(2):  # second pass removes cancellation error
            f = f - float(w @ (f * R2)) / n2 * R2
        P.append(f / sqrt(float(w @ (f * f))))
    return np.array(P)


def _pd_branch_pairings(st: MCState, a: float, c: float, probes: np.ndarray) -> np.ndarray:
    """``⟨HΨ, ³P_pd(R0, δR, R4)⟩`` over the probes (reported, no verdict)."""
    from .angular import ls_csf

    R0, R1, R2, R4 = st.orbitals[[0, 1, 2, 4]]
    psi: dict = {}
    for term, kind, slots, amp in (("3P", "sp", (0, 1, 2), a), ("3P", "pd", (0, 2, 4), c)):
        for d, v in ls_csf(term, kind, slots).terms.items():
            psi[d] = psi.get(d, 0.0) + amp * float(v)
    probe = ls_csf("3P", "pd", (0, 3, 4))
    orb = {0: R0, 1: R1, 2: R2, 4: R4}
    return np.array([matrix_element(psi, probe, {**orb, 3: d}, st.params, st.grid) for d in probes])


def check_condition_3P1(solution, F: np.ndarray | None = None) -> ConditionReport:
    """Non-stationarity of the ³P₁ minimiser through the shape of ``F/R2``."""
    st = _state(solution)
    if st.mode != "sp+pd":
        raise DiagnosticError("needs an sp+pd state")
    a, c = symmetric_amplitudes(st, "3P1")
    if abs(a) < 1e-12 and abs(c) < 1e-12:
        raise DiagnosticError("a = c = 0: no sp or pd component")
    g = st.grid
    R0, R1, R2, R4 = st.orbitals[[0, 1, 2, 4]]
    printed = F_function(R0, R1, R2, R4, a, c, g, st.params.Z, pd_exchange=False)
    if F is None:
        F = F_function(R0, R1, R2, R4, a, c, g, st.params.Z)
    m = (g.r >= WINDOW[0]) & (g.r <= WINDOW[1])
    ratio = F[m] / R2[m]
    V = variation_measure(ratio)
    V_printed = variation_measure(printed[m] / R2[m])
    probes = probe_set(R2, g)
    pairings = probes @ (g.w * F)
    pd_branch = _pd_branch_pairings(st, a, c, probes)
    lam = float(np.median(ratio))
    verdict = HOLDS if V > V_HOLDS else FAILS if V < V_FAILS else INCONCLUSIVE
    return ConditionReport(
        "3P1",
        verdict,
        {
            "a": float(a),
            "c": float(c),
            "V": V,
            "V_printed_form": V_printed,
            "median_ratio": lam,
            "probe_sup": float(np.max(np.abs(pairings))),
            "pd_branch_sup": float(np.max(np.abs(pd_branch))),
            "window": f"{WINDOW[0]:g}..{WINDOW[1]:g}",
        },
        {"r": g.r[m], "F": F[m], "R2": R2[m], "F_over_R2": ratio},
    )


# --------------------------------------------------------------------------
# ³D₁: a ³P state below E(³D₁)


def check_condition_3D1(solution3D, source3P, relax: bool = False) -> ConditionReport:
    """Is there a ³P₁ state, built on the ³D₁ orbitals, below ``E(³D₁)``?

    ``R1`` is the ³P₁ solution's ``R1`` projected orthogonal to the ³D₁
    ``R0``.  The mixing of ³P_sp and ³P_pd is optimised exactly (2×2).
    ``relax=True`` additionally minimises over ``R1`` with the others fixed.
    """
    s3d = _state(solution3D)
    src = _state(source3P)
    g = s3d.grid
    w = g.r2w
    R0, R2, R4 = s3d.orbitals[[0, 2, 4]]
    R1 = src.orbitals[1] - float(w @ (src.orbitals[1] * R0)) * R0
    R1 = R1 / sqrt(float(w @ (R1 * R1)))
    fun3d = EnergyFunctional("sp+pd", "3D1", g, s3d.params)
    e3d = fun3d.energy(s3d.orbitals, [1.0])
    fun = EnergyFunctional("sp+pd", "3P1", g, s3d.params)
    X = np.array([R0, R1, R2, R2, R4, R4])
    if relax:
        from .solver import SolveOptions, _Problem, _run

        prob = _Problem(fun, (1,), SolveOptions())
        X, _, _, _ = _run(prob, X, np.array([1.0, 0.0]), SolveOptions())
    H = fun.hamiltonian(X)
    e_sp = float(H[0, 0])
    vals, vecs = np.linalg.eigh(H)
    e_min = float(vals[0])
    v = vecs[:, 0] * (1.0 if vecs[0, 0] >= 0 else -1.0)
    diff = e_min - e3d
    verdict = HOLDS if diff < -ENERGY_MARGIN else FAILS if diff > ENERGY_MARGIN else INCONCLUSIVE
    return ConditionReport(
        "3D1",
        verdict,
        {
            "E_3D1": float(e3d),
            "E_3P_sp": e_sp,
            "E_3P_mixed": e_min,
            "alpha": float(v[0]),
            "beta": float(v[1]),
            "margin": ENERGY_MARGIN,
            "relaxed_R1": relax,
        },
    )


# --------------------------------------------------------------------------
# stationarity of symmetric minimisers in the full problem


def check_stationarity(solution, symmetry: str | None = None) -> ConditionReport:
    """Full projected gradient at a symmetric point (every parameter free).

    ¹P₁ and ³D₁ minimisers are expected stationary (residual below
    ``STATIONARY_MAX``), the ³P₁ one not (residual above
    ``NONSTATIONARY_3P1_MIN``).
    """
    st = _state(solution)
    symmetry = symmetry or _symmetry_of(solution)
    res = full_residual(st)
    tot = res["total"]
    if symmetry in ("1P1", "3D1"):
        expected = "stationary"
        verdict = HOLDS if tot < STATIONARY_MAX else FAILS if tot > NONSTATIONARY_3P1_MIN else INCONCLUSIVE
    elif symmetry == "3P1":
        expected = "non-stationary"
        verdict = HOLDS if tot > NONSTATIONARY_3P1_MIN else FAILS if tot < STATIONARY_MAX else INCONCLUSIVE
    else:
        raise DiagnosticError(f"stationarity pattern undefined for {symmetry!r}")
    ev = {"symmetry": symmetry, "expected": expected, "residual": tot}
    ev.update({f"residual_{k}": v for k, v in res.items() if k != "total"})
    return ConditionReport("stationarity", verdict, ev)


def saddle_escape(solution1P, ts=(0.05, 0.1, 0.2)) -> dict:
    """Energy along ``√(1-t²)Ψ + tΨ'`` with Ψ' the triplet twin of the ¹P₁ state.

    Returns the energies ``E(t)``, ``E(Ψ)``, ``E(Ψ')`` and the largest
    deviation from ``E(Ψ) + t²(E(Ψ') - E(Ψ))``.
    """
    st = _state(solution1P)
    amps = symmetric_amplitudes(st, "1P1")
    c = symmetric_to_jj("1P1", amps)
    c2 = symmetric_to_jj("3P1", amps)
    fun = EnergyFunctional("sp+pd", "J1", st.grid, st.params)
    X = st.orbitals
    e0 = fun.energy(X, c)
    e1 = fun.energy(X, c2)
    energies = [fun.energy(X, sqrt(1 - t * t) * c + t * c2) for t in ts]
    dev = max(abs(e - (e0 + t * t * (e1 - e0))) for e, t in zip(energies, ts))
    return {"t": list(ts), "E_t": energies, "E_psi": e0, "E_triplet": e1,
            "deviation": dev, "orthogonal": float(c @ c2)}


# --------------------------------------------------------------------------
# Hund's rule for a singlet/triplet pair


def _pair_state(core, g1, g2, sign):
    """``core ∧ (g1↑ g2↓ + sign·g1↓ g2↑) / √2`` as a CSF."""
    half = 1 / sqrt(2)
    terms = [
        (half, list(core) + [g1(UP), g2(DOWN)]),
        (sign * half, list(core) + [g1(DOWN), g2(UP)]),
    ]
    return CSF.from_terms(terms)


def pair_exchange_integral(R1, R2, grid: RadialGrid, l1=0, m1=0, l2=1, m2=1) -> float:
    """``∬ |x-y|⁻¹ conj(g1 g2)(x) (g1 g2)(y)``-type pair-overlap integral.

    With ``g1 = R1 Y_{l1 m1}`` and ``g2 = R2 Y_{l2 m2}`` this is
    ``Σ_k c^k(l1 m1; l2 m2)² R^k[R1 R2; R2 R1]``.
    """
    tot = 0.0
    for k in range(5):
        ck = float(gaunt_ck(l1, m1, l2, m2, k))
        if ck:
            tot += ck * ck * slater_Rk(R1, R2, R2, R1, k, grid)
    return tot


def check_hund(orbitals, grid: RadialGrid, params: HamiltonianParams | None = None,
               tol: float = 1e-12) -> ConditionReport:
    """Singlet/triplet inequality for the sp pair on orbitals ``(R0, R1, R2)``.

    ``Ψ1 = c core∧s(R1)↑∧p1(R2)↓`` and ``Ψ2`` with spins swapped,
    ``c = 1/√2``; ``Ψ1+Ψ2`` is the ³P (M_S=0) and ``Ψ1-Ψ2`` the ¹P function.
    """
    params = params or HamiltonianParams()
    R0, R1, R2 = (np.asarray(x, float) for x in orbitals[:3])
    core = [SpinOrbital(0, 0, 0, UP), SpinOrbital(0, 0, 0, DOWN)]
    g1 = lambda s: SpinOrbital(1, 0, 0, s)  # noqa: E731
    g2 = lambda s: SpinOrbital(2, 1, 1, s)  # noqa: E731
    trip = _pair_state(core, g1, g2, +1)
    sing = _pair_state(core, g1, g2, -1)
    orb = {0: R0, 1: R1, 2: R2}
    e_trip = matrix_element(trip, trip, orb, params, grid)
    e_sing = matrix_element(sing, sing, orb, params, grid)
    psi1 = CSF.from_terms([(sqrt(0.5), core + [g1(UP), g2(DOWN)])])
    psi2 = CSF.from_terms([(sqrt(0.5), core + [g1(DOWN), g2(UP)])])
    cross = matrix_element(psi1, psi2, orb, params, grid)
    diff = e_sing - e_trip
    pair = params.interaction * 0.5 * pair_exchange_integral(R1, R2, grid)
    verdict = HOLDS if diff > tol else FAILS if diff < -tol else INCONCLUSIVE
    return ConditionReport(
        "hund",
        verdict,
        {
            "E_triplet": e_trip,
            "E_singlet": e_sing,
            "difference": diff,
            "minus_4_cross": -4.0 * cross,
            "four_pair_integral": 4.0 * pair,
        },
    )


# --------------------------------------------------------------------------
# symmetry breaking


def check_symmetry_breaking(full_solution, symmetric_solutions,
                            weight_min: float = SECTOR_WEIGHT_MIN) -> ConditionReport:
    """Strictly lower J=1 energy, mixed symmetry and weight in every sector.

    ``symmetric_solutions`` maps labels to solutions, states or plain
    energies (or is a sequence of them).
    """
    full = full_solution
    st = _state(full)
    syms = symmetric_solutions.values() if isinstance(symmetric_solutions, dict) else symmetric_solutions
    def _energy(s):
        if isinstance(s, Solution):
            return float(s.energy)
        if isinstance(s, MCState):
            return total_energy(s).total
        return float(s)

    e_sym = [_energy(s) for s in syms]
    e_min = min(e_sym)
    e = float(full.energy)
    weights = dict(full.report.weights)
    classification = str(full.classification)
    sectors_needed = SECTORS if st.mode != "sp" else ("1P", "3P")
    gap_ok = e < e_min - BREAKING_MARGIN
    mixed = classification == "mixed"
    weights_ok = all(weights[s] > weight_min for s in sectors_needed)
    verdict = HOLDS if (gap_ok and mixed and weights_ok) else FAILS
    ev = {
        "E_J1": e,
        "E_symmetric_min": e_min,
        "gap": e_min - e,
        "classification": classification,
        "energy_criterion": gap_ok,
        "mixed_criterion": mixed,
        "weight_criterion": weights_ok,
        "weight_min": weight_min,
    }
    ev.update({f"weight_{s}": weights[s] for s in SECTORS})
    return ConditionReport("symmetry-breaking", verdict, ev)
