"""Closed-form radial energy of the sp and sp+pd J=1 states.

The two configurations ``1s² 2s 2p`` and ``1s² 2p 3d`` are written on a basis
of LS-coupled functions with explicit radial slots; the jj-labelled
configurations are fixed linear combinations of those (``amplitudes = T @
coeffs``).  Because ``R0`` is a closed shell orthogonal to every open
orbital, each matrix element over the basis reduces to a two-electron
problem in the field of the core.  The reduction is carried out once,
symbolically in the angular part, producing polynomials in a small set of
radial primitives:

* ``S(a, b)``      overlap ``∫ Ra Rb r² dr``
* ``T(ℓ, a, b)``   kinetic ``½∫(r² Ra' Rb' + ℓ(ℓ+1) Ra Rb) dr``
* ``N(a, b)``      nuclear ``-Z ∫ Ra Rb r dr``
* ``R(k; a c | b d)`` Slater integral (see :func:`~spdbreak.slater_condon.slater_Rk`)

Open orbitals sharing ℓ (``R2``/``R3`` and ``R4``/``R5``) need not be
orthogonal, so overlaps appear explicitly.  Energies and L²(r²dr)
gradients then follow from the primitive values by the product rule.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field, replace
from functools import lru_cache
from math import sqrt

import numpy as np

from . import kernels
from .angular import JJ_ORDER, JJ_RELATIONS, SpinOrbital, ls_csf
from .grid import RadialGrid
from .slater_condon import HamiltonianParams, two_electron_terms

CATEGORIES = ("kinetic", "nuclear", "direct", "exchange")
SECTORS = ("1P", "3P", "3D")
MODES = ("sp", "sp+pd", "pd")
SYMMETRIES = ("J1", "1P1", "3P1", "3D1")

N_SLOTS = {"sp": 4, "sp+pd": 6, "pd": 6}
N_COEFFS = {"sp": 2, "sp+pd": 5, "pd": 5}


class StateError(ValueError):
    """State violates its normalization or orthogonality constraints."""


# --------------------------------------------------------------------------
# state containers


@dataclass(frozen=True)
class MixingVector:
    """jj mixing coefficients ``(a, b)`` or ``(a, b, c, d, e)``."""

    coeffs: tuple[float, ...]

    def __post_init__(self) -> None:
        c = tuple(float(x) for x in self.coeffs)
        if len(c) not in (2, 5):
            raise StateError(f"need 2 or 5 mixing coefficients, got {len(c)}")
        object.__setattr__(self, "coeffs", c)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coeffs)

    def norm_error(self) -> float:
        return abs(float(self.array @ self.array) - 1.0)


@dataclass(frozen=True, eq=False)
class MCState:
    """Radial orbitals ``R0..R3`` (sp) or ``R0..R5`` plus mixing coefficients.

    ``symmetry`` records the manifold the state was produced in (``J1`` for
    the unrestricted problem); it does not alter how the energy is evaluated.
    """

    mode: str
    orbitals: np.ndarray
    mixing: MixingVector
    grid: RadialGrid
    params: HamiltonianParams = field(default_factory=HamiltonianParams)
    symmetry: str = "J1"

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise StateError(f"unknown mode {self.mode!r}")
        if self.symmetry not in SYMMETRIES:
            raise StateError(f"unknown symmetry {self.symmetry!r}")
        orb = np.array(self.grid.check(self.orbitals), dtype=float)
        if orb.shape != (N_SLOTS[self.mode], self.grid.n_points):
            raise StateError(
                f"{self.mode} state needs {N_SLOTS[self.mode]} orbitals, got shape {orb.shape}"
            )
        if len(self.mixing.coeffs) != N_COEFFS[self.mode]:
            raise StateError(f"{self.mode} state needs {N_COEFFS[self.mode]} coefficients")
        orb.setflags(write=False)
        object.__setattr__(self, "orbitals", orb)

    @property
    def coeffs(self) -> np.ndarray:
        return self.mixing.array

    def constraint_residuals(self) -> np.ndarray:
        """|‖R_i‖²-1| for each slot, |⟨R0,R1⟩| and |Σc²-1|."""
        w = self.grid.r2w
        norms = np.abs(np.einsum("ij,ij,j->i", self.orbitals, self.orbitals, w) - 1.0)
        orth = abs(float(w @ (self.orbitals[0] * self.orbitals[1])))
        return np.concatenate([norms, [orth, self.mixing.norm_error()]])

    def replace(self, **kw) -> "MCState":
        return replace(self, **kw)


# --------------------------------------------------------------------------
# symbolic reduction


SP_PAIRS = ((0, 1, 2), (0, 1, 3))
PD_PAIRS = ((0, 2, 4), (0, 3, 4), (0, 3, 5))


def ls_basis(mode: str, symmetry: str = "J1") -> tuple[tuple[str, str, tuple[int, int, int]], ...]:
    """LS basis functions ``(term, kind, slots)`` spanning a model."""
    if symmetry == "J1":
        basis = [(t, "sp", s) for t in ("1P", "3P") for s in SP_PAIRS]
        if mode != "sp":
            basis += [(t, "pd", s) for t in SECTORS for s in PD_PAIRS]
        return tuple(basis)
    table = {
        ("sp", "3P1"): [("3P", "sp", (0, 1, 2))],
        ("sp", "1P1"): [("1P", "sp", (0, 1, 2))],
        ("sp+pd", "3P1"): [("3P", "sp", (0, 1, 2)), ("3P", "pd", (0, 2, 4))],
        ("sp+pd", "1P1"): [("1P", "sp", (0, 1, 2)), ("1P", "pd", (0, 2, 4))],
        ("pd", "3D1"): [("3D", "pd", (0, 2, 4))],
        ("sp+pd", "3D1"): [("3D", "pd", (0, 2, 4))],
        ("sp+pd", "CI"): [
            ("1P", "sp", (0, 1, 2)),
            ("1P", "pd", (0, 2, 4)),
            ("3P", "sp", (0, 1, 2)),
            ("3P", "pd", (0, 2, 4)),
            ("3D", "pd", (0, 2, 4)),
        ],
    }
    if (mode, symmetry) not in table:
        raise StateError(f"no {symmetry} model in {mode} mode")
    return tuple(table[(mode, symmetry)])


def jj_to_ls(mode: str) -> np.ndarray:
    """Matrix ``T`` with ``LS amplitudes = T @ jj coefficients``."""
    basis = ls_basis(mode, "J1")
    labels = JJ_ORDER[:2] if mode == "sp" else JJ_ORDER
    t = np.zeros((len(basis), len(labels)))
    for j, label in enumerate(labels):
        kind, slots, parts = JJ_RELATIONS[label]
        for term, coef in parts:
            t[basis.index((term, kind, slots)), j] = float(coef)
    return t


def symmetric_to_jj(symmetry: str, amplitudes) -> np.ndarray:
    """jj coefficients ``(a..e)`` of a symmetric state with ``R3=R2, R5=R4``.

    ``amplitudes`` are the coefficients of the (sp, pd) LS functions of the
    symmetric model (one value for ³D₁).
    """
    if symmetry == "3P1":
        al, be = amplitudes
        return np.array([al * sqrt(2 / 3), al / sqrt(3), -be / sqrt(6), 4 * be / sqrt(30), 3 * be / sqrt(30)])
    if symmetry == "1P1":
        al, be = amplitudes
        return np.array([-al / sqrt(3), al * sqrt(2 / 3), be / sqrt(3), -be / sqrt(15), 3 * be / sqrt(15)])
    if symmetry == "3D1":
        (g,) = amplitudes
        return g * np.array([0.0, 0.0, 1 / sqrt(2), sqrt(2 / 5), -1 / sqrt(10)])
    raise StateError(f"unknown symmetry {symmetry!r}")


class _Poly:
    """Sparse polynomial in radial primitives, tagged by energy category."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict[tuple[str, tuple], float] = dict(terms or {})

    @classmethod
    def prim(cls, key, cat):
        return cls({(cat, (key,)): 1.0})

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0.0) + v
        return _Poly(out)

    def scale(self, f):
        return _Poly({k: f * v for k, v in self.terms.items()})

    def __mul__(self, other):
        out: dict = {}
        for (c1, p1), v1 in self.terms.items():
            for (c2, p2), v2 in other.terms.items():
                if c1 != "overlap" and c2 != "overlap":
                    raise AssertionError("product of two non-overlap factors")
                cat = c2 if c1 == "overlap" else c1
                key = (cat, tuple(sorted(p1 + p2)))
                out[key] = out.get(key, 0.0) + v1 * v2
        return _Poly(out)


def _same_channel(x: SpinOrbital, y: SpinOrbital) -> bool:
    return (x.ell, x.m, x.spin) == (y.ell, y.m, y.spin)


def _pair(a, b):
    return (a, b) if a <= b else (b, a)


def _overlap(x, y) -> _Poly:
    if not _same_channel(x, y):
        return _Poly()
    return _Poly.prim(("S",) + _pair(x.slot, y.slot), "overlap")


def _one_body(x, y) -> _Poly:
    if not _same_channel(x, y):
        return _Poly()
    a, b = _pair(x.slot, y.slot)
    return _Poly.prim(("T", x.ell, a, b), "kinetic") + _Poly.prim(("N", a, b), "nuclear")


def _g(i, j, k, l, cat) -> _Poly:
    out = _Poly()
    for coef, key in two_electron_terms(i, j, k, l):
        c = key.canonical()
        out = out + _Poly.prim(("R", c.k, c.a, c.b, c.c, c.d), cat).scale(coef)
    return out


def _antisym(i, j, k, l) -> _Poly:
    return _g(i, j, k, l, "direct") + _g(i, j, l, k, "exchange").scale(-1.0)


CORE = (SpinOrbital(0, 0, 0, 1), SpinOrbital(0, 0, 0, -1))


@lru_cache(maxsize=None)
def _core_energy() -> _Poly:
    up, dn = CORE
    return _one_body(up, up) + _one_body(dn, dn) + _antisym(up, dn, up, dn)


def _fock(x, y) -> _Poly:
    if not _same_channel(x, y):
        return _Poly()
    out = _one_body(x, y)
    for c in CORE:
        out = out + _antisym(x, c, y, c)
    return out


def _pair_element(u, v, u2, v2):
    """Overlap and Hamiltonian polynomials between ``core∧u∧v`` and ``core∧u2∧v2``."""
    s_uu, s_vv, s_uv, s_vu = _overlap(u, u2), _overlap(v, v2), _overlap(u, v2), _overlap(v, u2)
    omega = s_uu * s_vv + (s_uv * s_vu).scale(-1.0)
    one = (
        _fock(u, u2) * s_vv
        + s_uu * _fock(v, v2)
        + (_fock(u, v2) * s_vu).scale(-1.0)
        + (s_uv * _fock(v, u2)).scale(-1.0)
    )
    ham = _core_energy() * omega + one + _antisym(u, v, u2, v2)
    return omega, ham


def _open_terms(label):
    term, kind, slots = label
    out = []
    for det, c in ls_csf(term, kind, slots).terms.items():
        if det[0] != CORE[1] and det[0] != CORE[0]:
            raise AssertionError("core orbitals must lead each determinant")
        core = {det[0], det[1]}
        if core != set(CORE):
            raise AssertionError("unexpected core occupation")
        out.append((float(c), det[2], det[3]))
    return out


@dataclass(frozen=True, eq=False)
class CompiledModel:
    """Numerical tables of one reduced energy expression."""

    mode: str
    symmetry: str
    basis: tuple
    sector_of: np.ndarray  # sector index of each basis function
    prims: tuple  # primitive keys; index 0 is the constant 1
    monomials: np.ndarray  # (n_mono, 3) primitive indices
    ham: np.ndarray  # (n_cat, n_mono, nb, nb)
    overlap: np.ndarray  # (n_mono, nb, nb)
    slots: tuple[int, ...]

    @property
    def ham_total(self) -> np.ndarray:
        return self.ham.sum(axis=0)


@lru_cache(maxsize=None)
def compile_model(mode: str, symmetry: str = "J1") -> CompiledModel:
    basis = ls_basis(mode, symmetry)
    nb = len(basis)
    opens = [_open_terms(b) for b in basis]
    entries: dict[tuple[int, int], tuple[_Poly, _Poly]] = {}
    for i in range(nb):
        for j in range(i, nb):
            om, hm = _Poly(), _Poly()
            for c1, u, v in opens[i]:
                for c2, u2, v2 in opens[j]:
                    o, h = _pair_element(u, v, u2, v2)
                    om = om + o.scale(c1 * c2)
                    hm = hm + h.scale(c1 * c2)
            entries[(i, j)] = (om, hm)

    prims: list = [("1",)]
    pidx = {("1",): 0}
    monos: list = []
    midx: dict = {}

    def mono_index(ps):
        if ps not in midx:
            ids = []
            for p in ps:
                if p not in pidx:
                    pidx[p] = len(prims)
                    prims.append(p)
                ids.append(pidx[p])
            midx[ps] = len(monos)
            monos.append(ids + [0] * (3 - len(ids)))
        return midx[ps]

    collected = []
    for (i, j), (om, hm) in entries.items():
        for (cat, ps), v in om.terms.items():
            if abs(v) > 1e-15:
                collected.append(("overlap", mono_index(ps), i, j, v))
        for (cat, ps), v in hm.terms.items():
            if abs(v) > 1e-15:
                collected.append((cat, mono_index(ps), i, j, v))

    nm = len(monos)
    ham = np.zeros((len(CATEGORIES), nm, nb, nb))
    ovl = np.zeros((nm, nb, nb))
    for cat, m, i, j, v in collected:
        target = ovl if cat == "overlap" else ham[CATEGORIES.index(cat)]
        target[m, i, j] += v
        if i != j:
            target[m, j, i] += v
    used = sorted({b for _, _, sl in basis for b in sl})
    return CompiledModel(
        mode=mode,
        symmetry=symmetry,
        basis=basis,
        sector_of=np.array([SECTORS.index(t) for t, _, _ in basis]),
        prims=tuple(prims),
        monomials=np.array(monos, dtype=np.intp).reshape(nm, 3),
        ham=ham,
        overlap=ovl,
        slots=tuple(used),
    )


# --------------------------------------------------------------------------
# numerical evaluation


class _Evaluator:
    """Primitive values (and optionally their gradients) for one orbital set."""

    def __init__(self, model: CompiledModel, orbitals: np.ndarray, grid: RadialGrid,
                 params: HamiltonianParams, with_potentials: bool = False):
        self.model = model
        self.orb = orbitals
        self.grid = grid
        self.params = params
        r, w = grid.r, grid.w
        r2 = r * r
        lam = params.interaction
        vals = np.empty(len(model.prims))
        vals[0] = 1.0
        rk_keys = [p for p in model.prims if p[0] == "R"]
        # distinct (pair, k) densities for the screening potentials
        dens = {}
        for _, k, a, b, c, d in rk_keys:
            dens.setdefault((k, a, c), None)
            if with_potentials:
                dens.setdefault((k, b, d), None)
        dkeys = list(dens)
        if dkeys:
            rho = np.array([orbitals[a] * orbitals[c] * r2 for _, a, c in dkeys])
            ks = np.array([k for k, _, _ in dkeys], dtype=np.intp)
            idx, wts = grid.interval_tables
            ys = kernels.yk_sym_batch(rho, ks, r, w, idx, wts)
            self.pot = {key: ys[n] for n, key in enumerate(dkeys)}
        else:
            self.pot = {}
        self.kin = {}
        for n, p in enumerate(model.prims[1:], start=1):
            kind = p[0]
            if kind == "S":
                vals[n] = grid.r2w @ (orbitals[p[1]] * orbitals[p[2]])
            elif kind == "T":
                ell, a, b = p[1:]
                vals[n] = self._kin_vec(ell, b) @ orbitals[a]
            elif kind == "N":
                vals[n] = -params.Z * (w * r) @ (orbitals[p[1]] * orbitals[p[2]])
            else:
                _, k, a, b, c, d = p
                vals[n] = lam * (w @ (orbitals[b] * orbitals[d] * r2 * self.pot[(k, a, c)]))
        self.values = vals

    def _kin_vec(self, ell, b):
        key = (ell, b)
        if key not in self.kin:
            g = self.grid
            self.kin[key] = 0.5 * (g.kinetic_form @ self.orb[b]) + 0.5 * ell * (ell + 1) * g.w * self.orb[b]
        return self.kin[key]

    def monomial_values(self) -> np.ndarray:
        return self.values[self.model.monomials].prod(axis=1)

    def orbital_gradient(self, dvals: np.ndarray) -> np.ndarray:
        """Map ``∂E/∂primitive`` to L²(r²dr) gradients on every slot."""
        g = self.grid
        orb = self.orb
        out = np.zeros_like(orb)
        lam = self.params.interaction
        r2w = g.r2w
        for n, p in enumerate(self.model.prims[1:], start=1):
            f = dvals[n]
            if f == 0.0:
                continue
            kind = p[0]
            if kind == "S":
                a, b = p[1:]
                out[a] += f * orb[b]
                out[b] += f * orb[a]
            elif kind == "T":
                ell, a, b = p[1:]
                out[a] += f * self._kin_vec(ell, b) / r2w
                out[b] += f * self._kin_vec(ell, a) / r2w
            elif kind == "N":
                a, b = p[1:]
                out[a] += -f * self.params.Z * orb[b] / g.r
                out[b] += -f * self.params.Z * orb[a] / g.r
            else:
                _, k, a, b, c, d = p
                ys = lam * f * self.pot[(k, b, d)]
                yr = lam * f * self.pot[(k, a, c)]
                out[a] += ys * orb[c]
                out[c] += ys * orb[a]
                out[b] += yr * orb[d]
                out[d] += yr * orb[b]
        return out


def _check_state(state: MCState, tol: float) -> None:
    res = state.constraint_residuals()
    if res.max() > tol:
        raise StateError(f"constraint residual {res.max():.3e} exceeds {tol:g}")


@dataclass(frozen=True)
class EnergyReport:
    """Energy of a state with its decomposition (hartree)."""

    total: float
    sectors: dict
    terms: dict
    weights: dict

    FIELDS = ("total_hartree", "sector_1P", "sector_3P", "sector_3D", "kinetic", "nuclear", "direct", "exchange")

    def as_dict(self) -> dict:
        d = {"total_hartree": self.total}
        d.update({f"sector_{s}": self.sectors[s] for s in SECTORS})
        d.update({c: self.terms[c] for c in CATEGORIES})
        d.update({f"weight_{s}": self.weights[s] for s in SECTORS})
        return d

    def to_text(self, header: str | None = None) -> str:
        buf = io.StringIO()
        if header:
            buf.write(f"# {header}\n")
        for k, v in self.as_dict().items():
            buf.write(f"{k} = {v:.17g}\n")
        return buf.getvalue()

    @classmethod
    def from_text(cls, text: str) -> "EnergyReport":
        vals = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            k, v = (x.strip() for x in line.split("=", 1))
            vals[k] = float(v)
        return cls(
            total=vals["total_hartree"],
            sectors={s: vals[f"sector_{s}"] for s in SECTORS},
            terms={c: vals[c] for c in CATEGORIES},
            weights={s: vals.get(f"weight_{s}", float("nan")) for s in SECTORS},
        )


class EnergyFunctional:
    """Energy and gradient of a compiled model as a function of raw arrays.

    ``params_vec`` is the mixing vector of the model: jj coefficients for
    ``J1`` and LS amplitudes for the symmetric models.
    """

    def __init__(self, mode: str, symmetry: str, grid: RadialGrid, params: HamiltonianParams):
        self.mode = mode
        self.symmetry = symmetry
        self.grid = grid
        self.params = params
        self.model = compile_model("sp" if mode == "sp" else "sp+pd", symmetry) if symmetry == "J1" \
            else compile_model(mode, symmetry)
        self.T = jj_to_ls(self.model.mode) if symmetry == "J1" else np.eye(len(self.model.basis))

    def amplitudes(self, vec) -> np.ndarray:
        return self.T @ np.asarray(vec, float)

    def matrices(self, orbitals: np.ndarray, with_potentials: bool = False):
        ev = _Evaluator(self.model, orbitals, self.grid, self.params, with_potentials)
        mv = ev.monomial_values()
        h = np.einsum("m,cmij->cij", mv, self.model.ham)
        s = np.einsum("m,mij->ij", mv, self.model.overlap)
        return ev, h, s

    def energy(self, orbitals, vec) -> float:
        _, h, _ = self.matrices(orbitals)
        a = self.amplitudes(vec)
        return float(a @ h.sum(axis=0) @ a)

    def hamiltonian(self, orbitals) -> np.ndarray:
        """Effective Hamiltonian over the mixing vector: ``Tᵀ H T``."""
        _, h, _ = self.matrices(orbitals)
        return self.T.T @ h.sum(axis=0) @ self.T

    def energy_and_gradient(self, orbitals, vec):
        ev, h, _ = self.matrices(orbitals, with_potentials=True)
        a = self.amplitudes(vec)
        htot = h.sum(axis=0)
        e = float(a @ htot @ a)
        gvec = 2.0 * self.T.T @ (htot @ a)
        gm = np.einsum("i,mij,j->m", a, self.model.ham.sum(axis=0), a)
        vals = ev.values
        idx = self.model.monomials
        fv = vals[idx]
        dvals = np.zeros_like(vals)
        for pos in range(3):
            others = np.prod(np.delete(fv, pos, axis=1), axis=1)
            np.add.at(dvals, idx[:, pos], gm * others)
        dvals[0] = 0.0
        gorb = ev.orbital_gradient(dvals)
        return e, gorb, gvec

    def report(self, orbitals, vec) -> EnergyReport:
        _, h, s = self.matrices(orbitals)
        a = self.amplitudes(vec)
        sec = self.model.sector_of
        sectors, weights = {}, {}
        htot = h.sum(axis=0)
        for n, name in enumerate(SECTORS):
            m = sec == n
            sectors[name] = float(a[m] @ htot[np.ix_(m, m)] @ a[m])
            weights[name] = float(a[m] @ s[np.ix_(m, m)] @ a[m])
        terms = {c: float(a @ h[n] @ a) for n, c in enumerate(CATEGORIES)}
        return EnergyReport(total=float(a @ htot @ a), sectors=sectors, terms=terms, weights=weights)


@lru_cache(maxsize=32)
def _functional(mode, symmetry, grid, params) -> EnergyFunctional:
    return EnergyFunctional(mode, symmetry, grid, params)


def functional_for(state: MCState, symmetry: str = "J1") -> EnergyFunctional:
    return _functional(state.mode if state.mode == "sp" else "sp+pd", symmetry, state.grid, state.params)


def total_energy(state: MCState, tol: float = 1e-8) -> EnergyReport:
    """Energy and decomposition of ``state`` (constraints checked to ``tol``)."""
    _check_state(state, tol)
    return functional_for(state).report(state.orbitals, state.coeffs)


def gradient_radial(state: MCState, slot: int | None = None):
    """L²(r²dr) gradient of the energy with respect to ``R_slot``.

    With ``slot=None`` returns all orbital gradients stacked.
    """
    _, g, _ = functional_for(state).energy_and_gradient(state.orbitals, state.coeffs)
    if slot is None:
        return g
    if not 0 <= slot < len(g):
        raise IndexError(f"slot {slot} out of range for {state.mode} state")
    return g[slot]


def gradient_mixing(state: MCState) -> np.ndarray:
    _, _, g = functional_for(state).energy_and_gradient(state.orbitals, state.coeffs)
    return g


# --------------------------------------------------------------------------
# sector view


@dataclass(frozen=True)
class SectorComponent:
    """One LS function ``term_kind(x, y)`` of the decomposition, core omitted.

    ``x``/``y`` are the (unnormalised) effective radial functions of the two
    open electrons.
    """

    term: str
    kind: str
    x: np.ndarray
    y: np.ndarray


def sector_decompose(state: MCState) -> dict[str, list[SectorComponent]]:
    """Group the state into its ¹P, ³P and ³D parts with effective radials."""
    R = state.orbitals
    c = state.coeffs
    out: dict[str, list[SectorComponent]] = {s: [] for s in SECTORS}
    a, b = c[:2]
    r3 = sqrt(3.0)
    out["3P"].append(SectorComponent("3P", "sp", R[1], (a * sqrt(2) * R[2] + b * R[3]) / r3))
    out["1P"].append(SectorComponent("1P", "sp", R[1], (-a * R[2] + b * sqrt(2) * R[3]) / r3))
    if state.mode != "sp":
        cc, d, e = c[2:]
        k = sqrt(30.0)
        out["3P"] += [
            SectorComponent("3P", "pd", (-cc * sqrt(5) * R[2] + 4 * d * R[3]) / k, R[4]),
            SectorComponent("3P", "pd", 3 * e * R[3] / k, R[5]),
        ]
        out["1P"] += [
            SectorComponent("1P", "pd", (cc * sqrt(10) * R[2] - d * sqrt(2) * R[3]) / k, R[4]),
            SectorComponent("1P", "pd", 3 * e * sqrt(2) * R[3] / k, R[5]),
        ]
        out["3D"] += [
            SectorComponent("3D", "pd", (cc * sqrt(15) * R[2] + 2 * r3 * d * R[3]) / k, R[4]),
            SectorComponent("3D", "pd", -e * r3 * R[3] / k, R[5]),
        ]
    return out


def sector_weights(parts: dict[str, list[SectorComponent]], grid: RadialGrid) -> dict[str, float]:
    """Squared norms of each sector (sp and pd pieces are mutually orthogonal)."""
    w = grid.r2w
    out = {}
    for name, comps in parts.items():
        tot = 0.0
        for p in comps:
            for q in comps:
                if p.kind == q.kind:
                    tot += float(w @ (p.x * q.x)) * float(w @ (p.y * q.y))
        out[name] = tot
    return out


# --------------------------------------------------------------------------
# non-stationarity function of the ³P₁ state


def F_function(R0, R1, R2, R4, a: float, c: float, grid: RadialGrid, Z: float = 4.0,
               pd_exchange: bool = True) -> np.ndarray:
    """Density ``F`` with ``⟨HΨ, ³P_sp(R0, R1, δR)⟩ = ∫ F δR dr``.

    ``Ψ = a ³P_sp(R0,R1,R2) + c ³P_pd(R0,R2,R4)``; the pairing uses the plain
    ``dr`` measure.  The sp–pd coupling contributes a k=1 direct term and a
    k=2 exchange term; ``pd_exchange=False`` drops the latter.
    """
    r, w = grid.r, grid.w
    r2 = r * r
    R0, R1, R2, R4 = (grid.check(x) for x in (R0, R1, R2, R4))
    idx, wts = grid.interval_tables
    rho = np.array([(2 * R0**2 + R1**2) * r2, R0 * R2 * r2, R1 * R2 * r2, R1 * R2 * r2, R1 * R4 * r2])
    y = kernels.yk_sym_batch(rho, np.array([0, 1, 1, 1, 2], dtype=np.intp), r, w, idx, wts)
    # -(r² R2')'/2 in the discrete weak form matching the energy's kinetic term
    one = 0.5 * (grid.kinetic_form @ R2) / w + R2 - Z * r * R2
    direct = y[0] * R2 * r2
    exch = (y[1] * R0 + y[2] * R1) * r2 / 3.0
    cross = sqrt(2.0) * y[3] * R4 * r2 / 3.0
    if pd_exchange:
        cross = cross - sqrt(2.0) / 5.0 * y[4] * R2 * r2
    return a * (one + direct - exch) - c * cross
