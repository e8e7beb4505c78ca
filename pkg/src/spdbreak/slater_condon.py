"""Brute-force energy oracle: Slater–Condon rules over expanded determinants.

This module deliberately shares nothing with the closed-form energy in
:mod:`spdbreak.energy` beyond the radial primitives (one-body integrals and
:func:`slater_Rk`).  States are expanded into four-electron determinants over
an orthonormal set of radial functions and every determinant pair is
evaluated with the orthonormal Slater–Condon rules.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import sqrt

import numpy as np
import sympy as sp
from sympy.physics.wigner import wigner_3j

from . import kernels
from .angular import CSF, Det, SpinOrbital
from .grid import RadialGrid

SLOT_ELL = {0: 0, 1: 0, 2: 1, 3: 1, 4: 2, 5: 2}


class OracleError(ValueError):
    """Orbital set violates the orthonormality the Slater–Condon rules assume."""


@dataclass(frozen=True)
class HamiltonianParams:
    """``H = Σ(-Δ/2 - Z/|x|) + λ Σ 1/|x_i - x_j|``.

    ``interaction`` is λ; it is 1 for the physical atom and 0 gives the
    non-interacting reference used in synthetic checks.
    """

    Z: float = 4.0
    interaction: float = 1.0

    def __post_init__(self) -> None:
        if not self.Z > 0:
            raise ValueError(f"nuclear charge must be positive, got {self.Z}")
        if not self.interaction >= 0:
            raise ValueError(f"interaction scale must be non-negative, got {self.interaction}")


@dataclass(frozen=True)
class SlaterIntegralKey:
    """``R^k`` with ``R_a R_c`` on the first variable and ``R_b R_d`` on the second."""

    k: int
    a: int
    b: int
    c: int
    d: int

    def canonical(self) -> "SlaterIntegralKey":
        p1 = tuple(sorted((self.a, self.c)))
        p2 = tuple(sorted((self.b, self.d)))
        (a, c), (b, d) = sorted((p1, p2))
        return SlaterIntegralKey(self.k, a, b, c, d)


# --------------------------------------------------------------------------
# radial primitives


def slater_Rk(Ra, Rb, Rc, Rd, k: int, grid: RadialGrid) -> float:
    """``∬ Ra(s)Rc(s) Rb(t)Rd(t) s²t² min(s,t)^k / max(s,t)^{k+1} ds dt``.

    Evaluated in O(n) through cumulative inner/outer integrals (the Hartree
    screening function ``Y_k``), symmetrised so the discrete form is exactly
    symmetric under exchange of the two variables.
    """
    r2 = grid.r**2
    rho = grid.check(Ra) * grid.check(Rc) * r2
    sig = grid.check(Rb) * grid.check(Rd) * r2
    idx, wts = grid.interval_tables
    y = kernels.yk_sym_batch(rho[None, :], [k], grid.r, grid.w, idx, wts)[0]
    return float(grid.w @ (sig * y))


def one_body_radial(Ra, Rb, ell: int, Z: float, grid: RadialGrid) -> float:
    """``½∫(r² Ra' Rb' + ℓ(ℓ+1) Ra Rb) dr - Z ∫ Ra Rb r dr``."""
    Ra = grid.check(Ra)
    Rb = grid.check(Rb)
    kin = 0.5 * Ra @ grid.kinetic_form @ Rb + 0.5 * ell * (ell + 1) * grid.w @ (Ra * Rb)
    return float(kin - Z * grid.w @ (Ra * Rb * grid.r))


# --------------------------------------------------------------------------
# angular factors


@lru_cache(maxsize=None)
def gaunt_ck(l1: int, m1: int, l2: int, m2: int, k: int) -> sp.Expr:
    """``c^k(ℓ1 m1; ℓ2 m2) = √(4π/(2k+1)) ∫ Y*_{ℓ1 m1} Y_{k, m1-m2} Y_{ℓ2 m2} dΩ``.

    Condon–Shortley phases; exact.
    """
    for ell, m in ((l1, m1), (l2, m2)):
        if ell not in (0, 1, 2) or abs(m) > ell:
            raise ValueError(f"invalid (ℓ, m) = ({ell}, {m})")
    if not 0 <= k <= 4:
        raise ValueError(f"multipole order {k} outside 0..4")
    q = m1 - m2
    if abs(q) > k or (l1 + l2 + k) % 2 or k > l1 + l2 or k < abs(l1 - l2):
        return sp.Integer(0)
    val = (
        (-1) ** m1
        * sp.sqrt((2 * l1 + 1) * (2 * l2 + 1))
        * wigner_3j(l1, k, l2, 0, 0, 0)
        * wigner_3j(l1, k, l2, -m1, q, m2)
    )
    return sp.nsimplify(sp.simplify(val))


@lru_cache(maxsize=None)
def _gaunt_f(l1, m1, l2, m2, k) -> float:
    return float(gaunt_ck(l1, m1, l2, m2, k))


def two_electron_terms(i: SpinOrbital, j: SpinOrbital, k_: SpinOrbital, l: SpinOrbital):
    """Angular expansion of ``⟨ij|kl⟩ = ∫∫ i*(1) j*(2) |x1-x2|⁻¹ k(1) l(2)``.

    Yields ``(coefficient, SlaterIntegralKey)`` pairs; the radial product
    ``R_i R_k`` sits on the first variable.
    """
    if i.spin != k_.spin or j.spin != l.spin:
        return
    if i.m - k_.m != l.m - j.m:
        return
    for kk in range(0, 5):
        c1 = _gaunt_f(k_.ell, k_.m, i.ell, i.m, kk)
        if c1 == 0.0:
            continue
        c2 = _gaunt_f(j.ell, j.m, l.ell, l.m, kk)
        if c2 == 0.0:
            continue
        yield c1 * c2, SlaterIntegralKey(kk, i.slot, j.slot, k_.slot, l.slot)


# --------------------------------------------------------------------------
# Slater–Condon rules


def _align(d1: Det, d2: Det):
    """Permutation sign and differing orbitals after maximum-coincidence alignment."""
    common = [o for o in d1 if o in d2]
    only1 = [o for o in d1 if o not in d2]
    only2 = [o for o in d2 if o not in d1]
    if len(only1) > 2:
        return 0, None, None, None
    # rearrange d2 so shared orbitals sit where they sit in d1
    target = []
    it = iter(only2)
    for o in d1:
        target.append(o if o in d2 else next(it))
    perm = [d2.index(o) for o in target]
    sign = 1
    seen = [False] * len(perm)
    for s in range(len(perm)):
        if seen[s]:
            continue
        j, length = s, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign, common, only1, only2


class _Integrals:
    """Lazily evaluated radial integrals over a fixed orthonormal orbital set."""

    def __init__(self, orbitals, params, grid):
        self.orb = orbitals
        self.Z = params.Z
        self.lam = params.interaction
        self.grid = grid
        self._h: dict = {}
        self._r: dict = {}

    def h(self, a: SpinOrbital, b: SpinOrbital) -> float:
        if (a.ell, a.m, a.spin) != (b.ell, b.m, b.spin):
            return 0.0
        key = (a.ell, *sorted((a.slot, b.slot)))
        if key not in self._h:
            self._h[key] = one_body_radial(self.orb[a.slot], self.orb[b.slot], a.ell, self.Z, self.grid)
        return self._h[key]

    def g(self, i, j, k, l) -> float:
        total = 0.0
        for coef, key in two_electron_terms(i, j, k, l):
            ck = key.canonical()
            if ck not in self._r:
                o = self.orb
                self._r[ck] = slater_Rk(o[ck.a], o[ck.b], o[ck.c], o[ck.d], ck.k, self.grid)
            total += coef * self._r[ck]
        return self.lam * total

    def antisym(self, i, j, k, l) -> float:
        return self.g(i, j, k, l) - self.g(i, j, l, k)


def determinant_element(d1: Det, d2: Det, ints: _Integrals) -> float:
    """``⟨D1, H D2⟩`` for determinants over orthonormal spin-orbitals."""
    sign, common, only1, only2 = _align(d1, d2)
    if sign == 0:
        return 0.0
    if not only1:
        e = sum(ints.h(a, a) for a in d1)
        for x in range(len(d1)):
            for y in range(x + 1, len(d1)):
                e += ints.antisym(d1[x], d1[y], d1[x], d1[y])
        return e
    if len(only1) == 1:
        a, b = only1[0], only2[0]
        e = ints.h(a, b)
        for c in common:
            e += ints.antisym(a, c, b, c)
        return sign * e
    a1, a2 = only1
    b1, b2 = only2
    return sign * ints.antisym(a1, a2, b1, b2)


def _float_terms(state) -> dict[Det, float]:
    if isinstance(state, CSF):
        return {d: float(c) for d, c in state.terms.items()}
    return dict(state)


def check_orthonormal(orbitals, grid: RadialGrid, slots, tol: float = 1e-8) -> None:
    """Raise :class:`OracleError` when same-ℓ radial slots are not orthonormal."""
    slots = sorted(slots)
    for x in slots:
        for y in slots:
            if y < x or SLOT_ELL[x] != SLOT_ELL[y]:
                continue
            ov = float(grid.r2w @ (orbitals[x] * orbitals[y]))
            target = 1.0 if x == y else 0.0
            if abs(ov - target) > tol:
                raise OracleError(f"overlap <R{x}, R{y}> = {ov:.3e}, expected {target}")


def matrix_element(bra, ket, orbitals, params: HamiltonianParams, grid: RadialGrid,
                   tol: float = 1e-8) -> float:
    """``⟨bra, H ket⟩`` by pairwise Slater–Condon rules.

    ``bra``/``ket`` are :class:`~spdbreak.angular.CSF` objects or
    ``{determinant: float}`` mappings; ``orbitals`` maps each radial slot to
    its grid samples and must be orthonormal within each ℓ.
    """
    b = _float_terms(bra)
    k = _float_terms(ket)
    used = {o.slot for d in list(b) + list(k) for o in d}
    check_orthonormal(orbitals, grid, used, tol)
    ints = _Integrals(orbitals, params, grid)
    total = 0.0
    for d1, c1 in b.items():
        for d2, c2 in k.items():
            total += c1 * c2 * determinant_element(d1, d2, ints)
    return total


def overlap(bra, ket) -> float:
    b = _float_terms(bra)
    k = _float_terms(ket)
    return sum(c * k[d] for d, c in b.items() if d in k)


# --------------------------------------------------------------------------
# expansion of general states onto orthonormal slots


def substitute(state, mapping) -> dict[Det, float]:
    """Multilinear substitution ``slot -> Σ coef · new_slot`` on a float state."""
    from .angular import canonical

    out: dict[Det, float] = {}
    for det, c in _float_terms(state).items():
        expansions = []
        for o in det:
            if o.slot in mapping:
                expansions.append(
                    [(f, SpinOrbital(s, o.ell, o.m, o.spin)) for s, f in mapping[o.slot]]
                )
            else:
                expansions.append([(1.0, o)])
        _accumulate(out, c, expansions, canonical)
    return {d: v for d, v in out.items() if v != 0.0}


def _accumulate(out, c, expansions, canonical, prefix=()):
    if not expansions:
        res = canonical(prefix)
        if res is not None:
            sign, det = res
            out[det] = out.get(det, 0.0) + sign * c
        return
    for f, o in expansions[0]:
        _accumulate(out, c * f, expansions[1:], canonical, prefix + (o,))


def orthonormal_expansion(state, orbitals, grid: RadialGrid):
    """Rewrite a state whose p (d) slots 2,3 (4,5) overlap on orthonormal slots.

    ``R3 = α R2 + β Q3`` and ``R5 = γ R4 + δ Q5`` with ``Q ⊥`` the partner;
    slots 3 and 5 of the result carry ``Q3`` and ``Q5``.
    """
    orbitals = {s: np.asarray(v, float) for s, v in orbitals.items()}
    new = dict(orbitals)
    mapping = {}
    for lo, hi in ((2, 3), (4, 5)):
        if lo in orbitals and hi in orbitals:
            rl, rh = orbitals[lo], orbitals[hi]
            nl = float(grid.r2w @ (rl * rl))
            alpha = float(grid.r2w @ (rl * rh)) / nl
            q = rh - alpha * rl
            beta = sqrt(max(float(grid.r2w @ (q * q)), 0.0))
            if beta < 1e-14:
                mapping[hi] = [(lo, alpha)]
                new[hi] = np.zeros_like(rh)
            else:
                mapping[hi] = [(lo, alpha), (hi, beta)]
                new[hi] = q / beta
    return substitute(state, mapping), new
