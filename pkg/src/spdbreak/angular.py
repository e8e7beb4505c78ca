"""Exact configuration state functions for four electrons in s, p, d shells.

Spin-orbitals carry quantum numbers ``(ℓ, m, σ)`` and a *radial slot*, an
index into the radial functions ``R0 … R5``.  Determinants are stored in a
canonical order with their permutation sign folded into the coefficient, and
every coefficient is an exact sympy number (rationals times square roots), so
Casimir eigenvalue checks are identities rather than tolerances.

Distinct slot labels are treated as orthonormal radial functions.  Equal
radial functions are expressed by merging slots with :func:`merge_slots`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import sympy as sp

UP, DOWN = 1, -1
_SPIN_NAME = {UP: "↑", DOWN: "↓"}
_ELL_NAME = {0: "s", 1: "p", 2: "d"}


class AngularError(ValueError):
    """Unknown label or invalid quantum numbers."""


@dataclass(frozen=True, order=True)
class SpinOrbital:
    """One-electron function ``R_slot(r) Y_ℓ^m σ``; ordering is (slot, ℓ, m, σ)."""

    slot: int
    ell: int
    m: int
    spin: int

    def __post_init__(self) -> None:
        if self.ell not in (0, 1, 2) or abs(self.m) > self.ell or self.spin not in (UP, DOWN):
            raise AngularError(f"invalid spin-orbital {self!r}")

    def label(self) -> str:
        m = "" if self.ell == 0 else str(self.m)
        return f"{_ELL_NAME[self.ell]}{m}{_SPIN_NAME[self.spin]}(R{self.slot})"


Det = tuple[SpinOrbital, ...]


def canonical(orbitals: Iterable[SpinOrbital]) -> tuple[int, Det] | None:
    """Sort spin-orbitals into canonical order.

    Returns ``(sign, det)`` with the permutation parity, or ``None`` when an
    orbital is repeated (the wedge product vanishes).
    """
    orbs = list(orbitals)
    if len(set(orbs)) != len(orbs):
        return None
    sign = 1
    # insertion sort keeps track of the parity
    for i in range(1, len(orbs)):
        j = i
        while j > 0 and orbs[j - 1] > orbs[j]:
            orbs[j - 1], orbs[j] = orbs[j], orbs[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(orbs)


@dataclass(frozen=True)
class SlaterDeterminant:
    """Canonically ordered wedge product ``f1 ∧ … ∧ fN`` with ``(N!)^{-1/2} det``."""

    orbitals: Det

    @classmethod
    def build(cls, orbitals: Iterable[SpinOrbital]) -> tuple[int, "SlaterDeterminant"]:
        res = canonical(orbitals)
        if res is None:
            raise AngularError("repeated spin-orbital in determinant (Pauli)")
        sign, det = res
        return sign, cls(det)


@dataclass(frozen=True)
class CSF:
    """Linear combination of canonical determinants with exact coefficients."""

    terms: Mapping[Det, sp.Expr] = field(default_factory=dict)
    label: str | None = None

    @classmethod
    def from_terms(cls, pairs: Iterable[tuple[object, Iterable[SpinOrbital]]], label=None) -> "CSF":
        acc: dict[Det, sp.Expr] = {}
        for coef, orbs in pairs:
            res = canonical(orbs)
            if res is None:
                continue
            sign, det = res
            acc[det] = acc.get(det, sp.Integer(0)) + sign * sp.sympify(coef)
        return cls(_clean(acc), label)

    def __add__(self, other: "CSF") -> "CSF":
        acc = dict(self.terms)
        for det, c in other.terms.items():
            acc[det] = acc.get(det, sp.Integer(0)) + c
        return CSF(_clean(acc))

    def __sub__(self, other: "CSF") -> "CSF":
        return self + other.scale(-1)

    def scale(self, factor) -> "CSF":
        f = sp.sympify(factor)
        return CSF(_clean({d: c * f for d, c in self.terms.items()}), self.label)

    def __rmul__(self, factor) -> "CSF":
        return self.scale(factor)

    def with_label(self, label: str) -> "CSF":
        return CSF(self.terms, label)

    def inner(self, other: "CSF") -> sp.Expr:
        """Exact overlap, treating distinct slots as orthonormal radial functions."""
        total = sp.Integer(0)
        for det, c in self.terms.items():
            if det in other.terms:
                total += c * other.terms[det]
        return sp.nsimplify(sp.expand(total))

    def norm2(self) -> sp.Expr:
        return self.inner(self)

    def is_zero(self) -> bool:
        return not self.terms

    def equals(self, other: "CSF") -> bool:
        return (self - other).is_zero()

    def slots(self) -> set[int]:
        return {o.slot for det in self.terms for o in det}

    def to_text(self) -> str:
        """Human-readable listing, one signed term per line."""
        lines = [f"# CSF {self.label or ''}".rstrip()]
        for det in sorted(self.terms):
            orbs = " ∧ ".join(o.label() for o in det)
            lines.append(f"{sp.sstr(self.terms[det])} : {orbs}")
        return "\n".join(lines)


def _clean(acc: dict) -> dict:
    out = {}
    for det, c in acc.items():
        c = sp.expand(c)
        if c != 0:
            out[det] = c
    return dict(sorted(out.items()))


# --------------------------------------------------------------------------
# one-body angular momentum operators


def _one_body(state: CSF, act) -> CSF:
    acc: list[tuple[sp.Expr, list[SpinOrbital]]] = []
    for det, c in state.terms.items():
        for i, orb in enumerate(det):
            res = act(orb)
            if res is None:
                continue
            f, new = res
            orbs = list(det)
            orbs[i] = new
            acc.append((c * f, orbs))
    return CSF.from_terms(acc)


def _l_minus(o: SpinOrbital):
    if o.m == -o.ell:
        return None
    return sp.sqrt(o.ell * (o.ell + 1) - o.m * (o.m - 1)), SpinOrbital(o.slot, o.ell, o.m - 1, o.spin)


def _l_plus(o: SpinOrbital):
    if o.m == o.ell:
        return None
    return sp.sqrt(o.ell * (o.ell + 1) - o.m * (o.m + 1)), SpinOrbital(o.slot, o.ell, o.m + 1, o.spin)


def _s_minus(o: SpinOrbital):
    if o.spin == DOWN:
        return None
    return sp.Integer(1), SpinOrbital(o.slot, o.ell, o.m, DOWN)


def _s_plus(o: SpinOrbital):
    if o.spin == UP:
        return None
    return sp.Integer(1), SpinOrbital(o.slot, o.ell, o.m, UP)


def _diag(state: CSF, value) -> CSF:
    acc = {}
    for det, c in state.terms.items():
        acc[det] = c * sum((value(o) for o in det), sp.Integer(0))
    return CSF(_clean(acc))


LADDERS = {"L-": _l_minus, "L+": _l_plus, "S-": _s_minus, "S+": _s_plus}


def apply_ladder(op: str, state: CSF) -> CSF:
    """Apply ``L⁻, L⁺, S⁻, S⁺, J⁻`` or ``J⁺`` (summed over all electrons)."""
    if op in LADDERS:
        return _one_body(state, LADDERS[op])
    if op == "J-":
        return apply_ladder("L-", state) + apply_ladder("S-", state)
    if op == "J+":
        return apply_ladder("L+", state) + apply_ladder("S+", state)
    raise AngularError(f"unknown ladder operator {op!r}")


def apply_operator(op: str, state: CSF) -> CSF:
    """Apply ``Lz, Sz, Jz, L2, S2`` or ``J2`` exactly."""
    half = sp.Rational(1, 2)
    if op == "Lz":
        return _diag(state, lambda o: sp.Integer(o.m))
    if op == "Sz":
        return _diag(state, lambda o: half * o.spin)
    if op == "Jz":
        return _diag(state, lambda o: sp.Integer(o.m) + half * o.spin)
    if op in ("L2", "S2", "J2"):
        x = op[0]
        z = apply_operator(f"{x}z", state)
        # X² = X⁻X⁺ + Xz² + Xz
        return apply_ladder(f"{x}-", apply_ladder(f"{x}+", state)) + apply_operator(f"{x}z", z) + z
    raise AngularError(f"unknown operator {op!r}")


def measure_casimir(state: CSF, op: str):
    """Exact eigenvalue of ``op`` on ``state``, or the string ``"mixed"``."""
    if state.is_zero():
        raise AngularError("zero state has no eigenvalue")
    image = apply_operator(op, state)
    lam = sp.nsimplify(sp.expand(state.inner(image) / state.norm2()))
    if (image - state.scale(lam)).is_zero():
        return lam
    return "mixed"


# --------------------------------------------------------------------------
# the configuration state functions


def _s(slot, spin):
    return SpinOrbital(slot, 0, 0, spin)


def _p(slot, m, spin):
    return SpinOrbital(slot, 1, m, spin)


def _d(slot, m, spin):
    return SpinOrbital(slot, 2, m, spin)


def _with_core(core: int, pairs):
    closed = [_s(core, UP), _s(core, DOWN)]
    return [(c, closed + list(orbs)) for c, orbs in pairs]


HIGHEST_WEIGHT_LABELS = ("3P2_sp", "3P2_pd", "3D3_pd", "1P_sp", "1P_pd")
COUPLED_LABELS = ("3P1_sp", "3P1_pd", "3D1_pd")

SP_SLOTS = (0, 1, 2)
PD_SLOTS = (0, 2, 4)


def build_highest_weight(label: str, slots: tuple[int, int, int] | None = None) -> CSF:
    """Exact CSF for a highest-weight (or directly given J_z=1 singlet) state.

    ``slots`` are (core s, first open orbital, second open orbital); for sp
    labels the open orbitals are (s, p), for pd labels (p, d).
    """
    r = sp.sqrt
    if label == "3P2_sp":
        c, a, b = slots or SP_SLOTS
        pairs = [(1, [_s(a, UP), _p(b, 1, UP)])]
    elif label == "1P_sp":
        c, a, b = slots or SP_SLOTS
        h = 1 / r(2)
        pairs = [(h, [_s(a, UP), _p(b, 1, DOWN)]), (-h, [_s(a, DOWN), _p(b, 1, UP)])]
    elif label == "3P2_pd":
        c, a, b = slots or PD_SLOTS
        pairs = [
            (r(6) / r(10), [_p(a, -1, UP), _d(b, 2, UP)]),
            (-r(3) / r(10), [_p(a, 0, UP), _d(b, 1, UP)]),
            (1 / r(10), [_p(a, 1, UP), _d(b, 0, UP)]),
        ]
    elif label == "3D3_pd":
        c, a, b = slots or PD_SLOTS
        pairs = [
            (r(2) / r(3), [_p(a, 0, UP), _d(b, 2, UP)]),
            (-1 / r(3), [_p(a, 1, UP), _d(b, 1, UP)]),
        ]
    elif label == "1P_pd":
        c, a, b = slots or PD_SLOTS
        f = 1 / (2 * r(5))
        pairs = [
            (f * r(6), [_p(a, -1, UP), _d(b, 2, DOWN)]),
            (-f * r(3), [_p(a, 0, UP), _d(b, 1, DOWN)]),
            (f, [_p(a, 1, UP), _d(b, 0, DOWN)]),
            (-f * r(6), [_p(a, -1, DOWN), _d(b, 2, UP)]),
            (f * r(3), [_p(a, 0, DOWN), _d(b, 1, UP)]),
            (-f, [_p(a, 1, DOWN), _d(b, 0, UP)]),
        ]
    else:
        raise AngularError(f"unknown highest-weight label {label!r}")
    return CSF.from_terms(_with_core(c, pairs), label=label)


def build_coupled(label: str, slots: tuple[int, int, int] | None = None) -> CSF:
    """J=1, J_z=1 triplets obtained from the highest-weight states by lowering."""
    if label in ("3P1_sp", "3P1_pd"):
        top = build_highest_weight("3P2_" + label[-2:], slots)
        state = (apply_ladder("L-", top) - apply_ladder("S-", top)).scale(sp.Rational(1, 2))
    elif label == "3D1_pd":
        top = build_highest_weight("3D3_pd", slots)
        lm = apply_ladder("L-", top)
        state = (
            apply_ladder("L-", lm)
            - apply_ladder("L-", apply_ladder("S-", top)).scale(3)
            + apply_ladder("S-", apply_ladder("S-", top)).scale(6)
        ).scale(1 / (4 * sp.sqrt(15)))  # unit norm; the combination has norm² 240
    else:
        raise AngularError(f"unknown coupled label {label!r}")
    return state.with_label(label)


def ls_csf(term: str, kind: str, slots: tuple[int, int, int]) -> CSF:
    """LS-coupled J=1 CSF: ``term`` in {1P, 3P, 3D}, ``kind`` in {sp, pd}."""
    if term == "1P":
        return build_highest_weight(f"1P_{kind}", slots).with_label(f"1P_{kind}")
    if term == "3P":
        return build_coupled(f"3P1_{kind}", slots).with_label(f"3P_{kind}")
    if term == "3D" and kind == "pd":
        return build_coupled("3D1_pd", slots).with_label("3D_pd")
    raise AngularError(f"no {term} state for {kind} configurations")


# jj-coupled configuration -> (LS term, exact coefficient), with default slots
JJ_RELATIONS: dict[str, tuple[str, tuple[int, int, int], tuple[tuple[str, sp.Expr], ...]]] = {
    "s12p12": ("sp", (0, 1, 2), (("1P", -1 / sp.sqrt(3)), ("3P", sp.sqrt(2) / sp.sqrt(3)))),
    "s12p32": ("sp", (0, 1, 3), (("1P", sp.sqrt(2) / sp.sqrt(3)), ("3P", 1 / sp.sqrt(3)))),
    "p12d32": (
        "pd",
        (0, 2, 4),
        (("1P", 1 / sp.sqrt(3)), ("3P", -1 / sp.sqrt(6)), ("3D", 1 / sp.sqrt(2))),
    ),
    "p32d32": (
        "pd",
        (0, 3, 4),
        (("1P", -1 / sp.sqrt(15)), ("3P", 2 * sp.sqrt(2) / sp.sqrt(15)), ("3D", sp.sqrt(2) / sp.sqrt(5))),
    ),
    "p32d52": (
        "pd",
        (0, 3, 5),
        (("1P", sp.sqrt(3) / sp.sqrt(5)), ("3P", sp.sqrt(3) / sp.sqrt(10)), ("3D", -1 / sp.sqrt(10))),
    ),
}
JJ_ORDER = ("s12p12", "s12p32", "p12d32", "p32d32", "p32d52")


def build_jj_config(label: str, slots: tuple[int, int, int] | None = None) -> CSF:
    """jj-labelled configuration as its exact combination of LS CSFs."""
    if label not in JJ_RELATIONS:
        raise AngularError(f"unknown jj configuration {label!r}")
    kind, default, parts = JJ_RELATIONS[label]
    slots = slots or default
    state = CSF()
    for term, coef in parts:
        state = state + ls_csf(term, kind, slots).scale(coef)
    return state.with_label(label)


@dataclass(frozen=True)
class CouplingMatrices:
    """Condon–Shortley jj→LS matrices exactly as printed.

    ``U_sp`` has rows (³P, ¹P) and columns (a, b); ``U_pd`` has rows indexed
    by the jj coefficients (e, d, c) and columns (³D, ³P, ¹P).
    """

    U_sp: sp.Matrix
    U_pd: sp.Matrix


def coupling_matrices() -> CouplingMatrices:
    r = sp.sqrt
    u_sp = sp.Matrix([[r(2), 1], [-1, r(2)]]) / r(3)
    u_pd = sp.Matrix(
        [[-r(3), 3, 3 * r(2)], [2 * r(3), 4, -r(2)], [r(15), -r(5), r(10)]]
    ) / r(30)
    return CouplingMatrices(u_sp, u_pd)


def merge_slots(state: CSF, mapping: Mapping[int, tuple[int, int]]) -> CSF:
    """Substitute ``R_old = sign · R_new`` for each ``old: (new, sign)`` entry."""
    acc = []
    for det, c in state.terms.items():
        f = c
        orbs = []
        for o in det:
            if o.slot in mapping:
                new, sign = mapping[o.slot]
                f = f * sign
                o = SpinOrbital(new, o.ell, o.m, o.spin)
            orbs.append(o)
        acc.append((f, orbs))
    return CSF.from_terms(acc, state.label)


def j1_state(coeffs, eq23: int | None = None, eq45: int | None = None) -> CSF:
    """Expanded wavefunction ``Σ coef_i Φ_i`` over the jj configurations.

    ``eq23``/``eq45`` give the sign ε with ``R3 = ε R2`` (``R5 = ε' R4``);
    ``None`` keeps the slots independent.
    """
    coeffs = [sp.sympify(c) for c in coeffs]
    state = CSF()
    for coef, label in zip(coeffs, JJ_ORDER):
        if coef != 0:
            state = state + build_jj_config(label).scale(coef)
    mapping = {}
    if eq23 is not None:
        mapping[3] = (2, eq23)
    if eq45 is not None:
        mapping[5] = (4, eq45)
    return merge_slots(state, mapping) if mapping else state


# --------------------------------------------------------------------------
# symmetry classification of J=1 states


@dataclass(frozen=True)
class SymmetryClass:
    kind: str  # "1P1", "3P1", "3D1" or "mixed"
    signs: tuple[int, ...] = ()

    def __str__(self) -> str:
        if self.kind == "mixed":
            return "mixed"
        return self.kind + "(" + ",".join("+" if s > 0 else "-" for s in self.signs) + ")"


def classify_symmetry(
    coeffs,
    eq23: int | None = None,
    eq45: int | None = None,
    tol: float = 1e-6,
) -> SymmetryClass:
    """Symmetry class of a J=1 state from its mixing coefficients.

    ``coeffs`` is ``(a, b)`` or ``(a, b, c, d, e)``; ``eq23``/``eq45`` are the
    signs ε, ε' of detected orbital equalities ``R3 = εR2``, ``R5 = ε'R4``
    (``None`` when the orbitals differ).
    """
    c = [float(x) for x in coeffs] + [0.0] * (5 - len(coeffs))
    a, b, cc, d, e = c
    s2, s5 = 2**0.5, 5**0.5
    near = lambda x: abs(x) < tol  # noqa: E731
    if eq23 is None:
        return SymmetryClass("mixed")
    eps = eq23
    pd_zero = near(cc) and near(d) and near(e)
    if not pd_zero and eq45 is None:
        return SymmetryClass("mixed")
    epsp = eq45 if eq45 is not None else 1
    if near(a - eps * s2 * b) and near(3 * d - 4 * epsp * e) and near(4 * cc + eps * s5 * d):
        return SymmetryClass("3P1", (eps, epsp))
    if near(a * s2 + eps * b) and near(3 * d + epsp * e) and near(cc + eps * s5 * d):
        return SymmetryClass("1P1", (eps, epsp))
    if near(a) and near(b) and not pd_zero:
        epp = 1 if cc > 0 else -1
        if (
            near(cc - epp / s2)
            and near(d - (0.4**0.5) * eps * epp)
            and near(e + (0.1**0.5) * eps * epsp * epp)
        ):
            return SymmetryClass("3D1", (eps, epsp, epp))
    return SymmetryClass("mixed")
