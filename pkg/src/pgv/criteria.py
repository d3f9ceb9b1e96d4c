"""Criteria for abelian and elementary abelian central automorphism groups.

All inputs are structural data computed by :mod:`pgv.structure`.  Each check
returns a record carrying the quantities it was decided on, so a verdict can
be audited without recomputation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct

from . import collect, structure
from .homs import PreconditionError
from .linalg import howell_form
from .presentation import PcPresentation
from .structure import (
    AbelianSectionType,
    CentralSubgroup,
    Relation,
    SubgroupAboveDerived,
    compare_subgroups,
    derived_module,
    section_type,
)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise PreconditionError(message)


def _require_pure(P: PcPresentation) -> None:
    _require(structure.is_purely_nonabelian(P), "group has a non-trivial abelian direct factor")


def _image_module(P: PcPresentation, elements) -> tuple:
    """Howell rows of the subgroup of ``G/[G,G]`` generated by ``elements`` (with ``[G,G]``)."""
    return howell_form(list(elements) + list(derived_module(P)), P.p, P.max_exponent, P.d)


def _quotient_order_log(P: PcPresentation, g) -> int:
    """``log_p`` of the order of ``g [G,G]``."""
    t = 0
    gamma = structure.above_derived(P, [])
    while not gamma.contains(g):
        g = collect.power(P, g, P.p)
        t += 1
    return t


# ---------------------------------------------------------------------------
# abelian Autcent for odd p


@dataclass(frozen=True)
class AdneyYenData:
    a: int
    b: int
    c: int
    d: int
    R: CentralSubgroup
    K: SubgroupAboveDerived
    r_equals_k: bool
    cyclic_condition: bool
    abelian: bool
    cyclic_witness: tuple[int, ...] | None = None
    """Exponent vector ``y`` with ``R/[G,G]`` generated by the image of ``y^(p^b)``."""


def adney_yen(P: PcPresentation) -> AdneyYenData:
    """Decide whether ``Autcent(G)`` is abelian (odd ``p``, no abelian direct factor).

    With ``p^a, p^b, p^c`` the exponents of ``Z``, ``[G,G]`` and ``G/[G,G]`` and
    ``d = min(a, c)``: abelian iff ``Omega_d(Z) = G^(p^b)[G,G]`` and either
    ``d = b`` or ``Omega_d(Z)/[G,G]`` is generated by ``y^(p^b)`` for a ``y``
    whose image has maximal order.
    """
    _require(P.p % 2 == 1, "criterion stated for odd p")
    _require(not P.is_abelian, "group is abelian")
    _require_pure(P)
    Z = structure.center(P)
    a = Z.type.log_exponent
    b = structure.derived_subgroup(P).type.log_exponent
    c = section_type(P, "G/γ2").log_exponent
    d = min(a, c)
    R = structure.omega_of_central(Z, d)
    K = structure.agemo_above_derived(P, b)
    r_equals_k = compare_subgroups(R, K) is Relation.EQUAL
    cyclic, witness = False, None
    if d > b:
        target = _image_module(P, R.basis)
        rtype = AbelianSectionType.of(P.p, structure._quotient_exponents(P, target, derived_module(P)))
        if rtype.is_cyclic:
            for y in _max_order_candidates(P, c):
                if _image_module(P, [collect.power(P, y, P.p**b)]) == target:
                    cyclic, witness = True, y
                    break
    abelian = r_equals_k and (d == b or cyclic)
    return AdneyYenData(a, b, c, d, R, K, r_equals_k, cyclic, abelian, witness)


def _max_order_candidates(P: PcPresentation, c: int):
    """Generators of maximal-order cyclic factors of ``G/[G,G]``.

    Both the pc generators of that order and the generators of a Smith
    decomposition are tried, so the answer does not depend on input order.
    """
    seen = set()
    for i in range(P.d):
        g = P.generator(i)
        if _quotient_order_log(P, g) == c and g not in seen:
            seen.add(g)
            yield g
    orders, _, gens = structure.quotient_coordinates(P)
    for o, v in zip(orders, gens):
        g = tuple(x % m for x, m in zip(v, P.moduli))
        if o == P.p**c and g not in seen:
            seen.add(g)
            yield g


# ---------------------------------------------------------------------------
# elementary abelian Autcent


def jafari_odd(P: PcPresentation) -> bool:
    """Odd ``p``: ``Autcent`` elementary abelian iff ``exp Z = p`` or ``exp G/[G,G] = p``."""
    _require(P.p % 2 == 1, "criterion stated for odd p")
    _require_pure(P)
    return section_type(P, "Z").log_exponent == 1 or section_type(P, "G/γ2").log_exponent == 1


@dataclass(frozen=True)
class CeData:
    is_ce: bool
    cyclic_part_order: int
    elementary_rank: int


def ce_data(T: AbelianSectionType) -> CeData:
    """A ce-group is cyclic of order ``p^n`` (``n > 1``) times an elementary abelian group."""
    big = [e for e in T.exponents if e > 1]
    if len(big) != 1:
        return CeData(False, 0, 0)
    return CeData(True, T.p ** big[0], T.rank - 1)


@dataclass(frozen=True)
class JafariTwo:
    cond1: bool
    cond2: bool
    cond3: bool
    witness: dict | None = field(default=None, compare=False)

    @property
    def satisfied(self) -> tuple[int, ...]:
        return tuple(i for i, ok in ((1, self.cond1), (2, self.cond2), (3, self.cond3)) if ok)

    @property
    def condition(self) -> int | None:
        s = self.satisfied
        return s[0] if s else None


def jafari_two_shape(quotient: AbelianSectionType, center_type: AbelianSectionType) -> tuple[bool, bool, bool]:
    """Type-level part of the three ``p = 2`` conditions.

    The third flag only says both sections are ce-groups whose exponents have
    gcd 4; the embedding clauses need the group itself.
    """
    c, a = quotient.log_exponent, center_type.log_exponent
    shape3 = min(a, c) == 2 and ce_data(quotient).is_ce and ce_data(center_type).is_ce
    return c == 1, a == 1, shape3


def jafari_two(P: PcPresentation, cap: int = 1 << 16) -> JafariTwo:
    """``p = 2``: evaluate the three conditions for elementary abelian ``Autcent``."""
    _require(P.p == 2, "criterion stated for p = 2")
    _require_pure(P)
    quotient, ztype = section_type(P, "G/γ2"), section_type(P, "Z")
    c1, c2, shape3 = jafari_two_shape(quotient, ztype)
    witness = _condition_three_witness(P, cap) if shape3 else None
    return JafariTwo(c1, c2, witness is not None, witness)


def _condition_three_witness(P: PcPresentation, cap: int):
    """Search decompositions ``Z = <g> x B`` with ``B`` elementary inside ``[G,G]``.

    In a ce-group every element of maximal order spans a cyclic direct factor.
    A complement ``B`` inside ``W = Omega_1(Z) & [G,G]`` exists iff
    ``W`` has rank at least ``rank(Z) - 1`` modulo ``W & <g>``.  The order-4
    element of ``<g>`` must map into a cyclic part of ``G/[G,G]``, with twice
    its order equal to the exponent; for a ce quotient that means lying in
    ``Phi`` with image of order ``exp/2``.
    """
    Z = structure.center(P)
    if Z.order > cap:
        raise structure.CapExceeded(f"center of order {Z.order} exceeds cap {cap}")
    p = P.p
    n = Z.type.log_exponent
    rank = Z.type.rank
    m = section_type(P, "G/γ2").log_exponent
    gamma = structure.derived_subgroup(P)
    phi = structure.frattini(P)
    omega1 = [collect.pack(P, Z.element(k)) for k in iproduct(*(range(o) for o in Z.orders))]
    W = [g for g in (collect.unpack(P, c) for c in omega1) if collect.power(P, g, p) == P.identity() and gamma.contains(g)]
    for coeffs in iproduct(*(range(o) for o in Z.orders)):
        g = Z.element(coeffs)
        if collect.element_order(P, g) != p**n:
            continue
        socle = collect.power(P, g, p ** (n - 1))
        w_rank = _f2_rank(P, W)
        w_rank_mod = _f2_rank(P, W + [socle]) - 1 if gamma.contains(socle) else w_rank
        if w_rank_mod < rank - 1:
            continue
        for u in (1, 3):
            z = collect.power(P, g, u * p ** (n - 2))
            if phi.contains(z) and _quotient_order_log(P, z) == m - 1:
                return {"cyclic_generator": g, "z": z}
    return None


def _f2_rank(P: PcPresentation, elements) -> int:
    """Rank of a set of order-``p`` central elements (linear center assumed)."""
    sub = structure.central_subgroup_from_generators(P, elements)
    return sub.type.rank


# ---------------------------------------------------------------------------
# guards and the elementary abelian dichotomy


@dataclass(frozen=True)
class EarnleyGuard:
    applicable: bool
    exponent: int


def earnley_guard(P: PcPresentation) -> EarnleyGuard:
    """Non-abelian of exponent ``p`` (``p`` odd) forces a non-abelian ``Aut(G)``."""
    exp = structure.exponent(P)
    return EarnleyGuard(P.p % 2 == 1 and not P.is_abelian and exp == P.p, exp)


@dataclass(frozen=True)
class Dichotomy:
    branch1: bool
    branch2: bool
    exponent: int
    violation: bool


def dichotomy(P: PcPresentation) -> Dichotomy:
    """For ``Aut(G)`` elementary abelian, odd ``p``.

    Branch 1: ``Z = Phi`` elementary abelian.  Branch 2: ``[G,G] = Phi``
    elementary abelian.  At least one must hold, and ``exp G = p^2``.
    """
    _require(P.p % 2 == 1, "dichotomy stated for odd p")
    Z, gamma, phi = structure.center(P), structure.derived_subgroup(P), structure.frattini(P)
    b1 = compare_subgroups(Z, phi) is Relation.EQUAL and Z.type.is_elementary
    b2 = compare_subgroups(gamma, phi) is Relation.EQUAL and gamma.type.is_elementary
    exp = structure.exponent(P)
    return Dichotomy(b1, b2, exp, not (b1 or b2) or exp != P.p**2)
