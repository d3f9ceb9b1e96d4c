"""Characteristic subgroups and abelian sections of a class-2 pc group.

Two representations are used.  A subgroup that contains the derived subgroup
is the preimage of a subgroup of ``G/[G,G]`` and is stored as the Howell form
of its lattice of exponent vectors over ``Z/p^E`` (``E`` the largest generator
exponent); two such subgroups are equal iff their rows agree.  Central
subgroups carry an explicit basis of independent elements with their orders.

The exponent-vector map ``g -> (a_1..a_d)`` is a homomorphism modulo the
derived subgroup, and on any central subgroup where the collection correction
vanishes.  Where it does not, central subgroup structure falls back to
enumeration.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from itertools import product as iproduct

import numpy as np

from . import collect
from .collect import Element
from .linalg import Row, howell_form, in_module, left_kernel, module_log_size, smith_normal_form
from .presentation import PcPresentation

DEFAULT_ENUMERATION_CAP = 10**7
DEFAULT_CENTER_CAP = 10**6


class CapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class AbelianSectionType:
    """Invariant factors ``p^e`` of a finite abelian p-group, largest first."""

    p: int
    exponents: tuple[int, ...]

    @classmethod
    def of(cls, p: int, exponents) -> "AbelianSectionType":
        return cls(p, tuple(sorted((e for e in exponents if e > 0), reverse=True)))

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(self.p**e for e in self.exponents)

    @property
    def log_order(self) -> int:
        return sum(self.exponents)

    @property
    def log_exponent(self) -> int:
        return self.exponents[0] if self.exponents else 0

    @property
    def rank(self) -> int:
        return len(self.exponents)

    @property
    def is_elementary(self) -> bool:
        return self.log_exponent <= 1

    @property
    def is_cyclic(self) -> bool:
        return self.rank <= 1

    def __str__(self) -> str:
        return "(" + ",".join(str(o) for o in self.orders) + ")"


# ---------------------------------------------------------------------------
# lattice helpers


def _E(P: PcPresentation) -> int:
    return P.max_exponent


def _order_rows(P: PcPresentation) -> list[tuple[int, ...]]:
    E, d = _E(P), P.d
    rows = []
    for k, e in enumerate(P.orders):
        if e < E:
            rows.append(tuple(P.p**e if c == k else 0 for c in range(d)))
    return rows


def _log_lattice_base(P: PcPresentation) -> int:
    """``log_p`` of the order lattice modulo ``p^E``."""
    return sum(_E(P) - e for e in P.orders)


def _module(P: PcPresentation, rows) -> tuple[Row, ...]:
    return howell_form(list(rows) + _order_rows(P), P.p, _E(P), P.d)


def _log_index(P: PcPresentation, rows) -> int:
    """``log_p`` of the number of group elements whose vectors lie in ``rows``."""
    return module_log_size(rows, P.p, _E(P)) - _log_lattice_base(P)


def _to_element(P: PcPresentation, vec) -> Element:
    return tuple(v % m for v, m in zip(vec, P.moduli))


def _quotient_exponents(P: PcPresentation, top, bottom) -> list[int]:
    """Invariant-factor exponents of ``top/bottom`` for modules ``bottom <= top``."""
    p, E, d = P.p, _E(P), P.d
    base = module_log_size(bottom, p, E)
    sizes = []
    for i in range(E + 1):
        scaled = [tuple(p**i * x for x in r) for r in top]
        sizes.append(module_log_size(howell_form(scaled + list(bottom), p, E, d), p, E) - base)
    exps = []
    for i in range(E):
        exps.extend([i + 1] * (sizes[i] - sizes[i + 1] - (sizes[i + 1] - sizes[i + 2] if i + 2 <= E else 0)))
    return exps


def _identity_rows(P: PcPresentation):
    return [tuple(int(i == j) for j in range(P.d)) for i in range(P.d)]


# ---------------------------------------------------------------------------
# central subgroups


@dataclass(frozen=True)
class CentralSubgroup:
    """Subgroup of ``Z(G)`` with an independent basis.

    ``rows`` is the Howell form of the subgroup's exponent-vector lattice; it
    is ``None`` when the exponent map is not a homomorphism on the subgroup and
    membership falls back to enumeration.
    """

    P: PcPresentation
    basis: tuple[Element, ...]
    orders: tuple[int, ...]
    rows: tuple[Row, ...] | None

    @property
    def log_order(self) -> int:
        return sum(_logp(o, self.P.p) for o in self.orders)

    @property
    def order(self) -> int:
        return self.P.p**self.log_order

    @property
    def type(self) -> AbelianSectionType:
        return AbelianSectionType.of(self.P.p, (_logp(o, self.P.p) for o in self.orders))

    @property
    def linear(self) -> bool:
        return self.rows is not None

    def generators(self) -> tuple[Element, ...]:
        return self.basis

    def contains(self, g) -> bool:
        g = _to_element(self.P, g)
        if self.rows is not None:
            return in_module(self.rows, g, self.P.p, _E(self.P))
        return collect.pack(self.P, g) in self.elements()

    def elements(self, cap: int = DEFAULT_CENTER_CAP) -> set[int]:
        """Packed codes of all elements (enumeration, bounded by ``cap``)."""
        if self.order > cap:
            raise CapExceeded(f"central subgroup of order {self.order} exceeds cap {cap}")
        return _enumerate_central(self.P, self.basis, self.orders)

    def element(self, coeffs) -> Element:
        out = self.P.identity()
        for b, k in zip(self.basis, coeffs):
            out = collect.multiply(self.P, out, collect.power(self.P, b, k))
        return out


def _enumerate_central(P, basis, orders) -> set[int]:
    codes = set()
    for coeffs in iproduct(*(range(o) for o in orders)):
        g = P.identity()
        for b, k in zip(basis, coeffs):
            g = collect.multiply(P, g, collect.power(P, b, k))
        codes.add(collect.pack(P, g))
    return codes


def _logp(x: int, p: int) -> int:
    e = 0
    while x > 1:
        x //= p
        e += 1
    return e


def _is_linear(P: PcPresentation, gens) -> bool:
    moduli = P.moduli
    for g in gens:
        for h in gens:
            corr = collect.correction(P, g, h)
            if any(c % m for c, m in zip(corr, moduli)):
                return False
    return True


def _basis_from_relations(P: PcPresentation, gens, relation_rows) -> tuple[tuple[Element, ...], tuple[int, ...]]:
    r = len(gens)
    N = P.p ** _E(P)
    lattice = [list(row) for row in relation_rows] + [[N if i == j else 0 for j in range(r)] for i in range(r)]
    diag, _, Vinv = smith_normal_form(lattice)
    basis, orders = [], []
    for i, s in enumerate(diag):
        if s == 1:
            continue
        g = P.identity()
        for j in range(r):
            if Vinv[i][j]:
                g = collect.multiply(P, g, collect.power(P, gens[j], Vinv[i][j]))
        basis.append(g)
        orders.append(s)
    order = sorted(range(len(orders)), key=lambda i: -orders[i])
    return tuple(basis[i] for i in order), tuple(orders[i] for i in order)


def _relations_linear(P: PcPresentation, gens) -> tuple[Row, ...]:
    p, E = P.p, _E(P)
    scaled = [[g[m] * p ** (E - P.orders[m]) for m in range(P.d)] for g in gens]
    return left_kernel(scaled, p, E)


def _relations_enumerated(P: PcPresentation, gens, cap: int) -> list[Row]:
    r = len(gens)
    start = P.identity()
    seen = {start: (0,) * r}
    frontier = [start]
    relations: list[Row] = []
    N = P.p ** _E(P)
    while frontier:
        nxt = []
        for g in frontier:
            k = seen[g]
            for i, h in enumerate(gens):
                gh = collect.multiply(P, g, h)
                kk = tuple(a + (1 if j == i else 0) for j, a in enumerate(k))
                if gh in seen:
                    rel = tuple((a - b) % N for a, b in zip(kk, seen[gh]))
                    if any(rel):
                        relations.append(rel)
                else:
                    if len(seen) >= cap:
                        raise CapExceeded(f"subgroup enumeration exceeded cap {cap}")
                    seen[gh] = kk
                    nxt.append(gh)
        frontier = nxt
        if len(relations) > 4 * r:
            relations = list(howell_form(relations, P.p, _E(P), r))
    return list(howell_form(relations, P.p, _E(P), r)) if relations else []


def central_subgroup_from_module(P: PcPresentation, rows, cap: int = DEFAULT_CENTER_CAP) -> CentralSubgroup:
    """Central subgroup whose exponent vectors form the module ``rows``."""
    gens = [g for g in (_to_element(P, r) for r in rows) if any(g)]
    if _is_linear(P, gens):
        rels = _relations_linear(P, gens)
        basis, orders = _basis_from_relations(P, gens, rels)
        return CentralSubgroup(P, basis, orders, tuple(rows))
    return central_subgroup_from_generators(P, gens, cap)


def central_subgroup_from_generators(P: PcPresentation, gens, cap: int = DEFAULT_CENTER_CAP) -> CentralSubgroup:
    gens = [_to_element(P, g) for g in gens]
    gens = [g for g in gens if any(g)]
    if not gens:
        return CentralSubgroup(P, (), (), _module(P, []))
    if _is_linear(P, gens):
        rels = _relations_linear(P, gens)
        basis, orders = _basis_from_relations(P, gens, rels)
        return CentralSubgroup(P, basis, orders, _module(P, gens))
    rels = _relations_enumerated(P, gens, cap)
    basis, orders = _basis_from_relations(P, gens, rels)
    return CentralSubgroup(P, basis, orders, None)


@lru_cache(maxsize=128)
def derived_module(P: PcPresentation) -> tuple[Row, ...]:
    values = [v for _, _, v in P.comm]
    return _module(P, values)


@lru_cache(maxsize=128)
def derived_subgroup(P: PcPresentation) -> CentralSubgroup:
    """``[G, G]``: generated by the stored commutator values."""
    return central_subgroup_from_generators(P, [v for _, _, v in P.comm])


@lru_cache(maxsize=128)
def center_module(P: PcPresentation) -> tuple[Row, ...]:
    """Lattice of exponent vectors ``a`` with ``sum_k a_k [x_k, x_j] = 0`` for every ``j``."""
    p, E, d = P.p, _E(P), P.d
    A = []
    for k in range(d):
        row = []
        for j in range(d):
            c = P.comm_value(k, j)
            row.extend(c[m] * p ** (E - P.orders[m]) for m in range(d))
        A.append(row)
    return left_kernel(A, p, E)


@lru_cache(maxsize=128)
def center(P: PcPresentation) -> CentralSubgroup:
    return central_subgroup_from_module(P, center_module(P))


def omega_of_central(S: CentralSubgroup, k: int) -> CentralSubgroup:
    """Elements of ``S`` of order at most ``p^k``."""
    P = S.P
    basis, orders = [], []
    for b, o in zip(S.basis, S.orders):
        m = _logp(o, P.p)
        if k <= 0:
            continue
        if m > k:
            b = collect.power(P, b, P.p ** (m - k))
            o = P.p**k
        basis.append(b)
        orders.append(o)
    rows = _module(P, basis) if S.linear else None
    return CentralSubgroup(P, tuple(basis), tuple(orders), rows)


# ---------------------------------------------------------------------------
# subgroups containing the derived subgroup


@dataclass(frozen=True)
class SubgroupAboveDerived:
    """Preimage of a subgroup of ``G/[G,G]``, as a Howell-form vector lattice."""

    P: PcPresentation
    rows: tuple[Row, ...]

    @property
    def log_order(self) -> int:
        return _log_index(self.P, self.rows)

    @property
    def order(self) -> int:
        return self.P.p**self.log_order

    @property
    def ambient(self) -> AbelianSectionType:
        return section_type(self.P, "G/γ2")

    @property
    def image_type(self) -> AbelianSectionType:
        """Type of the image in ``G/[G,G]``."""
        return AbelianSectionType.of(self.P.p, _quotient_exponents(self.P, self.rows, derived_module(self.P)))

    def contains(self, g) -> bool:
        return in_module(self.rows, g, self.P.p, _E(self.P))

    def generators(self) -> tuple[Element, ...]:
        gens = [_to_element(self.P, r) for r in self.rows]
        gens.extend(derived_subgroup(self.P).basis)
        return tuple(g for g in gens if any(g))


def above_derived(P: PcPresentation, vectors) -> SubgroupAboveDerived:
    """Subgroup generated by ``[G,G]`` and the given exponent vectors."""
    return SubgroupAboveDerived(P, howell_form(list(vectors) + list(derived_module(P)), P.p, _E(P), P.d))


def agemo_above_derived(P: PcPresentation, i: int) -> SubgroupAboveDerived:
    """``G^{p^i} [G,G]``."""
    return above_derived(P, [tuple(P.p**i * x for x in r) for r in _identity_rows(P)])


def frattini(P: PcPresentation) -> SubgroupAboveDerived:
    return agemo_above_derived(P, 1)


def frattini_rank(P: PcPresentation) -> int:
    return P.log_order - frattini(P).log_order


# ---------------------------------------------------------------------------
# abelian sections


SECTIONS = ("G/γ2", "Z", "γ2", "G/Φ", "Z/γ2")
_ALIASES = {"G/g2": "G/γ2", "g2": "γ2", "G/Phi": "G/Φ", "Z/g2": "Z/γ2"}


def section_type(P: PcPresentation, which: str) -> AbelianSectionType:
    which = _ALIASES.get(which, which)
    if which == "G/γ2":
        exps = _quotient_exponents(P, _identity_rows(P), derived_module(P))
    elif which == "Z":
        return center(P).type
    elif which == "γ2":
        return derived_subgroup(P).type
    elif which == "G/Φ":
        exps = [1] * frattini_rank(P)
    elif which == "Z/γ2":
        exps = _quotient_exponents(P, center_module(P), derived_module(P))
    else:
        raise ValueError(f"unknown section {which!r}; expected one of {SECTIONS}")
    return AbelianSectionType.of(P.p, exps)


def quotient_coordinates(P: PcPresentation):
    """Cyclic decomposition of ``G/[G,G]``.

    Returns ``(orders, V)`` where ``orders[i]`` is the order of the ``i``-th
    cyclic factor and the factor coordinates of an exponent vector ``a`` are
    ``(a V)_i mod orders[i]``.  Row ``i`` of ``Vinv`` (third item) is an
    exponent vector generating factor ``i``.
    """
    E = _E(P)
    lattice = [list(r) for r in derived_module(P)] + [[P.p**E if i == j else 0 for j in range(P.d)] for i in range(P.d)]
    diag, V, Vinv = smith_normal_form(lattice)
    keep = [i for i, s in enumerate(diag) if s != 1]
    orders = [diag[i] for i in keep]
    V = [[V[r][i] for i in keep] for r in range(P.d)]
    gens = [tuple(Vinv[i]) for i in keep]
    return orders, V, gens


# ---------------------------------------------------------------------------
# element-level computations


def exponent(P: PcPresentation, cap: int = DEFAULT_ENUMERATION_CAP) -> int:
    """Exponent of ``G``.

    For odd ``p`` the maximum order over generators and a basis of the derived
    subgroup suffices in class 2; ``p = 2`` enumerates.
    """
    if P.p != 2:
        cands = [P.generator(i) for i in range(P.d)] + list(derived_subgroup(P).basis)
        return max(collect.element_order(P, g) for g in cands)
    cur = _all_elements(P, cap)
    order = 1
    cur = cur[np.any(cur != 0, axis=1)]
    while len(cur):
        order *= 2
        cur = collect.power_many(P, cur, 2)
        cur = cur[np.any(cur != 0, axis=1)]
    return order


def _all_elements(P: PcPresentation, cap: int) -> np.ndarray:
    if P.order > cap:
        raise CapExceeded(f"|G| = {P.p}^{P.log_order} exceeds cap {cap}")
    codes = np.arange(P.order, dtype=np.int64)
    return _unpack_many(P, codes)


def _unpack_many(P: PcPresentation, codes: np.ndarray) -> np.ndarray:
    st = np.asarray(collect.strides(P), dtype=np.int64)
    mo = np.asarray(P.moduli, dtype=np.int64)
    return (codes[:, None] // st) % mo


def enumerate_elements(P: PcPresentation, cap: int = DEFAULT_ENUMERATION_CAP, return_codes: bool = False):
    """Breadth-first closure of the generators from the identity.

    Returns the number of elements reached (and their packed codes when
    ``return_codes``).  Right multiplication by a generator is vectorised over
    the whole frontier.
    """
    if P.order > cap:
        raise CapExceeded(f"|G| = {P.p}^{P.log_order} exceeds cap {cap}")
    seen = np.zeros(P.order, dtype=bool)
    seen[0] = True
    frontier = np.zeros((1, P.d), dtype=np.int64)
    gens = [np.asarray([P.generator(i)], dtype=np.int64) for i in range(P.d)]
    while len(frontier):
        found = []
        for g in gens:
            nxt = collect.multiply_many(P, frontier, g)
            codes = collect.pack_many(P, nxt)
            fresh = ~seen[codes]
            codes = np.unique(codes[fresh])
            seen[codes] = True
            found.append(codes)
        codes = np.concatenate(found)
        frontier = _unpack_many(P, codes)
    count = int(seen.sum())
    if return_codes:
        return count, np.flatnonzero(seen)
    return count


def omega_of_group(P: PcPresentation, i: int, cap: int = 10**6) -> set[int]:
    """Subgroup generated by elements with ``x^{p^i} = 1`` (enumeration; small groups)."""
    elements = _all_elements(P, cap)
    powered = collect.power_many(P, elements, P.p**i)
    gens = elements[~np.any(powered != 0, axis=1)]
    return _closure(P, [tuple(int(x) for x in g) for g in gens])


def _closure(P: PcPresentation, gens) -> set[int]:
    group = {0}
    members = [P.identity()]
    for g in gens:
        if collect.pack(P, g) in group:
            continue
        frontier = list(members)
        while frontier:
            nxt = []
            for h in frontier:
                for s in [g] + [m for m in gens if collect.pack(P, m) in group]:
                    x = collect.multiply(P, h, s)
                    c = collect.pack(P, x)
                    if c not in group:
                        group.add(c)
                        members.append(x)
                        nxt.append(x)
            frontier = nxt
    return group


def brute_force_center(P: PcPresentation, cap: int = 10**5) -> set[int]:
    elements = _all_elements(P, cap)
    central = np.ones(len(elements), dtype=bool)
    for i in range(P.d):
        g = np.asarray([P.generator(i)], dtype=np.int64)
        central &= ~np.any(collect.commutator_many(P, elements, g) != 0, axis=1)
    return set(int(c) for c in collect.pack_many(P, elements[central]))


def is_purely_nonabelian(P: PcPresentation) -> bool:
    """No non-trivial abelian direct factor.

    ``G`` has a direct factor ``C_{p^k}`` iff some central ``z`` of order ``p^k``
    has ``p^{k-1} z`` outside ``p^k (G/[G,G])``.  The map
    ``z -> p^{k-1} z mod p^k(G/[G,G])`` is a homomorphism on ``Omega_k(Z)``,
    so it suffices to test a basis of ``Omega_k(Z)``.
    """
    Z = center(P)
    top = max((_logp(o, P.p) for o in Z.orders), default=0)
    for k in range(1, top + 1):
        agemo = agemo_above_derived(P, k)
        for z in omega_of_central(Z, k).basis:
            zk = collect.power(P, z, P.p ** (k - 1))
            if not agemo.contains(zk):
                return False
    return True


def direct_factor_witness(P: PcPresentation):
    """A central element splitting off as a cyclic direct factor, or ``None``."""
    Z = center(P)
    top = max((_logp(o, P.p) for o in Z.orders), default=0)
    for k in range(1, top + 1):
        agemo = agemo_above_derived(P, k)
        for z in omega_of_central(Z, k).basis:
            if not agemo.contains(collect.power(P, z, P.p ** (k - 1))):
                return z, P.p**k
    return None


class Relation(str, enum.Enum):
    EQUAL = "equal"
    LESS = "A<B"
    GREATER = "B<A"
    INCOMPARABLE = "incomparable"


def compare_subgroups(A, B) -> Relation:
    """Lattice comparison by membership of generators."""
    a_in_b = all(B.contains(g) for g in A.generators())
    b_in_a = all(A.contains(g) for g in B.generators())
    if a_in_b and b_in_a:
        return Relation.EQUAL
    if a_in_b:
        return Relation.LESS
    if b_in_a:
        return Relation.GREATER
    return Relation.INCOMPARABLE
