"""Decide whether every automorphism is central.

The unknowns ``a_ij`` of the generated congruence system are fixed one base-p
digit at a time.  Digit 0 of every variable is found by backtracking modulo
``p``, keeping only patterns whose action on ``G/Phi`` is invertible.  Each
further digit ``l`` solves the linearisation

    G(A + p^l y) = G(A) + p^l J(A) y   (mod p^(l+1)),

which is exact because every equation is a polynomial with integer
coefficients and ``2l >= l + 1``.  A branch is abandoned as soon as all of its
completions are certainly central: the centrality equations are linear, so
once the undetermined digits can no longer move them and they hold, nothing
below can be a counterexample.
"""

from __future__ import annotations

import enum
import functools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Sequence

import numpy as np

from . import collect, homs, structure
from .linalg import solve_mod_p, valuation
from .presentation import PcPresentation
from .symbolic import CongruenceSystem, generate_system

DEFAULT_NODE_BUDGET = 10**9
DEFAULT_SECONDS = 600.0
ORDERINGS = ("most_constrained", "natural")


class VerdictKind(str, enum.Enum):
    ALL_CENTRAL = "AllCentral"
    COUNTEREXAMPLE = "CounterexampleFound"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Budget:
    nodes: int = DEFAULT_NODE_BUDGET
    seconds: float = DEFAULT_SECONDS


@dataclass
class Stats:
    nodes: int = 0
    level0_nodes: int = 0
    prune_equation: int = 0
    prune_invertible: int = 0
    prune_central: int = 0
    linear_solves: int = 0
    wall_time: float = 0.0

    def merge(self, other: "Stats") -> None:
        for name in ("nodes", "level0_nodes", "prune_equation", "prune_invertible", "prune_central", "linear_solves"):
            setattr(self, name, getattr(self, name) + getattr(other, name))


@dataclass(frozen=True)
class Assignment:
    """Values of all variables with digits below ``level`` fixed."""

    values: tuple[int, ...]
    level: int


@dataclass
class Verdict:
    kind: VerdictKind
    stats: Stats
    patterns: int = 0
    witness: tuple[int, ...] | None = None
    witness_images: tuple[tuple[int, ...], ...] | None = None
    reason: str = ""


class BudgetExceeded(RuntimeError):
    pass


class _Meter:
    def __init__(self, budget: Budget, stats: Stats):
        self.budget = budget
        self.stats = stats
        self.deadline = time.monotonic() + budget.seconds

    def tick(self, level0: bool = False) -> None:
        self.stats.nodes += 1
        if level0:
            self.stats.level0_nodes += 1
        if self.stats.nodes > self.budget.nodes:
            raise BudgetExceeded(f"node budget {self.budget.nodes} exhausted")
        if self.stats.nodes % 1024 == 0 and time.monotonic() > self.deadline:
            raise BudgetExceeded(f"time budget {self.budget.seconds}s exhausted")


# ---------------------------------------------------------------------------
# compiled equations


Term = tuple[int, tuple[int, ...]]


def _terms(poly, modulus: int) -> list[Term]:
    return [(c % modulus, m) for m, c in poly.sorted_terms() if c % modulus]


def _eval(terms: Sequence[Term], values: Sequence[int]) -> int:
    total = 0
    for c, m in terms:
        for v in m:
            c *= values[v]
        total += c
    return total


def _grad(terms: Sequence[Term], values: Sequence[int], p: int) -> dict[int, int]:
    out: dict[int, int] = {}
    for c, m in terms:
        for i, v in enumerate(m):
            g = c
            for k, w in enumerate(m):
                if k != i:
                    g *= values[w]
            out[v] = (out.get(v, 0) + g) % p
    return out


@dataclass
class _Compiled:
    p: int
    nvars: int
    depths: tuple[int, ...]
    eqs: list[tuple[list[Term], int]]
    central: list[tuple[list[Term], int, dict[int, int]]]

    @classmethod
    def of(cls, sys: CongruenceSystem) -> "_Compiled":
        p = sys.p
        eqs = [(_terms(e.poly, p**e.t), e.t) for e in sys.equations]
        central = []
        for e in sys.centrality:
            coeffs = {m[0]: c for m, c in e.poly.terms.items()}
            central.append((_terms(e.poly, p**e.t), e.t, {v: valuation(c, p) if c % p**e.t else e.t for v, c in coeffs.items()}))
        return cls(p, sys.nvars, sys.depths, eqs, central)

    @property
    def max_depth(self) -> int:
        return max(self.depths)


# ---------------------------------------------------------------------------
# level 0


def variable_order(sys: CongruenceSystem, ordering: str = "most_constrained") -> list[int]:
    """Static order for digit-0 backtracking.

    ``most_constrained`` repeatedly takes the variable that occurs in the
    equation with fewest unassigned variables (ties: most occurrences, then
    index), so single-variable congruences bind first.
    """
    nv = sys.nvars
    if ordering == "natural":
        return list(range(nv))
    if ordering != "most_constrained":
        raise ValueError(f"unknown ordering {ordering!r}; expected one of {ORDERINGS}")
    p = sys.p
    var_sets = [set(v for m, c in e.poly.terms.items() if c % p for v in m) for e in sys.equations]
    var_sets = [s for s in var_sets if s]
    occurrences = [sum(v in s for s in var_sets) for v in range(nv)]
    order: list[int] = []
    remaining = set(range(nv))
    while remaining:
        best = None
        for v in sorted(remaining):
            arity = min((len(s - set(order)) for s in var_sets if v in s), default=nv + 1)
            key = (arity, -occurrences[v], v)
            if best is None or key < best[0]:
                best = (key, v)
        order.append(best[1])
        remaining.discard(best[1])
    return order


def solve_level0(
    sys: CongruenceSystem,
    budget: Budget = Budget(),
    ordering: str = "most_constrained",
    stats: Stats | None = None,
    invertible_only: bool = True,
) -> tuple[list[tuple[int, ...]], bool]:
    """All digit-0 assignments satisfying every equation mod ``p`` with invertible pattern.

    Returns ``(solutions sorted lexicographically, complete)``; ``complete`` is
    false when the budget ran out.  ``invertible_only=False`` keeps every
    solution mod ``p`` (endomorphism residues), which the fixture checks use.
    """
    stats = stats if stats is not None else Stats()
    meter = _Meter(budget, stats)
    p, nv = sys.p, sys.nvars
    order = variable_order(sys, ordering)
    position = {v: k for k, v in enumerate(order)}
    checks: list[list[list[Term]]] = [[] for _ in range(nv)]
    for e in sys.equations:
        terms = _terms(e.poly, p)
        if not terms:
            continue
        last = max((position[v] for _, m in terms for v in m), default=-1)
        if last < 0:  # non-zero constant: contradiction
            return [], True
        checks[last].append(terms)
    values = [0] * nv
    out: list[tuple[int, ...]] = []

    def rec(k: int) -> None:
        if k == nv:
            if not invertible_only or sys.invertible(values):
                out.append(tuple(values))
            else:
                stats.prune_invertible += 1
            return
        v = order[k]
        for x in range(p):
            meter.tick(level0=True)
            values[v] = x
            if all(_eval(t, values) % p == 0 for t in checks[k]):
                rec(k + 1)
            else:
                stats.prune_equation += 1
        values[v] = 0

    try:
        rec(0)
    except BudgetExceeded:
        return sorted(out), False
    return sorted(out), True


# ---------------------------------------------------------------------------
# digit-wise descent


def _central_status(comp: _Compiled, values: Sequence[int], level: int) -> str:
    """``certified``, ``violated`` or ``open`` for digits below ``level`` fixed."""
    p = comp.p
    certified = True
    for terms, t, vals in comp.central:
        r = _eval(terms, values)
        if r % p ** min(level, t):
            return "violated"
        if certified:
            movable = any(comp.depths[v] > level and vals[v] + level < t for v in vals)
            if movable or r % p**t:
                certified = False
    return "certified" if certified else "open"


def descend(
    sys: CongruenceSystem,
    base: Assignment,
    budget: Budget = Budget(),
    stats: Stats | None = None,
    _comp: _Compiled | None = None,
) -> tuple[int, ...] | None:
    """Search the digit extensions of ``base`` for a non-central solution.

    ``base`` must satisfy every equation modulo ``p^min(t, level)``.  Returns a
    full assignment (a non-central endomorphism with the invertible pattern of
    ``base``) or ``None`` when no such extension exists.
    """
    stats = stats if stats is not None else Stats()
    comp = _comp or _Compiled.of(sys)
    meter = _Meter(budget, stats)
    p = comp.p
    values = list(base.values)
    for terms, t in comp.eqs:
        if _eval(terms, values) % p ** min(t, base.level):
            stats.prune_equation += 1
            return None

    def rec(level: int, noncentral: bool) -> tuple[int, ...] | None:
        meter.tick()
        if not noncentral:
            status = _central_status(comp, values, level)
            if status == "certified":
                stats.prune_central += 1
                return None
            noncentral = status == "violated"
        if level >= comp.max_depth:
            return tuple(values) if noncentral else None
        free = [v for v in range(comp.nvars) if comp.depths[v] > level]
        col = {v: k for k, v in enumerate(free)}
        rows, rhs = [], []
        scale = p**level
        for terms, t in comp.eqs:
            if t <= level:
                continue
            r = _eval(terms, values) % p ** (level + 1)
            g = _grad(terms, values, p)
            row = [0] * len(free)
            for v, x in g.items():
                if x and v in col:
                    row[col[v]] = x
            rows.append(row)
            rhs.append((-(r // scale)) % p)
        stats.linear_solves += 1
        sol = solve_mod_p(rows, rhs, len(free), p)
        if sol is None:
            stats.prune_equation += 1
            return None
        particular, null = sol
        saved = [values[v] for v in free]
        for coeffs in iproduct(range(p), repeat=len(null)):
            y = list(particular)
            for c, vec in zip(coeffs, null):
                if c:
                    y = [(a + c * b) % p for a, b in zip(y, vec)]
            for k, v in enumerate(free):
                values[v] = saved[k] + scale * y[k]
            found = rec(level + 1, noncentral)
            if found is not None:
                return found
        for k, v in enumerate(free):
            values[v] = saved[k]
        return None

    return rec(base.level, False)


# ---------------------------------------------------------------------------
# orchestration


def _descend_one(args) -> tuple[tuple[int, ...] | None, Stats, bool]:
    """Worker: descend from one level-0 pattern."""
    P, pattern, budget = args
    sys, comp = _prepared(P)
    stats = Stats()
    try:
        w = descend(sys, Assignment(pattern, 1), budget, stats, comp)
    except BudgetExceeded:
        return None, stats, False
    return w, stats, True


@functools.lru_cache(maxsize=8)
def _prepared(P: PcPresentation) -> tuple[CongruenceSystem, _Compiled]:
    sys = generate_system(P)
    return sys, _Compiled.of(sys)


def recheck_witness(P: PcPresentation, sys: CongruenceSystem, witness: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    """Concrete re-verification of a counterexample; raises if any check fails."""
    images = sys.images(witness)
    if not sys.satisfies(witness):
        raise AssertionError("witness violates the generated system")
    if not homs.is_endomorphism(P, images):
        raise AssertionError("witness images violate a defining relation")
    if not homs.is_automorphism(P, images):
        raise AssertionError("witness is not invertible on G/Phi")
    Z = structure.center(P)
    offsets = [collect.multiply(P, collect.inverse(P, P.generator(i)), images[i]) for i in range(P.d)]
    if all(Z.contains(e) for e in offsets):
        raise AssertionError("witness is central")
    return images


def verify_all_central(
    P: PcPresentation,
    budget: Budget = Budget(),
    workers: int = 1,
    ordering: str = "most_constrained",
) -> Verdict:
    """``AllCentral`` iff the complete search finds no non-central automorphism."""
    start = time.monotonic()
    sys = _prepared(P)[0]
    stats = Stats()
    patterns, complete = solve_level0(sys, budget, ordering, stats)
    if not complete:
        stats.wall_time = time.monotonic() - start
        return Verdict(VerdictKind.INCONCLUSIVE, stats, len(patterns), reason="level-0 search exceeded the budget")
    remaining = Budget(max(budget.nodes - stats.nodes, 0), max(budget.seconds - (time.monotonic() - start), 0.0))
    jobs = [(P, pattern, remaining) for pattern in patterns]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = ex.map(_descend_one, jobs)
            outcome = _merge(results, stats)
    else:
        outcome = _merge(map(_descend_one, jobs), stats)
    stats.wall_time = time.monotonic() - start
    witness, exhausted = outcome
    if witness is not None:
        images = recheck_witness(P, sys, witness)
        return Verdict(VerdictKind.COUNTEREXAMPLE, stats, len(patterns), witness, images)
    if exhausted or stats.nodes > budget.nodes:
        return Verdict(VerdictKind.INCONCLUSIVE, stats, len(patterns), reason="descent exceeded the budget")
    return Verdict(VerdictKind.ALL_CENTRAL, stats, len(patterns))


def _merge(results, stats: Stats) -> tuple[tuple[int, ...] | None, bool]:
    """Consume per-pattern results in pattern order up to the first decisive one.

    Counters are only merged up to that point, so they do not depend on how
    many workers ran ahead.
    """
    for w, st, done in results:
        stats.merge(st)
        if not done:
            return None, True
        if w is not None:
            return w, False
    return None, False


# ---------------------------------------------------------------------------
# brute-force oracle


@dataclass
class BruteForceResult:
    count: int
    central: int
    images: np.ndarray = field(repr=False)


def bruteforce_aut(P: PcPresentation, cap: int = 10**4, keep_images: bool = True) -> BruteForceResult:
    """Enumerate all generator-image tuples that define automorphisms.

    Images are assigned generator by generator; a relation is tested as soon
    as every generator it mentions has an image.
    """
    if P.order > cap:
        raise structure.CapExceeded(f"|G| = {P.order} exceeds cap {cap}")
    d = P.d
    elements = structure._all_elements(P, cap)
    frontier = np.zeros((1, 0, d), dtype=np.int64)
    for k in range(d):
        if len(frontier) * len(elements) > _BRUTE_CANDIDATES:
            raise structure.CapExceeded(
                f"{len(frontier)} partial image tuples times {len(elements)} elements exceed {_BRUTE_CANDIDATES}"
            )
        # extend in slices so the candidate array stays bounded
        step = max(1, _BRUTE_CHUNK // len(elements))
        parts = [_extend(P, frontier[s : s + step], elements, k) for s in range(0, len(frontier), step)]
        frontier = np.concatenate(parts, axis=0) if parts else frontier[:0]
    auts = frontier[homs.images_relation_mask(P, frontier) & homs.images_automorphism_mask(P, frontier)]
    gens = np.asarray([P.generator(i) for i in range(d)], dtype=np.int64)
    inv = np.asarray([collect.inverse(P, P.generator(i)) for i in range(d)], dtype=np.int64)
    central = np.ones(len(auts), dtype=bool)
    for i in range(d):
        off = collect.multiply_many(P, np.broadcast_to(inv[i], auts[:, i].shape), auts[:, i])
        for j in range(d):
            central &= ~np.any(collect.commutator_many(P, off, np.broadcast_to(gens[j], off.shape)) != 0, axis=1)
    return BruteForceResult(len(auts), int(central.sum()), auts if keep_images else np.zeros((0, d, d), dtype=np.int64))


_BRUTE_CHUNK = 1 << 20
_BRUTE_CANDIDATES = 1 << 25


def _extend(P: PcPresentation, frontier: np.ndarray, elements: np.ndarray, k: int) -> np.ndarray:
    """Append every element as the image of ``x_k`` and keep tuples passing the decidable relations."""
    d = P.d
    N, M = frontier.shape[0], elements.shape[0]
    cand = np.concatenate([np.repeat(frontier, M, axis=0), np.tile(elements, (N, 1))[:, None, :]], axis=1)
    ok = ~np.any(collect.power_many(P, cand[:, k], P.moduli[k]) != 0, axis=1)
    cand = cand[ok]
    for i in range(k):
        w = P.comm_value(k, i)
        if any(w[m] for m in range(k + 1, d)):
            continue
        cand = cand[_relation_holds(P, cand, k, i, w)]
    # relations from earlier pairs that mention x_k in their right-hand side
    for j in range(k):
        for i in range(j):
            w = P.comm_value(j, i)
            if not w[k] or any(w[m] for m in range(k + 1, d)):
                continue
            cand = cand[_relation_holds(P, cand, j, i, w)]
    return cand


def _relation_holds(P: PcPresentation, cand: np.ndarray, j: int, i: int, w) -> np.ndarray:
    lhs = collect.commutator_many(P, cand[:, j], cand[:, i])
    rhs = np.zeros_like(lhs)
    for m, e in enumerate(w):
        if e:
            rhs = collect.multiply_many(P, rhs, collect.power_many(P, cand[:, m], e))
    return ~np.any(lhs != rhs, axis=1)
