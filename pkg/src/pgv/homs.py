"""Hom groups between abelian sections, central endomorphisms and map checks.

A candidate endomorphism is given by its generator images (``GeneratorImages``,
a tuple of elements).  By von Dyck's theorem it extends to an endomorphism iff
the images satisfy every defining relation; an endomorphism of a finite
p-group is onto iff it is invertible on ``G/Phi(G)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

import numpy as np

from . import collect, structure
from .collect import Element
from .linalg import det_mod_p
from .presentation import PcPresentation
from .structure import AbelianSectionType

GeneratorImages = tuple[Element, ...]


def hom_order(A: AbelianSectionType, B: AbelianSectionType) -> int:
    """``log_p |Hom(A, B)|`` as the sum of pairwise ``min`` exponents."""
    if A.p != B.p and A.exponents and B.exponents:
        raise ValueError("Hom between groups for different primes")
    return sum(min(a, b) for a in A.exponents for b in B.exponents)


class PreconditionError(ValueError):
    pass


def autcent_order(P: PcPresentation) -> int:
    """``log_p |Autcent(G)|``, valid when ``G`` has no abelian direct factor."""
    if not structure.is_purely_nonabelian(P):
        raise PreconditionError(
            "group has a non-trivial abelian direct factor; |Hom(G/[G,G], Z(G))| does not count its central automorphisms"
        )
    return hom_order(structure.section_type(P, "G/γ2"), structure.section_type(P, "Z"))


# ---------------------------------------------------------------------------
# evaluating maps


def identity_map(P: PcPresentation) -> GeneratorImages:
    return tuple(P.generator(i) for i in range(P.d))


def evaluate_map(P: PcPresentation, images: GeneratorImages, g) -> Element:
    """``phi(g) = phi(x_1)^{g_1} ... phi(x_d)^{g_d}``."""
    out = P.identity()
    for img, k in zip(images, g):
        if k:
            out = collect.multiply(P, out, collect.power(P, img, k))
    return out


def compose(P: PcPresentation, phi: GeneratorImages, psi: GeneratorImages) -> GeneratorImages:
    """``phi o psi``."""
    return tuple(evaluate_map(P, phi, img) for img in psi)


def relation_failures(P: PcPresentation, images: GeneratorImages) -> list[str]:
    """Defining relations violated by the images (empty for an endomorphism)."""
    images = tuple(tuple(x % m for x, m in zip(img, P.moduli)) for img in images)
    ident = P.identity()
    bad = []
    for i, img in enumerate(images):
        if collect.power(P, img, P.moduli[i]) != ident:
            bad.append(f"x{i + 1}^{P.moduli[i]}")
    for j in range(P.d):
        for i in range(j):
            lhs = collect.commutator(P, images[j], images[i])
            rhs = evaluate_map(P, images, P.comm_value(j, i))
            if lhs != rhs:
                bad.append(f"[x{j + 1},x{i + 1}]")
    return bad


def is_endomorphism(P: PcPresentation, images: GeneratorImages) -> bool:
    return not relation_failures(P, images)


@lru_cache(maxsize=64)
def frattini_projection(P: PcPresentation) -> tuple[tuple[int, ...], tuple[tuple[int, ...], ...]]:
    """``(free, reducers)`` for coordinates on ``G/Phi``.

    ``reducers`` are reduced echelon rows over ``F_p`` spanning the image of the
    derived subgroup; after eliminating their pivots, the entries in the
    ``free`` columns are coordinates of ``G/Phi`` in the basis ``x_c``.
    """
    p, d = P.p, P.d
    rows = [[x % p for x in r] for r in structure.derived_module(P)]
    rows = [r for r in rows if any(r)]
    reducers, pivots = [], []
    for col in range(d):
        piv = next((r for r in rows if r[col]), None)
        if piv is None:
            continue
        rows.remove(piv)
        inv = pow(piv[col], -1, p)
        piv = [x * inv % p for x in piv]
        rows = [[(a - r[col] * b) % p for a, b in zip(r, piv)] for r in rows]
        rows = [r for r in rows if any(r)]
        reducers = [[(a - r[col] * b) % p for a, b in zip(r, piv)] for r in reducers]
        reducers.append(piv)
        pivots.append(col)
    free = tuple(c for c in range(d) if c not in pivots)
    return free, tuple(tuple(r) for r in reducers)


def frattini_coordinates(P: PcPresentation, g) -> tuple[int, ...]:
    p = P.p
    free, reducers = frattini_projection(P)
    v = [x % p for x in g]
    for r in reducers:
        col = next(c for c, x in enumerate(r) if x)
        if v[col]:
            f = v[col]
            v = [(a - f * b) % p for a, b in zip(v, r)]
    return tuple(v[c] for c in free)


def frattini_matrix(P: PcPresentation, images: GeneratorImages) -> list[list[int]]:
    free, _ = frattini_projection(P)
    return [list(frattini_coordinates(P, images[c])) for c in free]


def is_automorphism(P: PcPresentation, images: GeneratorImages) -> bool:
    """For an endomorphism: invertible action on ``G/Phi(G)``."""
    return det_mod_p(frattini_matrix(P, images), P.p) != 0


# ---------------------------------------------------------------------------
# central endomorphisms x -> x f(x), f in Hom(G/[G,G], Z)


@dataclass(frozen=True)
class CentralHomData:
    """Cyclic decomposition of ``G/[G,G]`` against the center.

    Factor ``i`` has order ``factor_orders[i]``; generator ``x_j`` maps to
    ``sum_i coords[j][i]`` times factor ``i``.  ``targets[i]`` is ``Omega_k(Z)``
    for the factor's exponent ``k``: the possible images of factor ``i``.
    """

    P: PcPresentation
    factor_orders: tuple[int, ...]
    coords: tuple[tuple[int, ...], ...]
    targets: tuple[structure.CentralSubgroup, ...]

    @property
    def log_count(self) -> int:
        return sum(t.log_order for t in self.targets)


@lru_cache(maxsize=64)
def central_hom_data(P: PcPresentation) -> CentralHomData:
    orders, V, _ = structure.quotient_coordinates(P)
    Z = structure.center(P)
    coords = tuple(tuple(V[j][i] % orders[i] for i in range(len(orders))) for j in range(P.d))
    targets = tuple(structure.omega_of_central(Z, structure._logp(o, P.p)) for o in orders)
    return CentralHomData(P, tuple(orders), coords, targets)


def central_map_from_values(P: PcPresentation, values) -> GeneratorImages:
    """``x_j -> x_j f(x_j)`` where ``values[i]`` is ``f`` on quotient factor ``i``."""
    data = central_hom_data(P)
    images = []
    for j in range(P.d):
        f = P.identity()
        for z, k in zip(values, data.coords[j]):
            if k:
                f = collect.multiply(P, f, collect.power(P, z, k))
        images.append(collect.multiply(P, P.generator(j), f))
    return tuple(images)


def sample_central_endomorphism(P: PcPresentation, seed: int) -> GeneratorImages:
    """Deterministic uniform sample of ``x -> x f(x)`` with ``f: G/[G,G] -> Z``."""
    rng = random.Random(seed)
    data = central_hom_data(P)
    values = []
    for target in data.targets:
        coeffs = [rng.randrange(o) for o in target.orders]
        values.append(target.element(coeffs))
    return central_map_from_values(P, values)


def is_identity_map(P: PcPresentation, images: GeneratorImages) -> bool:
    return tuple(images) == identity_map(P)


def map_power(P: PcPresentation, images: GeneratorImages, k: int) -> GeneratorImages:
    out = identity_map(P)
    for _ in range(k):
        out = compose(P, images, out)
    return out


@dataclass(frozen=True)
class SanityReport:
    trials: int
    all_endomorphisms: bool
    all_commute: bool
    all_order_p: bool
    noncommuting_pairs: int
    not_order_p: int


def central_sanity_suite(P: PcPresentation, trials: int, seed: int = 0) -> SanityReport:
    """Sample pairs of central automorphisms; test commutation and ``f^p = id``."""
    endo = commute = order_p = True
    noncomm = bad_order = 0
    for t in range(trials):
        f = sample_central_endomorphism(P, 2 * (seed * 1_000_003 + t))
        g = sample_central_endomorphism(P, 2 * (seed * 1_000_003 + t) + 1)
        if not (is_endomorphism(P, f) and is_endomorphism(P, g)):
            endo = False
        if compose(P, f, g) != compose(P, g, f):
            commute = False
            noncomm += 1
        if not is_identity_map(P, map_power(P, f, P.p)):
            order_p = False
            bad_order += 1
    return SanityReport(trials, endo, commute, order_p, noncomm, bad_order)


# ---------------------------------------------------------------------------
# exhaustive sweep over Hom(G/[G,G], Z)


def _det_mod_p_many(M: np.ndarray, p: int) -> np.ndarray:
    """Row-wise determinants mod ``p`` of a stack of small square matrices."""
    n = M.shape[-1]
    if n == 0:
        return np.ones(M.shape[0], dtype=np.int64)
    total = np.zeros(M.shape[0], dtype=np.int64)
    for perm in permutations(range(n)):
        sign = _perm_sign(perm)
        term = np.ones(M.shape[0], dtype=np.int64)
        for r, c in enumerate(perm):
            term = term * M[:, r, c] % p
        total = (total + sign * term) % p
    return total


def _perm_sign(perm) -> int:
    sign, seen = 1, set()
    for i in range(len(perm)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def images_relation_mask(P: PcPresentation, images: np.ndarray) -> np.ndarray:
    """For ``images`` of shape ``(N, d, d)``: which rows satisfy every defining relation."""
    N, d = images.shape[0], P.d
    ok = np.ones(N, dtype=bool)
    for i in range(d):
        ok &= ~np.any(collect.power_many(P, images[:, i], P.moduli[i]) != 0, axis=1)
    for j in range(d):
        for i in range(j):
            lhs = collect.commutator_many(P, images[:, j], images[:, i])
            rhs = np.zeros((N, d), dtype=images.dtype)
            for m, k in enumerate(P.comm_value(j, i)):
                if k:
                    rhs = collect.multiply_many(P, rhs, collect.power_many(P, images[:, m], k))
            ok &= ~np.any(lhs != rhs, axis=1)
    return ok


def images_automorphism_mask(P: PcPresentation, images: np.ndarray) -> np.ndarray:
    free, reducers = frattini_projection(P)
    p = P.p
    v = images % p
    for r in reducers:
        col = next(c for c, x in enumerate(r) if x)
        f = v[:, :, col : col + 1]
        v = (v - f * np.asarray(r, dtype=v.dtype)) % p
    M = v[:, list(free)][:, :, list(free)]
    return _det_mod_p_many(M, p) != 0


@dataclass(frozen=True)
class SweepResult:
    total: int
    endomorphisms: int
    automorphisms: int


def _sweep_chunk(args) -> tuple[int, int, int]:
    P, start, stop = args
    data = central_hom_data(P)
    digits, radices = _flat_target_basis(P)
    idx = np.arange(start, stop, dtype=np.int64)
    coeffs = []
    for r in reversed(radices):
        coeffs.append(idx % r)
        idx = idx // r
    coeffs = coeffs[::-1]
    d = P.d
    nfac = len(data.factor_orders)
    # value of f on each quotient factor as an exponent vector (linear on Z)
    values = np.zeros((stop - start, nfac, d), dtype=np.int64)
    for (fi, vec), c in zip(digits, coeffs):
        values[:, fi] += c[:, None] * np.asarray(vec, dtype=np.int64)
    moduli = np.asarray(P.moduli, dtype=np.int64)
    values %= moduli
    images = np.zeros((stop - start, d, d), dtype=np.int64)
    for j in range(d):
        fj = np.zeros((stop - start, d), dtype=np.int64)
        for i, k in enumerate(data.coords[j]):
            if k:
                fj = fj + k * values[:, i]
        images[:, j] = (fj + np.asarray(P.generator(j))) % moduli
    endo = images_relation_mask(P, images)
    auto = endo & images_automorphism_mask(P, images)
    return stop - start, int(endo.sum()), int(auto.sum())


def _flat_target_basis(P: PcPresentation):
    data = central_hom_data(P)
    digits, radices = [], []
    for fi, target in enumerate(data.targets):
        for b, o in zip(target.basis, target.orders):
            digits.append((fi, b))
            radices.append(o)
    return digits, radices


def sweep_central_homs(P: PcPresentation, chunk: int = 1 << 19, workers: int = 1) -> SweepResult:
    """Enumerate every ``f: G/[G,G] -> Z`` and test ``x -> x f(x)``.

    Requires the center to be linear (the exponent map a homomorphism on
    ``Z``), which makes ``f`` a linear map on exponent vectors.
    """
    if not structure.center(P).linear:
        raise PreconditionError("exhaustive sweep needs a linear center")
    total = P.p ** central_hom_data(P).log_count
    jobs = [(P, s, min(s + chunk, total)) for s in range(0, total, chunk)]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(_sweep_chunk, jobs))
    else:
        parts = [_sweep_chunk(j) for j in jobs]
    return SweepResult(*(sum(x) for x in zip(*parts)))
