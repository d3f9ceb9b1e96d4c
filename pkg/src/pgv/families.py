"""Constructors for the studied group families and small control groups.

Relations are written as ``[x_i, x_j] = value`` with ``i < j`` and passed
through :func:`orient_commutators`, the single place where the printed
orientation is converted into the stored ``[x_j, x_i]`` form.
"""

from __future__ import annotations

from dataclasses import dataclass

from sympy import isprime

from .presentation import PcPresentation, PresentationError, orient_commutators

FAMILIES = ("A", "B", "C", "heisenberg")


@dataclass(frozen=True)
class FamilySpec:
    family: str
    p: int
    n: int | None = None

    def build(self) -> PcPresentation:
        return build_family(self.family, self.p, self.n)

    @property
    def label(self) -> str:
        if self.family == "A":
            return f"A(p={self.p}, n={self.n})"
        return f"{self.family}(p={self.p})"


def _unit(d: int, m: int, power: int) -> tuple[int, ...]:
    return tuple(power if k == m else 0 for k in range(d))


def _check_prime(p: int) -> None:
    if not isprime(p):
        raise PresentationError(f"p = {p} is not prime")


def family_a(p: int, n: int) -> PcPresentation:
    """Order ``p^(n+10)``, four generators of orders ``p^n, p^4, p^4, p^2``."""
    _check_prime(p)
    if n < 4:
        raise PresentationError(f"family A needs n >= 4, got n = {n}")
    d, q = 4, p**2
    rels = {
        (0, 1): _unit(d, 1, q),
        (0, 2): _unit(d, 1, q),
        (0, 3): _unit(d, 2, q),
        (1, 2): _unit(d, 0, p ** (n - 2)),
        (1, 3): _unit(d, 2, q),
        (2, 3): _unit(d, 1, q),
    }
    return orient_commutators(p, (n, 4, 4, 2), rels)


def family_b(p: int) -> PcPresentation:
    """Order ``p^9``, five generators of orders ``p^2`` (four) and ``p``."""
    _check_prime(p)
    d = 5
    rels = {
        (0, 1): _unit(d, 0, p),
        (0, 2): _unit(d, 2, p),
        (0, 4): _unit(d, 0, p),
        (1, 2): _unit(d, 1, p),
        (1, 4): _unit(d, 3, p),
        (2, 4): _unit(d, 3, p),
    }
    return orient_commutators(p, (2, 2, 2, 2, 1), rels)


def family_c(p: int) -> PcPresentation:
    """Order ``p^8``, four generators of order ``p^2``."""
    _check_prime(p)
    d = 4
    rels = {
        (0, 2): _unit(d, 3, p),
        (0, 3): _unit(d, 3, p),
        (1, 2): _unit(d, 0, p),
        (1, 3): _unit(d, 1, p),
        (2, 3): _unit(d, 3, p),
    }
    return orient_commutators(p, (2, 2, 2, 2), rels)


def heisenberg(p: int) -> PcPresentation:
    """Extraspecial group of order ``p^3``: ``[x_1, x_2] = x_3``."""
    _check_prime(p)
    return orient_commutators(p, (1, 1, 1), {(0, 1): (0, 0, 1)})


def abelian(p: int, orders) -> PcPresentation:
    _check_prime(p)
    return PcPresentation(p, tuple(orders), ())


def direct_product(G: PcPresentation, H: PcPresentation) -> PcPresentation:
    """Generators of ``G`` followed by those of ``H``; the factors commute."""
    if G.p != H.p:
        raise PresentationError("direct product of groups for different primes")
    d, dh = G.d, H.d
    comm = [(j, i, v + (0,) * dh) for j, i, v in G.comm]
    comm += [(j + d, i + d, (0,) * d + v) for j, i, v in H.comm]
    return PcPresentation(G.p, G.orders + H.orders, tuple(comm))


def build_family(family: str, p: int, n: int | None = None) -> PcPresentation:
    key = family if family in ("A", "B", "C") else family.lower()
    if key == "A":
        if n is None:
            raise PresentationError("family A needs n")
        return family_a(p, n)
    if key == "B":
        return family_b(p)
    if key == "C":
        return family_c(p)
    if key == "heisenberg":
        return heisenberg(p)
    raise PresentationError(f"unknown family {family!r}; expected one of {FAMILIES}")
