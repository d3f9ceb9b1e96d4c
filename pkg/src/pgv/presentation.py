"""Class-2 polycyclic presentations with trivial power relations.

A presentation fixes a prime ``p``, generator exponents ``e_1..e_d`` (generator
``x_i`` has order ``p**e_i``) and the non-trivial commutators.  Generators are
0-based in the API and 1-based in the text format.

Commutators are stored as ``[x_j, x_i]`` with ``j > i``, the orientation that
appears when a later generator is moved left past an earlier one during
collection.  The text format (and :func:`orient_commutators`) accepts the
opposite orientation ``[x_i, x_j]`` with ``i < j`` and inverts on load.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from sympy import isprime

Vector = tuple[int, ...]


class PresentationError(ValueError):
    """Malformed or inconsistent presentation input."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


@dataclass(frozen=True)
class PcPresentation:
    """Immutable class-2 pc presentation.

    ``comm`` holds ``(j, i, value)`` triples with ``j > i`` and ``value`` the
    reduced exponent vector of ``[x_j, x_i]``; absent pairs are trivial.
    """

    p: int
    orders: tuple[int, ...]
    comm: tuple[tuple[int, int, Vector], ...] = ()
    _table: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        p, orders = self.p, tuple(int(e) for e in self.orders)
        if not isinstance(p, int) or p < 2 or not isprime(p):
            raise PresentationError(f"p must be prime, got {p!r}")
        if not orders:
            raise PresentationError("need at least one generator")
        if any(e < 1 for e in orders):
            raise PresentationError(f"generator exponents must be positive, got {orders}")
        d = len(orders)
        moduli = tuple(p**e for e in orders)
        table: dict[tuple[int, int], Vector] = {}
        for j, i, value in self.comm:
            if not (0 <= i < j < d):
                raise PresentationError(f"commutator index pair ({j}, {i}) must satisfy 0 <= i < j < {d}")
            if (j, i) in table:
                raise PresentationError(f"duplicate commutator entry for ({j}, {i})")
            value = tuple(int(v) for v in value)
            if len(value) != d:
                raise PresentationError(f"commutator ({j}, {i}) has {len(value)} entries, expected {d}")
            for m, v in enumerate(value):
                if not 0 <= v < moduli[m]:
                    raise PresentationError(
                        f"commutator ({j}, {i}) entry {m} = {v} outside [0, {moduli[m]})"
                    )
            if any(value):
                table[(j, i)] = value
        comm = tuple(sorted((j, i, v) for (j, i), v in table.items()))
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "comm", comm)
        object.__setattr__(self, "_table", table)

    @property
    def d(self) -> int:
        return len(self.orders)

    @property
    def moduli(self) -> tuple[int, ...]:
        return tuple(self.p**e for e in self.orders)

    @property
    def log_order(self) -> int:
        """``log_p |G|``."""
        return sum(self.orders)

    @property
    def order(self) -> int:
        return self.p**self.log_order

    @property
    def max_exponent(self) -> int:
        return max(self.orders)

    @property
    def is_abelian(self) -> bool:
        return not self._table

    def identity(self) -> Vector:
        return (0,) * self.d

    def generator(self, i: int, power: int = 1) -> Vector:
        v = [0] * self.d
        v[i] = power % self.moduli[i]
        return tuple(v)

    def comm_value(self, k: int, j: int) -> Vector:
        """Exponent vector of ``[x_k, x_j]`` for any ordered pair."""
        if k == j:
            return self.identity()
        if k > j:
            return self._table.get((k, j), self.identity())
        value = self._table.get((j, k))
        if value is None:
            return self.identity()
        return tuple((-v) % m for v, m in zip(value, self.moduli))

    def comm_signed(self, k: int, j: int) -> tuple[int, ...]:
        """Like :meth:`comm_value` but with centred representatives in ``(-m/2, m/2]``."""
        return tuple(centred(v, m) for v, m in zip(self.comm_value(k, j), self.moduli))

    def paper_relations(self) -> dict[tuple[int, int], Vector]:
        """Non-trivial ``[x_i, x_j]`` for ``i < j`` (0-based), the printed orientation."""
        return {(i, j): self.comm_value(i, j) for (j, i) in self._table}


def centred(value: int, modulus: int) -> int:
    value %= modulus
    return value - modulus if 2 * value > modulus else value


def orient_commutators(
    p: int, orders: Iterable[int], relations: Mapping[tuple[int, int], Iterable[int]]
) -> PcPresentation:
    """Build a presentation from ``[x_i, x_j] = value`` with ``i < j`` (0-based).

    The stored value ``[x_j, x_i]`` is the group inverse of the given one.  The
    inverse is first approximated by negation, then recomputed by collection
    until the table is stable.
    """
    orders = tuple(orders)
    moduli = tuple(p**e for e in orders)
    given: dict[tuple[int, int], Vector] = {}
    for (i, j), value in relations.items():
        if i == j:
            raise PresentationError(f"self-commutator [x_{i + 1}, x_{j + 1}]")
        if i > j:
            raise PresentationError(f"relation [x_{i + 1}, x_{j + 1}] must have i < j")
        if (i, j) in given:
            raise PresentationError(f"duplicate relation [x_{i + 1}, x_{j + 1}]")
        given[(i, j)] = tuple(int(v) % m for v, m in zip(value, moduli))

    from .collect import inverse

    stored = {(j, i): tuple((-v) % m for v, m in zip(val, moduli)) for (i, j), val in given.items()}
    for _ in range(8):
        trial = PcPresentation(p, orders, tuple((j, i, v) for (j, i), v in stored.items()))
        updated = {(j, i): inverse(trial, given[(i, j)]) for (j, i) in stored}
        if updated == stored:
            return trial
        stored = updated
    raise PresentationError("commutator inversion did not stabilise; values are not central")


# ---------------------------------------------------------------------------
# text format


_INT = re.compile(r"^-?\d+$")


def parse_presentation(text: str) -> PcPresentation:
    """Parse the line-based presentation format.

    ::

        p 3
        d 4
        orders 4 4 4 2
        comm 1 2 = 0 9 0 0     # [x_1, x_2] = x_2^9
    """
    p = d = None
    orders: tuple[int, ...] | None = None
    relations: dict[tuple[int, int], Vector] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        tokens = [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", line)]
        key, col = tokens[0]

        def ints(items, what):
            out = []
            for tok, c in items:
                if not _INT.match(tok):
                    raise PresentationError(f"expected integer for {what}, got {tok!r}", lineno, c)
                out.append(int(tok))
            return out

        if key == "p":
            if len(tokens) != 2:
                raise PresentationError("'p' takes exactly one value", lineno, col)
            (p,) = ints(tokens[1:], "p")
            if p < 2 or not isprime(p):
                raise PresentationError(f"p must be prime, got {p}", lineno, tokens[1][1])
        elif key == "d":
            if len(tokens) != 2:
                raise PresentationError("'d' takes exactly one value", lineno, col)
            (d,) = ints(tokens[1:], "d")
            if d < 1:
                raise PresentationError("d must be positive", lineno, tokens[1][1])
        elif key == "orders":
            if d is None:
                raise PresentationError("'orders' before 'd'", lineno, col)
            orders = tuple(ints(tokens[1:], "orders"))
            if len(orders) != d:
                raise PresentationError(f"expected {d} orders, got {len(orders)}", lineno, col)
            if any(e < 1 for e in orders):
                raise PresentationError("orders must be positive exponents", lineno, col)
        elif key == "comm":
            if p is None or orders is None:
                raise PresentationError("'comm' before 'p' and 'orders'", lineno, col)
            if len(tokens) < 4 or tokens[3][0] != "=":
                raise PresentationError("expected 'comm <i> <j> = <v_1> ... <v_d>'", lineno, col)
            i, j = ints(tokens[1:3], "generator index")
            if not (1 <= i <= d and 1 <= j <= d):
                raise PresentationError(f"generator index out of range 1..{d}", lineno, tokens[1][1])
            if i == j:
                raise PresentationError(f"self-commutator comm {i} {j}", lineno, tokens[1][1])
            if i > j:
                raise PresentationError("comm lines need i < j", lineno, tokens[1][1])
            if (i - 1, j - 1) in relations:
                raise PresentationError(f"duplicate comm entry {i} {j}", lineno, col)
            values = ints(tokens[4:], "exponent")
            if len(values) != d:
                raise PresentationError(f"expected {d} exponents, got {len(values)}", lineno, col)
            for m, (v, (_, c)) in enumerate(zip(values, tokens[4:])):
                if not 0 <= v < p ** orders[m]:
                    raise PresentationError(
                        f"exponent {v} out of range [0, {p ** orders[m]})", lineno, c
                    )
            relations[(i - 1, j - 1)] = tuple(values)
        else:
            raise PresentationError(f"unknown directive {key!r}", lineno, col)
    if p is None or d is None or orders is None:
        raise PresentationError("missing one of 'p', 'd', 'orders'")
    return orient_commutators(p, orders, relations)


def format_presentation(P: PcPresentation, header: str | None = None) -> str:
    """Serialise in the normalised text form accepted by :func:`parse_presentation`."""
    lines = []
    if header:
        lines.extend(f"# {h}" if h else "#" for h in header.splitlines())
    lines.append(f"p {P.p}")
    lines.append(f"d {P.d}")
    lines.append("orders " + " ".join(str(e) for e in P.orders))
    for (i, j), value in sorted(P.paper_relations().items()):
        lines.append(f"comm {i + 1} {j + 1} = " + " ".join(str(v) for v in value))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# consistency


@dataclass
class ConsistencyReport:
    failures: list[tuple[str, tuple[int, ...]]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.ok


def validate_consistency(P: PcPresentation) -> ConsistencyReport:
    """Run the overlap checks that make normal-form collection well defined.

    (a) commutator values are central; (b) they are killed by the orders of both
    generators involved; (c) collection is associative on generator triples;
    (d) ``x_i^{p^e_i}`` collected against every ``x_j`` from either side is
    trivial; (e) commutator values add as plain vectors in normal form, which
    is what the closed-form collection formulas rely on.
    """
    from .collect import commutator, multiply, power

    report = ConsistencyReport()
    d, ident = P.d, P.identity()
    gens = [P.generator(i) for i in range(d)]
    values = [(j, i, v) for j, i, v in P.comm]

    for j, i, c in values:
        for g in range(d):
            if multiply(P, c, gens[g]) != multiply(P, gens[g], c):
                report.failures.append(("central", (j, i, g)))
    for j, i, c in values:
        for k in (j, i):
            if power(P, c, P.moduli[k]) != ident:
                report.failures.append(("order", (j, i, k)))
    for k in range(d):
        for j in range(d):
            for i in range(d):
                left = multiply(P, multiply(P, gens[k], gens[j]), gens[i])
                right = multiply(P, gens[k], multiply(P, gens[j], gens[i]))
                if left != right:
                    report.failures.append(("associativity", (k, j, i)))
    for i in range(d):
        for j in range(d):
            if i == j:
                continue
            full = _power_by_squaring(P, gens[i], P.moduli[i])
            left, right = multiply(P, full, gens[j]), multiply(P, gens[j], full)
            if left != gens[j] or right != gens[j]:
                report.failures.append(("power-overlap", (i, j)))
            if power(P, commutator(P, gens[i], gens[j]), P.moduli[i]) != ident:
                report.failures.append(("power-overlap", (i, j)))
    for j, i, c in values:
        for g in range(d):
            expect = tuple((a + b) % m for a, b, m in zip(c, gens[g], P.moduli))
            if multiply(P, c, gens[g]) != expect or multiply(P, gens[g], c) != expect:
                report.failures.append(("additivity", (j, i, g)))
    return report


def _power_by_squaring(P: PcPresentation, g, N: int):
    """``g^N`` by repeated ``multiply`` only (independent of the closed-form power)."""
    from .collect import multiply

    result, base = P.identity(), g
    while N:
        if N & 1:
            result = multiply(P, result, base)
        base = multiply(P, base, base)
        N >>= 1
    return result
