"""Collection with polynomial exponents and the endomorphism congruence system.

A candidate endomorphism sends ``x_i`` to ``x_i * x_1^{a_i1} ... x_d^{a_id}``.
Writing each relation's image in normal form with exponents that are integer
polynomials in the ``a_ij`` and comparing coordinates gives congruences
``F = 0 mod p^{e_m}``.  Variable ``a_ij`` has index ``i*d + j`` (0-based) and
modulus ``p^{e_j}``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Sequence

import numpy as np

from .homs import frattini_projection
from .linalg import det_mod_p
from .poly import CompiledPolys, Poly, parse_poly
from .presentation import PcPresentation, centred

SymElement = tuple[Poly, ...]


def sym_zero(P: PcPresentation) -> SymElement:
    return tuple(Poly() for _ in range(P.d))


def sym_constant(P: PcPresentation, vec) -> SymElement:
    return tuple(Poly.const(int(x)) for x in vec)


def sym_unit(P: PcPresentation, i: int) -> SymElement:
    return sym_constant(P, P.generator(i))


def _correction(P: PcPresentation, u: SymElement, v: SymElement) -> list[Poly]:
    out = [Poly() for _ in range(P.d)]
    for k, j, _ in P.comm:
        t = u[k] * v[j]
        if t:
            c = P.comm_signed(k, j)
            for m in range(P.d):
                if c[m]:
                    out[m] = out[m] + t * c[m]
    return out


def sym_multiply(P: PcPresentation, u: SymElement, v: SymElement) -> SymElement:
    """Coordinates ``u_m + v_m + sum_{k>j} u_k v_j [x_k, x_j]_m`` (no reduction)."""
    corr = _correction(P, u, v)
    return tuple(a + b + c for a, b, c in zip(u, v, corr))


def sym_power(P: PcPresentation, u: SymElement, N: int) -> SymElement:
    """``u^N``: ``N u_m + C(N,2) sum_{k>j} u_k u_j [x_k, x_j]_m``; any integer ``N``."""
    binom = N * (N - 1) // 2
    corr = _correction(P, u, u)
    return tuple(a * N + c * binom for a, c in zip(u, corr))


def sym_commutator(P: PcPresentation, u: SymElement, v: SymElement) -> SymElement:
    out = [Poly() for _ in range(P.d)]
    for k, j, _ in P.comm:
        t = u[k] * v[j] - u[j] * v[k]
        if t:
            c = P.comm_signed(k, j)
            for m in range(P.d):
                if c[m]:
                    out[m] = out[m] + t * c[m]
    return tuple(out)


def sym_evaluate(P: PcPresentation, u: SymElement, values) -> tuple[int, ...]:
    return tuple(f.evaluate(values) % m for f, m in zip(u, P.moduli))


# ---------------------------------------------------------------------------
# the generated system


@dataclass(frozen=True)
class Equation:
    """``poly = 0 mod p^t`` with unit content; ``raw`` is the form before dividing out ``p^s``."""

    poly: Poly
    t: int
    raw: Poly
    raw_t: int
    source: str


def normalise(F: Poly, t: int, p: int, source: str) -> Equation | None:
    """Divide out the ``p``-content; ``None`` when the congruence is vacuous."""
    F = F.mod(p**t)
    s = F.content_valuation(p)
    if s is None or s >= t:
        return None
    G = F.exact_div(p**s)
    N = p ** (t - s)
    G = Poly({m: centred(c, N) for m, c in G.terms.items()})
    return Equation(G, t - s, F, t, source)


@dataclass
class CongruenceSystem:
    P: PcPresentation
    equations: list[Equation]
    centrality: list[Equation]
    frattini_free: tuple[int, ...]
    frattini_reducers: tuple[tuple[int, ...], ...]
    _compiled: dict = field(default_factory=dict, repr=False)

    @property
    def p(self) -> int:
        return self.P.p

    @property
    def d(self) -> int:
        return self.P.d

    @property
    def nvars(self) -> int:
        return self.P.d * self.P.d

    def var(self, i: int, j: int) -> int:
        return i * self.d + j

    def var_depth(self, v: int) -> int:
        """``log_p`` of the modulus of variable ``v``."""
        return self.P.orders[v % self.d]

    @property
    def depths(self) -> tuple[int, ...]:
        return tuple(self.var_depth(v) for v in range(self.nvars))

    def var_name(self, v: int) -> str:
        i, j = divmod(v, self.d)
        return f"a{i + 1}{j + 1}" if self.d <= 9 else f"a{i + 1}_{j + 1}"

    def resolve(self, name: str) -> int:
        m = re.fullmatch(r"a(\d+)_(\d+)", name) or (re.fullmatch(r"a(\d)(\d)", name) if self.d <= 9 else None)
        if not m:
            raise ValueError(f"unknown variable {name!r}")
        i, j = int(m.group(1)) - 1, int(m.group(2)) - 1
        if not (0 <= i < self.d and 0 <= j < self.d):
            raise ValueError(f"variable {name!r} out of range")
        return self.var(i, j)

    def format(self, eq: Equation) -> str:
        return f"{eq.poly.format(self.var_name)} = 0 mod {self.p}^{eq.t}"

    # -- evaluation on integer assignments --------------------------------

    def images(self, values: Sequence[int]) -> tuple[tuple[int, ...], ...]:
        """Concrete generator images for an assignment."""
        from . import collect

        P = self.P
        return tuple(
            collect.multiply(P, P.generator(i), tuple(values[self.var(i, j)] % P.moduli[j] for j in range(P.d)))
            for i in range(P.d)
        )

    def satisfies(self, values: Sequence[int], level: int | None = None) -> bool:
        """All equations hold modulo ``p^min(t, level)`` (full moduli when ``level`` is ``None``)."""
        for eq in self.equations:
            t = eq.t if level is None else min(eq.t, level)
            if t and eq.poly.evaluate(values) % self.p**t:
                return False
        return True

    def is_central(self, values: Sequence[int]) -> bool:
        return all(eq.poly.evaluate(values) % self.p**eq.t == 0 for eq in self.centrality)

    def pattern_matrix(self, values: Sequence[int]) -> list[list[int]]:
        """Induced action on ``G/Phi`` (rows: free generators)."""
        p = self.p
        out = []
        for c in self.frattini_free:
            v = [(int(c == j) + values[self.var(c, j)]) % p for j in range(self.d)]
            for r in self.frattini_reducers:
                col = next(k for k, x in enumerate(r) if x)
                if v[col]:
                    f = v[col]
                    v = [(a - f * b) % p for a, b in zip(v, r)]
            out.append([v[k] for k in self.frattini_free])
        return out

    def invertible(self, values: Sequence[int]) -> bool:
        return det_mod_p(self.pattern_matrix(values), self.p) != 0

    def compiled(self, which: str = "equations", level: int = 1) -> CompiledPolys:
        """Equations (or centrality equations) compiled for batch evaluation mod ``p^level``."""
        key = (which, level)
        if key not in self._compiled:
            eqs = self.equations if which == "equations" else self.centrality
            self._compiled[key] = CompiledPolys([e.poly for e in eqs], self.nvars, self.p**level)
        return self._compiled[key]

    def satisfied_mask(self, X: np.ndarray, level: int = 1) -> np.ndarray:
        """Rows of ``X`` satisfying every equation mod ``p^min(t, level)``; evaluated progressively."""
        comp = self.compiled("equations", level)
        order = sorted(range(len(self.equations)), key=lambda i: (len(self.equations[i].poly.variables()), len(comp.rows[i])))
        keep = np.arange(X.shape[0])
        sub = X
        for i in order:
            if not len(keep):
                break
            mod = self.p ** min(self.equations[i].t, level)
            ok = comp.evaluate_one(i, sub) % mod == 0
            keep, sub = keep[ok], sub[ok]
        mask = np.zeros(X.shape[0], dtype=bool)
        mask[keep] = True
        return mask

    def full_satisfied_mask(self, X: np.ndarray) -> np.ndarray:
        top = max((e.t for e in self.equations), default=1)
        return self.satisfied_mask(X, level=top)


def symbolic_images(P: PcPresentation) -> list[SymElement]:
    """``alpha(x_i) = x_i * prod_j x_j^{a_ij}`` in normal form."""
    d = P.d
    out = []
    for i in range(d):
        e = tuple(Poly.var(i * d + j) for j in range(d))
        out.append(sym_multiply(P, sym_unit(P, i), e))
    return out


def sym_apply(P: PcPresentation, images: Sequence[SymElement], w) -> SymElement:
    """``alpha(x^w) = alpha(x_1)^{w_1} ... alpha(x_d)^{w_d}`` for a concrete vector ``w``."""
    out = sym_zero(P)
    for img, k in zip(images, w):
        if k:
            out = sym_multiply(P, out, sym_power(P, img, int(k)))
    return out


def generate_system(P: PcPresentation) -> CongruenceSystem:
    """Relation-preservation congruences, centrality system and invertibility data."""
    p, d = P.p, P.d
    alpha = symbolic_images(P)
    eqs: list[Equation] = []
    seen: set[tuple[Poly, int]] = set()

    def emit(F: Poly, t: int, source: str, bucket: list[Equation]) -> None:
        eq = normalise(F, t, p, source)
        if eq is None:
            return
        key = (eq.poly, eq.t)
        if key in seen:
            return
        seen.add(key)
        bucket.append(eq)

    for i in range(d):
        img = sym_power(P, alpha[i], P.moduli[i])
        for m in range(d):
            emit(img[m], P.orders[m], f"x{i + 1}^{P.moduli[i]} @ x{m + 1}", eqs)
    for j in range(d):
        for i in range(j):
            lhs = sym_commutator(P, alpha[j], alpha[i])
            rhs = sym_apply(P, alpha, P.comm_value(j, i))
            for m in range(d):
                emit(lhs[m] - rhs[m], P.orders[m], f"[x{j + 1},x{i + 1}] @ x{m + 1}", eqs)

    central: list[Equation] = []
    seen.clear()
    for i in range(d):
        for j in range(d):
            for m in range(d):
                F = Poly()
                for k in range(d):
                    c = P.comm_value(k, j)[m]
                    if c:
                        F = F + Poly.var(i * d + k) * c
                emit(F, P.orders[m], f"e_x{i + 1} commutes with x{j + 1} @ x{m + 1}", central)

    free, reducers = frattini_projection(P)
    return CongruenceSystem(P, eqs, central, free, reducers)


# ---------------------------------------------------------------------------
# hand-derived fixtures


@dataclass(frozen=True)
class Fixture:
    label: str
    poly: Poly
    k: int
    source: str


def load_fixtures(name: str, system: CongruenceSystem, n: int | None = None) -> list[Fixture]:
    """Read ``data/fixtures/<name>.txt``; exponents may mention ``n``."""
    text = resources.files("pgv").joinpath("data", "fixtures", f"{name}.txt").read_text()
    return parse_fixtures(text, system, n)


def parse_fixtures(text: str, system: CongruenceSystem, n: int | None = None) -> list[Fixture]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [s.strip() for s in line.split("|")]
        if len(parts) < 3:
            raise ValueError(f"line {lineno}: expected 'label | polynomial | exponent [| source]'")
        label, poly_text, k_text = parts[:3]
        source = parts[3] if len(parts) > 3 else ""
        k_expr = k_text.replace(" ", "")
        if "n" in k_expr:
            if n is None:
                raise ValueError(f"line {lineno}: exponent {k_text!r} needs n")
            k_expr = k_expr.replace("n", str(n))
        if not re.fullmatch(r"[+-]?\d+([+-]\d+)*", k_expr):
            raise ValueError(f"line {lineno}: bad exponent {k_text!r}")
        k = sum(int(t) for t in re.findall(r"[+-]?\d+", k_expr))
        out.append(Fixture(label, parse_poly(poly_text, system.resolve), k, source))
    return out


def fixture_violations(fixtures: Sequence[Fixture], X: np.ndarray, p: int, level: int = 1) -> dict[str, int]:
    """Count rows of ``X`` violating each fixture mod ``p^min(k, level)``."""
    nvars = X.shape[1]
    counts = {}
    for fx in fixtures:
        mod = p ** min(fx.k, level)
        comp = CompiledPolys([fx.poly], nvars, mod)
        vals = comp.evaluate_one(0, X)
        counts[fx.label] = int(np.count_nonzero(vals % mod))
    return counts


def fixture_sweep(system: CongruenceSystem, fixtures: Sequence[Fixture], chunk: int = 1 << 20) -> tuple[int, int, dict[str, int]]:
    """Enumerate every assignment mod ``p``; keep those satisfying the system mod ``p``.

    Returns ``(total, surviving, violations per fixture)`` where violations
    count surviving assignments failing a fixture mod ``p``.
    """
    p, nv = system.p, system.nvars
    total = p**nv
    surviving = 0
    viol = {fx.label: 0 for fx in fixtures}
    powers = p ** np.arange(nv - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        X = (idx[:, None] // powers) % p
        X = X[system.satisfied_mask(X, level=1)]
        surviving += len(X)
        for label, c in fixture_violations(fixtures, X, p).items():
            viol[label] += c
    return total, surviving, viol
