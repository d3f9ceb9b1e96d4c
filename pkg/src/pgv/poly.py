"""Sparse multivariate polynomials with exact integer coefficients.

A monomial is a sorted tuple of variable indices (repetition encodes powers),
so ``(0, 0, 3)`` is ``v0^2 v3``.  Terms are kept in a dict with no zero
coefficients; iteration order is canonical (sorted by degree, then indices).
"""

from __future__ import annotations

from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .linalg import valuation

Monomial = tuple[int, ...]


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(sorted(a + b))


class Poly:
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, int] | None = None):
        self.terms: dict[Monomial, int] = {}
        if terms:
            for m, c in terms.items():
                if c:
                    self.terms[tuple(sorted(m))] = self.terms.get(tuple(sorted(m)), 0) + c
            self.terms = {m: c for m, c in self.terms.items() if c}

    @classmethod
    def const(cls, c: int) -> "Poly":
        return cls({(): c}) if c else cls()

    @classmethod
    def var(cls, v: int) -> "Poly":
        return cls({(v,): 1})

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other) -> "Poly":
        other = _lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return _raw(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return _raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-_lift(other))

    def __rsub__(self, other) -> "Poly":
        return _lift(other) - self

    def __mul__(self, other) -> "Poly":
        if isinstance(other, int):
            if not other:
                return Poly()
            return _raw({m: c * other for m, c in self.terms.items()})
        out: dict[Monomial, int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return _raw({m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = Poly.const(other)
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- inspection -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    def variables(self) -> set[int]:
        return {v for m in self.terms for v in m}

    def sorted_terms(self) -> list[tuple[Monomial, int]]:
        return sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0]))

    def constant(self) -> int:
        return self.terms.get((), 0)

    def content_valuation(self, p: int) -> int | None:
        """Largest ``s`` with ``p^s`` dividing every coefficient (``None`` for zero)."""
        if not self.terms:
            return None
        return min(valuation(c, p) for c in self.terms.values())

    def is_linear(self) -> bool:
        return all(len(m) <= 1 for m in self.terms)

    # -- transformations --------------------------------------------------

    def mod(self, N: int) -> "Poly":
        return _raw({m: c % N for m, c in self.terms.items() if c % N})

    def exact_div(self, q: int) -> "Poly":
        for c in self.terms.values():
            if c % q:
                raise ValueError(f"coefficient {c} not divisible by {q}")
        return _raw({m: c // q for m, c in self.terms.items()})

    def derivative(self, v: int) -> "Poly":
        out: dict[Monomial, int] = {}
        for m, c in self.terms.items():
            k = m.count(v)
            if k:
                i = m.index(v)
                rest = m[:i] + m[i + 1 :]
                out[rest] = out.get(rest, 0) + k * c
        return _raw({m: c for m, c in out.items() if c})

    def substitute(self, values: Mapping[int, int]) -> "Poly":
        """Partial evaluation at integer values."""
        out: dict[Monomial, int] = {}
        for m, c in self.terms.items():
            rest = []
            for v in m:
                if v in values:
                    c *= values[v]
                else:
                    rest.append(v)
            if c:
                key = tuple(rest)
                out[key] = out.get(key, 0) + c
        return _raw({m: c for m, c in out.items() if c})

    def evaluate(self, values: Sequence[int] | Mapping[int, int]) -> int:
        total = 0
        for m, c in self.terms.items():
            for v in m:
                c *= values[v]
            total += c
        return total

    # -- display ------------------------------------------------------------

    def format(self, name: Callable[[int], str] = lambda v: f"v{v}") -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            factors = [name(v) for v in m]
            body = "*".join(factors)
            mag = abs(c)
            if not body:
                text = str(mag)
            elif mag == 1:
                text = body
            else:
                text = f"{mag}*{body}"
            parts.append(("-" if c < 0 else "+", text))
        sign, first = parts[0]
        out = ("-" if sign == "-" else "") + first
        for sign, text in parts[1:]:
            out += f" {sign} {text}"
        return out

    def __repr__(self) -> str:
        return f"Poly({self.format()})"


def _raw(terms: dict[Monomial, int]) -> Poly:
    p = Poly.__new__(Poly)
    p.terms = terms
    return p


def _lift(x) -> Poly:
    if isinstance(x, Poly):
        return x
    if isinstance(x, int):
        return Poly.const(x)
    raise TypeError(f"cannot combine Poly with {type(x).__name__}")


# ---------------------------------------------------------------------------
# batch evaluation


class CompiledPolys:
    """A list of polynomials evaluated together over integer assignments.

    Every distinct monomial is evaluated once; each polynomial is then a
    coefficient row against the monomial vector.  Monomials are reduced modulo
    ``modulus`` while being built, so all values stay in machine integers.
    """

    def __init__(self, polys: Iterable[Poly], nvars: int, modulus: int):
        self.polys = list(polys)
        self.nvars = nvars
        self.modulus = modulus
        index: dict[Monomial, int] = {}
        for f in self.polys:
            for m in f.terms:
                index.setdefault(m, len(index))
        self.monomials = sorted(index, key=lambda m: (len(m), m))
        index = {m: i for i, m in enumerate(self.monomials)}
        self.rows = [[(index[m], c % modulus) for m, c in f.sorted_terms() if c % modulus] for f in self.polys]
        bound = modulus * modulus * max(1, len(self.monomials))
        self.dtype = np.int64 if bound < 2**62 else object

    def monomial_values(self, X: np.ndarray) -> np.ndarray:
        """``X`` is ``(N, nvars)``; returns ``(N, n_monomials)`` reduced values."""
        N = X.shape[0]
        X = X.astype(self.dtype) % self.modulus
        out = np.empty((N, len(self.monomials)), dtype=self.dtype)
        for k, m in enumerate(self.monomials):
            col = np.ones(N, dtype=self.dtype)
            for v in m:
                col = col * X[:, v] % self.modulus
            out[:, k] = col
        return out

    def evaluate_one(self, i: int, X: np.ndarray, mono: np.ndarray | None = None) -> np.ndarray:
        """Values of polynomial ``i``; builds only its own monomials unless ``mono`` is given."""
        N, mod = X.shape[0], self.modulus
        total = np.zeros(N, dtype=self.dtype)
        if mono is not None:
            for k, c in self.rows[i]:
                total = (total + c * mono[:, k]) % mod
            return total
        Xr = X.astype(self.dtype) % mod
        for k, c in self.rows[i]:
            col = np.full(N, c, dtype=self.dtype)
            for v in self.monomials[k]:
                col = col * Xr[:, v] % mod
            total = (total + col) % mod
        return total

    def evaluate(self, X: np.ndarray) -> np.ndarray:
        mono = self.monomial_values(X)
        return np.stack([self.evaluate_one(i, X, mono) for i in range(len(self.polys))], axis=1) if self.polys else np.zeros((X.shape[0], 0), dtype=self.dtype)


def parse_poly(text: str, resolve: Callable[[str], int]) -> Poly:
    """Parse an integer polynomial such as ``-a32 + a13 + 2*a13*a44``."""
    from sympy import Poly as SymPoly
    from sympy import sympify

    expr = sympify(text.replace("^", "**"), locals={})
    symbols = sorted(expr.free_symbols, key=lambda s: s.name)
    if not symbols:
        return Poly.const(int(expr))
    sp = SymPoly(expr, *symbols)
    index = [resolve(s.name) for s in symbols]
    terms: dict[Monomial, int] = {}
    for powers, coeff in sp.terms():
        if not coeff.is_integer:
            raise ValueError(f"non-integer coefficient {coeff} in {text!r}")
        mono = tuple(sorted(v for v, k in zip(index, powers) for _ in range(k)))
        terms[mono] = terms.get(mono, 0) + int(coeff)
    return Poly(terms)
