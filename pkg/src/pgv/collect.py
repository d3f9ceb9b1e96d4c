"""Normal-form arithmetic in a class-2 pc group.

Elements are exponent vectors ``(a_1, ..., a_d)`` standing for
``x_1^a_1 ... x_d^a_d`` with ``0 <= a_m < p^e_m``.  Everything is computed in
closed form from the bilinear commutator table; the corrections are central,
so the order in which they are accumulated does not matter.

The ``*_many`` variants act row-wise on integer arrays of shape ``(N, d)``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .presentation import PcPresentation, Vector

Element = Vector


@lru_cache(maxsize=256)
def _terms(P: PcPresentation) -> tuple[tuple[int, int, tuple[tuple[int, int], ...]], ...]:
    out = []
    for k, j, value in P.comm:
        nz = tuple((m, c) for m, c in enumerate(value) if c)
        out.append((k, j, nz))
    return tuple(out)


def _reduce(P: PcPresentation, coords) -> Element:
    return tuple(c % m for c, m in zip(coords, P.moduli))


def correction(P: PcPresentation, u, v) -> list[int]:
    """Unreduced ``sum_{k>j} u_k v_j [x_k, x_j]``: the collection term of ``u*v``."""
    out = [0] * P.d
    for k, j, nz in _terms(P):
        t = u[k] * v[j]
        if t:
            for m, c in nz:
                out[m] += t * c
    return out


def multiply(P: PcPresentation, u, v) -> Element:
    corr = correction(P, u, v)
    return _reduce(P, (a + b + c for a, b, c in zip(u, v, corr)))


def inverse(P: PcPresentation, u) -> Element:
    corr = correction(P, u, u)
    return _reduce(P, (-a + c for a, c in zip(u, corr)))


def power(P: PcPresentation, u, N: int) -> Element:
    """``u^N`` via ``x^{N u} * prod_{k>j} [x_k, x_j]^{C(N,2) u_k u_j}``.

    ``N`` may be negative or exceed the coordinate moduli; reduction happens
    only at the end.
    """
    binom = N * (N - 1) // 2
    corr = correction(P, u, u)
    return _reduce(P, (N * a + binom * c for a, c in zip(u, corr)))


def commutator(P: PcPresentation, u, v) -> Element:
    """``[u, v] = u^-1 v^-1 u v``, bilinear: ``prod_{k>j} [x_k,x_j]^{u_k v_j - u_j v_k}``."""
    out = [0] * P.d
    for k, j, nz in _terms(P):
        t = u[k] * v[j] - u[j] * v[k]
        if t:
            for m, c in nz:
                out[m] += t * c
    return _reduce(P, out)


def element_order(P: PcPresentation, u) -> int:
    ident = P.identity()
    order = 1
    u = _reduce(P, u)
    while u != ident:
        u = power(P, u, P.p)
        order *= P.p
    return order


def is_central(P: PcPresentation, u) -> bool:
    ident = P.identity()
    return all(commutator(P, u, P.generator(i)) == ident for i in range(P.d))


def product(P: PcPresentation, factors) -> Element:
    out = P.identity()
    for f in factors:
        out = multiply(P, out, f)
    return out


# ---------------------------------------------------------------------------
# packed codes


def strides(P: PcPresentation) -> tuple[int, ...]:
    """Mixed-radix place values; ``x_d`` is the fastest-moving coordinate."""
    out, acc = [], 1
    for m in reversed(P.moduli):
        out.append(acc)
        acc *= m
    return tuple(reversed(out))


def pack(P: PcPresentation, u) -> int:
    return sum(a * s for a, s in zip(u, strides(P)))


def unpack(P: PcPresentation, code: int) -> Element:
    out = []
    for s, m in zip(strides(P), P.moduli):
        out.append((code // s) % m)
    return tuple(out)


# ---------------------------------------------------------------------------
# row-wise numpy versions


def _dtype(P: PcPresentation):
    bound = max(P.moduli)
    return np.int64 if bound**3 * (P.d**2 + 2) < 2**62 else object


def as_array(P: PcPresentation, rows) -> np.ndarray:
    return np.asarray(rows, dtype=_dtype(P)).reshape(-1, P.d)


def _reduce_many(P: PcPresentation, arr: np.ndarray) -> np.ndarray:
    return arr % np.asarray(P.moduli, dtype=arr.dtype)


def correction_many(P: PcPresentation, U: np.ndarray, V: np.ndarray) -> np.ndarray:
    out = np.zeros(np.broadcast_shapes(U.shape, V.shape), dtype=U.dtype)
    for k, j, nz in _terms(P):
        t = U[..., k] * V[..., j]
        for m, c in nz:
            out[..., m] += t * c
    return out


def multiply_many(P: PcPresentation, U: np.ndarray, V: np.ndarray) -> np.ndarray:
    return _reduce_many(P, U + V + correction_many(P, U, V))


def power_many(P: PcPresentation, U: np.ndarray, N: int) -> np.ndarray:
    binom = N * (N - 1) // 2
    corr = correction_many(P, U, U) % np.asarray(P.moduli, dtype=U.dtype)
    return _reduce_many(P, (N % _lcm_mod(P)) * U + (binom % _lcm_mod(P)) * corr)


def commutator_many(P: PcPresentation, U: np.ndarray, V: np.ndarray) -> np.ndarray:
    out = np.zeros(np.broadcast_shapes(U.shape, V.shape), dtype=U.dtype)
    for k, j, nz in _terms(P):
        t = U[..., k] * V[..., j] - U[..., j] * V[..., k]
        for m, c in nz:
            out[..., m] += t * c
    return _reduce_many(P, out)


def _lcm_mod(P: PcPresentation) -> int:
    return max(P.moduli)


def pack_many(P: PcPresentation, U: np.ndarray) -> np.ndarray:
    return U @ np.asarray(strides(P), dtype=U.dtype)
