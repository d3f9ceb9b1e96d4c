"""Exact linear algebra over ``Z/p^k`` and ``Z``.

Howell normal form gives a canonical generating set for a row module over the
local ring ``Z/p^k``: rows are in echelon form, every pivot is a power of
``p``, entries above a pivot are reduced modulo it, and (the Howell property)
the rows with leading zeros in the first ``j`` columns span every module
element with that many leading zeros.  The last property is what makes
membership testing by reduction and kernel extraction correct.
"""

from __future__ import annotations

from typing import Sequence

Row = tuple[int, ...]


def valuation(x: int, p: int) -> int:
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def howell_form(rows: Sequence[Sequence[int]], p: int, k: int, ncols: int | None = None) -> tuple[Row, ...]:
    """Howell normal form of the row module generated by ``rows`` in ``(Z/p^k)^n``."""
    N = p**k
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    work = [[x % N for x in r] for r in rows]
    work = [r for r in work if any(r)]
    pivots: list[tuple[int, int]] = []
    result: list[list[int]] = []
    for col in range(ncols):
        best, best_v = None, k
        for idx, r in enumerate(work):
            if r[col]:
                v = valuation(r[col], p)
                if v < best_v:
                    best, best_v = idx, v
        if best is None:
            continue
        piv = work.pop(best)
        scale = p**best_v
        unit = piv[col] // scale
        inv = pow(unit, -1, N)
        piv = [(x * inv) % N for x in piv]
        for r in work:
            if r[col]:
                f = r[col] // scale
                for c in range(col, ncols):
                    r[c] = (r[c] - f * piv[c]) % N
        aug = [(x * p ** (k - best_v)) % N for x in piv]
        if any(aug):
            work.append(aug)
        work = [r for r in work if any(r)]
        result.append(piv)
        pivots.append((col, scale))
    for i in range(len(result)):
        col, scale = pivots[i]
        for h in range(i):
            q = result[h][col] // scale
            if q:
                result[h] = [(a - q * b) % N for a, b in zip(result[h], result[i])]
    return tuple(tuple(r) for r in result)


def howell_pivots(form: Sequence[Row], p: int) -> list[tuple[int, int]]:
    """``(column, valuation)`` of each row's leading entry."""
    out = []
    for r in form:
        col = next(c for c, x in enumerate(r) if x)
        out.append((col, valuation(r[col], p)))
    return out


def module_log_size(form: Sequence[Row], p: int, k: int) -> int:
    """``log_p`` of the number of elements of the module."""
    return sum(k - v for _, v in howell_pivots(form, p))


def reduce_vector(form: Sequence[Row], vec: Sequence[int], p: int, k: int) -> tuple[int, ...]:
    """Remainder of ``vec`` after sweeping the Howell rows; zero iff ``vec`` is in the module."""
    N = p**k
    x = [v % N for v in vec]
    for r, (col, v) in zip(form, howell_pivots(form, p)):
        scale = p**v
        if x[col] % scale:
            continue
        q = x[col] // scale
        if q:
            x = [(a - q * b) % N for a, b in zip(x, r)]
    return tuple(x)


def in_module(form: Sequence[Row], vec: Sequence[int], p: int, k: int) -> bool:
    return not any(reduce_vector(form, vec, p, k))


def left_kernel(A: Sequence[Sequence[int]], p: int, k: int) -> tuple[Row, ...]:
    """Howell form of ``{x : x A = 0}`` over ``Z/p^k`` (``A`` is ``r x n``)."""
    r = len(A)
    if r == 0:
        return ()
    n = len(A[0])
    aug = [list(A[i]) + [1 if c == i else 0 for c in range(r)] for i in range(r)]
    form = howell_form(aug, p, k, n + r)
    kern = [row[n:] for row in form if not any(row[:n])]
    return howell_form(kern, p, k, r)


def rank_mod_p(rows: Sequence[Sequence[int]], p: int) -> int:
    return len(howell_form(rows, p, 1))


def det_mod_p(M: Sequence[Sequence[int]], p: int) -> int:
    n = len(M)
    A = [[x % p for x in row] for row in M]
    det = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c]), None)
        if piv is None:
            return 0
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det = det * A[c][c] % p
        inv = pow(A[c][c], -1, p)
        for r in range(c + 1, n):
            if A[r][c]:
                f = A[r][c] * inv % p
                A[r] = [(a - f * b) % p for a, b in zip(A[r], A[c])]
    return det % p


def solve_mod_p(rows: Sequence[Sequence[int]], rhs: Sequence[int], nvars: int, p: int):
    """Affine solution set of ``rows . y = rhs`` over ``F_p``.

    Returns ``(particular, null_basis)`` or ``None`` when inconsistent.
    """
    A = [[x % p for x in r] + [b % p] for r, b in zip(rows, rhs)]
    pivcols = []
    rank = 0
    for c in range(nvars):
        piv = next((i for i in range(rank, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = pow(A[rank][c], -1, p)
        A[rank] = [(x * inv) % p for x in A[rank]]
        for i in range(len(A)):
            if i != rank and A[i][c]:
                f = A[i][c]
                A[i] = [(a - f * b) % p for a, b in zip(A[i], A[rank])]
        pivcols.append(c)
        rank += 1
    for i in range(rank, len(A)):
        if A[i][nvars]:
            return None
    particular = [0] * nvars
    for i, c in enumerate(pivcols):
        particular[c] = A[i][nvars]
    free = [c for c in range(nvars) if c not in pivcols]
    basis = []
    for f in free:
        vec = [0] * nvars
        vec[f] = 1
        for i, c in enumerate(pivcols):
            vec[c] = (-A[i][f]) % p
        basis.append(vec)
    return particular, basis


# ---------------------------------------------------------------------------
# integer Smith form


def smith_normal_form(A: Sequence[Sequence[int]]):
    """Return ``(diag, V, Vinv)`` with ``U A V = S`` for some unimodular ``U``.

    ``diag`` lists the non-zero invariant factors (each dividing the next);
    only the column transform is tracked since callers need coordinates.
    """
    M = [list(r) for r in A]
    m = len(M)
    n = len(M[0]) if m else 0
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    Vinv = [[int(i == j) for j in range(n)] for i in range(n)]

    def col_add(dst, src, f):
        # column dst += f * column src
        for row in M:
            row[dst] += f * row[src]
        for row in V:
            row[dst] += f * row[src]
        Vinv[src] = [a - f * b for a, b in zip(Vinv[src], Vinv[dst])]

    def col_swap(a, b):
        for row in M:
            row[a], row[b] = row[b], row[a]
        for row in V:
            row[a], row[b] = row[b], row[a]
        Vinv[a], Vinv[b] = Vinv[b], Vinv[a]

    def col_neg(a):
        for row in M:
            row[a] = -row[a]
        for row in V:
            row[a] = -row[a]
        Vinv[a] = [-x for x in Vinv[a]]

    diag = []
    t = 0
    while t < min(m, n):
        entries = [(abs(M[i][j]), i, j) for i in range(t, m) for j in range(t, n) if M[i][j]]
        if not entries:
            break
        _, i0, j0 = min(entries)
        M[t], M[i0] = M[i0], M[t]
        if j0 != t:
            col_swap(t, j0)
        while True:
            done = True
            for i in range(t + 1, m):
                if M[i][t]:
                    q = M[i][t] // M[t][t]
                    M[i] = [a - q * b for a, b in zip(M[i], M[t])]
                    if M[i][t]:
                        done = False
            for j in range(t + 1, n):
                if M[t][j]:
                    q = M[t][j] // M[t][t]
                    col_add(j, t, -q)
                    if M[t][j]:
                        done = False
            if done:
                bad = next(
                    ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if M[i][j] % M[t][t]),
                    None,
                )
                if bad is None:
                    break
                M[t] = [a + b for a, b in zip(M[t], M[bad[0]])]
                done = False
            # move the smallest non-zero entry of row/column t to the pivot
            cands = [(abs(M[i][t]), i, t) for i in range(t, m) if M[i][t]]
            cands += [(abs(M[t][j]), t, j) for j in range(t, n) if M[t][j]]
            _, i1, j1 = min(cands)
            if i1 != t:
                M[t], M[i1] = M[i1], M[t]
            if j1 != t:
                col_swap(t, j1)
        if M[t][t] < 0:
            col_neg(t)
        diag.append(M[t][t])
        t += 1
    return diag, V, Vinv
