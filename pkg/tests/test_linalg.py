import itertools

from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from oracles import _rank
from pgv.linalg import (
    det_mod_p,
    howell_form,
    in_module,
    left_kernel,
    module_log_size,
    rank_mod_p,
    smith_normal_form,
    solve_mod_p,
    valuation,
)


def span(rows, N, n):
    """All Z/N-combinations of ``rows`` (brute force)."""
    out = {tuple([0] * n)}
    for r in rows:
        out = {tuple((a + c * b) % N for a, b in zip(v, r)) for v in out for c in range(N)}
    return out


@st.composite
def modules(draw):
    p = draw(st.sampled_from([2, 3]))
    k = draw(st.integers(1, 2))
    n = draw(st.integers(1, 3))
    N = p**k
    rows = draw(st.lists(st.lists(st.integers(0, N - 1), min_size=n, max_size=n), max_size=3))
    return p, k, n, rows


@given(modules())
def test_howell_membership_and_size(mod):
    p, k, n, rows = mod
    N = p**k
    form = howell_form(rows, p, k, n)
    S = span(rows, N, n)
    assert span(form, N, n) == S
    assert p ** module_log_size(form, p, k) == len(S)
    for v in itertools.product(range(N), repeat=n):
        assert in_module(form, v, p, k) == (v in S)


@given(modules(), st.randoms(use_true_random=False))
def test_howell_form_is_canonical(mod, r):
    p, k, n, rows = mod
    N = p**k
    S = sorted(span(rows, N, n))
    other = [list(r.choice(S)) for _ in range(4)] + [list(x) for x in rows]
    r.shuffle(other)
    # a different generating set of the same module
    assert howell_form(other, p, k, n) == howell_form(rows, p, k, n)


@settings(max_examples=40)
@given(modules())
def test_left_kernel(mod):
    p, k, n, rows = mod
    if not rows:
        return
    N = p**k
    r = len(rows)
    form = left_kernel(rows, p, k)
    kern = {
        x
        for x in itertools.product(range(N), repeat=r)
        if all(sum(x[i] * rows[i][j] for i in range(r)) % N == 0 for j in range(n))
    }
    assert span(form, N, r) == kern


@given(st.integers(2, 4), st.sampled_from([2, 3, 5]), st.data())
def test_rank_and_det_mod_p(n, p, data):
    M = [data.draw(st.lists(st.integers(-20, 20), min_size=n, max_size=n)) for _ in range(n)]
    assert rank_mod_p(M, p) == _rank([[x % p for x in row] for row in M], p)
    assert det_mod_p(M, p) == int(Matrix(M).det()) % p


@given(st.sampled_from([2, 3]), st.integers(1, 4), st.integers(1, 3), st.data())
def test_solve_mod_p(p, nvars, neq, data):
    rows = [data.draw(st.lists(st.integers(0, p - 1), min_size=nvars, max_size=nvars)) for _ in range(neq)]
    rhs = data.draw(st.lists(st.integers(0, p - 1), min_size=neq, max_size=neq))
    brute = {
        y for y in itertools.product(range(p), repeat=nvars)
        if all(sum(a * b for a, b in zip(r, y)) % p == c for r, c in zip(rows, rhs))
    }
    res = solve_mod_p(rows, rhs, nvars, p)
    if res is None:
        assert not brute
        return
    part, basis = res
    got = set()
    for coeffs in itertools.product(range(p), repeat=len(basis)):
        y = list(part)
        for c, v in zip(coeffs, basis):
            y = [(a + c * b) % p for a, b in zip(y, v)]
        got.add(tuple(y))
    assert got == brute
    assert len(got) == p ** len(basis)


@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_smith_normal_form(m, n, data):
    A = [data.draw(st.lists(st.integers(-30, 30), min_size=n, max_size=n)) for _ in range(m)]
    diag, V, Vinv = smith_normal_form(A)
    assert Matrix(V) * Matrix(Vinv) == Matrix.eye(n)
    assert all(b % a == 0 for a, b in zip(diag, diag[1:]))
    ref = sympy_snf(Matrix(A))
    ref_diag = [abs(ref[i, i]) for i in range(min(m, n)) if ref[i, i] != 0]
    assert sorted(map(abs, diag)) == sorted(ref_diag)
    # columns of A V past the invariant factors vanish
    AV = Matrix(A) * Matrix(V)
    for j in range(len(diag), n):
        assert all(x == 0 for x in AV[:, j])


def test_valuation():
    assert valuation(54, 3) == 3
    assert valuation(-8, 2) == 3
    assert valuation(7, 5) == 0
