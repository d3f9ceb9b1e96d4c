import random
from functools import cache

import pytest

from oracles import brute_autcent, brute_center, small_purely_nonabelian
from pgv import criteria, homs, structure
from pgv.criteria import adney_yen, ce_data, dichotomy, earnley_guard, jafari_odd, jafari_two, jafari_two_shape
from pgv.families import abelian, direct_product, family_a, family_b, family_c, heisenberg
from pgv.homs import PreconditionError, central_sanity_suite
from pgv.structure import AbelianSectionType, Relation, compare_subgroups

A4, A5, A6, B, C, H = family_a(3, 4), family_a(3, 5), family_a(3, 6), family_b(3), family_c(3), heisenberg(3)


def T(*exps, p=3):
    return AbelianSectionType.of(p, exps)


def test_adney_yen_family_a5():
    r = adney_yen(A5)
    assert (r.a, r.b, r.c, r.d) == (3, 2, 3, 3)
    Z = structure.center(A5)
    assert compare_subgroups(r.R, Z) is Relation.EQUAL
    assert compare_subgroups(r.K, Z) is Relation.EQUAL
    assert r.r_equals_k and r.cyclic_condition and r.abelian
    # R/[G,G] is generated by the image of x_1^9
    assert r.cyclic_witness == A5.generator(0)
    x1_9 = A5.generator(0, 9)
    assert Z.contains(x1_9) and not structure.derived_subgroup(A5).contains(x1_9)


def test_adney_yen_family_b_and_heisenberg():
    r = adney_yen(B)
    assert (r.a, r.b, r.c, r.d) == (2, 1, 1, 1)
    gamma = structure.derived_subgroup(B)
    assert compare_subgroups(r.R, gamma) is Relation.EQUAL
    assert compare_subgroups(r.R, structure.omega_of_central(structure.center(B), 1)) is Relation.EQUAL
    assert r.r_equals_k and r.abelian and not r.cyclic_condition
    h = adney_yen(H)
    assert (h.a, h.b, h.c, h.d) == (1, 1, 1, 1)
    assert compare_subgroups(h.R, structure.center(H)) is Relation.EQUAL and h.abelian


@pytest.mark.parametrize("P", [A4, A5, A6, B, C, H])
def test_adney_yen_invariants(P):
    r = adney_yen(P)
    assert r.d == min(r.a, r.c)
    assert r.abelian == (r.r_equals_k and (r.d == r.b or r.cyclic_condition))


def test_preconditions():
    for fn in (adney_yen, jafari_odd):
        with pytest.raises(PreconditionError):
            fn(direct_product(H, abelian(3, (1,))))
        with pytest.raises(PreconditionError):
            fn(family_b(2))
    with pytest.raises(PreconditionError):
        jafari_two(B)
    with pytest.raises(PreconditionError):
        dichotomy(family_c(2))


def test_jafari_odd_examples():
    assert jafari_odd(B) and jafari_odd(C)
    assert not jafari_odd(A4)


def test_jafari_two_examples():
    rb = jafari_two(family_b(2))
    assert rb.satisfied == (1,) and rb.condition == 1
    rc = jafari_two(family_c(2))
    assert rc.satisfied == (2,) and rc.condition == 2
    assert jafari_two_shape(T(1, 1, p=2), T(1, p=2))[:2] == (True, True)
    both = criteria.JafariTwo(True, True, False)
    assert both.condition == 1 and both.satisfied == (1, 2)
    assert criteria.JafariTwo(False, False, False).condition is None


def test_ce_data():
    assert ce_data(T(2, 1, 1)) == criteria.CeData(True, 9, 2)
    assert ce_data(T(3)) == criteria.CeData(True, 27, 0)
    assert not ce_data(T(2, 2)).is_ce
    assert not ce_data(T(1, 1)).is_ce


def test_jafari_two_shape_three():
    assert jafari_two_shape(T(2, 1, p=2), T(2, 1, 1, p=2)) == (False, False, True)
    assert jafari_two_shape(T(3, 1, p=2), T(2, p=2)) == (False, False, True)
    assert not jafari_two_shape(T(2, 2, p=2), T(2, p=2))[2]
    assert not jafari_two_shape(T(3, p=2), T(3, p=2))[2]


def test_earnley_guard():
    assert earnley_guard(H).applicable
    assert not earnley_guard(A4).applicable and earnley_guard(A4).exponent == 81
    assert not earnley_guard(abelian(3, (2,))).applicable
    assert not earnley_guard(heisenberg(2)).applicable


def test_dichotomy():
    b, c = dichotomy(B), dichotomy(C)
    assert (b.branch1, b.branch2, b.exponent, b.violation) == (False, True, 9, False)
    assert (c.branch1, c.branch2, c.exponent, c.violation) == (True, False, 9, False)
    # family A does not have elementary abelian automorphisms, so both branches fail
    a = dichotomy(A4)
    assert a.violation and not (a.branch1 or a.branch2)


@pytest.mark.parametrize("P", [A4, A5, A6, B, C, H])
def test_criteria_agree_with_sampling(P):
    rep = central_sanity_suite(P, 60, seed=7)
    assert adney_yen(P).abelian == rep.all_commute
    assert jafari_odd(P) == rep.all_order_p
    if jafari_odd(P):
        assert adney_yen(P).abelian


@cache
def autcent_shape(P, pairs=3000):
    """``(abelian, elementary abelian)`` for ``Autcent`` from the brute-force list."""
    central = brute_autcent(P)
    rng = random.Random(0)
    if len(central) <= 60:
        sample = [(f, g) for f in central for g in central]
    else:
        sample = [(rng.choice(central), rng.choice(central)) for _ in range(pairs)]
    comm = all(homs.compose(P, f, g) == homs.compose(P, g, f) for f, g in sample)
    elem = comm and all(homs.is_identity_map(P, homs.map_power(P, f, P.p)) for f in central)
    return comm, elem


def cheap(P, limit=20_000):
    return len(brute_center(P)) ** P.d <= limit


ODD = [P for P in small_purely_nonabelian(15, seed=1, primes=(3,), max_log_order=5) if cheap(P)]
TWO = [P for P in small_purely_nonabelian(15, seed=1, primes=(2,), max_log_order=5) if cheap(P)]


@pytest.mark.parametrize("P", ODD)
def test_odd_criteria_match_brute_force(P):
    comm, elem = autcent_shape(P)
    assert adney_yen(P).abelian == comm
    assert jafari_odd(P) == elem


@pytest.mark.parametrize("P", TWO)
def test_two_criteria_match_brute_force(P):
    _, elem = autcent_shape(P)
    assert bool(jafari_two(P).satisfied) == elem


def test_brute_force_cases_cover_both_outcomes():
    outcomes = {autcent_shape(P) for P in ODD} | {autcent_shape(P) for P in TWO}
    assert (True, True) in outcomes and (False, False) in outcomes
