import pytest
from hypothesis import given, settings

from oracles import (
    all_elements,
    brute_agemo_derived,
    brute_center,
    brute_derived,
    class2_presentations,
    has_abelian_direct_factor,
)
from pgv import collect, structure
from pgv.families import abelian, direct_product, family_a, family_b, family_c, heisenberg
from pgv.structure import Relation, compare_subgroups, section_type

A4, A5, B, C, H = family_a(3, 4), family_a(3, 5), family_b(3), family_c(3), heisenberg(3)


def codes(P, elements):
    return {collect.pack(P, g) for g in elements}


def test_derived_subgroup_examples():
    g = structure.derived_subgroup(A4)
    assert g.order == 3**6 and str(g.type) == "(9,9,9)"
    gb = structure.derived_subgroup(B)
    assert gb.order == 3**4 and gb.type.is_elementary
    assert structure.derived_subgroup(abelian(3, (2, 1))).order == 1


def test_center_examples():
    assert compare_subgroups(structure.center(A4), structure.derived_subgroup(A4)) is Relation.EQUAL
    z5 = structure.center(A5)
    assert z5.order == 3**7 and str(z5.type) == "(27,9,9)"
    zc = structure.center(C)
    assert zc.order == 3**4 and zc.type.is_elementary
    assert compare_subgroups(zc, structure.frattini(C)) is Relation.EQUAL


def test_agemo_examples():
    assert compare_subgroups(structure.agemo_above_derived(A4, 2), structure.center(A4)) is Relation.EQUAL
    assert structure.agemo_above_derived(B, 0).order == B.order
    k = structure.agemo_above_derived(B, 1)
    assert k.order == 3**4
    assert compare_subgroups(k, structure.derived_subgroup(B)) is Relation.EQUAL


def test_frattini_examples():
    assert structure.frattini(A4).order == 3**10 and structure.frattini_rank(A4) == 4
    phi_b = structure.frattini(B)
    assert phi_b.order == 3**4 and structure.frattini_rank(B) == 5
    assert compare_subgroups(phi_b, structure.derived_subgroup(B)) is Relation.EQUAL
    phi_c = structure.frattini(C)
    assert phi_c.order == 3**4 and structure.frattini_rank(C) == 4
    assert compare_subgroups(structure.derived_subgroup(C), phi_c) is Relation.LESS
    assert structure.derived_subgroup(C).order == 3**3


def test_omega_examples():
    z = structure.center(A4)
    assert compare_subgroups(structure.omega_of_central(z, 2), z) is Relation.EQUAL
    w = structure.omega_of_central(structure.center(B), 1)
    assert w.order == 3**4
    assert compare_subgroups(w, structure.derived_subgroup(B)) is Relation.EQUAL
    assert structure.omega_of_central(z, 0).order == 1


def test_section_types():
    assert str(section_type(A5, "G/γ2")) == "(27,9,9,9)"
    assert str(section_type(B, "G/γ2")) == "(3,3,3,3,3)"
    assert str(section_type(C, "Z")) == "(3,3,3,3)"
    assert str(section_type(B, "Z")) == "(9,3,3,3)"
    assert str(section_type(A4, "G/Phi")) == "(3,3,3,3)"
    assert section_type(A4, "Z/g2").log_order == 0
    with pytest.raises(ValueError):
        section_type(A4, "nope")


def test_exponent_examples():
    assert structure.exponent(A4) == 81
    assert structure.exponent(B) == 9
    assert structure.exponent(H) == 3
    assert structure.exponent(family_b(2)) == 4
    assert structure.exponent(family_c(2)) == 4


@pytest.mark.parametrize("P, count", [(C, 6561), (B, 19683), (A4, 4782969)], ids=["C", "B", "A4"])
def test_enumerate_elements(P, count):
    assert structure.enumerate_elements(P) == count == P.order


def test_enumeration_cap():
    with pytest.raises(structure.CapExceeded):
        structure.enumerate_elements(B, cap=1000)


def test_purely_nonabelian():
    assert structure.is_purely_nonabelian(A4)
    assert structure.is_purely_nonabelian(B)
    HC = direct_product(H, abelian(3, (1,)))
    assert not structure.is_purely_nonabelian(HC)
    assert has_abelian_direct_factor(HC)
    assert not has_abelian_direct_factor(H)
    z, order = structure.direct_factor_witness(HC)
    assert order == 3 and collect.is_central(HC, z)


def test_compare_subgroups():
    assert compare_subgroups(structure.derived_subgroup(A5), structure.center(A5)) is Relation.LESS
    assert compare_subgroups(structure.center(B), structure.frattini(B)) is Relation.GREATER
    z = structure.center(C)
    assert compare_subgroups(z, z) is Relation.EQUAL


@pytest.mark.parametrize("n", [4, 5, 6])
def test_family_a_chain(n):
    P = family_a(3, n)
    rel = compare_subgroups(structure.derived_subgroup(P), structure.center(P))
    assert rel is (Relation.EQUAL if n == 4 else Relation.LESS)
    assert compare_subgroups(structure.center(P), structure.frattini(P)) is Relation.LESS
    assert structure.exponent(P) == 3**n


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("n", [4, 5, 6, 7, 8])
def test_family_a_parametric_structure(p, n):
    P = family_a(p, n)
    assert P.log_order == n + 10
    assert structure.center(P).type.exponents == ((n - 2, 2, 2) if n > 4 else (2, 2, 2))
    assert section_type(P, "G/γ2").log_exponent == max(n - 2, 2)
    assert structure.frattini_rank(P) == 4
    assert structure.is_purely_nonabelian(P)


# brute-force agreement on random small groups


@settings(max_examples=40)
@given(class2_presentations(primes=(2, 3), max_d=4, max_e=2, max_log_order=5))
def test_center_and_derived_match_brute_force(P):
    Z, gamma = structure.center(P), structure.derived_subgroup(P)
    bz = brute_center(P)
    assert codes(P, bz) == structure.brute_force_center(P)
    assert Z.order == len(bz)
    assert all(Z.contains(z) for z in bz)
    bg = brute_derived(P)
    assert gamma.order == len(bg)
    assert all(gamma.contains(g) for g in bg)
    assert bg <= bz  # class 2


@settings(max_examples=30)
@given(class2_presentations(primes=(2, 3), max_d=4, max_e=2, max_log_order=5))
def test_agemo_and_frattini_match_brute_force(P):
    for i in range(0, P.max_exponent + 1):
        K = structure.agemo_above_derived(P, i)
        brute = brute_agemo_derived(P, i)
        assert K.order == len(brute)
        assert all(K.contains(g) for g in brute)
    assert structure.frattini(P).order == len(brute_agemo_derived(P, 1))


@settings(max_examples=30)
@given(class2_presentations(primes=(2, 3), max_d=3, max_e=2, max_log_order=4))
def test_purely_nonabelian_matches_brute_force(P):
    assert structure.is_purely_nonabelian(P) == (not has_abelian_direct_factor(P))


@settings(max_examples=30)
@given(class2_presentations(primes=(2, 3), max_d=4, max_e=2, max_log_order=6))
def test_orders_multiply(P):
    Z, gamma = structure.center(P), structure.derived_subgroup(P)
    assert structure.enumerate_elements(P) == P.order
    assert gamma.log_order + section_type(P, "G/γ2").log_order == P.log_order
    assert Z.log_order >= gamma.log_order
    exp = max(collect.element_order(P, g) for g in all_elements(P))
    assert structure.exponent(P) == exp


def test_omega_of_group_small():
    els = structure.omega_of_group(H, 1)
    assert len(els) == 27
