#!/usr/bin/env python3
"""Σ 的 Hopf 结构、Q 基与装饰元素"""

import pytest

from compositions import EMPTY, concat, enumerate_compositions, parse_composition, restrict
from errors import DisjointnessError, DomainError
from scalars import ONE, frac, scalar
from species_algebra import (
    BASIS_CACHE_SIZE, H, SigElement, _antipode_of, _h_in_q, _q_in_h, antipode, clear_caches, commutator, comult,
    counit, decorate, decorated_antipode, decorated_comult, decorated_mult, from_q_coordinates, h_to_q,
    hopf_power_action, hopf_power_by_coproduct, is_primitive, linear_combination, mult, q_comult, q_to_h, relabel,
    sig_from_json, sig_to_json, to_q_coordinates, unit,
)


def C(text):
    return parse_composition(text)


def HC(text):
    return H(C(text))


def test_mult_examples():
    assert mult(HC("(1)"), HC("(2)")) == HC("(1,2)")
    assert mult(HC("(12)").scale(2), HC("(3)")) == HC("(12,3)").scale(2)
    assert commutator(HC("(1)"), HC("(2)")) == HC("(1,2)") - HC("(2,1)")
    with pytest.raises(DisjointnessError):
        mult(HC("(1)"), HC("(1)"))


def test_unit_is_central():
    a = HC("(12,3)")
    assert commutator(unit(), a).is_zero()
    assert counit(unit()) == ONE
    assert not counit(a)


def test_comult_examples():
    assert comult(HC("(12)"), {1}, {2}) == {(C("(1)"), C("(2)")): ONE}
    assert comult(HC("(2,1)"), {1}, {2}) == {(C("(1)"), C("(2)")): ONE}
    assert comult(HC("(1,2)"), set(), {1, 2}) == {(EMPTY, C("(1,2)")): ONE}
    with pytest.raises(DomainError):
        comult(HC("(12)"), {1}, {1, 2})


def test_antipode_examples():
    assert antipode(unit()) == unit()
    assert antipode(HC("(1)")) == -HC("(1)")
    assert antipode(HC("(12)")) == -HC("(12)") + HC("(1,2)") + HC("(2,1)")


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_antipode_inversion_relations(n):
    I = frozenset(range(1, n + 1))
    for F in enumerate_compositions(I):
        left, right = SigElement(I, {}), SigElement(I, {})
        labels = sorted(I)
        for mask in range(1 << n):
            S = frozenset(l for k, l in enumerate(labels) if mask >> k & 1)
            a, b = H(restrict(F, S)), H(restrict(F, I - S))
            left = left + mult(a, antipode(b))
            right = right + mult(antipode(a), b)
        assert left.is_zero() and right.is_zero()


def test_q_basis_examples():
    assert q_to_h(C("(1,2)")) == HC("(1,2)")
    half = frac(1, 2)
    expected = HC("(12)") - HC("(1,2)").scale(half) - HC("(2,1)").scale(half)
    assert q_to_h(C("(12)")) == expected
    coords = h_to_q(C("(12)"))
    assert coords.coefficient(C("(12)")) == ONE
    assert coords.coefficient(C("(1,2)")) == half
    assert coords.coefficient(C("(2,1)")) == half


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_q_round_trip(n):
    for F in enumerate_compositions(range(1, n + 1)):
        assert from_q_coordinates(to_q_coordinates(H(F))) == H(F)
        assert to_q_coordinates(q_to_h(F)) == H(F)


def test_q_product_and_coproduct():
    for F in enumerate_compositions({1, 2}):
        for G in enumerate_compositions({3}):
            assert mult(q_to_h(F), q_to_h(G)) == q_to_h(concat(F, G))
    F = C("(12,3)")
    assert q_comult(H(F), {1, 2}, {3}) == {(C("(12)"), C("(3)")): ONE}
    assert q_comult(H(F), {1}, {2, 3}) == {}
    assert comult(q_to_h(F), {1}, {2, 3}) == {}


def test_primitivity():
    assert is_primitive(q_to_h(C("(12)")))
    assert is_primitive(q_to_h(C("(123)")))
    assert not is_primitive(HC("(12)"))
    assert is_primitive(HC("(1)"))
    with pytest.raises(DomainError):
        is_primitive(unit())


def test_hopf_power_action():
    assert hopf_power_action(HC("(123)"), C("(2,13)")) == HC("(2,13)")
    a = HC("(12,3)") - HC("(3,12)")
    assert hopf_power_action(a, C("(13,2)")) == HC("(1,2,3)") - HC("(3,1,2)")
    for F in enumerate_compositions({1, 2, 3}):
        for G in enumerate_compositions({1, 2, 3}):
            assert hopf_power_action(H(F), G) == hopf_power_by_coproduct(F, G)
    with pytest.raises(DomainError):
        hopf_power_action(HC("(12)"), C("(1,3)"))


def test_relabel():
    a = HC("(1,2)")
    assert relabel(a, {1: 1, 2: 2}) == a
    assert relabel(a, {1: 2, 2: 1}) == HC("(2,1)")
    twice = relabel(relabel(a, {1: "a", 2: "b"}), {"a": 3, "b": 4})
    assert twice == relabel(a, {1: 3, 2: 4})
    with pytest.raises(DomainError):
        relabel(a, {1: 3, 2: 3})


def test_decorated_operations():
    A = decorate(HC("(1)"), {1: "A"})
    B = decorate(HC("(2)"), {2: "B"})
    assert decorated_antipode(A) == decorate(-HC("(1)"), {1: "A"})
    assert decorated_mult(A, B) == decorate(HC("(1,2)"), {1: "A", 2: "B"})
    both = decorate(HC("(12)"), {1: "A", 2: "B"})
    ((left, right), c), = decorated_comult(both, {1}, {2}).items()
    assert left == (C("(1)"), ((1, "A"),)) and right == (C("(2)"), ((2, "B"),)) and c == ONE
    x = decorate(HC("(12,3)"), {1: "A", 2: "A", 3: "S"})
    assert decorated_antipode(x) == decorate(antipode(HC("(12,3)")), {1: "A", 2: "A", 3: "S"})


def test_json_and_complex_coefficients():
    a = linear_combination({1, 2}, [(scalar(1, 2), C("(12)")), (frac(-1, 3), C("(2,1)"))])
    assert sig_from_json(sig_to_json(a)) == a
    assert sig_to_json(a)["terms"][0]["coeff"] == {"re": "1", "im": "2"}


def test_basis_caches_are_bounded():
    for cached in (_antipode_of, _q_in_h, _h_in_q):
        assert cached.cache_info().maxsize == BASIS_CACHE_SIZE
    antipode(H(parse_composition("(12,3)")))
    assert _antipode_of.cache_info().currsize > 0
    clear_caches()
    assert _antipode_of.cache_info().currsize == 0
