#!/usr/bin/env python3
"""T-积系统、微扰、生成函数、散射与顶点映射"""

from fractions import Fraction

import pytest

from compositions import parse_composition
from errors import (
    DisjointnessError, MalformedVertexMapError, NonRespectingConfigurationError, NotPrimitiveError,
    SeriesDivisionError, TruncationError, UnknownDecorationError,
)
from product_systems import (
    Character, Coupling, Decoration, DecorationRegistry, PerturbedSystem, TargetPoly, ToyCausalSystem, VertexMap,
    a_product, bogoliubov_extract, generalized_R, generating_function, generating_function_w, green_function,
    has_time_ties, inverse_t_exponential, r_product, respects, scattering_blocks, scattering_check,
    set_partitions, t_exponential, target_poly_from_json, tits_kernel_elements, toy_T_component,
    verify_causal_factorization, verify_generating_function, verify_vacuum_stability, vertex_renormalize,
)
from scalars import I_UNIT, ONE, frac
from species_algebra import H, hopf_power_action, mult
from steinmann_arrows import ArrowDirection
from zie_cells import dynkin_element, make_cell

A = Decoration("A", 1)
B = Decoration("B", 0)
S = Decoration("S", 0)


def C(text):
    return parse_composition(text)


@pytest.fixture
def toy():
    return ToyCausalSystem(n_g=2, n_j=2)


# ===== 装饰与目标代数 =====

def test_decorations():
    with pytest.raises(UnknownDecorationError):
        Decoration("")
    registry = DecorationRegistry([A, B])
    assert registry["A"] is A
    assert registry.symbols() == ["A", "B"]
    with pytest.raises(UnknownDecorationError):
        registry.register(Decoration("A", 5))
    with pytest.raises(UnknownDecorationError):
        registry["Z"]
    assert has_time_ties({1: B, 2: S})
    assert not has_time_ties({1: A, 2: B})


def test_target_poly_arithmetic():
    x = TargetPoly.monomial(0, 2, ("A",), 1, j=1)
    one = TargetPoly.one(0, 2)
    assert (one + x) * (one - x) == one - x * x
    inverse = (one + x).inverse()
    assert inverse == one - x + x * x
    assert (one + x) * inverse == one
    assert (x * x * x).is_zero()


def test_target_poly_errors():
    with pytest.raises(SeriesDivisionError):
        TargetPoly.monomial(0, 1, (), 2).inverse()
    with pytest.raises(SeriesDivisionError):
        TargetPoly.monomial(0, 1, ("A",)).inverse()
    with pytest.raises(TruncationError):
        TargetPoly.one(0, 1).j_coefficient(2)
    with pytest.raises(TruncationError):
        TargetPoly(-1, 0)


def test_target_poly_truncation_is_part_of_equality():
    assert TargetPoly.one(0, 1) != TargetPoly.one(0, 2)
    assert (TargetPoly.one(0, 1) + TargetPoly.one(0, 2)).n_j == 1


def test_target_poly_json():
    p = TargetPoly(1, 2, {(("A", "B"), -1, 1, 2): I_UNIT, ((), 0, 0, 0): frac(1, 3)})
    obj = p.to_json()
    assert obj["trunc"] == {"j": 2, "g": 1}
    assert target_poly_from_json(obj) == p


def test_coupling():
    c = Coupling.quantum()
    assert c.coeff == -I_UNIT and c.hbar == -1
    squared = c.power(2)
    assert squared.coeff == -ONE and squared.hbar == -2
    assert c.inverse().coeff == I_UNIT and c.inverse().hbar == 1
    with pytest.raises(SeriesDivisionError):
        Coupling(0)


# ===== T-积 =====

def test_toy_component_orders_by_time():
    value = toy_T_component({1, 2}, {1: B, 2: A}, 0, 0)
    assert value == TargetPoly.monomial(0, 0, ("A", "B"))
    with pytest.raises(UnknownDecorationError):
        toy_T_component({1, 2}, {1: B}, 0, 0)


def test_evaluate_is_homomorphic(toy):
    assignment = {1: A, 2: B, 3: S}
    a, b = H(C("(1)")), H(C("(23)"))
    assert toy.evaluate(mult(a, b), assignment) == toy.evaluate(a, assignment) * toy.evaluate(b, assignment)
    assert toy.stats["cache_hits"] >= 1


def test_reverse_product_applies_antipode(toy):
    assignment = {1: A, 2: B}
    assert toy.reverse(H(C("(1)")), assignment) == -toy.evaluate(H(C("(1)")), assignment)
    expanded = -H(C("(12)")) + H(C("(1,2)")) + H(C("(2,1)"))
    assert toy.reverse(H(C("(12)")), assignment) == toy.evaluate(expanded, assignment)


def test_retarded_product_and_causality(toy):
    later = r_product(toy, {2: B}, {1: A})
    ab = TargetPoly.monomial(2, 2, ("A", "B"))
    ba = TargetPoly.monomial(2, 2, ("B", "A"))
    assert later == ab - ba
    assert r_product(toy, {2: Decoration("B", 2)}, {1: A}).is_zero()
    assert a_product(toy, {2: B}, {1: A}).is_zero()
    with pytest.raises(DisjointnessError):
        r_product(toy, {1: B}, {1: A})


def test_generalized_R(toy):
    D = dynkin_element(make_cell({1, 2}, [C("(1,2)")]))
    assert generalized_R(toy, D, {1: A, 2: B}) == r_product(toy, {2: B}, {1: A})
    assert generalized_R(toy, D.element, {1: A, 2: B}) == generalized_R(toy, D, {1: A, 2: B})
    with pytest.raises(NotPrimitiveError):
        generalized_R(toy, H(C("(12)")), {1: A, 2: B})


def test_t_exponential_terms(toy):
    series = t_exponential(toy, A, n_j=2)
    assert series.terms[((), 0, 0, 0)] == ONE
    assert series.terms[(("A",), -1, 0, 1)] == -I_UNIT
    assert series.terms[(("A", "A"), -2, 0, 2)] == frac(-1, 2)


def test_t_exponential_inverse(toy):
    forward = t_exponential(toy, A, n_j=2)
    backward = inverse_t_exponential(toy, A, n_j=2)
    assert forward * backward == TargetPoly.one(0, 2)
    assert backward * forward == TargetPoly.one(0, 2)


# ===== 因果分解 =====

def test_respects():
    assignment = {1: A, 2: B}
    assert respects(C("(1,2)"), assignment)
    assert not respects(C("(2,1)"), assignment)
    assert respects(C("(12)"), assignment)


def test_causal_factorization(toy):
    assignment = {1: Decoration("A", 2), 2: Decoration("B", 1), 3: Decoration("C", 0)}
    assert verify_causal_factorization(toy, {1, 2, 3}, assignment)
    with pytest.raises(NonRespectingConfigurationError):
        verify_causal_factorization(toy, {1, 2}, {1: B, 2: S})


def test_causal_factorization_four_points(toy):
    assignment = {
        1: Decoration("A", 0), 2: Decoration("B", 3), 3: Decoration("A", -1), 4: Decoration("C", Fraction(3, 2)),
    }
    assert verify_causal_factorization(toy, {1, 2, 3, 4}, assignment)


def test_tits_kernel():
    G = C("(1,23)")
    kernel = tits_kernel_elements({1, 2, 3}, G)
    assert kernel
    for a in kernel:
        assert hopf_power_action(a, G).is_zero()


# ===== 微扰 =====

def test_perturbed_first_order():
    base = ToyCausalSystem(n_g=1, n_j=0)
    perturbed = PerturbedSystem(base, S, n_g=1, coupling=Coupling.unity())
    value = perturbed.component([1], {1: A})
    assert value.g_coefficient(0).terms == {(("A",), 0, 0, 0): ONE}
    assert value.g_coefficient(1).terms == {(("A", "S"), 0, 0, 0): ONE, (("S", "A"), 0, 0, 0): -ONE}


def test_perturbation_vanishes_before_interaction():
    base = ToyCausalSystem(n_g=2, n_j=0)
    perturbed = PerturbedSystem(base, S, n_g=2, coupling=Coupling.unity())
    early = Decoration("A", -1)
    assert perturbed.component([1], {1: early}) == base.component([1], {1: early})
    advanced = PerturbedSystem(base, S, n_g=2, coupling=Coupling.unity(), direction=ArrowDirection.ADVANCED)
    assert advanced.component([1], {1: A}) == base.component([1], {1: A})


@pytest.mark.parametrize("direction", list(ArrowDirection))
@pytest.mark.parametrize("coupling", [Coupling.unity(), Coupling.quantum()])
def test_generating_function_identity(toy, direction, coupling):
    assert verify_generating_function(toy, S, A, coupling, 2, 2, direction)


def test_generating_function_w(toy):
    c = Coupling.unity()
    assert generating_function_w(toy, S, A, c, 1, 1) == generating_function(
        toy, S, A, c, 1, 1, ArrowDirection.ADVANCED)


def test_requested_order_cannot_exceed_base_system():
    base = ToyCausalSystem(n_g=1, n_j=1)
    with pytest.raises(TruncationError):
        generating_function(base, S, A, Coupling.unity(), n_g=2, n_j=2)
    with pytest.raises(TruncationError):
        generating_function(base, S, A, Coupling.unity(), n_g=1, n_j=2)
    with pytest.raises(TruncationError):
        PerturbedSystem(base, S, n_g=2)
    with pytest.raises(TruncationError):
        t_exponential(base, A, n_j=3)
    V = generating_function(base, S, A, Coupling.unity(), n_g=1, n_j=1)
    assert (V.n_g, V.n_j) == (1, 1)


@pytest.mark.parametrize("coupling", [Coupling.unity(), Coupling.quantum()])
def test_bogoliubov_extraction(toy, coupling):
    V = generating_function(toy, S, A, coupling, 2, 2)
    perturbed = PerturbedSystem(toy, S, 2, coupling)
    assert bogoliubov_extract(V, coupling) == perturbed.component([1], {1: A}).truncated(2, 0)
    with pytest.raises(TruncationError):
        bogoliubov_extract(TargetPoly.one(2, 0), coupling)


# ===== 真空态与散射 =====

CHI = Character({"A": 2, "B": 3, "S": 5})


def test_character():
    assert CHI.of_word(("A", "B")) == frac(6)
    assert CHI.of_word(()) == ONE
    with pytest.raises(UnknownDecorationError):
        CHI.of_word(("Z",))


def test_vacuum_stability(toy):
    observable = TargetPoly.monomial(2, 2, ("A",), 1, j=1)
    assert verify_vacuum_stability(toy, S, CHI, observable, Coupling.unity(), 2)


def test_green_function_of_single_point(toy):
    G = green_function(toy, S, {1: A}, CHI, 1, Coupling.unity())
    assert G.terms == {((), 0, 0, 0): frac(2)}


def test_scattering(toy):
    assignment = {1: Decoration("A", 2), 2: Decoration("B", -1)}
    assert scattering_blocks(S, assignment) == (frozenset({1}), frozenset({2}))
    assert scattering_check(toy, S, assignment, CHI, 2, Coupling.unity())
    assert scattering_check(toy, S, assignment, CHI, 2, Coupling.quantum())
    with pytest.raises(NonRespectingConfigurationError):
        scattering_blocks(S, {1: Decoration("A", 0)})


# ===== 顶点映射 =====

def test_set_partitions():
    assert [len(list(set_partitions(range(k)))) for k in range(5)] == [1, 1, 2, 5, 15]


def test_vertex_map_rules():
    Z = VertexMap({("A", "A"): [(2, B)]})
    assert Z.apply([A]) == {A: ONE}
    assert Z.apply([A, Decoration("A", 3)]) == {B: frac(2)}
    assert Z.apply([A, B]) == {}
    with pytest.raises(MalformedVertexMapError):
        Z.apply([])
    with pytest.raises(MalformedVertexMapError):
        VertexMap({("A",): [(1, A), (1, B)]})


def test_identity_vertex_map_is_trivial():
    base = ToyCausalSystem(0, 0)
    assignment = {1: Decoration("A", 3), 2: Decoration("B", 2), 3: Decoration("C", 1)}
    renormalized = vertex_renormalize(base, VertexMap())
    assert renormalized.component([1, 2, 3], assignment) == base.component([1, 2, 3], assignment)


def test_vertex_renormalization_composes():
    base = ToyCausalSystem(0, 0)
    assignment = {1: Decoration("A", 3), 2: Decoration("A", 2), 3: Decoration("A", 1)}
    Z = VertexMap({("A", "A"): [(2, Decoration("B", 0))]})
    Zp = VertexMap({("A", "A"): [(1, Decoration("A", 5))], ("A", "A", "A"): [(3, Decoration("C", 4))]})
    nested = vertex_renormalize(vertex_renormalize(base, Z), Zp)
    composed = vertex_renormalize(base, Z.compose(Zp))
    labels = [1, 2, 3]
    assert nested.component(labels, assignment) == composed.component(labels, assignment)
    assert not composed.component(labels, assignment).is_zero()


def test_decoration_times_are_rational():
    assert Decoration("A", Fraction(1, 3)).time == Fraction(1, 3)
