#!/usr/bin/env python3
"""胞腔、Dynkin 元素、Steinmann 关系与 Ruelle 恒等式"""

import pytest

from compositions import enumerate_compositions, parse_composition
from config import override_settings
from errors import BoundExceededError, DomainError, NonGenericPointError, NotACellError, NotPrimitiveError, ParseError
from scalars import ONE
from species_algebra import H, SigElement, is_primitive
from verification_suites import CELL_COUNTS, example_cell
from zie_cells import (
    Leaf, ZieElement, advanced_cell, brute_force_cells, cell_from_json, cell_of_point, cell_to_json, channel,
    dynkin_element, dynkin_rank, enumerate_cells, lie_bracket, make_cell, parse_tree, retarded_cell,
    steinmann_quadruples, steinmann_relation_quotient_dimension, steinmann_sum, total_retarded, tree_bracket,
    tree_to_Q, verify_ruelle, zie_dimension,
)


def C(text):
    return parse_composition(text)


def HC(text):
    return H(C(text))


# ===== 树 =====

def test_parse_tree():
    tree = parse_tree("[[1,2],3]")
    assert str(tree) == "[[1,2],3]"
    assert parse_tree("[12]") == Leaf(frozenset({1, 2}))
    for bad in ["[1,1]", "[1,2", "[1,2]]"]:
        with pytest.raises(ParseError):
            parse_tree(bad)


def test_tree_elements_are_primitive():
    bracket = tree_to_Q(parse_tree("[1,2]")).element
    assert bracket == HC("(1,2)") - HC("(2,1)")
    assert is_primitive(tree_to_Q(parse_tree("[[1,2],3]")).element)
    assert is_primitive(tree_to_Q(parse_tree("[[12,3],4]")).element)


def test_lie_bracket_matches_tree_bracket():
    a, b = tree_to_Q(parse_tree("[1,2]")), tree_to_Q(parse_tree("3"))
    joined = tree_bracket(parse_tree("[1,2]"), parse_tree("3"))
    assert lie_bracket(a, b).element == tree_to_Q(joined).element


def test_jacobi_identity():
    total = sum(
        (tree_to_Q(parse_tree(text)).element for text in ["[[3,1],2]", "[[2,3],1]"]),
        tree_to_Q(parse_tree("[[1,2],3]")).element,
    )
    assert total.is_zero()


def test_zie_element_rejects_non_primitive():
    with pytest.raises(NotPrimitiveError):
        ZieElement(HC("(12)"))


# ===== 胞腔 =====

@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_cell_counts(n):
    cells = list(enumerate_cells(range(1, n + 1), seed=0))
    assert len(cells) == CELL_COUNTS[n]
    assert len({c.channels for c in cells}) == len(cells)


@pytest.mark.parametrize("n", [3, 4])
def test_adjacency_search_matches_brute_force(n):
    ground = range(1, n + 1)
    assert {c.channels for c in enumerate_cells(ground, seed=3)} == {c.channels for c in brute_force_cells(ground)}


def test_cell_enumeration_is_seed_independent():
    first = [c.channels for c in enumerate_cells({1, 2, 3, 4}, seed=1)]
    second = [c.channels for c in enumerate_cells({1, 2, 3, 4}, seed=7)]
    assert first == second


def test_enumerate_cells_errors():
    with pytest.raises(DomainError):
        list(enumerate_cells([]))
    with override_settings(cell_bound=3):
        with pytest.raises(BoundExceededError):
            list(enumerate_cells(range(4)))


def test_cell_of_point():
    cell = cell_of_point({1, 2, 3}, (1, 1, -2))
    assert cell.channels == frozenset({C("(1,23)"), C("(12,3)"), C("(2,13)")})
    with pytest.raises(NonGenericPointError):
        cell_of_point({1, 2, 3}, (1, -1, 0))
    with pytest.raises(DomainError):
        cell_of_point({1, 2}, (1, 1))


def test_infeasible_channel_set():
    with pytest.raises(NotACellError):
        make_cell({1, 2, 3}, [C("(1,23)"), C("(2,13)"), C("(3,12)")])


def test_example_cell_is_realizable():
    cell = example_cell()
    assert len(cell) == 7
    assert C("(1,234)") in cell


def test_cell_json():
    cell = retarded_cell({1, 2, 3}, 2)
    assert cell_from_json(cell_to_json(cell)) == cell


def test_flip():
    cell = retarded_cell({1, 2}, 1)
    assert cell.flip(C("(1,2)")) == frozenset({C("(2,1)")})
    with pytest.raises(DomainError):
        cell.flip(C("(2,1)"))


def test_channel_sides_nonempty():
    with pytest.raises(DomainError):
        channel({1}, set())


# ===== Dynkin 元素 =====

def test_dynkin_two_points():
    cell = make_cell({1, 2}, [C("(1,2)")])
    assert dynkin_element(cell).element == HC("(12)") - HC("(2,1)")
    assert total_retarded(1, {1, 2}).element == HC("(12)") - HC("(2,1)")
    assert dynkin_element(advanced_cell({1, 2}, 1)).element == HC("(12)") - HC("(1,2)")


def test_dynkin_one_point():
    (cell,) = enumerate_cells({1})
    assert dynkin_element(cell).element == HC("(1)")


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_total_retarded_closed_form(n):
    ground = frozenset(range(1, n + 1))
    for i in ground:
        terms = {
            F: (ONE if len(F) % 2 == 1 else -ONE)
            for F in enumerate_compositions(ground)
            if i in F.lumps[-1]
        }
        assert total_retarded(i, ground).element == SigElement(ground, terms)


@pytest.mark.parametrize("n", [3, 4])
def test_dynkin_elements_distinct(n):
    elements = [dynkin_element(c).element for c in enumerate_cells(range(1, n + 1))]
    keys = {tuple(sorted((str(F), str(v)) for F, v in e.terms.items())) for e in elements}
    assert len(keys) == len(elements)


@pytest.mark.parametrize("n, rank", [(1, 1), (2, 2), (3, 6), (4, 26), (5, 150)])
def test_dynkin_rank_equals_zie_dimension(n, rank):
    assert dynkin_rank(range(1, n + 1)) == rank
    assert zie_dimension(n) == rank


# ===== Steinmann 关系 =====

def test_no_steinmann_quadruples_for_three_points():
    assert list(steinmann_quadruples({1, 2, 3})) == []
    assert steinmann_relation_quotient_dimension({1, 2, 3}) == 6


def test_steinmann_relations_four_points():
    quadruples = list(steinmann_quadruples({1, 2, 3, 4}))
    assert quadruples
    for quad in quadruples:
        assert steinmann_sum(quad).is_zero()


# ===== Ruelle 恒等式 =====

def test_ruelle_small_pairs():
    for S1 in enumerate_cells({1, 2}):
        for S2 in enumerate_cells({3}):
            assert verify_ruelle(S1, S2, seed=0)
    for S1 in enumerate_cells({1}):
        for S2 in enumerate_cells({2, 3}):
            assert verify_ruelle(S1, S2, seed=5)


def test_ruelle_two_by_two():
    for S1 in enumerate_cells({1, 2}):
        for S2 in enumerate_cells({3, 4}):
            assert verify_ruelle(S1, S2, seed=2)


def test_ruelle_five_points_any_witness():
    for S1 in list(enumerate_cells({1, 2, 3}))[:3]:
        for S2 in enumerate_cells({4, 5}):
            assert verify_ruelle(S1, S2, seed=0)
            assert verify_ruelle(S1, S2, seed=11)


def test_bracket_of_single_points():
    (a,) = enumerate_cells({1})
    (b,) = enumerate_cells({2})
    lhs = lie_bracket(dynkin_element(a), dynkin_element(b)).element
    rhs = dynkin_element(make_cell({1, 2}, [C("(1,2)")])).element - dynkin_element(make_cell({1, 2}, [C("(2,1)")])).element
    assert lhs == rhs
    assert isinstance(lhs, SigElement)
