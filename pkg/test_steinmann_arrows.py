#!/usr/bin/env python3
"""Steinmann 箭头：导子、推迟/超前元素、胞腔箭头与柯里化"""

import pytest

from compositions import FreshLabel, composition, parse_composition
from errors import DisjointnessError, FreshLabelCollisionError, NotSymmetricError
from scalars import frac
from species_algebra import H, SigElement, commutator, is_primitive, mult, unit
from steinmann_arrows import (
    ArrowDirection, FreshLabelPool, TruncatedSeriesOfSig, advanced_arrow, advanced_element, cell_arrow,
    cell_arrow_channels, cell_arrow_down, cell_arrow_up, curried_arrow_series, fresh_labels, iterated_arrow,
    one_lump, retarded_arrow, retarded_arrow_many, retarded_element, series_product, symmetrize, up_derivation,
)
from zie_cells import dynkin_element, enumerate_cells, make_cell, total_retarded

STAR = FreshLabel(1)


def C(text):
    return parse_composition(text)


def HC(text):
    return H(C(text))


def test_fresh_labels():
    assert fresh_labels(3) == (FreshLabel(1), FreshLabel(2), FreshLabel(3))
    assert fresh_labels(2, offset=4) == (FreshLabel(5), FreshLabel(6))
    pool = FreshLabelPool()
    assert pool.take(2, avoid=[FreshLabel(1)]) == (FreshLabel(2), FreshLabel(3))
    assert next(pool) == FreshLabel(4)


def test_single_arrows():
    x = HC("(1)")
    assert retarded_arrow(x, STAR) == H(composition({1, STAR})) - H(composition({STAR}, {1}))
    assert advanced_arrow(x, STAR) == H(composition({1, STAR})) - H(composition({1}, {STAR}))
    with pytest.raises(FreshLabelCollisionError):
        up_derivation(x, 1, (1, 0))


def test_arrow_difference_is_adjoint_action():
    x = HC("(12,3)")
    diff = advanced_arrow(x, STAR) - retarded_arrow(x, STAR)
    assert diff == commutator(one_lump([STAR]), x)


def test_arrows_are_derivations():
    a, b = HC("(1)"), HC("(2,3)")
    for arrow in (retarded_arrow, advanced_arrow):
        lhs = arrow(mult(a, b), STAR)
        rhs = mult(arrow(a, STAR), b) + mult(a, arrow(b, STAR))
        assert lhs == rhs


def test_arrows_commute():
    x = HC("(12,3)")
    s1, s2 = fresh_labels(2)
    forward = iterated_arrow(x, [s1, s2], order=[s1, s2])
    backward = iterated_arrow(x, [s1, s2], order=[s2, s1])
    assert forward == backward
    with pytest.raises(DisjointnessError):
        iterated_arrow(x, [s1, s2], order=[s1])


@pytest.mark.parametrize("r", [0, 1, 2, 3])
def test_closed_forms(r):
    Y = fresh_labels(r)
    I = {1, 2}
    assert retarded_element(Y, I) == iterated_arrow(one_lump(I), Y, ArrowDirection.RETARDED)
    assert advanced_element(Y, I) == iterated_arrow(one_lump(I), Y, ArrowDirection.ADVANCED)
    assert retarded_arrow_many(one_lump(I), Y) == retarded_element(Y, I)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_retarded_element_is_total_retarded_dynkin(n):
    ground = frozenset(range(1, n + 1))
    for i in ground:
        assert retarded_element(ground - {i}, {i}) == total_retarded(i, ground).element


@pytest.mark.parametrize("n", [1, 2, 3])
def test_arrows_preserve_primitivity(n):
    star, star2 = fresh_labels(2)
    for cell in enumerate_cells(range(1, n + 1)):
        D = dynkin_element(cell).element
        assert is_primitive(retarded_arrow(D, star))
        assert is_primitive(advanced_arrow(D, star))
        assert is_primitive(iterated_arrow(D, [star, star2]))


def test_retarded_element_of_empty_ground():
    assert retarded_element([], []) == unit()
    assert retarded_element([STAR], []).is_zero()


# ===== 胞腔上的箭头 =====

def test_cell_arrow_down_and_up():
    (cell,) = enumerate_cells({1})
    down = cell_arrow_down(cell, STAR)
    up = cell_arrow_up(cell, STAR)
    assert down.channels == frozenset({composition({1}, {STAR})})
    assert up.channels == frozenset({composition({STAR}, {1})})


@pytest.mark.parametrize("direction", list(ArrowDirection))
@pytest.mark.parametrize("r", [1, 2])
def test_arrow_commutes_with_dynkin_map(direction, r):
    Y = fresh_labels(r)
    for cell in enumerate_cells({1, 2}):
        arrowed = cell_arrow(cell, Y, direction)
        assert arrowed.channels == cell_arrow_channels(cell, Y, direction)
        expected = iterated_arrow(dynkin_element(cell).element, Y, direction)
        assert dynkin_element(arrowed).element == expected


def test_cell_arrow_three_points():
    for cell in enumerate_cells({1, 2, 3}):
        arrowed = cell_arrow_down(cell, STAR)
        assert dynkin_element(arrowed).element == retarded_arrow(dynkin_element(cell).element, STAR)


def test_cell_arrow_rejects_existing_label():
    cell = make_cell({1, 2}, [C("(1,2)")])
    with pytest.raises(FreshLabelCollisionError):
        cell_arrow_down(cell, 1)


# ===== 柯里化 =====

def test_symmetrize_averages_fresh_labels():
    s1, s2 = fresh_labels(2)
    x = H(composition({1}, {s1}, {s2}))
    sym = symmetrize(x, 2)
    expected = H(composition({1}, {s1}, {s2})) + H(composition({1}, {s2}, {s1}))
    assert sym == expected.scale(frac(1, 2))
    assert symmetrize(sym, 2) == sym


def test_series_requires_symmetry():
    s1, s2 = fresh_labels(2)
    ground = {1}
    components = [HC("(1)"), H(composition({1}, {s1})), H(composition({1}, {s1}, {s2}))]
    with pytest.raises(NotSymmetricError):
        TruncatedSeriesOfSig.build(ground, components)
    relaxed = TruncatedSeriesOfSig.build(ground, components, strict=False)
    assert relaxed.r_max == 2


@pytest.mark.parametrize("direction", list(ArrowDirection))
def test_curried_series_is_multiplicative(direction):
    a, b = HC("(1)"), HC("(23)")
    lhs = series_product(curried_arrow_series(a, 2, direction), curried_arrow_series(b, 2, direction))
    rhs = curried_arrow_series(mult(a, b), 2, direction)
    assert lhs == rhs


def test_series_product_needs_disjoint_grounds():
    x = curried_arrow_series(HC("(1)"), 1)
    with pytest.raises(DisjointnessError):
        series_product(x, x)


def test_curried_series_components():
    series = curried_arrow_series(HC("(1)"), 2)
    assert series.component(0) == HC("(1)")
    assert series.component(1) == retarded_arrow(HC("(1)"), STAR)
    assert isinstance(series.component(2), SigElement)
    assert series.to_json()["R_max"] == 2


def test_curried_series_leibniz_example():
    series = curried_arrow_series(HC("(1,2)"), 1)
    expected = mult(retarded_arrow(HC("(1)"), STAR), HC("(2)")) + mult(HC("(1)"), retarded_arrow(HC("(2)"), STAR))
    assert series.component(1) == expected
