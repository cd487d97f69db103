from fractions import Fraction as F

import pytest

from okounkov.errors import MismatchedBasisError
from okounkov.wfield import (
    WeightBasis, WeightScalar, WeightVector, ceil, compare, compare_any, dot, floor,
    format_number, number_from_json, number_to_json, rational_rank, sqrt_of_rational,
    squarefree_split,
)


def test_compare_surd_vs_rational(s5):
    x = s5 * 3 + 7
    assert compare(x, WeightScalar.rational(14, x.basis)) == -1
    assert compare(x, x) == 0
    assert compare(s5 * 2, s5 + s5) == 0


def test_compare_any_lifts():
    assert compare_any(WeightScalar.sqrt(2), F(7, 5)) == 1
    assert compare_any(WeightScalar.sqrt(2), F(3, 2)) == -1


def test_mismatched_basis_raises():
    with pytest.raises(MismatchedBasisError):
        compare(WeightScalar.sqrt(2), WeightScalar.sqrt(3))


def test_dependent_surds_rejected():
    # sqrt(8) = 2 sqrt(2): the square-free cores collide
    with pytest.raises(ValueError):
        WeightBasis.sqrt(2, 8)


def test_squarefree_split():
    assert squarefree_split(8) == (2, 2) or squarefree_split(8) == (2, 2)
    assert squarefree_split(45) == (3, 5)


def test_dot_examples(s5):
    a = WeightVector([1, s5])
    assert compare(dot(a, (2, 3)), s5 * 3 + 2) == 0
    assert dot(a, (0, 0)).simplify() == 0
    b = WeightVector([2, s5 * 3 + 7])
    assert compare(dot(b, (1, 1)), s5 * 3 + 9) == 0


def test_rational_rank(s5):
    assert rational_rank(WeightVector([1, s5])) == 2
    assert rational_rank(WeightVector([1, 3])) == 1
    assert rational_rank(WeightVector([s5, s5 * 2])) == 1


def test_floor_ceil(s5):
    assert floor(s5) == 2
    assert ceil(s5) == 3
    assert floor(s5 * -1) == -3
    assert floor(F(7, 2)) == 3


def test_nonpositive_weights_rejected(s5):
    with pytest.raises(ValueError):
        WeightVector([1, 0])
    with pytest.raises(ValueError):
        WeightVector([s5 - 3, 1])


def test_sqrt_of_rational():
    assert sqrt_of_rational(F(9, 4)) == F(3, 2)
    r = sqrt_of_rational(F(1, 2))
    assert compare_any(r * r, F(1, 2)) == 0


def test_json_round_trip(s5):
    for x in (F(-3, 7), s5 * F(2, 3) + 1):
        y = number_from_json(number_to_json(x))
        assert compare_any(x, y) == 0
    assert format_number(F(3, 4)) == "3/4"
    assert "sqrt(5)" in format_number(s5)
