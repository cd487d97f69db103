from fractions import Fraction as F

import pytest
from flint import fmpq_poly

from okounkov.models import NodalCubicModel
from okounkov.series import RatFunc, TruncatedSeries
from okounkov.valuation import (
    FlagSpec, NuValuation, QmValuation, blowup_transform, flag_value, log_discrepancy,
    nu_value, qm_value,
)
from okounkov.wfield import WeightScalar, WeightVector, compare, compare_any, dot


@pytest.fixture(scope="module")
def nodal():
    return NodalCubicModel()


def test_flag_values():
    u = RatFunc.var()
    assert flag_value((u - 3) * (u - 3), FlagSpec((3,))) == (2,)
    assert flag_value(RatFunc(5), FlagSpec((3,))) == (0,)
    r = RatFunc(fmpq_poly([-1, 0, 1]), fmpq_poly([-2, 1]))
    assert flag_value(r, FlagSpec((1,))) == (1,)
    assert flag_value(F(7), FlagSpec()) == ()


def test_monomial_nu():
    nu = NuValuation(QmValuation(WeightVector([1, WeightScalar.sqrt(5)])))
    s = TruncatedSeries(2, {(3, 4): 2, (5, 5): 1}, 12)
    assert nu_value(s, nu) == (3, 4)


def test_curve_itself_has_nu_11(nodal, s5):
    nu = nodal.valuation((1, s5))
    C = nodal.expand(nodal.curve_equation(), 8)
    assert nu_value(C, nu) == (1, 1)
    assert compare_any(qm_value(C, nu), s5 + 1) == 0


def test_generic_line_through_node(nodal):
    nu = nodal.valuation((1, 3), "lex")
    line = nodal.expand({(1, 0): 2, (0, 1): 5}, 6)
    assert nu_value(line, nu) == (1, 0)


def test_qm_value_first_block(s5):
    v = QmValuation(WeightVector([1, s5]))
    s = TruncatedSeries(2, {(2, 0): 1, (0, 3): 1}, 8)
    assert qm_value(s, v) == 2


def test_log_discrepancy_examples(nodal):
    a = nodal.valuation((2, 5))
    assert nodal.log_discrepancy(a) == 7
    assert log_discrepancy(a) == 7
    assert log_discrepancy(QmValuation(WeightVector([2])), [F(1, 2)]) == 1
    with pytest.raises(ValueError):
        log_discrepancy(QmValuation(WeightVector([2])), [1])


def test_blowup_identity():
    nu = NuValuation(QmValuation(WeightVector([3, 1])))
    bt = blowup_transform(nu, [[1, 0], [0, 1]])
    assert bt.nu == nu
    assert bt.M == ((1, 0), (0, 1))


def test_blowup_preserves_weights(s5):
    nu = NuValuation(QmValuation(WeightVector([s5, 1])))
    bt = blowup_transform(nu, [[1, 1], [0, 1]])
    beta = (1, 1)
    b2 = bt.beta_map(beta)
    assert b2 == (1, 2)
    assert compare(dot(bt.nu.alpha, b2), dot(nu.alpha, beta)) == 0
    assert compare_any(bt.nu.alpha[0], s5 - 1) == 0


def test_blowup_leaving_chart_rejected(s5):
    nu = NuValuation(QmValuation(WeightVector([1, s5])))
    with pytest.raises(ValueError):
        blowup_transform(nu, [[1, 1], [0, 1]])
