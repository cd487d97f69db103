from fractions import Fraction as F

import pytest

from okounkov.bodies import hull, volume
from okounkov.errors import ModelConsistencyError, WallError
from okounkov.models import (
    GOLDEN_HI, ChamberIndex, NodalCubicModel, NodalGammaEngine, ToricSurfaceModel,
    chamber_of, d_sequence, d_value, distinct_reduction, nodal_gamma, predicted_body,
    projective_plane, toric_gamma, unicuspidal_probe,
)
from okounkov.valuation import nu_value
from okounkov.wfield import WeightScalar, compare_any


@pytest.fixture(scope="module")
def nodal():
    return NodalCubicModel()


# d-sequence and chambers

def test_d_values():
    assert d_sequence(range(6)) == [1, 1, 2, 5, 13, 34]
    assert d_sequence(range(-2, 1)) == [5, 2, 1]


def test_d_ratios_increase_to_golden():
    rs = [F(d_value(n + 1), d_value(n - 1)) for n in range(1, 12)]
    assert all(a < b for a, b in zip(rs, rs[1:]))
    assert all(compare_any(GOLDEN_HI, r) > 0 for r in rs)
    assert abs(float(rs[-1]) - (7 + 3 * 5 ** 0.5) / 2) < 1e-6


def test_chamber_of():
    assert chamber_of((3, 1)) == ChamberIndex("chamber", 1)
    assert chamber_of((1, 1)) == ChamberIndex("chamber", 0)
    assert chamber_of((7, 1)).regime == "irrational-right"
    assert chamber_of((1, 7)).regime == "irrational-left"
    assert chamber_of((11, 2)) == ChamberIndex("chamber", 2)
    with pytest.raises(WallError):
        chamber_of((5, 1))
    with pytest.raises(WallError):
        chamber_of((2, 1))


def test_chamber_samples_round_trip():
    for n in range(-3, 5):
        ch = ChamberIndex("chamber", n)
        for k in range(3):
            assert chamber_of((ch.sample(k), 1)) == ch


def test_predicted_bodies():
    assert predicted_body((3, 1)) == hull([(0, 0), (F(1, 2), 0), (0, 2)])
    assert predicted_body((7, 1)) == hull([(0, 0), (F(3, 8), 0), (F(1, 3), F(1, 3)), (0, F(21, 8))])
    s5 = WeightScalar.sqrt(5)
    for a in [(3, 1), (4, 3), (11, 2), (7, 1), (1, 9), (s5 * 4, 1)]:
        assert volume(predicted_body(a)) == F(1, 2)


# toric

def test_toric_gamma_p2():
    P2 = projective_plane()
    nu = P2.valuation(0, (1, WeightScalar.sqrt(2)))
    g2 = P2.gamma(nu, 2)
    assert len(g2) == 6
    assert P2.gamma(nu, 0) == [(0, 0)]
    for m in range(6):
        assert len(toric_gamma(P2, nu, m)) == (m + 1) * (m + 2) // 2


def test_toric_line_valuation_jumps():
    P2 = projective_plane()
    nu = P2.valuation(0, (1,))
    assert sorted(P2.jumping_values(nu, 1), reverse=True) == [1, 0, 0]
    assert sorted(P2.jumping_values(nu, 2), reverse=True) == [2, 1, 1, 0, 0, 0]


def test_toric_body_is_image_of_polytope():
    P = ToricSurfaceModel([(0, 0), (2, 0), (2, 1), (0, 1)])
    for ch in P.charts():
        nu = P.valuation(ch, (1, WeightScalar.sqrt(3)))
        assert volume(P.body(nu)) == 2
        for m in (1, 2, 3):
            assert len(P.gamma(nu, m)) == P.ehrhart(m)


def test_toric_rejects_flat_polygon():
    with pytest.raises(ModelConsistencyError):
        ToricSurfaceModel([(0, 0), (1, 0), (2, 0)])


# nodal cubic

def test_nodal_gamma_chamber1(nodal):
    nu = nodal.valuation((3, 1), "lex")
    assert nodal.gamma(nu, 1) == [(0, 0), (0, 1), (0, 2)]
    assert len(nodal.gamma(nu, 4)) == nodal.n_sections(4) == 15


def test_nodal_gamma_count(nodal):
    nu = nodal.valuation((WeightScalar.sqrt(5), 1))
    for m in range(1, 4):
        assert len(nodal.gamma(nu, m)) == (m + 1) * (m + 2) // 2


@pytest.mark.parametrize("alpha", [(3, 1), (1, 7), (4, 3)])
def test_closed_vs_series_route(nodal, alpha):
    nu = nodal.valuation(alpha, "lex")
    a = NodalGammaEngine(nodal, nu, 4, route="closed")
    b = NodalGammaEngine(nodal, nu, 4, route="series")
    for m in range(1, 5):
        assert a.gamma_exact(m) == b.gamma_exact(m)


def test_exact_vs_python_reduction(nodal):
    nu = nodal.valuation((11, 2), "lex")
    eng = NodalGammaEngine(nodal, nu, 4)
    for m in range(1, 5):
        assert eng.gamma_exact(m) == eng.gamma_python(m) == nodal_gamma(nodal, nu, m, eng, "python")


def test_phi_inverts_parametrisation(nodal):
    # x = phi(t) inverts t = x sqrt(1 + x)
    ph = nodal.phi(10)
    assert ph[1] == 1 and ph[2] == F(-1, 2)
    for x in (0.02, -0.025):
        t = x * (1 + x) ** 0.5
        assert abs(sum(float(c) * t ** k for k, c in enumerate(ph)) - x) < 1e-12


def test_other_split_cubic():
    m = NodalCubicModel({(0, 2, 1): 1, (2, 0, 1): -1, (1, 2, 0): 1})
    nu = m.valuation((WeightScalar.sqrt(2), 1))
    assert len(m.gamma(nu, 2)) == 6


def test_reducible_cubic_rejected():
    with pytest.raises(ModelConsistencyError):
        NodalCubicModel({(0, 2, 1): 1, (2, 0, 1): -1, (3, 0, 0): -1, (0, 3, 0): 1})


def test_cusp_rejected():
    with pytest.raises(ModelConsistencyError):
        NodalCubicModel({(0, 2, 1): 1, (3, 0, 0): -1})


def test_unicuspidal_probe_line(nodal):
    poly, info = unicuspidal_probe(nodal, 1)
    assert info["found"] and info["degree"] == 1
    # the tangent line y = x, up to scale
    assert set(poly) == {(1, 0), (0, 1)} and poly[(1, 0)] == -poly[(0, 1)]


def test_unicuspidal_probe_conic(nodal):
    poly, info = unicuspidal_probe(nodal, 2)
    assert info["found"]
    eng = nodal.engine(nodal.valuation((ChamberIndex("chamber", 2).sample(), 1), "lex"), 2)
    assert nu_value(nodal.expand(poly, eng.N, eng.grading), eng.nu) == (0, 5)


def test_distinct_reduction():
    rows = [{0: 1, 1: 1}, {0: 2, 2: 1}, {1: 1}]
    leads = [lead for _, lead in distinct_reduction(rows)]
    assert leads == [0, 1, 2]  # row2 - 2 row1 = -2e1 + e2
    from okounkov.errors import TruncationInsufficientError
    with pytest.raises(TruncationInsufficientError):
        distinct_reduction([{0: 1}, {0: 3}])
