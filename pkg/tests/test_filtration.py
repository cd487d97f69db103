from fractions import Fraction as F

import pytest

from okounkov.bodies import Interval, hull, volume_function
from okounkov.filtration import (
    JumpingTable, delta_report, invariant_report, jumping_table, k_schedule, monomial_lct,
    n_round, q_tau, s_mk, s_tau, s_tau_body, s_tau_table, t_invariants, worker_count,
)
from okounkov.models import NodalCubicModel, predicted_body, projective_plane
from okounkov.wfield import WeightScalar, WeightVector, compare_any, floor


@pytest.fixture(scope="module")
def line():
    P2 = projective_plane()
    return P2, P2.valuation(0, (1,))


def test_line_jumps(line):
    P2, nu = line
    tab = jumping_table(P2, nu, 2)
    assert tab.jumps(1) == (1, 0, 0)
    assert tab.jumps(2) == (2, 1, 1, 0, 0, 0)


def test_zero_table():
    tab = JumpingTable({1: [0, 0, 0]})
    assert s_mk(tab, 1, 3) == 0


def test_negative_jump_rejected():
    with pytest.raises(ValueError):
        JumpingTable({1: [1, -1]})


def test_t_invariants(line):
    P2, nu = line
    tab = jumping_table(P2, nu, 5)
    tm, est, exact = t_invariants(tab, P2.body(nu), nu.alpha)
    assert set(tm.values()) == {1} and est == 1 and exact == 1


def test_t_nodal_chamber1():
    alpha = WeightVector([3, 1])
    T = max(alpha.values()[0] * v[0] + alpha.values()[1] * v[1]
            for v in predicted_body(alpha).vertices)
    # vertices (1/2, 0) and (0, 2): max(3/2, 2) = 2
    assert T == 2


def test_empty_level_skipped():
    tab = JumpingTable({1: [2, 1], 2: []})
    tm, est, _ = t_invariants(tab)
    assert tm == {1: 2} and est == 2


def test_s_mk(line):
    P2, nu = line
    tab = jumping_table(P2, nu, 2)
    assert s_mk(tab, 1, 3) == F(1, 3)
    assert s_mk(tab, 1, 1) == 1
    assert s_mk(tab, 2, 2) == F(3, 4)
    with pytest.raises(ValueError):
        s_mk(tab, 1, 4)


def test_s_tau_body(line):
    P2, nu = line
    body = P2.body(nu)
    assert s_tau_body(body, nu.alpha, 1) == F(1, 3)
    assert s_tau_body(body, nu.alpha, F(1, 4)) == F(2, 3)
    assert s_tau_body(body, nu.alpha, 0) == 1


def test_s_tau_closed_form_irrational_q(line):
    P2, nu = line
    S = s_tau_body(P2.body(nu), nu.alpha, F(1, 2))
    expected = 1 - WeightScalar.sqrt(2, F(1, 3))
    if isinstance(S, Interval):
        lo, hi = expected.enclosure(64)
        assert S.lo <= hi and lo <= S.hi
    else:
        assert compare_any(S, expected) == 0


def test_s_tau_table_converges(line):
    P2, nu = line
    m = 60
    tab = jumping_table(P2, nu, m, m_min=m // 2)
    for tau in (F(1, 4), F(1), F(3, 4)):
        body = s_tau_body(P2.body(nu), nu.alpha, tau)
        if isinstance(body, Interval):
            body = body.lo
        raw = s_tau_table(tab, tau)["raw"]
        assert abs(raw - body) <= F(3, m)
    both = s_tau(1, tab, P2.body(nu), nu.alpha)
    assert both["body"] == F(1, 3) and "table" in both


def test_q_tau():
    V = volume_function(hull([(0, 0), (1, 0), (0, 2)]), [1])
    assert q_tau(V, F(1, 4), 1) == F(1, 2)
    assert q_tau(V, 1, 1) == 0
    # target above V(0): every t qualifies
    assert q_tau(V, 1, 2) == 0
    with pytest.raises(ValueError):
        q_tau(V, 0, 1)


def test_n_round():
    s5 = WeightScalar.sqrt(5)
    tab = JumpingTable({2: [s5 + 1, s5, 0]})
    assert n_round(tab).jumps(2) == (3, 2, 0)


def test_n_round_identities(line):
    P2, nu = line
    nodal = NodalCubicModel()
    nu2 = nodal.valuation((WeightScalar.sqrt(5), 1))
    tab = jumping_table(nodal, nu2, 4)
    rt = n_round(tab)
    for m in tab.ms():
        tm = tab.jumps(m)[0] / m
        assert rt.jumps(m)[0] / m == floor(m * tm) / m
        for k in range(1, tab.N(m) + 1):
            a, b = s_mk(tab, m, k), s_mk(rt, m, k)
            assert compare_any(a - F(1, m), b) <= 0 and compare_any(b, a) <= 0


def test_k_schedule():
    assert k_schedule(10, F(1, 4)) == 3
    assert k_schedule(10, 0) == 1
    assert k_schedule(10, 1) == 10


def test_monomial_lct():
    assert monomial_lct([((1, 0), 1)]) == 1
    assert monomial_lct([((1, 1), 1)]) == 1
    assert monomial_lct([((2, 3), 1)]) == F(1, 3)
    with pytest.raises(ValueError):
        monomial_lct([((-1, 0), 1)])


def test_line_report(line):
    P2, nu = line
    rep = invariant_report(P2, nu, taus=(0, 1), m_max=4)
    assert rep.A == 1
    assert rep.delta_tau[F(1)] == 3
    assert rep.delta_tau[F(0)] == rep.alpha_invariant == 1
    assert set(rep.alpha_m.values()) == {1}
    assert rep.to_csv().splitlines()[0] == "m,T_m,S_mk,alpha_m,delta_m,bound_2A_over_m"
    assert rep.dumps() == invariant_report(P2, nu, taus=(0, 1), m_max=4).dumps()


def test_delta_report_scan(line):
    P2, nu = line
    reps, summary = delta_report(P2, [("line", nu), ("weighted", P2.valuation(0, (1, 2)))],
                                 taus=(0, 1))
    assert len(reps) == 2
    assert summary["1"]["candidate"] in ("line", "weighted")
    assert "upper bound" in summary["1"]["kind"]


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("OKOUNKOV_THREADS", "3")
    assert worker_count() == 3
