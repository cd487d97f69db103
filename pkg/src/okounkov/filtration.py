"""Jumping numbers of valuative filtrations and the invariants built from them."""

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key

from .bodies import Interval, volume, volume_function
from .wfield import (
    ceil,
    compare_any,
    floor,
    format_number,
    number_to_json,
    simplify,
    to_fraction_enclosure,
)

S_TAU_NOTE = ("body route uses Q_tau + (1/(tau vol)) * int_{Q_tau}^T V(t) dt; "
              "the integral alone would not tend to T as tau -> 0")


def worker_count():
    try:
        return max(1, int(os.environ.get("OKOUNKOV_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(fn, items):
    """Ordered map, threaded when OKOUNKOV_THREADS > 1."""
    items = list(items)
    n = worker_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


_desc = cmp_to_key(lambda a, b: compare_any(b, a))


class JumpingTable:
    """Per level m: N_m and the jumps j_{m,1} >= ... >= j_{m,N_m}."""

    def __init__(self, levels, source="explicit"):
        self.levels = {}
        for m, jumps in sorted(levels.items()):
            js = sorted((simplify(j) for j in jumps), key=_desc)
            if js and compare_any(js[-1], 0) < 0:
                raise ValueError(f"negative jumping number at level {m}")
            self.levels[int(m)] = tuple(js)
        self.source = source

    def __contains__(self, m):
        return m in self.levels

    def ms(self):
        return sorted(self.levels)

    def N(self, m):
        return len(self.levels[m])

    def jumps(self, m):
        return self.levels[m]

    def __repr__(self):
        return f"JumpingTable({self.source}, m={self.ms()})"

    def superadditive_violations(self):
        """Pairs (m, m') with j_{m+m',1} < j_{m,1} + j_{m',1}."""
        bad = []
        ms = [m for m in self.ms() if m > 0 and self.levels[m]]
        for a in ms:
            for b in ms:
                if a <= b and a + b in self.levels and self.levels[a + b]:
                    if compare_any(self.levels[a + b][0], self.levels[a][0] + self.levels[b][0]) < 0:
                        bad.append((a, b))
        return bad


def jumping_table(model, nu, m_max, m_min=1):
    """Jumps v(s) over a nu-adapted basis, i.e. alpha.beta over Gamma_m."""
    if hasattr(model, "engine"):
        model.engine(nu, m_max)
    r = nu.qm.r
    from .wfield import dot

    def level(m):
        return [dot(nu.alpha, g[:r]).simplify() for g in model.gamma(nu, m)]

    ms = list(range(m_min, m_max + 1))
    return JumpingTable(dict(zip(ms, _pmap(level, ms))), source="valuation")


def t_invariants(table, body=None, alpha=None):
    """(T_m per level, Fekete estimate max T_m, exact body T or None)."""
    tm = {}
    for m in table.ms():
        if m > 0 and table.N(m):
            tm[m] = simplify(table.jumps(m)[0] / m)
    est = None
    for v in tm.values():
        if est is None or compare_any(v, est) > 0:
            est = v
    exact = None
    if body is not None and alpha is not None:
        exact = body_T(body, alpha)
    return tm, est, exact


def body_T(body, alpha):
    vals = list(alpha.values()) if hasattr(alpha, "values") else list(alpha)
    vals = vals + [0] * (body.dim - len(vals))
    return simplify(body.max_linear(vals))


def s_mk(table, m, k):
    N = table.N(m)
    if not 1 <= k <= N:
        raise ValueError(f"k={k} outside 1..{N}")
    acc = Fraction(0)
    for j in table.jumps(m)[:k]:
        acc = acc + j
    return simplify(acc / (m * k))


def q_tau(V, tau, vol_L):
    """Smallest t with V(t) <= tau * vol_L; Q_1 = 0 by convention."""
    tau = Fraction(tau)
    if not 0 < tau <= 1:
        raise ValueError("tau must lie in (0, 1]")
    if tau == 1:
        return Fraction(0)
    return V.first_below(tau * vol_L)


def _s_from_q(V, Q, tau, vol):
    return simplify(Q + V.integrate(Q, V.T) / (tau * vol))


def s_tau_body(body, alpha, tau, V=None):
    """Body route: Q_tau + (1/(tau vol)) int_{Q_tau}^T V; tau = 0 gives T."""
    tau = Fraction(tau)
    if V is None:
        V = volume_function(body, alpha)
    if tau == 0:
        return body_T(body, alpha)
    vol = volume(body)
    Q = q_tau(V, tau, vol)
    if isinstance(Q, Interval):
        # the map Q -> S is continuous and monotone near the root: enclose it
        a = _s_from_q(V, Q.lo, tau, vol)
        b = _s_from_q(V, Q.hi, tau, vol)
        lo, _ = to_fraction_enclosure(a)
        _, hi = to_fraction_enclosure(b)
        return Interval(min(lo, hi), max(lo, hi))
    return _s_from_q(V, Q, tau, vol)


def k_schedule(N, tau):
    return max(1, ceil(Fraction(tau) * N).numerator) if tau else 1


def s_tau_table(table, tau):
    """Table route: raw S_{m, ceil(tau N_m)} at the top level plus a 1/m extrapolation."""
    tau = Fraction(tau)
    ms = [m for m in table.ms() if m > 0 and table.N(m)]
    if not ms:
        raise ValueError("empty table")
    m1 = ms[-1]
    raw = s_mk(table, m1, k_schedule(table.N(m1), tau))
    half = [m for m in ms if 2 * m <= m1]
    out = {"m": m1, "raw": raw, "extrapolated": None, "m_pair": None}
    if half:
        m2 = half[-1]
        s2 = s_mk(table, m2, k_schedule(table.N(m2), tau))
        out["extrapolated"] = simplify((raw * m1 - s2 * m2) / (m1 - m2))
        out["m_pair"] = (m2, m1)
    return out


def s_tau(tau, table=None, body=None, alpha=None):
    """Both routes when available; never silently swaps one for the other."""
    out = {}
    if body is not None:
        out["body"] = s_tau_body(body, alpha, tau)
        out["note"] = S_TAU_NOTE
    if table is not None:
        if Fraction(tau) == 0:
            out["table"] = {"raw": t_invariants(table)[1], "extrapolated": None}
        else:
            out["table"] = s_tau_table(table, tau)
    if not out:
        raise ValueError("s_tau needs a table or a body")
    return out


def n_round(table):
    """Floor every jump: the jumps of the rounded N-filtration."""
    return JumpingTable({m: [floor(j) for j in js] for m, js in table.levels.items()},
                        source=table.source + "+N")


def monomial_lct(exponents, charts=None):
    """lct of a monomial divisor sum mult * div(x^e) on a smooth chart (boundary 0).

    exponents: list of (exponent vector, multiplicity). With charts (a list of
    such lists) the minimum over charts is returned.
    """
    if charts is not None:
        return min(monomial_lct(c) for c in charts)
    if not exponents:
        raise ValueError("empty divisor data")
    coeff = None
    for e, mult in exponents:
        if any(not isinstance(x, int) or x < 0 for x in e):
            raise ValueError("non-monomial input: exponents must be nonnegative integers")
        mult = Fraction(mult)
        if coeff is None:
            coeff = [Fraction(0)] * len(e)
        if len(e) != len(coeff):
            raise ValueError("exponent vectors of different lengths")
        coeff = [c + mult * x for c, x in zip(coeff, e)]
    # the Newton polyhedron of a monomial is c + R_{>=0}^n; (1,..,1) in t*NP iff t*c_i <= 1
    pos = [c for c in coeff if c > 0]
    if not pos:
        raise ValueError("trivial divisor has no lct")
    return min(1 / c for c in pos)


@dataclass
class InvariantReport:
    label: str
    A: object
    T: object = None
    T_m: dict = field(default_factory=dict)
    S_mk: dict = field(default_factory=dict)
    S_tau: dict = field(default_factory=dict)
    Q_tau: dict = field(default_factory=dict)
    alpha_m: dict = field(default_factory=dict)
    delta_tau: dict = field(default_factory=dict)
    delta_mk: dict = field(default_factory=dict)
    S_sched: dict = field(default_factory=dict)
    methods: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def alpha_invariant(self):
        return self.delta_tau.get(Fraction(0))

    def to_json(self):
        def num(x):
            if isinstance(x, Interval):
                return {"interval": [str(x.lo), str(x.hi)]}
            if x is None:
                return None
            return number_to_json(x)

        def keyed(d):
            return {str(k): num(v) for k, v in sorted(d.items())}
        return {
            "label": self.label,
            "A": num(self.A),
            "T": num(self.T),
            "T_m": keyed(self.T_m),
            "S_mk": {f"{m},{k}": num(v) for (m, k), v in sorted(self.S_mk.items())},
            "S_tau": keyed(self.S_tau),
            "Q_tau": keyed(self.Q_tau),
            "alpha_m": keyed(self.alpha_m),
            "delta_tau": keyed(self.delta_tau),
            "delta_mk": {f"{m},{k}": num(v) for (m, k), v in sorted(self.delta_mk.items())},
            "methods": list(self.methods),
            "meta": self.meta,
        }

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    def csv_rows(self, tau=1):
        rows = []
        tau = Fraction(tau)
        for m in sorted(self.T_m):
            s = self.S_sched.get(m)
            rows.append({
                "m": m,
                "T_m": _txt(self.T_m[m]),
                "S_mk": _txt(s) if s is not None else "",
                "alpha_m": _txt(self.alpha_m.get(m)),
                "delta_m": _txt(simplify(self.A / s)) if s else "",
                "bound_2A_over_m": _txt(simplify(2 * self.A / m)),
            })
        return rows

    def to_csv(self, tau=1):
        buf = io.StringIO()
        cols = ["m", "T_m", "S_mk", "alpha_m", "delta_m", "bound_2A_over_m"]
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for row in self.csv_rows(tau):
            w.writerow(row)
        return buf.getvalue()


def _txt(x):
    if x is None:
        return ""
    if isinstance(x, Interval):
        return f"[{x.lo}, {x.hi}]"
    return format_number(simplify(x))


def _div(a, b):
    if isinstance(b, Interval):
        lo, hi = to_fraction_enclosure(a)
        return Interval(min(lo / b.hi, lo / b.lo), max(hi / b.lo, hi / b.hi))
    if not b:
        return None
    return simplify(a / b)


def invariant_report(model, nu, taus=(0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), 1),
                     m_max=None, body=None, label=None, csv_tau=1):
    """Invariants of one valuation; body route whenever a body is known."""
    A = model.log_discrepancy(nu)
    rep = InvariantReport(label or repr(nu.alpha), A)
    if body is None and hasattr(model, "body"):
        body = model.body(nu)
    table = jumping_table(model, nu, m_max) if m_max else None
    if body is not None:
        rep.methods.append("body-integral")
        V = volume_function(body, nu.alpha)
        rep.T = body_T(body, nu.alpha)
        vol = volume(body)
        for tau in taus:
            tau = Fraction(tau)
            rep.S_tau[tau] = s_tau_body(body, nu.alpha, tau, V)
            if tau > 0:
                rep.Q_tau[tau] = q_tau(V, tau, vol)
            rep.delta_tau[tau] = _div(A, rep.S_tau[tau])
        rep.meta["s_tau_formula"] = S_TAU_NOTE
    if table is not None:
        rep.methods.append("table-limit")
        tm, est, _ = t_invariants(table)
        rep.T_m = tm
        if rep.T is None:
            rep.T = est
            rep.meta["T_source"] = "max T_m (lower bound)"
        for m in table.ms():
            rep.alpha_m[m] = _div(A, tm[m])
            k = k_schedule(table.N(m), csv_tau)
            s = s_mk(table, m, k)
            rep.S_mk[(m, k)] = s
            rep.S_sched[m] = s
            rep.delta_mk[(m, k)] = _div(A, s)
        rep.meta["table_s_tau"] = {
            str(Fraction(t)): {kk: (_txt(v) if not isinstance(v, tuple) else list(v))
                               for kk, v in s_tau_table(table, t).items()}
            for t in taus if Fraction(t) > 0}
    return rep


def delta_report(model, candidates, taus=(0, 1), m_max=None):
    """Reports per candidate plus the scan minimum (an upper bound for delta^tau)."""
    reps = [invariant_report(model, nu, taus, m_max, label=lbl) for lbl, nu in candidates]
    summary = {}
    for tau in taus:
        tau = Fraction(tau)
        best = None
        for r in reps:
            d = r.delta_tau.get(tau)
            if d is None or isinstance(d, Interval):
                continue
            if best is None or compare_any(d, best[1]) < 0:
                best = (r.label, d)
        if best:
            summary[str(tau)] = {"candidate": best[0], "value": _txt(best[1]),
                                 "kind": "upper bound (candidate scan)"}
    return reps, summary
