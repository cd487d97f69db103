"""Acceptance suite: one check per criterion, each returning a CheckResult."""

import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .bodies import (
    AffineSequence,
    hausdorff,
    hull,
    sequence_limits,
    slice_body,
    volume,
    volume_function,
)
from .filtration import (
    n_round,
    s_mk,
    s_tau_body,
    s_tau_table,
    jumping_table,
    t_invariants,
)
from .models import (
    NodalCubicModel,
    NodalGammaEngine,
    ToricSurfaceModel,
    d_value,
    predicted_body,
    projective_plane,
)
from .valuation import blowup_transform
from .wfield import (
    WeightScalar,
    compare_any,
    dot,
    format_number,
    floor,
    simplify,
    sqrt_of_rational,
)

# sample ratios strictly inside each chamber interval (d_{n+1}/d_{n-1}, d_{n+2}/d_n)
CHAMBER_SAMPLES = {
    0: [(4, 3), (1, 1), (3, 2)],
    1: [(3, 1), (5, 2), (4, 1)],
    2: [(11, 2), (6, 1), (25, 4)],
}


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    report_only: bool = False

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        extra = " (report-only)" if self.report_only else ""
        return f"{self.name} {tag}{extra} [{self.seconds:.1f}s] {self.detail}"


def _scaled(points, m):
    return [tuple(Fraction(x, m) for x in g) for g in points]


def nodal_body(model, nu, cap, engine=None):
    eng = engine or NodalGammaEngine(model, nu, cap)
    pts = []
    for m in range(1, cap + 1):
        pts += _scaled(eng.gamma_exact(m), m)
    return hull(pts, 2, level_cap=cap)


# ------------------------------------------------------------------ A1


def minimal_level_cap(alpha, cap_max=12):
    """Smallest M with hull(Gamma_{<=M}) equal to the predicted triangle."""
    model = NodalCubicModel()
    nu = model.valuation(alpha, "lex")
    eng = NodalGammaEngine(model, nu, cap_max)
    target = predicted_body(alpha)
    pts = []
    for m in range(1, cap_max + 1):
        pts += _scaled(eng.gamma_exact(m), m)
        if hull(pts, 2) == target:
            return m
    return None


def check_a1(d=d_value, samples=None):
    details, ok = [], True
    for n in (0, 1, 2):
        alpha = (samples or CHAMBER_SAMPLES)[n][0]
        t0 = time.time()
        cap = 2 * d(n + 1)
        model = NodalCubicModel()
        nu = model.valuation(alpha, "lex")
        body = nodal_body(model, nu, cap)
        n_pred = n
        pred = hull([(0, 0), (0, Fraction(d(n_pred + 1), d(n_pred))),
                     (Fraction(d(n_pred), d(n_pred + 1)), 0)], 2)
        dt = time.time() - t0
        good = body == pred and volume(body) == Fraction(1, 2) and dt < 60
        ok &= good
        details.append(f"n={n} alpha={alpha} M={cap} vertices={_fmt_vs(body)} "
                       f"area={volume(body)} {dt:.1f}s")
    return ok, "; ".join(details)


def _fmt_vs(body):
    return "[" + ", ".join("(" + ",".join(str(simplify(x)) for x in v) + ")"
                           for v in body.vertices) + "]"


# ------------------------------------------------------------------ A2

def check_a2():
    ok, details = True, []
    for alpha in [(7, 1), (1, 7)]:
        model = NodalCubicModel()
        nu = model.valuation(alpha, "lex")
        pred = predicted_body(alpha)
        eng = NodalGammaEngine(model, nu, 12)
        pts, areas, body = [], [], None
        for m in range(1, 13):
            pts += _scaled(eng.gamma_exact(m), m)
            if m in (4, 8, 12):
                body = hull(pts, 2)
                areas.append(volume(body))
        hd = hausdorff(body, pred)
        good = (pred.contains(body) and areas[-1] >= Fraction(45, 100)
                and areas == sorted(areas) and hd <= 0.08)
        ok &= good
        details.append(f"alpha={alpha} areas(4,8,12)={[str(a) for a in areas]} "
                       f"hausdorff={hd:.4f} contained={pred.contains(body)}")
    return ok, "; ".join(details)


# ------------------------------------------------------------------ A3

A3_WEIGHTS = [(4, 3), (3, 1), (11, 2), (7, 1), (1, 7),
              (WeightScalar.sqrt(5, 1), 1)]


def check_a3(m_max=8):
    ok, details = True, []
    model = NodalCubicModel()
    for alpha in A3_WEIGHTS:
        irr = isinstance(alpha[0], WeightScalar)
        nu = model.valuation(alpha, "strict" if irr else "lex")
        eng = NodalGammaEngine(model, nu, m_max)
        counts = [len(eng.gamma_exact(m)) for m in range(1, m_max + 1)]
        want = [(m + 1) * (m + 2) // 2 for m in range(1, m_max + 1)]
        ok &= counts == want
        label = "(" + ", ".join(format_number(a) for a in alpha) + ")"
        details.append(f"{label}: {'ok' if counts == want else counts}")
    return ok, "; ".join(details)


# ------------------------------------------------------------------ A4

def check_a4():
    P2 = projective_plane()
    nu = P2.valuation(0, (1, 1))
    b1 = hull(P2.gamma(nu, 1), 2)
    sq = ToricSurfaceModel([(0, 0), (2, 0), (2, 2), (0, 2)], name="P1xP1(2,2)")
    nu2 = sq.valuation(0, (1, 1))
    b2 = hull(sq.gamma(nu2, 1), 2)
    v1, v2 = volume(b1), volume(b2)
    counts = all(P2.n_sections(m) == P2.ehrhart(m) and sq.n_sections(m) == sq.ehrhart(m)
                 for m in range(0, 6))
    ok = v1 == Fraction(1, 2) and v2 == 4 and counts
    return ok, f"P2 area={v1}, [0,2]^2 area={v2}, Ehrhart counts match={counts}"


# ------------------------------------------------------------------ A5

def _slice_level(S):
    den = 1
    for v in S.vertices:
        for x in v:
            den = lcm(den, Fraction(x).denominator)
    return den


def check_a5():
    ok, details = True, []
    # toric: exact vertex-list equality
    for model, chart, alpha in [(projective_plane(), 0, (1,)),
                                (projective_plane(), 1, (2, 1)),
                                (ToricSurfaceModel([(0, 0), (2, 0), (1, 2), (0, 1)]), 0, (1, 2))]:
        nu = model.valuation(chart, alpha)
        D = model.body(nu)
        T = D.max_linear(list(nu.alpha.values()) + [0] * (2 - len(alpha)))
        good = 0
        for k in range(10):
            t = T * Fraction(k, 10)
            S = slice_body(D, nu.alpha.values(), t)
            M = _slice_level(S)
            r = len(alpha)
            pts = [g for g in model.gamma(nu, M) if dot(nu.alpha, g[:r]) >= t * M]
            F = hull(_scaled(pts, M), 2)
            good += F == S
        ok &= good == 10
        details.append(f"toric {alpha}: {good}/10 equal")
    # nodal: containment and equal volume at the level realizing the slice vertices
    for alpha in [(3, 1), (4, 3)]:
        model = NodalCubicModel()
        nu = model.valuation(alpha, "lex")
        D = predicted_body(alpha)
        T = D.max_linear(list(alpha))
        levels = {}
        for k in range(10):
            t = T * Fraction(k, 10)
            S = slice_body(D, alpha, t)
            levels[t] = (S, _slice_level(S))
        top = max(M for _, M in levels.values())
        eng = NodalGammaEngine(model, nu, top)
        cache = {}
        good = 0
        for t, (S, M) in levels.items():
            if M not in cache:
                cache[M] = eng.gamma_exact(M)
            pts = [g for g in cache[M] if dot(nu.alpha, g) >= t * M]
            F = hull(_scaled(pts, M), 2)
            good += S.contains(F) and volume(F) == volume(S)
        ok &= good == 10
        details.append(f"nodal {alpha}: {good}/10 contained with equal volume")
    return ok, "; ".join(details)


# ------------------------------------------------------------------ A6

def random_table(rng, m_levels=6):
    """Jumping table of a random toric valuation (rational or quadratic weights)."""
    polys = [[(0, 0), (1, 0), (0, 1)], [(0, 0), (2, 0), (2, 1), (0, 1)],
             [(0, 0), (3, 0), (0, 2)], [(0, 0), (2, 0), (1, 2), (0, 1)]]
    model = ToricSurfaceModel(rng.choice(polys))
    chart = rng.randrange(len(model.charts()))
    if rng.random() < 0.5:
        alpha = (Fraction(rng.randint(1, 9), rng.randint(1, 4)), Fraction(rng.randint(1, 9), rng.randint(1, 4)))
    else:
        D = rng.choice([2, 3, 5, 7])
        alpha = (WeightScalar.sqrt(D, Fraction(rng.randint(1, 5), rng.randint(1, 3))),
                 Fraction(rng.randint(1, 5)))
    nu = model.valuation(model.charts()[chart], alpha)
    return model, nu, jumping_table(model, nu, m_levels)


def check_a6(n_tables=50, seed=0):
    rng = random.Random(seed)
    bad = []
    for i in range(n_tables):
        model, nu, tab = random_table(rng)
        rt = n_round(tab)
        tm, _, _ = t_invariants(tab)
        rtm, _, _ = t_invariants(rt)
        for m in tab.ms():
            if rtm[m] != floor(m * tm[m]) / m:
                bad.append((i, m, "T_m"))
            for k in range(1, tab.N(m) + 1):
                s, sr = s_mk(tab, m, k), s_mk(rt, m, k)
                if not (compare_any(s - Fraction(1, m), sr) <= 0 and compare_any(sr, s) <= 0):
                    bad.append((i, m, k))
        # S^tau of the rounded filtration: table routes stay within 1/m of each other,
        # so both tend to the single body-route value
        for tau in (Fraction(1, 4), Fraction(1, 2), Fraction(1)):
            a = s_tau_table(tab, tau)["raw"]
            b = s_tau_table(rt, tau)["raw"]
            m = tab.ms()[-1]
            if not (compare_any(a - Fraction(1, m), b) <= 0 and compare_any(b, a) <= 0):
                bad.append((i, "S_tau", tau))
    return not bad, f"{n_tables} tables, violations={bad[:5]}"


# ------------------------------------------------------------------ A7

def a7_samples():
    P2 = projective_plane()
    sq = ToricSurfaceModel([(0, 0), (2, 0), (2, 1), (0, 1)], name="F0(2,1)")
    quad = ToricSurfaceModel([(0, 0), (2, 0), (1, 2), (0, 1)], name="quad")
    tri = ToricSurfaceModel([(0, 0), (Fraction(3, 2), 0), (0, Fraction(3, 2))], name="P2(3/2)")
    out = []
    for model, chart, alpha in [(P2, 0, (1,)), (P2, 0, (1, 1)), (P2, 1, (2, 1)), (P2, 2, (1, 3)),
                                (sq, 0, (1, 1)), (sq, 1, (1,)), (sq, 2, (3, 1)),
                                (quad, 0, (1, 2)), (quad, 1, (1,)), (quad, 2, (2, 3)),
                                (tri, 0, (1,)), (tri, 1, (1, 1))]:
        charts = model.charts()
        nu = model.valuation(charts[chart % len(charts)], alpha)
        out.append((f"{model.name}:{chart}:{alpha}", model.body(nu), alpha))
    for alpha in [(4, 3), (1, 1), (3, 1), (5, 2), (11, 2), (6, 1), (7, 1), (1, 7)]:
        out.append((f"nodal:{alpha}", predicted_body(alpha), alpha))
    return out


A7_TAUS = [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)]


def check_a7():
    bad = []
    samples = a7_samples()
    for label, body, alpha in samples:
        V = volume_function(body, alpha)
        T = V.T
        vals = [s_tau_body(body, alpha, tau, V) for tau in A7_TAUS]
        for tau, s in zip(A7_TAUS, vals):
            if compare_any(T / 3, s) > 0 or compare_any(s, T) > 0:
                bad.append((label, str(tau)))
        for a, b in zip(vals, vals[1:]):
            if compare_any(b, a) > 0:
                bad.append((label, "monotone"))
    return not bad, f"{len(samples)} valuations x {len(A7_TAUS)} tau, violations={bad}"


# ------------------------------------------------------------------ A8

def check_a8(m=60):
    P2 = projective_plane()
    nu = P2.valuation(0, (1,))
    body = P2.body(nu)
    tab = jumping_table(P2, nu, m, m_min=m)
    ok, details = True, []
    for tau in [Fraction(1, 4), Fraction(9, 16), Fraction(1)]:
        s = s_tau_body(body, nu.alpha, tau)
        closed = 1 - Fraction(2, 3) * sqrt_of_rational(tau)
        st = s_tau_table(tab, tau)["raw"]
        diff = abs(Fraction(st) - Fraction(closed))
        good = s == closed and diff <= Fraction(3, m)
        ok &= good
        details.append(f"tau={tau}: body={s} closed={closed} table={st} |diff|={diff}")
    return ok, "; ".join(details)


# ------------------------------------------------------------------ A9

def check_a9(m_lo=10, m_hi=40):
    ok, details = True, []
    for n in (0, 1, 2):
        alpha = CHAMBER_SAMPLES[n][0]
        model = NodalCubicModel()
        nu = model.valuation(alpha, "lex")
        T = predicted_body(alpha).max_linear(list(alpha))
        A = sum(Fraction(a) for a in alpha)
        eng = NodalGammaEngine(model, nu, m_hi, safety=1)
        tops = eng.t_sweep(range(m_lo, m_hi + 1))
        worst = Fraction(0)
        viol = []
        for m, col in tops.items():
            Tm = Fraction(dot(nu.alpha, col).simplify()) / m
            gap = T - Tm
            if not (0 <= gap <= 2 * A / m):
                viol.append(m)
            worst = max(worst, gap * m / (2 * A))
        ok &= not viol
        details.append(f"alpha={alpha} T={T} max m(T-T_m)/(2A)={worst} violations={viol}")
    return ok, "; ".join(details)


# ------------------------------------------------------------------ A10

A10_POLYTOPE = [(0, 0), (Fraction(3, 2), 0), (0, Fraction(3, 2))]


def a10_candidates(model):
    out = []
    for ci, chart in enumerate(model.charts()):
        for a in range(1, 4):
            for b in range(1, 4):
                if math.gcd(a, b) == 1:
                    out.append((f"chart{ci}:({a},{b})", model.valuation(chart, (a, b))))
        out.append((f"chart{ci}:div", model.valuation(chart, (1,))))
    return out


def toric_T_m(model, nu, m):
    r = nu.qm.r
    best = None
    for g in model.gamma(nu, m):
        w = dot(nu.alpha, g[:r])
        if best is None or compare_any(w, best) > 0:
            best = w
    return simplify(best / m)


def check_a10(m_lo=10, m_hi=60):
    model = ToricSurfaceModel(A10_POLYTOPE, name="P2(3/2)")
    scored = []
    for label, nu in a10_candidates(model):
        A = model.log_discrepancy(nu)
        T = model.t_bound(nu)
        scored.append((Fraction(A) / Fraction(T), label, nu, A))
    scored.sort(key=lambda x: (x[0], x[1]))
    est, label, nu, A = scored[0]
    xs, ys, diffs = [], [], []
    for m in range(m_lo, m_hi + 1):
        d = Fraction(A) / toric_T_m(model, nu, m) - est
        diffs.append(d)
        if d > 0:
            xs.append(math.log(m))
            ys.append(math.log(d))
    if not xs:
        return True, f"best={label} alpha={est}: alpha_m exact at every m", True
    n = len(xs)
    mx, my = sum(xs) / n, sum(ys) / n
    slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sum((x - mx) ** 2 for x in xs)
    return slope <= -0.9, (f"best={label} alpha-estimate={est} slope={slope:.3f} "
                           f"over {n} positive points of {len(diffs)}"), False


# ------------------------------------------------------------------ A11

def random_affine_sequence(rng, dim=2):
    k = rng.randint(1, 4) if dim == 2 else rng.randint(1, 2)
    base = [tuple(Fraction(rng.randint(-3, 3)) for _ in range(dim)) for _ in range(k)]
    if rng.random() < 0.5:
        base = base + [tuple(x + Fraction(rng.randint(1, 2)) * (i == j) for j, x in enumerate(base[0]))
                       for i in range(dim)]
    slope = [tuple(Fraction(rng.randint(-2, 2)) for _ in range(dim)) for _ in base]
    return AffineSequence(base, slope)


def check_a11(n=20, seed=1):
    rem = sequence_limits(AffineSequence([(0,), (0,)], [(1,), (2,)]))
    ok = rem["cofinite"].is_empty() and rem["pointwise"].vertex_set() == {(Fraction(0),)}
    rng = random.Random(seed)
    bad, pos = [], 0
    for i in range(n):
        seq = random_affine_sequence(rng, dim=2 if i % 4 else 1)
        lim = sequence_limits(seq)
        p, c = lim["pointwise"], lim["cofinite"]
        vp = volume(p) if not p.is_empty() and p.affine_dim == p.dim else Fraction(0)
        vc = volume(c) if not c.is_empty() and c.affine_dim == c.dim else Fraction(0)
        if vp != vc:
            bad.append((i, "volume"))
        if vp > 0:
            pos += 1
            if p != c:
                bad.append((i, "sets"))
    ok &= not bad
    return ok, (f"remark: cofinite empty={rem['cofinite'].is_empty()} pointwise={_fmt_vs(rem['pointwise'])}; "
                f"{n} affine sequences ({pos} full-dimensional), violations={bad}")


# ------------------------------------------------------------------ A12

def check_a12():
    W = [[1, 1], [0, 1]]
    ok, details = True, []
    for model in [projective_plane(), ToricSurfaceModel([(0, 0), (2, 0), (2, 1), (0, 1)])]:
        chart = model.charts()[0]
        n1, n2 = chart.rays
        nu = model.valuation(chart, (WeightScalar.sqrt(5, 1), 1))
        bt = blowup_transform(nu, W)
        new_rays = tuple(tuple(sum(W[j][i] * chart.rays[j][c] for j in range(2)) for c in range(2))
                         for i in range(2))
        nu2 = model.valuation(model.chart(new_rays), bt.nu.alpha)
        rebuilt = hull(model.gamma(nu2, 1), 2)
        target = hull(model.gamma(nu, 1), 2).transform(bt.M)
        good = rebuilt == target
        # weights agree on every section: alpha'.beta' = alpha.beta
        same = all(dot(bt.nu.alpha, bt.beta_map(g)) == dot(nu.alpha, g) for g in model.gamma(nu, 3))
        ok &= good and same
        details.append(f"{model.name}: rays {chart.rays}->{new_rays} body equal={good} weights preserved={same}")
    return ok, "; ".join(details)


# ------------------------------------------------------------------ A13

def check_a13(m_max=5):
    ok, details = True, []
    model = NodalCubicModel()
    for n, samples in CHAMBER_SAMPLES.items():
        gammas = []
        for alpha in samples:
            nu = model.valuation(alpha, "lex")
            eng = NodalGammaEngine(model, nu, m_max)
            gammas.append([eng.gamma_exact(m) for m in range(1, m_max + 1)])
        same = all(g == gammas[0] for g in gammas)
        ok &= same
        details.append(f"chamber {n} {samples}: identical={same}")
    return ok, "; ".join(details)


CHECKS = {
    "A1": check_a1, "A2": check_a2, "A3": check_a3, "A4": check_a4, "A5": check_a5,
    "A6": check_a6, "A7": check_a7, "A8": check_a8, "A9": check_a9, "A10": check_a10,
    "A11": check_a11, "A12": check_a12, "A13": check_a13,
}


SEEDED = {"A6", "A11"}


def run_check(name, seed=None):
    t0 = time.time()
    out = CHECKS[name](seed=seed) if seed is not None and name in SEEDED else CHECKS[name]()
    report_only = False
    if len(out) == 3:
        ok, detail, report_only = out
    else:
        ok, detail = out
    return CheckResult(name, bool(ok), detail, time.time() - t0, report_only)


def run_all(names=None, echo=None):
    results = []
    for name in names or list(CHECKS):
        r = run_check(name)
        if echo:
            echo(r.line())
        results.append(r)
    return results
