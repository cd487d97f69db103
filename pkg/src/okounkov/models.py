"""Concrete geometries: polarized toric surfaces and a nodal cubic on P^2."""

from fractions import Fraction
from functools import cmp_to_key
from math import gcd, comb

from flint import fmpq, fmpq_mat, fmpq_poly, fmpz_mat, nmod_mat

from .bodies import hull
from .errors import (
    ModelConsistencyError,
    TruncationInsufficientError,
    UnsupportedError,
    WallError,
)
from .series import (
    TruncatedSeries,
    RatFunc,
    invert_system,
    node_branches,
)
from .valuation import FlagSpec, NuValuation, QmValuation
from .wfield import (
    WeightScalar,
    WeightVector,
    compare,
    compare_any,
    dot,
    sqrt_of_rational,
)

PRIMES = (2305843009213693951, 4611686018427387847, 9223372036854775783)
_NMOD_PRIMES = (4611686018427387847, 2305843009213693951, 1152921504606846883)


def _lcm(a, b):
    return a * b // gcd(a, b)


def _primitive(v):
    den = 1
    for x in v:
        den = _lcm(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return tuple(x // g for x in ints)


def _floor(q):
    return Fraction(q).__floor__()


# ------------------------------------------------------------------ toric

class ToricChart:
    """Unimodular pair of rays (n_a, n_b) lying in one cone of the normal fan."""

    def __init__(self, model, rays):
        rays = tuple(tuple(int(x) for x in r) for r in rays)
        (a0, a1), (b0, b1) = rays
        if abs(a0 * b1 - a1 * b0) != 1:
            raise UnsupportedError(f"chart rays {rays} are not a lattice basis")
        self.model = model
        self.rays = rays
        self.offsets = tuple(-model.min_pairing(r) for r in rays)
        common = [v for v in model.polytope.vertices
                  if all(_pair(v, r) + a == 0 for r, a in zip(rays, self.offsets))]
        if not common:
            raise UnsupportedError("chart rays do not share a vertex of the polytope")
        self.vertex = common[0]

    def nu(self, u, m):
        return tuple(_pair(u, r) + _floor(m * a) for r, a in zip(self.rays, self.offsets))

    def body_map(self, x):
        return tuple(_pair(x, r) + a for r, a in zip(self.rays, self.offsets))

    def discrepancies(self):
        return tuple(self.model.ray_discrepancy(r) for r in self.rays)

    def __repr__(self):
        return f"ToricChart{self.rays}"


def _pair(u, n):
    return u[0] * n[0] + u[1] * n[1]


class ToricSurfaceModel:
    """Rational polygon P; sections of mL are the lattice points of mP."""

    def __init__(self, vertices, name=None):
        P = hull([tuple(Fraction(x) for x in v) for v in vertices], 2)
        if P.affine_dim != 2:
            raise ModelConsistencyError("toric polytope must be full dimensional")
        self.polytope = P
        self.name = name or "toric"
        self.facets = []  # (primitive inward normal, offset a) with <u,n> >= -a
        vs = P.vertices
        for i in range(len(vs)):
            p, q = vs[i], vs[(i + 1) % len(vs)]
            n = _primitive((p[1] - q[1], q[0] - p[0]))
            self.facets.append((n, -_pair(p, n)))

    def min_pairing(self, n):
        return min(_pair(v, n) for v in self.polytope.vertices)

    @property
    def is_lattice(self):
        return all(x.denominator == 1 for v in self.polytope.vertices for x in v)

    def vertex_chart(self, i):
        """Chart at vertex i built from the two facets meeting there."""
        k = len(self.facets)
        return ToricChart(self, (self.facets[(i - 1) % k][0], self.facets[i][0]))

    def charts(self):
        out = []
        for i in range(len(self.facets)):
            try:
                out.append(self.vertex_chart(i))
            except UnsupportedError:
                pass
        return out

    def chart(self, rays):
        return ToricChart(self, rays)

    def ray_discrepancy(self, ray):
        """A(v_ray) with the piecewise-linear function that is 1 on every facet normal."""
        k = len(self.facets)
        for i in range(k):
            n1, n2 = self.facets[(i - 1) % k][0], self.facets[i][0]
            det = n1[0] * n2[1] - n1[1] * n2[0]
            c1 = Fraction(ray[0] * n2[1] - ray[1] * n2[0], det)
            c2 = Fraction(n1[0] * ray[1] - n1[1] * ray[0], det)
            if c1 >= 0 and c2 >= 0:
                return c1 + c2
        raise ModelConsistencyError(f"ray {ray} not in the normal fan")

    def lattice_points(self, m):
        if m == 0:
            return [(0, 0)]
        vs = self.polytope.vertices
        xs = [m * v[0] for v in vs]
        ys = [m * v[1] for v in vs]
        out = []
        for x in range(_floor(min(xs)), _floor(max(xs)) + 1):
            for y in range(_floor(min(ys)), _floor(max(ys)) + 1):
                if all(_pair((x, y), n) + m * a >= 0 for n, a in self.facets):
                    out.append((x, y))
        return out

    def n_sections(self, m):
        return len(self.lattice_points(m))

    def ehrhart(self, m):
        """Pick/Ehrhart count for lattice polygons: A m^2 + (B/2) m + 1."""
        if not self.is_lattice:
            raise UnsupportedError("Ehrhart polynomial formula needs a lattice polygon")
        from .bodies import volume
        area = volume(self.polytope)
        vs = self.polytope.vertices
        B = sum(gcd(int(vs[(i + 1) % len(vs)][0] - vs[i][0]), int(vs[(i + 1) % len(vs)][1] - vs[i][1]))
                for i in range(len(vs)))
        return area * m * m + Fraction(B, 2) * m + 1

    def valuation(self, chart, alpha, tiebreak="strict"):
        if not isinstance(chart, ToricChart):
            chart = self.charts()[chart] if isinstance(chart, int) else self.chart(chart)
        alpha = alpha if isinstance(alpha, WeightVector) else WeightVector(alpha)
        if len(alpha) == 1:
            flag = FlagSpec((0,))
        elif len(alpha) == 2:
            flag = FlagSpec()
        else:
            raise ValueError("toric surface valuations have 1 or 2 weights")
        return NuValuation(QmValuation(alpha, chart, tiebreak), flag)

    def log_discrepancy(self, nu):
        chart = nu.qm.stratum
        ds = chart.discrepancies()
        acc = Fraction(0)
        for a, d in zip(nu.alpha.entries, ds):
            acc = acc + a * d
        return acc.simplify() if isinstance(acc, WeightScalar) else acc

    def gamma(self, nu, m):
        return sorted(toric_gamma(self, nu, m))

    def section_series(self, nu, u, m):
        """The monomial section chi^u written in chart coordinates."""
        la, lb = nu.qm.stratum.nu(u, m)
        if nu.qm.r == 2:
            return TruncatedSeries(2, {(la, lb): 1})
        return TruncatedSeries(1, {(la,): RatFunc(fmpq_poly([0] * lb + [1]))})

    def jumping_values(self, nu, m):
        r = nu.qm.r
        vals = []
        for g in self.gamma(nu, m):
            vals.append(dot(nu.alpha, g[:r]).simplify())
        return vals

    def body(self, nu):
        chart = nu.qm.stratum
        return hull([chart.body_map(v) for v in self.polytope.vertices], 2)

    def t_bound(self, nu):
        r = nu.qm.r
        return self.body(nu).max_linear(list(nu.alpha.values()[:r]))

    def __repr__(self):
        return f"ToricSurfaceModel({self.name}, {self.polytope})"


def toric_gamma(model, nu, m):
    chart = nu.qm.stratum
    return {chart.nu(u, m) for u in model.lattice_points(m)}


def projective_plane(scale=1):
    return ToricSurfaceModel([(0, 0), (scale, 0), (0, scale)], name="P2")


# ------------------------------------------------------------------ d_n and chambers

def d_value(n):
    a, b = 1, 1  # d_0, d_1
    if n >= 1:
        for _ in range(n - 1):
            a, b = b, 3 * b - a
        return b
    # backward: d_{k-1} = 3 d_k - d_{k+1}
    hi, lo = 1, 1  # d_1, d_0
    for _ in range(-n):
        hi, lo = lo, 3 * lo - hi
    return lo


def d_sequence(ns):
    return [d_value(n) for n in ns]


class ChamberIndex:
    def __init__(self, regime, n=None):
        self.regime = regime
        self.n = n

    def __eq__(self, other):
        return isinstance(other, ChamberIndex) and (self.regime, self.n) == (other.regime, other.n)

    def __hash__(self):
        return hash((self.regime, self.n))

    def __repr__(self):
        return f"chamber({self.n})" if self.regime == "chamber" else self.regime

    def interval(self):
        if self.regime != "chamber":
            return None
        n = self.n
        return (Fraction(d_value(n + 1), d_value(n - 1)), Fraction(d_value(n + 2), d_value(n)))

    def sample(self, k=0):
        """Rational ratio inside the chamber (k selects different interior points)."""
        lo, hi = self.interval()
        return lo + (hi - lo) * Fraction(k + 1, k + 2 + (k + 1))


def _ratio_cmp(alpha, q):
    """Sign of alpha_1/alpha_2 - q for q rational or a scalar."""
    a1, a2 = alpha.entries
    return compare_any(a1, _mulq(q, a2))


def _mulq(q, a):
    return a * q if isinstance(q, Fraction) else q * a


GOLDEN_HI = WeightScalar.sqrt(5, Fraction(3, 2)) + Fraction(7, 2)
GOLDEN_LO = Fraction(7, 2) - WeightScalar.sqrt(5, Fraction(3, 2))


def chamber_of(alpha):
    if not isinstance(alpha, WeightVector):
        alpha = WeightVector(alpha)
    if len(alpha) != 2:
        raise ValueError("chamber_of needs two weights")
    if _ratio_cmp(alpha, GOLDEN_HI) >= 0:
        return ChamberIndex("irrational-right")
    if _ratio_cmp(alpha, GOLDEN_LO) <= 0:
        return ChamberIndex("irrational-left")
    n = 0
    while True:
        lo = Fraction(d_value(n + 1), d_value(n - 1))
        hi = Fraction(d_value(n + 2), d_value(n))
        s_lo, s_hi = _ratio_cmp(alpha, lo), _ratio_cmp(alpha, hi)
        if s_lo == 0 or s_hi == 0:
            raise WallError(f"weight ratio lies on the wall {lo if s_lo == 0 else hi}")
        if s_lo > 0 and s_hi < 0:
            return ChamberIndex("chamber", n)
        n += 1 if s_hi > 0 else -1


def predicted_body(alpha):
    if not isinstance(alpha, WeightVector):
        alpha = WeightVector(alpha)
    ch = chamber_of(alpha)
    if ch.regime == "chamber":
        n = ch.n
        return hull([(0, 0), (0, Fraction(d_value(n + 1), d_value(n))),
                     (Fraction(d_value(n), d_value(n + 1)), 0)], 2)
    a1, a2 = alpha.entries
    s = a1 + a2
    return hull([(0, 0), (Fraction(1, 3), Fraction(1, 3)),
                 ((3 * a2 / s).simplify(), 0), (0, (3 * a1 / s).simplify())], 2)


# ------------------------------------------------------------------ reduction

def distinct_reduction(sections, order_key=None):
    """Echelonize rows so that their lowest columns become pairwise distinct.

    sections: list of dict column -> coefficient. Columns are compared with
    order_key (default: natural order). Returns a list of (row, lowest column)
    in input order; raises TruncationInsufficientError if a row reduces to zero
    inside the stored columns.
    """
    cols = set()
    for row in sections:
        cols.update(row)
    ordered = sorted(cols, key=order_key) if order_key else sorted(cols)
    rank = {c: i for i, c in enumerate(ordered)}
    pivots = {}
    out = []
    for row in sections:
        r = {rank[c]: Fraction(v) for c, v in row.items() if v}
        while r:
            lead = min(r)
            if lead not in pivots:
                break
            prow = pivots[lead]
            f = r[lead]
            for c, v in prow.items():
                nv = r.get(c, 0) - f * v
                if nv:
                    r[c] = nv
                else:
                    r.pop(c, None)
        if not r:
            raise TruncationInsufficientError(
                "a section vanishes on every stored column; raise the truncation order")
        lead = min(r)
        inv = 1 / r[lead]
        r = {c: v * inv for c, v in r.items()}
        pivots[lead] = r
        out.append(({ordered[c]: v for c, v in r.items()}, ordered[lead]))
    return out


# ------------------------------------------------------------------ nodal cubic

DEFAULT_CUBIC = {(0, 2, 1): 1, (2, 0, 1): -1, (3, 0, 0): -1}  # y^2 z - x^2 z - x^3


def _series_inv_sqrt(p, K):
    """h = p^{-1/2} mod x^K for an fmpq_poly p with p(0) a rational square."""
    c0 = Fraction(int(p.coeffs()[0].p), int(p.coeffs()[0].q)) if p.coeffs() else Fraction(0)
    r = sqrt_of_rational(c0) if c0 > 0 else None
    if not isinstance(r, Fraction):
        raise ValueError("p(0) must be a positive rational square")
    h = fmpq_poly([fmpq((1 / r).numerator, (1 / r).denominator)])
    prec = 1
    while prec < K:
        prec = min(2 * prec, K)
        # h <- h (3 - p h^2) / 2
        h2 = h.mul_low(h, prec)
        t = fmpq_poly([3]) - p.mul_low(h2, prec)
        h = h.mul_low(t, prec) * fmpq(1, 2)
    return h


class NodalCubicModel:
    """Irreducible plane cubic with a node at [0:0:1] whose tangents are rational.

    Sections of O(m) are the monomials x^a y^b (a + b <= m) in the chart z = 1.
    Branch coordinates (u, v) at the node come from node_branches.
    """

    def __init__(self, cubic=None):
        cubic = dict(DEFAULT_CUBIC if cubic is None else cubic)
        cubic = {tuple(k): Fraction(c) for k, c in cubic.items() if c}
        if any(sum(k) != 3 for k in cubic):
            raise ModelConsistencyError("cubic must be homogeneous of degree 3")
        self.cubic = cubic
        self.f = {(i, j): c for (i, j, k), c in cubic.items()}
        if any(i + j < 2 for (i, j) in self.f):
            raise ModelConsistencyError("the point [0:0:1] must be singular")
        q = {k: c for k, c in self.f.items() if sum(k) == 2}
        c3 = {k: c for k, c in self.f.items() if sum(k) == 3}
        from .series import _quadratic_factors
        try:
            (p1, q1), (p2, q2) = _quadratic_factors(q)
        except ValueError as e:
            raise ModelConsistencyError(f"node does not split over Q: {e}") from None
        for (pa, qa) in ((p1, q1), (p2, q2)):
            # a common linear factor of the quadratic and cubic parts makes C reducible
            val = sum(c * (qa ** i) * ((-pa) ** j) for (i, j), c in c3.items())
            if val == 0:
                raise ModelConsistencyError("cubic is reducible (shares a line through the node)")
        self.tangents = ((p1, q1), (p2, q2))
        self._fast = self._fast_family()
        self._cache = {}

    def _fast_family(self):
        """p(x) when f = y^2 - x^2 p(x), else None."""
        if self.f.get((0, 2)) != 1:
            return None
        if any(j not in (0, 2) or (j == 2 and i != 0) for (i, j) in self.f):
            return None
        coeffs = [-self.f.get((k + 2, 0), 0) for k in range(2)]
        if coeffs[0] <= 0 or not isinstance(sqrt_of_rational(coeffs[0]), Fraction):
            return None
        return coeffs

    def n_sections(self, m):
        return (m + 1) * (m + 2) // 2

    @staticmethod
    def section_exponents(m):
        return [(d - b, b) for d in range(m + 1) for b in range(d + 1)]

    def valuation(self, alpha, tiebreak="strict"):
        alpha = alpha if isinstance(alpha, WeightVector) else WeightVector(alpha)
        if len(alpha) != 2:
            raise ValueError("nodal valuations have two weights")
        return NuValuation(QmValuation(alpha, "node", tiebreak))

    def log_discrepancy(self, nu):
        a1, a2 = nu.alpha.entries
        return (a1 + a2).simplify()

    def t_bound(self, nu):
        """Starting guess for T; only sizes the first truncation (N doubles if short)."""
        a = list(nu.alpha.values())
        try:
            return predicted_body(nu.alpha).max_linear(a)
        except WallError:
            # on a wall use the larger value from the two neighbouring chambers
            best = None
            for f in (Fraction(99, 100), Fraction(101, 100)):
                v = predicted_body(WeightVector([a[0] * f, a[1]])).max_linear(a)
                best = v if best is None or compare_any(v, best) > 0 else best
            return best

    # ---------------------------------------------------------- branch data

    def branches(self, order):
        f = TruncatedSeries(2, self.f, order)
        return node_branches(f, order)

    def phi(self, K):
        """Coefficients of x = phi(t) with t = x*s(x), s = sqrt(p), up to t^K (fast family)."""
        p0, p1 = self._fast
        p = fmpq_poly([fmpq(p0.numerator, p0.denominator), fmpq(p1.numerator, p1.denominator)])
        h = _series_inv_sqrt(p, K + 1)
        out = [Fraction(0)] * (K + 1)
        hn = fmpq_poly([1])
        for n in range(1, K + 1):
            hn = hn.mul_low(h, K)
            c = hn.coeffs()
            cn = c[n - 1] if n - 1 < len(c) else 0
            cn = fmpq(cn) if not isinstance(cn, fmpq) else cn
            out[n] = Fraction(int(cn.p), int(cn.q)) / n
        return out

    def coordinate_series(self, order, grading=(1, 1), route="auto"):
        """(X(u,v), Y(u,v)): the ambient coordinates in branch coordinates.

        route='closed' uses the Lagrange-inversion formula (needs y^2 = x^2 p(x)),
        route='series' inverts the Hensel branch pair; 'auto' picks closed when possible.
        """
        use_closed = self._fast is not None and route != "series"
        if route == "closed" and self._fast is None:
            raise UnsupportedError("closed form needs a cubic of the shape y^2 = x^2 p(x)")
        key = ("coords", order, tuple(grading), use_closed)
        if key in self._cache:
            return self._cache[key]
        g = tuple(grading)
        K = -(-order // min(g))
        if use_closed:
            ph = self.phi(K)
            t = TruncatedSeries(2, {(1, 0): Fraction(-1, 2), (0, 1): Fraction(1, 2)}, order, g)
            X = TruncatedSeries(2, {}, order, g)
            for c in reversed(ph[1:]):
                X = (X + TruncatedSeries.const(c, 2, order, g)) * t
            Y = TruncatedSeries(2, {(1, 0): Fraction(1, 2), (0, 1): Fraction(1, 2)}, order, g)
        else:
            bp = self.branches(K)
            Xs, Ys = invert_system([bp.x1, bp.x2], K)
            X = TruncatedSeries(2, Xs.terms, order, g)
            Y = TruncatedSeries(2, Ys.terms, order, g)
        self._cache[key] = (X, Y)
        return X, Y

    def expand(self, poly, order, grading=(1, 1)):
        """A polynomial in (x, y) as a truncated series in branch coordinates (u, v)."""
        X, Y = self.coordinate_series(order, grading)
        out = TruncatedSeries(2, {}, order, X.grading)
        pw = {}
        for (a, b), c in poly.items():
            if (a, b) not in pw:
                pw[(a, b)] = (X ** a) * (Y ** b)
            out = out + pw[(a, b)].scale(c)
        return out

    def curve_equation(self):
        return dict(self.f)

    def engine(self, nu, m_max, safety=2):
        key = ("engine", nu)
        eng = self._cache.get(key)
        if eng is None or eng.m_max < m_max:
            eng = NodalGammaEngine(self, nu, m_max, safety=safety)
            self._cache[key] = eng
        return eng

    def gamma(self, nu, m):
        if m == 0:
            return [(0, 0)]
        return self.engine(nu, m).gamma_exact(m)

    def jumping_values(self, nu, m):
        return [dot(nu.alpha, g).simplify() for g in self.gamma(nu, m)]

    def body(self, nu):
        """The limiting body predicted in closed form (walls raise WallError)."""
        return predicted_body(nu.alpha)


def weight_grading(alpha):
    """Positive integer grading g with alpha_i / g_i as equal as possible."""
    vals = alpha.values()
    if all(isinstance(v, Fraction) for v in vals):
        den = 1
        for v in vals:
            den = _lcm(den, v.denominator)
        ints = [int(v * den) for v in vals]
        g = 0
        for x in ints:
            g = gcd(g, x)
        return tuple(x // g for x in ints)
    fl = [float(v) for v in vals]
    lo = min(fl)
    return tuple(max(1, round(8 * x / lo)) for x in fl)


class _Columns:
    """Branch monomials u^i v^j with g.(i,j) <= N sorted by the nu-order."""

    def __init__(self, alpha, tiebreak, grading, N):
        g = grading
        cols = [(i, j) for i in range(N // g[0] + 1) for j in range((N - g[0] * i) // g[1] + 1)]
        vals = alpha.values()
        if all(isinstance(v, Fraction) for v in vals):
            w = {c: vals[0] * c[0] + vals[1] * c[1] for c in cols}
            if tiebreak == "lex":
                cols.sort(key=lambda c: (w[c], -c[0], -c[1]))
            else:
                cols.sort(key=lambda c: w[c])
                for a, b in zip(cols, cols[1:]):
                    if w[a] == w[b]:
                        raise ValueError("equal weights on distinct exponents; use tiebreak='lex'")
        else:
            w = {c: dot(alpha, c) for c in cols}

            def cmp(a, b):
                s = compare(w[a], w[b])
                if s == 0 and a != b:
                    if tiebreak != "lex":
                        raise ValueError("equal weights on distinct exponents; use tiebreak='lex'")
                    return -1 if a > b else 1
                return s
            cols.sort(key=cmp_to_key(cmp))
        self.cols = cols
        self.weight = w
        self.index = {c: k for k, c in enumerate(cols)}
        self.N = N
        from .series import certification_constant
        self.bound = certification_constant(alpha, g) * (N + 1)

    def certified(self, col):
        return compare_any(self.weight[col], self.bound) < 0


class NodalGammaEngine:
    """Builds the integer coefficient matrix of all sections up to degree m_max."""

    def __init__(self, model, nu, m_max, N=None, safety=2, route="auto"):
        self.route = route
        self.model = model
        self.nu = nu
        self.m_max = m_max
        self.grading = weight_grading(nu.alpha)
        from .series import certification_constant
        c = certification_constant(nu.alpha, self.grading).simplify()
        if N is None:
            tb = model.t_bound(nu)
            if isinstance(c, Fraction) and isinstance(tb, Fraction):
                N = _floor(Fraction(safety).limit_denominator(1000) * m_max * tb / c) + 4
            else:
                N = int(safety * m_max * float(tb) / float(c)) + 4
        self._build(N)

    def _build(self, N):
        self.N = N
        self.columns = _Columns(self.nu.alpha, self.nu.tiebreak, self.grading, N)
        self.rows = self._rows()

    def _rows(self):
        model, cols = self.model, self.columns.cols
        exps = model.section_exponents(self.m_max)
        if model._fast is not None and self.route != "series":
            K = max(i + j for i, j in cols)
            ph = model.phi(K)
            phq = fmpq_poly([fmpq(x.numerator, x.denominator) for x in ph])
            # powers of phi truncated at t^K, scaled to integers row by row
            pwi = []
            cur = fmpq_poly([1])
            for a in range(self.m_max + 1):
                if a:
                    cur = cur.mul_low(phq, K + 1)
                num, den = cur.numer(), cur.denom()
                co = [int(x) for x in num.coeffs()]
                pwi.append(co + [0] * (K + 1 - len(co)))
            # coefficient of u^i v^j in (v-u)^k (u+v)^b, k = i+j-b
            bin_tab = {}

            def cb(b, k):
                key = (b, k)
                if key not in bin_tab:
                    if k == 0:
                        bin_tab[key] = [comb(b, i) for i in range(b + 1)]
                    else:
                        prev = cb(b, k - 1)
                        new = [0] * (len(prev) + 1)
                        for i, x in enumerate(prev):
                            new[i + 1] -= x  # times -u
                            new[i] += x      # times v
                        bin_tab[key] = new
                return bin_tab[key]

            rows = []
            for a, b in exps:
                row = []
                for (i, j) in cols:
                    k = i + j - b
                    if k < a:
                        row.append(0)
                        continue
                    c = cb(b, k)[i]
                    row.append(pwi[a][k] * c << (K - i - j) if c else 0)
                g = 0
                for x in row:
                    if x:
                        g = gcd(g, x)
                rows.append([x // g for x in row] if g > 1 else row)
            return rows
        order = self.N
        X, Y = model.coordinate_series(order, self.grading, route="series")
        rows = []
        Xp = [TruncatedSeries.const(1, 2, order, X.grading)]
        Yp = [TruncatedSeries.const(1, 2, order, X.grading)]
        for _ in range(self.m_max):
            Xp.append(Xp[-1] * X)
            Yp.append(Yp[-1] * Y)
        frows = []
        for a, b in exps:
            s = Xp[a] * Yp[b]
            frows.append([s.terms.get(c, Fraction(0)) for c in cols])
        for fr in frows:
            den = 1
            for x in fr:
                den = _lcm(den, x.denominator)
            rows.append([int(x * den) for x in fr])
        return rows

    def _prefix(self, m, ncols=None):
        n = self.model.n_sections(m)
        C = len(self.columns.cols) if ncols is None else ncols
        return [r[:C] for r in self.rows[:n]], n, C

    def _modular_pivots(self, A, n, C, p):
        R, rank = nmod_mat(A if isinstance(A, fmpz_mat) else fmpz_mat(A), p).rref()
        if rank < n:
            return None
        piv = []
        for i in range(rank):
            for k in range(C):
                if int(R[i, k]):
                    piv.append(k)
                    break
        return piv

    def _certify_pivots(self, A, piv):
        """Exact check: X = A[:,P]^{-1} turns A into echelon form with pivots P."""
        n = len(A)
        sub = fmpq_mat(fmpz_mat([[A[r][k] for k in piv] for r in range(n)]))
        X = sub.inv()
        R = X * fmpq_mat(fmpz_mat(A))
        for i, k in enumerate(piv):
            for c in range(k):
                if R[i, c] != 0:
                    return False
        return True

    def gamma_exact(self, m):
        """Exact Gamma_m: modular pivot guess, certified by an exact echelon check.

        Falls back to rational rref when no prime gives a certified guess.
        Grows N until every pivot column is certified by the truncation.
        """
        while True:
            A, n, C = self._prefix(m)
            piv = None
            for p in _NMOD_PRIMES:
                cand = self._modular_pivots(A, n, C, p)
                if cand is not None and self._certify_pivots(A, cand):
                    piv = cand
                    break
            if piv is None:
                R, rank = fmpq_mat(fmpz_mat(A)).rref()
                if rank == n:
                    piv = []
                    for i in range(rank):
                        for k in range(C):
                            if R[i, k] != 0:
                                piv.append(k)
                                break
            if piv is not None and all(self.columns.certified(self.columns.cols[k]) for k in piv):
                return sorted(self.columns.cols[k] for k in piv)
            self._build(2 * self.N)

    def gamma_python(self, m):
        A, n, C = self._prefix(m)
        cols = self.columns.cols
        red = distinct_reduction([{k: x for k, x in enumerate(r) if x} for r in A])
        leads = [lead for _, lead in red]
        if not all(self.columns.certified(cols[k]) for k in leads):
            raise TruncationInsufficientError("lowest column not certified", order=self.N)
        return sorted(cols[k] for k in leads)

    def _upper_top(self, m, primes=_NMOD_PRIMES):
        """Top pivot column mod p; full rank there bounds j_{m,1} from above."""
        A, n, C = self._prefix(m)
        Z = fmpz_mat(A)
        for p in primes:
            piv = self._modular_pivots(Z, n, C, p)
            if piv is not None:
                return A, Z, piv
        return A, Z, None

    def _witness(self, A, piv, top):
        """Exact section vanishing on every column before top (None if none exists)."""
        n = len(A)
        S = fmpz_mat([[A[r][k] for k in piv] for r in range(n)])
        e = fmpq_mat(n, 1, [0] * (n - 1) + [1])
        lam = fmpq_mat(S.transpose()).solve(e, algorithm="dixon")
        num, _ = lam.transpose().numer_denom()
        if top:
            s = num * fmpz_mat([[A[r][k] for k in range(top)] for r in range(n)])
            if any(s[0, k] != 0 for k in range(top)):
                return None
        return num

    def top_jump(self, m, lower=None):
        """Certified nu-value of the top jump j_{m,1}.

        lower: an exponent already known to be a nu-value at level m (e.g. from
        products of lower-level witnesses); when it meets the modular upper bound
        no linear solve is needed.
        """
        while True:
            A, Z, piv = self._upper_top(m)
            if piv is not None:
                top = max(piv)
                col = self.columns.cols[top]
                if self.columns.certified(col):
                    if lower is not None and tuple(lower) == col:
                        return col
                    if self._witness(A, piv, top) is not None:
                        return col
                    raise TruncationInsufficientError(
                        "modular pivot could not be confirmed exactly", order=self.N)
            if self.N > 64 * (self.m_max + 1) * 8:
                raise TruncationInsufficientError("truncation cap exhausted", order=self.N)
            self._build(2 * self.N)

    def t_sweep(self, ms):
        """{m: top nu-value} for levels in ms, reusing product witnesses as lower bounds."""
        known = {0: (0, 0)}
        key = self.columns.index
        out = {}
        for m in sorted(set(range(1, max(ms) + 1))):
            cands = [tuple(x + y for x, y in zip(known[a], known[m - a]))
                     for a in range(1, m) if a in known and m - a in known]
            best = None
            for c in cands:
                if c in key and (best is None or key[c] > key[best]):
                    best = c
            col = self.top_jump(m, best)
            known[m] = col
            key = self.columns.index
            if m in ms:
                out[m] = col
        return out


def nodal_gamma(model, nu, m, engine=None, method="exact"):
    if m == 0:
        return [(0, 0)]
    eng = engine or NodalGammaEngine(model, nu, m)
    if method == "python":
        return eng.gamma_python(m)
    return eng.gamma_exact(m)


def unicuspidal_probe(model, n, alpha=None):
    """Search a section of O(d_n) with nu = (0, d_{n+1}) in chamber n.

    Returns (coefficients by exponent (a, b) of x^a y^b, info) or (None, info).
    """
    deg, target = d_value(n), (0, d_value(n + 1))
    if alpha is None:
        alpha = WeightVector([ChamberIndex("chamber", n).sample(), 1])
    nu = model.valuation(alpha, "lex")
    eng = model.engine(nu, deg)
    gam = eng.gamma_exact(deg)
    info = {"degree": deg, "target": target, "gamma": gam, "found": False}
    if target not in gam:
        return None, info
    index = eng.columns.index
    exps = model.section_exponents(deg)
    # unscaled rows, each tagged with its own section so combinations are tracked
    aug = []
    for k, e in enumerate(exps):
        ser = model.expand({e: 1}, eng.N, eng.grading)
        row = {c: v for c, v in ser.terms.items() if c in index}
        row[("sec", k)] = Fraction(1)
        aug.append(row)

    def key(c):
        return (1, c[1]) if c[0] == "sec" else (0, index[c])
    for row, lead in distinct_reduction(aug, order_key=key):
        if lead == target:
            poly = {exps[c[1]]: v for c, v in row.items() if c[0] == "sec"}
            info["found"] = True
            return poly, info
    return None, info
