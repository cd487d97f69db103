"""Truncated multivariate power series with exact coefficients.

Terms live in a dict exponent-tuple -> coefficient. A grading g (positive
integers) assigns degree g.beta to each exponent; a series of order N
stores exactly the terms of degree <= N. order=None means an exact
polynomial.
"""

from fractions import Fraction
from flint import fmpq, fmpq_poly

from .errors import (
    DimensionMismatchError,
    OkounkovError,
    TruncationInsufficientError,
)
from .wfield import WeightVector, compare, dot, rational_rank


class RatFunc:
    """Univariate rational function num/den over Q in an auxiliary variable."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        num, den = fmpq_poly(num), fmpq_poly(den)
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        g = num.gcd(den)
        if g.degree() > 0:
            num, den = num / g, den / g
            num, den = fmpq_poly(num), fmpq_poly(den)
        lead = den.coeffs()[-1]
        self.num, self.den = num / lead, den / lead

    @classmethod
    def var(cls):
        return cls(fmpq_poly([0, 1]))

    @staticmethod
    def _lift(x):
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, (int, Fraction)):
            x = Fraction(x)
            return RatFunc(fmpq_poly([x.numerator]), fmpq_poly([x.denominator]))
        return None

    def __add__(self, o):
        o = self._lift(o)
        if o is None:
            return NotImplemented
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, o):
        o = self._lift(o)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = self._lift(o)
        if o is None:
            return NotImplemented
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = self._lift(o)
        if o is None:
            return NotImplemented
        return RatFunc(self.num * o.den, self.den * o.num)

    def __bool__(self):
        return self.num != 0

    def __eq__(self, o):
        o = self._lift(o)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((str(self.num), str(self.den)))

    def order_at(self, a):
        """Order of vanishing at u = a (negative for poles)."""
        if not self:
            raise ValueError("order of the zero function")
        a = Fraction(a)
        a = fmpq(a.numerator, a.denominator)
        lin = fmpq_poly([-a, 1])

        def ordp(p):
            k = 0
            while p(a) == 0:
                p = fmpq_poly(p / lin)
                k += 1
            return k

        return ordp(self.num) - ordp(self.den)

    def __repr__(self):
        return f"({self.num})/({self.den})"


def _domain(c):
    return "ratfunc" if isinstance(c, RatFunc) else "rational"


class TruncatedSeries:
    __slots__ = ("nvars", "order", "terms", "grading")

    def __init__(self, nvars, terms=None, order=None, grading=None):
        self.nvars = nvars
        self.order = order
        self.grading = tuple(grading) if grading is not None else (1,) * nvars
        if len(self.grading) != nvars or any(g <= 0 for g in self.grading):
            raise ValueError("grading needs one positive integer per variable")
        clean = {}
        for b, c in (terms or {}).items():
            b = tuple(b)
            if len(b) != nvars:
                raise DimensionMismatchError("exponent length differs from nvars")
            if not isinstance(c, RatFunc):
                c = Fraction(c)
            if c and (order is None or self.deg(b) <= order):
                clean[b] = c
        self.terms = clean

    # construction helpers
    @classmethod
    def var(cls, i, nvars, order=None, grading=None):
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1}, order, grading)

    @classmethod
    def const(cls, c, nvars, order=None, grading=None):
        return cls(nvars, {(0,) * nvars: c}, order, grading)

    def deg(self, beta):
        return sum(g * b for g, b in zip(self.grading, beta))

    def _like(self, terms, order):
        s = TruncatedSeries.__new__(TruncatedSeries)
        s.nvars, s.order, s.grading, s.terms = self.nvars, order, self.grading, terms
        return s

    def _check(self, other):
        if other.nvars != self.nvars or other.grading != self.grading:
            raise DimensionMismatchError("series over different variables or gradings")
        doms = {_domain(c) for c in self.terms.values()} | {_domain(c) for c in other.terms.values()}
        if len(doms) > 1:
            raise OkounkovError("coefficient domain mismatch")

    @staticmethod
    def _min_order(a, b):
        if a is None:
            return b
        if b is None:
            return a
        return min(a, b)

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries.const(other, self.nvars, self.order, self.grading)
        self._check(other)
        order = self._min_order(self.order, other.order)
        t = dict(self.terms)
        for b, c in other.terms.items():
            v = t.get(b, 0) + c
            if v:
                t[b] = v
            else:
                t.pop(b, None)
        if order is not None:
            t = {b: c for b, c in t.items() if self.deg(b) <= order}
        return self._like(t, order)

    __radd__ = __add__

    def __neg__(self):
        return self._like({b: -c for b, c in self.terms.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        if not c:
            return self._like({}, self.order)
        return self._like({b: v * c for b, v in self.terms.items()}, self.order)

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self.scale(other)
        self._check(other)
        order = self._min_order(self.order, other.order)
        if (self.nvars == 2 and len(self.terms) * len(other.terms) > 400
                and _domain(next(iter(self.terms.values()))) == "rational"):
            return self._like(_kronecker_mul(self, other, order), order)
        A = sorted(self.terms.items(), key=lambda kv: self.deg(kv[0]))
        B = sorted(other.terms.items(), key=lambda kv: self.deg(kv[0]))
        bdeg = [self.deg(b) for b, _ in B]
        out = {}
        for a, ca in A:
            da = self.deg(a)
            if order is not None and da + (bdeg[0] if bdeg else 0) > order:
                break
            for (b, cb), db in zip(B, bdeg):
                if order is not None and da + db > order:
                    break
                e = tuple(x + y for x, y in zip(a, b))
                v = out.get(e, 0) + ca * cb
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return self._like(out, order)

    __rmul__ = __mul__

    def __pow__(self, k):
        res = TruncatedSeries.const(1, self.nvars, self.order, self.grading)
        base = self
        while k:
            if k & 1:
                res = res * base
            k >>= 1
            if k:
                base = base * base
        return res

    def truncate(self, order):
        order = self._min_order(self.order, order)
        return self._like({b: c for b, c in self.terms.items()
                           if order is None or self.deg(b) <= order}, order)

    def homogeneous_part(self, d):
        return {b: c for b, c in self.terms.items() if self.deg(b) == d}

    def lowest_degree(self):
        return min((self.deg(b) for b in self.terms), default=None)

    def constant(self):
        return self.terms.get((0,) * self.nvars, 0)

    def linear_part(self):
        """Coefficients of the variables x_1..x_n (standard grading assumed)."""
        out = []
        for i in range(self.nvars):
            e = [0] * self.nvars
            e[i] = 1
            out.append(self.terms.get(tuple(e), Fraction(0)))
        return out

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def equal_mod(self, other, order):
        d = self - other
        return all(self.deg(b) > order for b in d.terms)

    def __repr__(self):
        items = sorted(self.terms.items(), key=lambda kv: (self.deg(kv[0]), kv[0]))
        body = " + ".join(f"{c}*x^{b}" for b, c in items) or "0"
        return f"TruncatedSeries({body}; order={self.order})"


def _kronecker_mul(a, b, order):
    """Bivariate product through one flint polynomial product (u^i v^j -> z^(i + S j))."""
    ia = max(e[0] for e in a.terms)
    ib = max(e[0] for e in b.terms)
    S = ia + ib + 1

    def pack(f):
        n = max(e[0] + S * e[1] for e in f.terms) + 1
        co = [0] * n
        for (i, j), c in f.terms.items():
            co[i + S * j] = fmpq(c.numerator, c.denominator)
        return fmpq_poly(co)

    prod = pack(a) * pack(b)
    g0, g1 = a.grading
    out = {}
    for k, c in enumerate(prod.coeffs()):
        if c == 0:
            continue
        j, i = divmod(k, S)
        if order is not None and g0 * i + g1 * j > order:
            continue
        out[(i, j)] = Fraction(int(c.p), int(c.q))
    return out


def arith(op, a, b):
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "scale":
        return a.scale(b)
    raise ValueError(f"unknown op {op}")


def compose(f, subs):
    """f(subs[0], ..., subs[r-1]); subs share nvars and grading."""
    if len(subs) != f.nvars:
        raise DimensionMismatchError("need one substitution per variable")
    for s in subs:
        if s.constant():
            raise ValueError("substituted series must have zero constant term")
    tmpl = subs[0]
    order = None
    for s in subs:
        order = TruncatedSeries._min_order(order, s.order)
    if f.order is not None:
        # missing terms of f have total degree >= ceil((N_f+1)/max g)
        kmin = -(-(f.order + 1) // max(f.grading))
        dmin = min(s.lowest_degree() for s in subs if not s.is_zero()) if any(
            not s.is_zero() for s in subs) else 1
        order = TruncatedSeries._min_order(order, kmin * dmin - 1)
    one = TruncatedSeries.const(1, tmpl.nvars, order, tmpl.grading)
    powers = [[one] for _ in subs]
    out = TruncatedSeries(tmpl.nvars, {}, order, tmpl.grading)
    for beta, c in sorted(f.terms.items()):
        term = one.scale(c)
        for i, k in enumerate(beta):
            while len(powers[i]) <= k:
                powers[i].append((powers[i][-1] * subs[i]).truncate(order))
            if k:
                term = term * powers[i][k]
        out = out + term
    return out


def _solve_linear(M, rhs_cols):
    """Solve M X = R for square Fraction matrix M (list of rows)."""
    n = len(M)
    A = [list(map(Fraction, row)) + list(rc) for row, rc in zip(M, rhs_cols)]
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c]), None)
        if p is None:
            raise ValueError("singular linear part")
        A[c], A[p] = A[p], A[c]
        pv = A[c][c]
        A[c] = [x / pv for x in A[c]]
        for i in range(n):
            if i != c and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return [row[n:] for row in A]


def invert_system(g, order=None):
    """Return h with g_i(h(u)) = u_i modulo the truncation order.

    Chord iteration h <- L^{-1}(u - N(h)) where g = L x + N(x); each pass
    fixes one more degree.
    """
    r = len(g)
    if any(s.nvars != r for s in g):
        raise DimensionMismatchError("need r series in r variables")
    if any(s.grading != (1,) * r for s in g):
        raise ValueError("invert_system works in the standard grading")
    for s in g:
        if s.constant():
            raise ValueError("series must have zero constant term")
    if order is None:
        order = min((s.order for s in g if s.order is not None), default=None)
        if order is None:
            raise ValueError("give an order for polynomial input")
    L = [s.linear_part() for s in g]
    try:
        Linv = _solve_linear(L, [[Fraction(int(i == j)) for j in range(r)] for i in range(r)])
    except ValueError:
        raise ValueError("singular linear part") from None
    u = [TruncatedSeries.var(i, r, order) for i in range(r)]
    nonlin = []
    for i, s in enumerate(g):
        lin = {b: c for b, c in s.terms.items() if sum(b) == 1}
        nonlin.append(s.truncate(order) - TruncatedSeries(r, lin, order))
    h = [sum((u[j].scale(Linv[i][j]) for j in range(r)), TruncatedSeries(r, {}, order))
         for i in range(r)]
    for _ in range(order):
        Nh = [compose(nl, h).truncate(order) for nl in nonlin]
        rhs = [u[i] - Nh[i] for i in range(r)]
        h = [sum((rhs[j].scale(Linv[i][j]) for j in range(r)), TruncatedSeries(r, {}, order))
             for i in range(r)]
    return h


class BranchPair:
    def __init__(self, x1, x2, unit, order):
        self.x1, self.x2, self.unit, self.order = x1, x2, unit, order

    def __iter__(self):
        return iter((self.x1, self.x2))

    def __repr__(self):
        return f"BranchPair(x1={self.x1}, x2={self.x2})"


def series_sqrt(p, order):
    """Square root of a univariate series with a square rational constant term."""
    from .wfield import sqrt_of_rational
    c0 = p.constant()
    r = sqrt_of_rational(c0) if c0 else None
    if not isinstance(r, Fraction) or r == 0:
        raise ValueError("constant term is not a nonzero rational square")
    s = TruncatedSeries.const(r, 1, order)
    # Newton: s <- (s + p/s)/2, using s^{-1} via its own Newton loop
    for _ in range(order.bit_length() + 2):
        s = (s + p.truncate(order) * series_inverse(s, order)).scale(Fraction(1, 2))
    return s


def series_inverse(s, order):
    c0 = s.constant()
    if not c0:
        raise ZeroDivisionError("series with zero constant term")
    inv = TruncatedSeries.const(1 / Fraction(c0), s.nvars, order, s.grading)
    two = TruncatedSeries.const(2, s.nvars, order, s.grading)
    for _ in range(order.bit_length() + 2):
        inv = (inv * (two - s.truncate(order) * inv)).truncate(order)
    return inv


def _quadratic_factors(q):
    """Split a x^2 + b xy + c y^2 into two non-proportional rational linear forms.

    Returns ((p1, q1), (p2, q2)) meaning l_i = p_i x + q_i y with l1*l2 = q.
    """
    from .wfield import sqrt_of_rational
    a, b, c = (Fraction(q.get(k, 0)) for k in ((2, 0), (1, 1), (0, 2)))
    disc = b * b - 4 * a * c
    if disc <= 0:
        raise ValueError("quadratic part is degenerate or does not split over Q")
    root = sqrt_of_rational(disc)
    if not isinstance(root, Fraction):
        raise ValueError("quadratic part does not split over Q")
    if c:
        # c (y - r1 x)(y - r2 x), r = roots of c r^2 + b r + a
        r1, r2 = (-b + root) / (2 * c), (-b - root) / (2 * c)
        return (-c * r1, c), (-r2, Fraction(1))
    # c == 0: q = x (a x + b y)
    return (Fraction(1), Fraction(0)), (a, b)


def node_branches(f, order=None):
    """Factor f = x1 * x2 * unit at an ordinary node with rational tangents."""
    if f.nvars != 2 or f.grading != (1, 1):
        raise ValueError("node_branches needs a bivariate series in the standard grading")
    N = order if order is not None else f.order
    if N is None:
        raise ValueError("give a truncation order")
    f = f.truncate(N)
    if f.constant() or any(f.linear_part()):
        raise ValueError("f must vanish to order two at the origin")
    q = f.homogeneous_part(2)
    (p1, q1), (p2, q2) = _quadratic_factors(q)

    # fast path: f = y^2 - x^2 p(x)
    if set(f.terms) <= {(0, 2)} | {(k, 0) for k in range(2, N + 1)} and f.terms.get((0, 2)) == 1:
        p = TruncatedSeries(1, {(k - 2,): -c for (k, j), c in f.terms.items() if j == 0}, N)
        try:
            s = series_sqrt(p, N)
        except ValueError:
            s = None
        if s is not None:
            xs = TruncatedSeries(2, {(k + 1, 0): c for (k,), c in s.terms.items()}, N)
            y = TruncatedSeries.var(1, 2, N)
            one = TruncatedSeries.const(1, 2, N)
            return BranchPair(y - xs, y + xs, one, N)

    # generic Hensel lifting in coordinates l1, l2
    T = [[p1, q1], [p2, q2]]
    Tinv = _solve_linear(T, [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]])
    L1 = TruncatedSeries(2, {(1, 0): 1}, N)
    L2 = TruncatedSeries(2, {(0, 1): 1}, N)
    # x, y in terms of (l1, l2)
    xl = TruncatedSeries(2, {(1, 0): Tinv[0][0], (0, 1): Tinv[0][1]}, N)
    yl = TruncatedSeries(2, {(1, 0): Tinv[1][0], (0, 1): Tinv[1][1]}, N)
    F = compose(f, [xl, yl])
    X1, X2 = L1, L2
    for d in range(3, N + 1):
        R = (F - X1 * X2).homogeneous_part(d)
        d1, d2 = {}, {}
        for (i, j), c in R.items():
            if i >= j:
                d2[(i - 1, j)] = d2.get((i - 1, j), 0) + c
            else:
                d1[(i, j - 1)] = d1.get((i, j - 1), 0) + c
        X1 = X1 + TruncatedSeries(2, d1, N)
        X2 = X2 + TruncatedSeries(2, d2, N)
    lx = [TruncatedSeries(2, {(1, 0): p1, (0, 1): q1}, N),
          TruncatedSeries(2, {(1, 0): p2, (0, 1): q2}, N)]
    x1 = compose(X1, lx)
    x2 = compose(X2, lx)
    one = TruncatedSeries.const(1, 2, N)
    return BranchPair(x1, x2, one, N)


def certification_constant(alpha, grading):
    """c = min alpha_i / g_i; dropped terms have weight >= c*(N+1)."""
    vals = [a / g for a, g in zip(alpha.entries, grading)]
    best = vals[0]
    for v in vals[1:]:
        if compare(v, best) < 0:
            best = v
    return best


def lowest_term(f, alpha, tiebreak="strict"):
    """(beta, c) minimizing alpha.beta over the support of f.

    tiebreak='lex' orders equal weights by putting the lexicographically
    larger exponent first (an infinitesimal perturbation alpha - (eps, eps^2, ...)).
    """
    if not isinstance(alpha, WeightVector):
        alpha = WeightVector(alpha)
    if f.is_zero():
        raise ValueError("lowest term of the zero series")
    if len(alpha) != f.nvars:
        raise DimensionMismatchError("weight length differs from nvars")
    if tiebreak not in ("strict", "lex"):
        raise ValueError(f"unknown tie-break mode {tiebreak!r}")
    if tiebreak == "strict" and rational_rank(alpha) < f.nvars:
        raise ValueError("weights are Q-dependent; use tiebreak='lex'")
    best, bw = None, None
    for beta in f.terms:
        w = dot(alpha, beta)
        if best is None:
            best, bw = beta, w
            continue
        s = compare(w, bw)
        if s < 0 or (s == 0 and beta > best):
            best, bw = beta, w
    if f.order is not None:
        bound = certification_constant(alpha, f.grading) * (f.order + 1)
        if compare(bw, bound) >= 0:
            raise TruncationInsufficientError(
                f"lowest weight {bw} not below certified bound {bound}",
                order=f.order)
    return best, f.terms[best]
