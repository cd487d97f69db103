"""Exact convex polytopes in dimension <= 3.

Coordinates are Fractions or WeightScalars over {1, sqrt(D)} (or any
ordered ring type supporting + - * when only hulls are needed).
"""

from fractions import Fraction
from itertools import combinations
import math

from .errors import FieldClosureError, UnsupportedError
from .wfield import (
    WeightScalar,
    WeightVector,
    format_number,
    number_from_json,
    number_to_json,
    sqrt_of_rational,
    to_fraction_enclosure,
)

MAX_DIM = 3


def _sgn(x):
    if isinstance(x, WeightScalar):
        return x.sign()
    return (x > 0) - (x < 0)


def _simp(x):
    return x.simplify() if isinstance(x, WeightScalar) else x


def _sub(p, q):
    return tuple(_simp(a - b) for a, b in zip(p, q))


def _dotv(a, x):
    acc = Fraction(0)
    for ai, xi in zip(a, x):
        if ai:
            acc = acc + ai * xi
    return _simp(acc)


def _cross2(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _cross3(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def _canon(p):
    return tuple(_simp(x) if isinstance(x, WeightScalar) else (Fraction(x) if isinstance(x, int) else x)
                 for x in p)


def _hull1(pts):
    lo = min(pts)
    hi = max(pts)
    return [lo] if lo == hi else [lo, hi]


def _hull2(pts):
    pts = sorted(set(pts))
    if len(pts) <= 2:
        return pts

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and _sgn(_cross2(out[-2], out[-1], p)) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    h = lower[:-1] + upper[:-1]
    if len(h) == 2 and h[0] == h[1]:
        return h[:1]
    return h


def _affine_rank(pts):
    base = pts[0]
    rows = [list(_sub(p, base)) for p in pts[1:]]
    rank, col = 0, 0
    n = len(base)
    while rows and rank < len(rows) and col < n:
        piv = next((i for i in range(rank, len(rows)) if _sgn(rows[i][col])), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pv = rows[rank][col]
        for i in range(rank + 1, len(rows)):
            f = rows[i][col]
            if _sgn(f):
                rows[i] = [_simp(x * pv - f * y) for x, y in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


def _project_drop(pts, k):
    return [tuple(x for i, x in enumerate(p) if i != k) for p in pts]


def _planar_extremes(pts, normal):
    """Extreme points of a coplanar 3-D point set."""
    k = next(i for i in range(3) if _sgn(normal[i]))
    proj = _project_drop(pts, k)
    back = dict(zip(proj, pts))
    return [back[q] for q in _hull2(proj)]


def _hull3(pts):
    pts = sorted(set(pts))
    rk = _affine_rank(pts) if len(pts) > 1 else 0
    if rk == 0:
        return pts[:1], []
    if rk == 1:
        return [pts[0], pts[-1]], []
    if rk == 2:
        a = pts[0]
        b = next(p for p in pts if p != a)
        n = next(_cross3(_sub(b, a), _sub(p, a)) for p in pts
                 if any(_sgn(x) for x in _cross3(_sub(b, a), _sub(p, a))))
        return _planar_extremes(pts, n), []
    facets = {}
    for i, j, k in combinations(range(len(pts)), 3):
        a, b, c = pts[i], pts[j], pts[k]
        n = _cross3(_sub(b, a), _sub(c, a))
        if not any(_sgn(x) for x in n):
            continue
        off = _dotv(n, a)
        signs = {_sgn(_dotv(n, p) - off) for p in pts}
        if 1 in signs and -1 in signs:
            continue
        if -1 in signs:
            n = tuple(-x for x in n)
            off = -off
        on = frozenset(idx for idx, p in enumerate(pts) if _sgn(_dotv(n, p) - off) == 0)
        facets.setdefault(on, (n, off))
    verts = set()
    facet_list = []
    for on, (n, off) in facets.items():
        ext = _planar_extremes([pts[i] for i in sorted(on)], n)
        verts.update(ext)
        facet_list.append((n, off, ext))
    return sorted(verts), facet_list


class Body:
    """Convex polytope given by its irredundant vertex list."""

    def __init__(self, dim, vertices, level_cap=None, _facets3=None):
        if dim > MAX_DIM:
            raise UnsupportedError(f"dimension {dim} > {MAX_DIM}")
        self.dim = dim
        self.vertices = tuple(vertices)
        self.level_cap = level_cap
        self._facets3 = _facets3

    @classmethod
    def empty(cls, dim):
        return cls(dim, ())

    def is_empty(self):
        return not self.vertices

    @property
    def affine_dim(self):
        if not self.vertices:
            return -1
        if len(self.vertices) == 1:
            return 0
        return _affine_rank(list(self.vertices))

    def vertex_set(self):
        return frozenset(self.vertices)

    def __eq__(self, other):
        return isinstance(other, Body) and self.dim == other.dim and \
            self.vertex_set() == other.vertex_set()

    def __hash__(self):
        return hash((self.dim, self.vertex_set()))

    def __repr__(self):
        vs = ", ".join("(" + ", ".join(format_number(x) for x in v) + ")" for v in self.vertices)
        return f"Body(dim={self.dim}, [{vs}])"

    def halfspaces(self):
        """List of (a, b) with the body = {x : a.x >= b}; full-dimensional bodies only."""
        if self.affine_dim != self.dim:
            raise ValueError("halfspaces need a full-dimensional body")
        if self.dim == 1:
            lo, hi = self.vertices[0][0], self.vertices[-1][0]
            return [((Fraction(1),), lo), ((Fraction(-1),), -hi)]
        if self.dim == 2:
            out = []
            vs = self.vertices
            for i in range(len(vs)):
                p, q = vs[i], vs[(i + 1) % len(vs)]
                # counter-clockwise order: interior on the left
                a = (_simp(p[1] - q[1]), _simp(q[0] - p[0]))
                out.append((a, _dotv(a, p)))
            return out
        return [(n, off) for n, off, _ in self.facets3()]

    def facets3(self):
        if self._facets3 is None:
            self._facets3 = _hull3(list(self.vertices))[1]
        return self._facets3

    def contains_point(self, x):
        x = _canon(x)
        if not self.vertices:
            return False
        ad = self.affine_dim
        if ad == self.dim:
            return all(_sgn(_dotv(a, x) - b) >= 0 for a, b in self.halfspaces())
        if ad == 0:
            return x == self.vertices[0]
        # lower-dimensional: x must lie in the hull of vertices plus itself with no new vertex
        h = hull(list(self.vertices) + [x], self.dim)
        return h.vertex_set() == self.vertex_set()

    def contains(self, other):
        return all(self.contains_point(v) for v in other.vertices)

    def max_linear(self, a):
        a = list(a) + [0] * (self.dim - len(a))
        best = None
        for v in self.vertices:
            val = _dotv(a, v)
            if best is None or _sgn(val - best) > 0:
                best = val
        return best

    def transform(self, M):
        """Image under the linear map x -> M x (M square integer/rational matrix)."""
        pts = [tuple(_dotv(row, v) for row in M) for v in self.vertices]
        return hull(pts, self.dim, level_cap=self.level_cap) if pts else Body.empty(self.dim)

    def to_json(self):
        field = {"kind": "rational"}
        for v in self.vertices:
            for x in v:
                if isinstance(x, WeightScalar):
                    field = {"kind": "quadratic", "D": x.basis.quadratic_D}
        return {
            "dim": self.dim,
            "field": field,
            "vertices": [[number_to_json(x) for x in v] for v in self.vertices],
            "level_cap": self.level_cap,
        }

    @classmethod
    def from_json(cls, obj):
        pts = [tuple(number_from_json(x) for x in v) for v in obj["vertices"]]
        if not pts:
            return cls.empty(obj["dim"])
        return hull(pts, obj["dim"], level_cap=obj.get("level_cap"))


def hull(points, dim=None, level_cap=None):
    pts = [_canon(p) for p in points]
    if not pts:
        raise ValueError("hull of an empty point list")
    if dim is None:
        dim = len(pts[0])
    if any(len(p) != dim for p in pts):
        raise ValueError("points of mixed dimension")
    if dim > MAX_DIM:
        raise UnsupportedError(f"dimension {dim} > {MAX_DIM}")
    if dim == 0:
        return Body(0, [()], level_cap)
    if dim == 1:
        return Body(1, [(x,) for x in _hull1([p[0] for p in pts])], level_cap)
    if dim == 2:
        return Body(2, _hull2(pts), level_cap)
    verts, facets = _hull3(pts)
    return Body(3, verts, level_cap, facets)


def okounkov_body(gamma, level_cap):
    """Hull of the union of Gamma_m / m over 1 <= m <= level_cap."""
    if level_cap is None or level_cap < 1:
        raise ValueError("level cap must be a positive integer")
    pts = []
    dim = None
    for m in sorted(gamma):
        if 1 <= m <= level_cap:
            for g in gamma[m]:
                dim = len(g)
                pts.append(tuple(Fraction(x, m) for x in g))
    if not pts:
        raise ValueError("all levels up to the cap are empty")
    return hull(pts, dim, level_cap=level_cap)


def _functional(alpha, dim):
    if isinstance(alpha, WeightVector):
        a = alpha.values()
    else:
        a = [_simp(x) if isinstance(x, WeightScalar) else Fraction(x) for x in alpha]
    if len(a) > dim:
        raise ValueError("functional longer than the body dimension")
    return a + [Fraction(0)] * (dim - len(a))


def slice_body(body, alpha, t):
    """body intersected with {alpha.x >= t}."""
    if body.is_empty():
        return body
    a = _functional(alpha, body.dim)
    vals = [_dotv(a, v) - t for v in body.vertices]
    sg = [_sgn(x) for x in vals]
    keep = [v for v, s in zip(body.vertices, sg) if s >= 0]
    if len(keep) == len(body.vertices):
        return body
    if not keep:
        return Body.empty(body.dim)
    vs = body.vertices
    if body.dim == 2 and len(vs) > 2:
        pairs = [(i, (i + 1) % len(vs)) for i in range(len(vs))]
    else:
        pairs = combinations(range(len(vs)), 2)
    pts = list(keep)
    for i, j in pairs:
        if sg[i] * sg[j] < 0:
            lam = vals[i] / (vals[i] - vals[j])
            pts.append(tuple(_simp(p + lam * (q - p)) for p, q in zip(vs[i], vs[j])))
    return hull(pts, body.dim, level_cap=body.level_cap)


class Interval:
    """Validated rational enclosure [lo, hi]."""

    exact = False

    def __init__(self, lo, hi):
        self.lo, self.hi = Fraction(lo), Fraction(hi)

    @classmethod
    def of(cls, x, bits=64):
        if isinstance(x, Interval):
            return x
        return cls(*to_fraction_enclosure(x, bits))

    def __add__(self, o):
        o = Interval.of(o)
        return Interval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, o):
        return self + (-Interval.of(o))

    def __rsub__(self, o):
        return Interval.of(o) - self

    def __mul__(self, o):
        o = Interval.of(o)
        c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi]
        return Interval(min(c), max(c))

    __rmul__ = __mul__

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(0, max(-self.lo, self.hi))

    def width(self):
        return self.hi - self.lo

    def __float__(self):
        return float((self.lo + self.hi) / 2)

    def __repr__(self):
        return f"Interval({self.lo}, {self.hi})"


def _exact_ok(body):
    bases = set()
    for v in body.vertices:
        for x in v:
            if isinstance(x, WeightScalar) and not x.is_rational():
                if x.basis.quadratic_D is None:
                    return False
                bases.add(x.basis)
    return len(bases) <= 1


def _det3(a, b, c):
    return (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]))


def _raw_volume(body, conv):
    vs = [tuple(conv(x) for x in v) for v in body.vertices]
    if body.dim == 1:
        return abs(vs[-1][0] - vs[0][0])
    if body.dim == 2:
        acc = 0
        for i in range(len(vs)):
            p, q = vs[i], vs[(i + 1) % len(vs)]
            acc = acc + p[0] * q[1] - p[1] * q[0]
        return abs(acc) * Fraction(1, 2)
    # 3-D: cone from the first vertex over every facet fan
    o = vs[0]
    acc = 0
    for _, _, ext in body.facets3():
        ext = [tuple(conv(x) for x in p) for p in ext]
        for k in range(1, len(ext) - 1):
            a, b, c = (_sub(p, o) for p in (ext[0], ext[k], ext[k + 1]))
            acc = acc + abs(_det3(a, b, c))
    return acc * Fraction(1, 6)


def volume(body, interval=False, bits=64):
    """Euclidean volume; exact over Q or one quadratic field, else an Interval."""
    if body.is_empty() or body.affine_dim < body.dim:
        return Fraction(0)
    if _exact_ok(body):
        return _simp(_raw_volume(body, lambda x: x))
    if not interval:
        raise FieldClosureError("coordinates not closed under multiplication; pass interval=True")
    return _raw_volume(body, lambda x: Interval.of(x, bits))


# ---------------------------------------------------------------- polynomials

def _poly_eval(c, t):
    acc = Fraction(0)
    for a in reversed(c):
        acc = acc * t + a
    return _simp(acc)


def _poly_antider(c):
    return [Fraction(0)] + [_simp(a / (k + 1)) for k, a in enumerate(c)]


def _solve_square(A, b):
    n = len(A)
    M = [list(row) + [bb] for row, bb in zip(A, b)]
    for col in range(n):
        p = next(i for i in range(col, n) if _sgn(M[i][col]))
        M[col], M[p] = M[p], M[col]
        pv = M[col][col]
        M[col] = [_simp(x / pv) for x in M[col]]
        for i in range(n):
            if i != col and _sgn(M[i][col]):
                f = M[i][col]
                M[i] = [_simp(x - f * y) for x, y in zip(M[i], M[col])]
    return [row[n] for row in M]


class VolumeFunction:
    """t -> vol(body cut by alpha.x >= t) as exact polynomial pieces."""

    def __init__(self, breakpoints, pieces, dim):
        self.breakpoints = list(breakpoints)
        self.pieces = [list(p) for p in pieces]
        self.dim = dim

    @property
    def T(self):
        return self.breakpoints[-1]

    def _piece(self, t):
        bps = self.breakpoints
        for k in range(len(self.pieces)):
            if _sgn(t - bps[k + 1]) <= 0:
                return k
        return len(self.pieces) - 1

    def __call__(self, t):
        if not self.pieces:
            return Fraction(0)
        if _sgn(t) < 0:
            t = Fraction(0)
        if _sgn(t - self.T) >= 0:
            return Fraction(0)
        return _poly_eval(self.pieces[self._piece(t)], t)

    def antiderivative_at(self, k, t):
        return _poly_eval(_poly_antider(self.pieces[k]), t)

    def integrate(self, a, b):
        if _sgn(b - a) < 0:
            raise ValueError("integration bounds reversed")
        if not self.pieces or _sgn(b - a) == 0:
            return Fraction(0)
        acc = Fraction(0)
        bps = self.breakpoints
        for k, c in enumerate(self.pieces):
            lo, hi = bps[k], bps[k + 1]
            lo = a if _sgn(a - lo) > 0 else lo
            hi = b if _sgn(b - hi) < 0 else hi
            if _sgn(hi - lo) <= 0:
                continue
            F = _poly_antider(c)
            acc = acc + _poly_eval(F, hi) - _poly_eval(F, lo)
        return _simp(acc)

    def first_below(self, target, bits=128):
        """Smallest t >= 0 with V(t) <= target (exact when possible, else Interval)."""
        if not self.pieces or _sgn(self(Fraction(0)) - target) <= 0:
            return Fraction(0)
        bps = self.breakpoints
        for k, c in enumerate(self.pieces):
            a, b = bps[k], bps[k + 1]
            if _sgn(_poly_eval(c, b) - target) > 0:
                continue
            p = list(c)
            p[0] = _simp(p[0] - target)
            while len(p) > 1 and not _sgn(p[-1]):
                p.pop()
            roots = _exact_roots(p)
            if roots is not None:
                inside = [r for r in roots if _sgn(r - a) >= 0 and _sgn(r - b) <= 0]
                if inside:
                    best = inside[0]
                    for r in inside[1:]:
                        if _sgn(r - best) < 0:
                            best = r
                    return _simp(best)
            return _bisect_root(p, a, b, bits)
        return self.T


def _exact_roots(p):
    deg = len(p) - 1
    if deg == 0:
        return []
    if any(isinstance(x, WeightScalar) and not x.is_rational() for x in p):
        if deg == 1:
            return [_simp(-p[0] / p[1])]
        return None
    if deg == 1:
        return [-p[0] / p[1]]
    if deg == 2:
        c, b, a = p
        disc = b * b - 4 * a * c
        if disc < 0:
            return []
        r = sqrt_of_rational(disc)
        return [_simp((-b - r) / (2 * a)), _simp((-b + r) / (2 * a))]
    return None


def _bisect_root(p, a, b, bits):
    """Enclose the crossing of a monotone piece on [a, b]; returns an Interval."""
    lo, _ = to_fraction_enclosure(a, bits)
    _, hi = to_fraction_enclosure(b, bits)
    slo = _sgn(_poly_eval(p, lo))
    eps = Fraction(1, 1 << bits)
    while hi - lo > eps:
        mid = (lo + hi) / 2
        s = _sgn(_poly_eval(p, mid))
        if s == 0:
            return Interval(mid, mid)
        if s == slo:
            lo = mid
        else:
            hi = mid
    return Interval(lo, hi)


def volume_function(body, alpha):
    if body.dim > MAX_DIM:
        raise UnsupportedError("dimension cap")
    a = _functional(alpha, body.dim)
    if body.is_empty():
        return VolumeFunction([Fraction(0)], [], body.dim)
    vals = [_dotv(a, v) for v in body.vertices]
    bps = [Fraction(0)]
    for x in sorted(vals):
        if _sgn(x) > 0 and all(_sgn(x - y) != 0 for y in bps):
            bps.append(x)
    n = body.dim
    pieces = []
    for k in range(len(bps) - 1):
        lo, hi = bps[k], bps[k + 1]
        ts = [_simp(lo + (hi - lo) * Fraction(j, n)) for j in range(n + 1)]
        vs = [volume(slice_body(body, a, t)) for t in ts]
        A = [[_simp(t ** j) if not isinstance(t, WeightScalar) else _pow(t, j)
              for j in range(n + 1)] for t in ts]
        pieces.append(_solve_square(A, vs))
    return VolumeFunction(bps, pieces, n)


def _pow(x, k):
    acc = Fraction(1)
    for _ in range(k):
        acc = acc * x
    return _simp(acc)


def integrate(V, a, b):
    return V.integrate(a, b)


def hausdorff(A, B):
    """Hausdorff distance between 2-D polytopes (floating point, for tolerances)."""
    def pts(X):
        return [tuple(float(x) for x in v) for v in X.vertices]

    def dist_to(p, X):
        vs = pts(X)
        if len(vs) == 1:
            return math.dist(p, vs[0])
        if X.affine_dim == 2 and X.contains_point(tuple(Fraction(c) for c in p)):
            return 0.0
        best = math.inf
        m = len(vs)
        for i in range(m):
            a, b = vs[i], vs[(i + 1) % m]
            dx, dy = b[0] - a[0], b[1] - a[1]
            L = dx * dx + dy * dy
            s = 0.0 if L == 0 else max(0.0, min(1.0, ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / L))
            best = min(best, math.dist(p, (a[0] + s * dx, a[1] + s * dy)))
        return best

    return max(max(dist_to(p, B) for p in pts(A)), max(dist_to(p, A) for p in pts(B)))


# ---------------------------------------------------------------- limits

class EpsNum:
    """Polynomial in a positive infinitesimal eps, ordered by its lowest nonzero term."""

    __slots__ = ("c",)

    def __init__(self, coeffs):
        c = [Fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.c = tuple(c)

    @staticmethod
    def lift(x):
        return x if isinstance(x, EpsNum) else EpsNum([x])

    def __add__(self, o):
        o = EpsNum.lift(o)
        n = max(len(self.c), len(o.c))
        a = self.c + (0,) * (n - len(self.c))
        b = o.c + (0,) * (n - len(o.c))
        return EpsNum([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return EpsNum([-x for x in self.c])

    def __sub__(self, o):
        return self + (-EpsNum.lift(o))

    def __rsub__(self, o):
        return EpsNum.lift(o) - self

    def __mul__(self, o):
        o = EpsNum.lift(o)
        out = [Fraction(0)] * max(0, len(self.c) + len(o.c) - 1)
        for i, x in enumerate(self.c):
            for j, y in enumerate(o.c):
                out[i + j] += x * y
        return EpsNum(out)

    __rmul__ = __mul__

    def sign(self):
        for x in self.c:
            if x:
                return 1 if x > 0 else -1
        return 0

    def __eq__(self, o):
        if isinstance(o, (int, Fraction, EpsNum)):
            return (self - o).sign() == 0
        return NotImplemented

    def __lt__(self, o):
        return (self - o).sign() < 0

    def __gt__(self, o):
        return (self - o).sign() > 0

    def __le__(self, o):
        return (self - o).sign() <= 0

    def __ge__(self, o):
        return (self - o).sign() >= 0

    def __hash__(self):
        if len(self.c) <= 1:
            return hash(self.c[0] if self.c else Fraction(0))
        return hash(self.c)

    def coeff(self, k):
        return self.c[k] if k < len(self.c) else Fraction(0)

    def __repr__(self):
        return f"EpsNum{self.c}"


class BodySequence:
    """Base class for finitely presented sequences of bodies (index i >= 1)."""

    exact = True

    def member(self, i):
        raise NotImplementedError


class ConstantSequence(BodySequence):
    def __init__(self, body):
        self.body = body
        self.dim = body.dim

    def member(self, i):
        return self.body


class EventuallyConstantSequence(BodySequence):
    def __init__(self, head, tail):
        self.head = list(head)
        self.tail = tail
        self.dim = tail.dim

    def member(self, i):
        return self.head[i - 1] if i <= len(self.head) else self.tail


class AffineSequence(BodySequence):
    """Delta_i = hull{p_k + q_k / i}."""

    def __init__(self, base, slope):
        if len(base) != len(slope) or not base:
            raise ValueError("base and slope lists must have equal nonzero length")
        self.base = [tuple(Fraction(x) for x in p) for p in base]
        self.slope = [tuple(Fraction(x) for x in q) for q in slope]
        self.dim = len(self.base[0])

    def member(self, i):
        return hull([tuple(p + q / i for p, q in zip(P, Q))
                     for P, Q in zip(self.base, self.slope)], self.dim)


class CallbackSequence(BodySequence):
    exact = False

    def __init__(self, fn, dim, start=1, stop=200):
        self.fn, self.dim, self.start, self.stop = fn, dim, start, stop

    def member(self, i):
        return self.fn(i)


def _clip(body, a, b):
    """body intersected with {a.x >= b} for rational a, b."""
    return slice_body(body, a, b)


def _cofinite_affine(seq):
    dim = seq.dim
    if dim > 2:
        raise UnsupportedError("affine limits are implemented for dimension <= 2")
    eps_pts = [tuple(EpsNum([p, q]) for p, q in zip(P, Q)) for P, Q in zip(seq.base, seq.slope)]
    Peps = hull(eps_pts, dim)
    # each constraint is a list over k of (a_k, b_k): g(x) = sum_k eps^k (a_k.x - b_k) >= 0
    if Peps.affine_dim == dim:
        polys = []
        for a, b in Peps.halfspaces():
            polys.append(_eps_constraint(a, b))
    else:
        polys = _degenerate_constraints(Peps, dim)
    region = hull(seq.base, dim)
    level = [0] * len(polys)
    done = [False] * len(polys)
    while True:
        imposing = []
        for f, poly in enumerate(polys):
            while not done[f]:
                if level[f] >= len(poly):
                    done[f] = True
                    break
                a, b = poly[level[f]]
                vals = {_dotv(a, v) - b for v in region.vertices}
                if len(vals) > 1:
                    imposing.append(f)
                    break
                c = vals.pop()
                if c < 0:
                    return Body.empty(dim)
                if c > 0:
                    done[f] = True
                else:
                    level[f] += 1
        Q = region
        for f in imposing:
            Q = _clip(Q, *polys[f][level[f]])
            if Q.is_empty():
                return Body.empty(dim)
        centre = tuple(sum(v[i] for v in Q.vertices) / len(Q.vertices) for i in range(dim))
        tight = [f for f in imposing
                 if _dotv(polys[f][level[f]][0], centre) == polys[f][level[f]][1]]
        if not tight:
            return Q
        for f in tight:
            level[f] += 1
        region = Q


def _eps_constraint(a, b):
    a, b = [EpsNum.lift(x) for x in a], EpsNum.lift(b)
    K = max([len(x.c) for x in a] + [len(b.c), 1])
    return [(tuple(x.coeff(k) for x in a), b.coeff(k)) for k in range(K)]


def _degenerate_constraints(Peps, dim):
    """Constraint polynomials for an eps-body that is lower dimensional."""
    vs = Peps.vertices
    if len(vs) == 1:
        p = vs[0]
        out = []
        for i in range(dim):
            for s in (1, -1):
                a = tuple(Fraction(s * (i == j)) for j in range(dim))
                out.append(_eps_constraint(a, _dotv(a, p)))
        return out
    p, q = vs[0], vs[-1]
    d = (q[0] - p[0], q[1] - p[1])
    nrm = (-d[1], d[0])
    neg = lambda v: tuple(-x for x in v)
    return [_eps_constraint(a, _dotv(a, base))
            for a, base in ((nrm, p), (neg(nrm), p), (d, p), (neg(d), q))]


def sequence_limits(seq, samples=None):
    """(pointwise limit, cofinite limit, equal_volume flag, exact flag)."""
    if isinstance(seq, ConstantSequence):
        p = c = seq.body
    elif isinstance(seq, EventuallyConstantSequence):
        p = c = seq.tail
    elif isinstance(seq, AffineSequence):
        p = hull(seq.base, seq.dim)
        c = _cofinite_affine(seq)
    elif isinstance(seq, CallbackSequence):
        idx = samples or range(seq.start, seq.stop + 1)
        idx = list(idx)
        p = seq.member(idx[-1])
        tail = idx[len(idx) // 2:]
        c = seq.member(tail[0])
        for i in tail[1:]:
            c = _intersect(c, seq.member(i))
            if c.is_empty():
                break
    else:
        raise UnsupportedError(f"unsupported presentation {type(seq).__name__}")
    vp = volume(p) if not p.is_empty() else Fraction(0)
    vc = volume(c) if not c.is_empty() else Fraction(0)
    return {"pointwise": p, "cofinite": c, "equal_volume": vp == vc,
            "exact": seq.exact}


def _intersect(A, B):
    if A.is_empty() or B.is_empty():
        return Body.empty(A.dim)
    if B.affine_dim < B.dim:
        if all(B.contains_point(v) for v in A.vertices):
            return A
        raise UnsupportedError("sampled intersection with a degenerate body")
    out = A
    for a, b in B.halfspaces():
        out = slice_body(out, a, b)
        if out.is_empty():
            break
    return out
