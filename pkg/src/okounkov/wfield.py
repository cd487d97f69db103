"""Exact real scalars of the form q0 + q1*g1 + ... + qk*gk.

The g_i are fixed real irrationals declared in a WeightBasis. Equality is
decided on coordinates; strict order is decided by refining rational
enclosures of the generators until the sign separates from zero.
"""

from fractions import Fraction
from math import isqrt
from functools import total_ordering

from .errors import (
    DimensionMismatchError,
    FieldClosureError,
    MismatchedBasisError,
    PrecisionExhaustedError,
)

DEFAULT_PRECISION_CAP = 1 << 14
_START_BITS = 64


def squarefree_split(n):
    """Return (s, f) with n = s*s*f and f squarefree (for n > 0)."""
    if n <= 0:
        raise ValueError("need a positive integer")
    s, f = 1, 1
    p = 2
    while p * p <= n and p < 100000:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        s *= p ** (e // 2)
        if e % 2:
            f *= p
        p += 1 if p == 2 else 2
    r = isqrt(n)
    if r * r == n:
        s *= r
    else:
        # leftover cofactor; treated as squarefree
        f *= n
    return s, f


class Surd:
    """Generator sqrt(D) with D a positive non-square integer."""

    kind = "sqrt"

    def __init__(self, D):
        D = int(D)
        if D <= 0:
            raise ValueError("sqrt generator needs D > 0")
        if isqrt(D) ** 2 == D:
            raise ValueError(f"sqrt({D}) is rational")
        self.D = D
        self.core = squarefree_split(D)[1]
        self.name = f"sqrt({D})"

    def enclosure(self, bits):
        scale = 1 << bits
        s = isqrt(self.D * scale * scale)
        return Fraction(s, scale), Fraction(s + 1, scale)

    def key(self):
        return ("sqrt", self.D)

    def __eq__(self, other):
        return isinstance(other, Surd) and other.D == self.D

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return self.name


class Enclosed:
    """User generator given by a callable bits -> (lo, hi) rational enclosure."""

    kind = "enclosure"

    def __init__(self, name, fn):
        self.name = name
        self._fn = fn

    def enclosure(self, bits):
        lo, hi = self._fn(bits)
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise ValueError(f"bad enclosure for {self.name}")
        return lo, hi

    def key(self):
        return ("enclosure", self.name, id(self._fn))

    def __eq__(self, other):
        return isinstance(other, Enclosed) and other.key() == self.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return self.name


class WeightBasis:
    """The implicit generator 1 followed by declared irrational generators."""

    def __init__(self, generators=()):
        gens = tuple(generators)
        cores = [g.core for g in gens if isinstance(g, Surd)]
        if len(set(cores)) != len(cores):
            raise ValueError("rational relation among quadratic surds in basis")
        for g in gens:
            if g.kind == "enclosure":
                lo, hi = g.enclosure(_START_BITS)
                if lo <= 0 and hi >= 0:
                    # sign must be settled by the enclosure itself
                    lo, hi = g.enclosure(4 * _START_BITS)
                    if lo <= 0 <= hi:
                        raise ValueError(f"enclosure of {g.name} straddles 0")
        self.generators = gens

    @classmethod
    def sqrt(cls, *Ds):
        return cls([Surd(D) for D in Ds])

    @property
    def size(self):
        return 1 + len(self.generators)

    @property
    def is_rational(self):
        return not self.generators

    @property
    def quadratic_D(self):
        """D when the basis is exactly {1, sqrt(D)}, else None."""
        if len(self.generators) == 1 and isinstance(self.generators[0], Surd):
            return self.generators[0].D
        return None

    def enclosures(self, bits):
        return [(Fraction(1), Fraction(1))] + [g.enclosure(bits) for g in self.generators]

    def __eq__(self, other):
        return isinstance(other, WeightBasis) and self.generators == other.generators

    def __hash__(self):
        return hash(tuple(g.key() for g in self.generators))

    def __repr__(self):
        return "WeightBasis(" + ", ".join(map(repr, self.generators)) + ")"


RATIONAL = WeightBasis()


def union_basis(b1, b2):
    gens = list(b1.generators)
    for g in b2.generators:
        if g not in gens:
            gens.append(g)
    return WeightBasis(gens)


@total_ordering
class WeightScalar:
    __slots__ = ("basis", "coords")

    def __init__(self, basis, coords):
        coords = tuple(Fraction(c) for c in coords)
        if len(coords) != basis.size:
            raise DimensionMismatchError("coordinate vector does not match basis")
        self.basis = basis
        self.coords = coords

    @classmethod
    def rational(cls, q, basis=RATIONAL):
        return cls(basis, (Fraction(q),) + (Fraction(0),) * (basis.size - 1))

    @classmethod
    def sqrt(cls, D, coeff=1):
        b = WeightBasis.sqrt(D)
        return cls(b, (0, coeff))

    def is_rational(self):
        return not any(self.coords[1:])

    def rational_value(self):
        if not self.is_rational():
            raise ValueError("scalar is irrational")
        return self.coords[0]

    def simplify(self):
        """Fraction when the value is rational, else self."""
        return self.coords[0] if self.is_rational() else self

    def lift(self, basis):
        """Re-express over a basis containing this scalar's generators."""
        if basis == self.basis:
            return self
        c = [self.coords[0]] + [Fraction(0)] * (basis.size - 1)
        for g, q in zip(self.basis.generators, self.coords[1:]):
            if q:
                try:
                    c[1 + basis.generators.index(g)] = q
                except ValueError:
                    raise MismatchedBasisError(f"{g} not in {basis}") from None
        return WeightScalar(basis, c)

    def _pair(self, other):
        if isinstance(other, WeightScalar):
            if other.basis == self.basis:
                return self, other
            if other.is_rational():
                return self, WeightScalar.rational(other.coords[0], self.basis)
            if self.is_rational():
                return WeightScalar.rational(self.coords[0], other.basis), other
            raise MismatchedBasisError(f"{self.basis} vs {other.basis}")
        if isinstance(other, (int, Fraction)):
            return self, WeightScalar.rational(other, self.basis)
        return None

    def __add__(self, other):
        p = self._pair(other)
        if p is None:
            return NotImplemented
        a, b = p
        return WeightScalar(a.basis, [x + y for x, y in zip(a.coords, b.coords)])

    __radd__ = __add__

    def __neg__(self):
        return WeightScalar(self.basis, [-x for x in self.coords])

    def __sub__(self, other):
        p = self._pair(other)
        if p is None:
            return NotImplemented
        a, b = p
        return WeightScalar(a.basis, [x - y for x, y in zip(a.coords, b.coords)])

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return WeightScalar(self.basis, [x * other for x in self.coords])
        p = self._pair(other)
        if p is None:
            return NotImplemented
        a, b = p
        if a.is_rational():
            return b * a.coords[0]
        if b.is_rational():
            return a * b.coords[0]
        D = a.basis.quadratic_D
        if D is None:
            raise FieldClosureError(f"products not closed over {a.basis}")
        (a0, a1), (b0, b1) = a.coords, b.coords
        return WeightScalar(a.basis, (a0 * b0 + a1 * b1 * D, a0 * b1 + a1 * b0))

    __rmul__ = __mul__

    def inverse(self):
        if not any(self.coords):
            raise ZeroDivisionError("inverse of zero")
        if self.is_rational():
            return WeightScalar.rational(1 / self.coords[0], self.basis)
        D = self.basis.quadratic_D
        if D is None:
            raise FieldClosureError(f"division not closed over {self.basis}")
        a0, a1 = self.coords
        n = a0 * a0 - a1 * a1 * D
        return WeightScalar(self.basis, (a0 / n, -a1 / n))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return WeightScalar(self.basis, [x / other for x in self.coords])
        if isinstance(other, WeightScalar):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        return NotImplemented

    def enclosure(self, bits):
        lo = hi = Fraction(0)
        for q, (gl, gh) in zip(self.coords, self.basis.enclosures(bits)):
            if q >= 0:
                lo += q * gl
                hi += q * gh
            else:
                lo += q * gh
                hi += q * gl
        return lo, hi

    def sign(self, precision_cap=None):
        if not any(self.coords[1:]):
            c = self.coords[0]
            return (c > 0) - (c < 0)
        bits = _START_BITS
        precision_cap = precision_cap or DEFAULT_PRECISION_CAP
        while bits <= precision_cap:
            lo, hi = self.enclosure(bits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2
        raise PrecisionExhaustedError(
            f"sign undecided at {precision_cap} bits for {self!r}")

    def __eq__(self, other):
        if not isinstance(other, (WeightScalar, int, Fraction)):
            return NotImplemented
        try:
            a, b = self._pair(other)
        except MismatchedBasisError:
            a, b = unify(self, other)
        return a.coords == b.coords

    def __lt__(self, other):
        p = self._pair(other)
        if p is None:
            return NotImplemented
        return (p[0] - p[1]).sign() < 0

    def __hash__(self):
        if self.is_rational():
            return hash(self.coords[0])
        return hash((self.coords[0],) + tuple(
            (g.key(), q) for g, q in zip(self.basis.generators, self.coords[1:]) if q))

    def __float__(self):
        lo, hi = self.enclosure(64)
        return float((lo + hi) / 2)

    def __floor__(self):
        return floor(self)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __repr__(self):
        return f"WeightScalar({format_number(self)})"

    __str__ = lambda self: format_number(self)


Number = (int, Fraction, WeightScalar)


def compare(a, b, precision_cap=None):
    """Return -1, 0 or 1 for a < b, a == b, a > b."""
    if isinstance(a, WeightScalar) and isinstance(b, WeightScalar) and a.basis != b.basis:
        raise MismatchedBasisError(f"{a.basis} vs {b.basis}")
    d = a - b
    if isinstance(d, WeightScalar):
        return d.sign(precision_cap)
    return (d > 0) - (d < 0)


def unify(a, b):
    """Express two scalars over the union of their bases."""
    if not isinstance(a, WeightScalar):
        a = WeightScalar.rational(a)
    if not isinstance(b, WeightScalar):
        b = WeightScalar.rational(b)
    u = union_basis(a.basis, b.basis)
    return a.lift(u), b.lift(u)


def compare_any(a, b, precision_cap=None):
    """compare() after moving both arguments to a common basis."""
    return compare(*unify(a, b), precision_cap=precision_cap)


def set_precision_cap(bits):
    """Global cap (in bits) on interval refinement before giving up."""
    global DEFAULT_PRECISION_CAP
    if bits <= 0:
        raise ValueError("precision cap must be positive")
    DEFAULT_PRECISION_CAP = int(bits)


def floor(x):
    if isinstance(x, (int, Fraction)):
        return Fraction(x.__floor__())
    if x.is_rational():
        return Fraction(x.coords[0].__floor__())
    bits = _START_BITS
    while bits <= DEFAULT_PRECISION_CAP:
        lo, hi = x.enclosure(bits)
        if lo.__floor__() == hi.__floor__():
            return Fraction(lo.__floor__())
        bits *= 2
    raise PrecisionExhaustedError(f"floor undecided for {x!r}")


def ceil(x):
    return -floor(-x)


def simplify(x):
    if isinstance(x, WeightScalar):
        return x.simplify()
    return Fraction(x)


def to_fraction_enclosure(x, bits=64):
    if isinstance(x, WeightScalar):
        return x.enclosure(bits)
    x = Fraction(x)
    return x, x


def sqrt_of_rational(q):
    """Exact square root of a nonnegative rational: Fraction or scalar over {1, sqrt(f)}."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("negative radicand")
    if q == 0:
        return Fraction(0)
    n = q.numerator * q.denominator
    s, f = squarefree_split(n)
    c = Fraction(s, q.denominator)
    if f == 1:
        return c
    return WeightScalar(WeightBasis.sqrt(f), (0, c))


def format_number(x):
    """Exact text form: 'p/q' or 'a + b*sqrt(D)'."""
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    parts = []
    if x.coords[0] or x.is_rational():
        parts.append(str(x.coords[0]))
    for g, q in zip(x.basis.generators, x.coords[1:]):
        if q:
            parts.append(f"{q}*{g.name}")
    return " + ".join(parts)


def number_to_json(x):
    x = simplify(x)
    if isinstance(x, Fraction):
        return [x.numerator, x.denominator]
    D = x.basis.quadratic_D
    if D is None:
        raise FieldClosureError("only rational or single quadratic coordinates serialize")
    a, b = x.coords
    return {"a": [a.numerator, a.denominator], "b": [b.numerator, b.denominator], "D": D}


def number_from_json(obj):
    if isinstance(obj, list):
        return Fraction(obj[0], obj[1])
    if isinstance(obj, (int, str)):
        return Fraction(obj)
    a = Fraction(*obj["a"])
    b = Fraction(*obj["b"])
    return WeightScalar(WeightBasis.sqrt(obj["D"]), (a, b)).simplify()


class WeightVector:
    """Positive weight vector alpha; entries share one basis."""

    def __init__(self, entries, require_positive=True):
        entries = list(entries)
        basis = RATIONAL
        for e in entries:
            if isinstance(e, WeightScalar):
                basis = union_basis(basis, e.basis)
        self.basis = basis
        self.entries = tuple(
            e.lift(basis) if isinstance(e, WeightScalar) else WeightScalar.rational(e, basis)
            for e in entries)
        if require_positive and any(e.sign() <= 0 for e in self.entries):
            raise ValueError("weight vector entries must be strictly positive")

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def values(self):
        """Entries simplified to Fractions where possible."""
        return [e.simplify() for e in self.entries]

    def is_rational(self):
        return self.basis.is_rational or all(e.is_rational() for e in self.entries)

    def __eq__(self, other):
        return isinstance(other, WeightVector) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return "WeightVector(" + ", ".join(format_number(e) for e in self.entries) + ")"


def dot(alpha, beta):
    entries = alpha.entries if isinstance(alpha, WeightVector) else tuple(alpha)
    beta = tuple(beta)
    if len(entries) != len(beta):
        raise DimensionMismatchError(f"dot of length {len(entries)} with {len(beta)}")
    basis = alpha.basis if isinstance(alpha, WeightVector) else RATIONAL
    acc = [Fraction(0)] * basis.size
    for a, b in zip(entries, beta):
        if not b:
            continue
        if isinstance(a, WeightScalar):
            for i, c in enumerate(a.lift(basis).coords):
                acc[i] += c * b
        else:
            acc[0] += Fraction(a) * b
    return WeightScalar(basis, acc)


def _rank(rows):
    rows = [list(r) for r in rows]
    rank, col = 0, 0
    ncols = len(rows[0]) if rows else 0
    while rank < len(rows) and col < ncols:
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(rank + 1, len(rows)):
            if rows[i][col]:
                f = rows[i][col] / rows[rank][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


def rational_rank(alpha):
    return _rank([e.coords for e in alpha.entries])
