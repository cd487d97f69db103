"""The Z^n-valued valuation nu built from a quasi-monomial part and a flag."""

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ModelConsistencyError, UnsupportedError
from .series import RatFunc, lowest_term
from .wfield import WeightScalar, WeightVector, compare, dot, rational_rank

TIEBREAKS = ("strict", "lex")


@dataclass(frozen=True)
class QmValuation:
    alpha: WeightVector
    stratum: object = None
    tiebreak: str = "strict"

    def __post_init__(self):
        if not isinstance(self.alpha, WeightVector):
            object.__setattr__(self, "alpha", WeightVector(self.alpha))
        if self.tiebreak not in TIEBREAKS:
            raise ValueError(f"tiebreak must be one of {TIEBREAKS}")

    @property
    def r(self):
        return len(self.alpha)

    @property
    def rank(self):
        return rational_rank(self.alpha)


@dataclass(frozen=True)
class FlagSpec:
    """Empty when the stratum is a point, else marked points on a curve stratum."""
    points: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(Fraction(p) for p in self.points))

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class NuValuation:
    qm: QmValuation
    flag: FlagSpec = field(default_factory=FlagSpec)

    @property
    def n(self):
        return self.qm.r + len(self.flag)

    @property
    def alpha(self):
        return self.qm.alpha

    @property
    def tiebreak(self):
        return self.qm.tiebreak

    def key(self, point):
        """Sort key realizing the order on Z^n: weight first, then the flag block.

        With tiebreak='lex' exponent blocks of equal weight are ordered with the
        lexicographically larger block first.
        """
        r = self.qm.r
        return _NuKey(dot(self.alpha, point[:r]), tuple(point[:r]), tuple(point[r:]),
                      self.tiebreak == "lex")


class _NuKey:
    __slots__ = ("w", "beta", "rest", "lex")

    def __init__(self, w, beta, rest, lex):
        self.w, self.beta, self.rest, self.lex = w, beta, rest, lex

    def _cmp(self, o):
        s = compare(self.w, o.w)
        if s:
            return s
        if self.beta != o.beta:
            # larger exponent block sorts first under the perturbation
            return -1 if self.beta > o.beta else 1
        return (self.rest > o.rest) - (self.rest < o.rest)

    def __lt__(self, o):
        return self._cmp(o) < 0

    def __eq__(self, o):
        return self._cmp(o) == 0

    def __le__(self, o):
        return self._cmp(o) <= 0


def flag_value(g, flag):
    if not isinstance(flag, FlagSpec):
        flag = FlagSpec(flag)
    if isinstance(g, RatFunc):
        if not g:
            raise ValueError("flag value of zero")
    elif not g:
        raise ValueError("flag value of zero")
    if len(flag) == 0:
        return ()
    if len(flag) > 1:
        raise UnsupportedError("flags of length > 1 are not supported")
    if isinstance(g, RatFunc):
        return (g.order_at(flag.points[0]),)
    return (0,)


def nu_value(s, nu):
    """nu(s) = (beta of the lowest term, flag value of its coefficient)."""
    beta, c = lowest_term(s, nu.alpha, nu.tiebreak)
    fv = flag_value(c, nu.flag)
    if any(k < 0 for k in fv):
        raise ModelConsistencyError(
            f"coefficient {c} has a pole on the flag; input is not a regular section")
    return tuple(beta) + tuple(fv)


def qm_value(s, v):
    if isinstance(v, NuValuation):
        v = v.qm
    beta, _ = lowest_term(s, v.alpha, v.tiebreak)
    return dot(v.alpha, beta).simplify()


def log_discrepancy(v, boundary=None):
    """A(v) = sum alpha_i (1 - d_i) on a log smooth chart."""
    if isinstance(v, NuValuation):
        v = v.qm
    alpha = v.alpha.entries
    d = [Fraction(0)] * len(alpha) if boundary is None else [Fraction(x) for x in boundary]
    if len(d) != len(alpha):
        raise ValueError("one boundary coefficient per coordinate divisor")
    if any(x >= 1 for x in d):
        raise ValueError("boundary coefficient >= 1: pair is not klt")
    acc = WeightScalar.rational(0, v.alpha.basis)
    for a, x in zip(alpha, d):
        acc = acc + a * (1 - x)
    return acc.simplify()


def _mat_inverse(W):
    n = len(W)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(W)]
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c]), None)
        if p is None:
            raise ValueError("W is singular")
        A[c], A[p] = A[p], A[c]
        pv = A[c][c]
        A[c] = [x / pv for x in A[c]]
        for i in range(n):
            if i != c and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return [row[n:] for row in A]


def _det(W):
    W = [[Fraction(x) for x in row] for row in W]
    n, det = len(W), Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if W[i][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            W[c], W[p] = W[p], W[c]
            det = -det
        det *= W[c][c]
        for i in range(c + 1, n):
            f = W[i][c] / W[c][c]
            W[i] = [x - f * y for x, y in zip(W[i], W[c])]
    return det


@dataclass(frozen=True)
class BlowupTransform:
    nu: NuValuation
    W: tuple
    M: tuple

    def beta_map(self, beta):
        r = len(self.W)
        b = tuple(sum(self.W[j][i] * beta[j] for j in range(r)) for i in range(r))
        return b + tuple(beta[r:])


def blowup_transform(nu, W, require_unimodular=False):
    """Weight alpha' = W^{-1} alpha, exponents beta' = W^T beta, M = diag(W^T, I)."""
    r = nu.qm.r
    W = [list(map(int, row)) for row in W]
    if len(W) != r or any(len(row) != r for row in W):
        raise ValueError(f"W must be {r}x{r}")
    if any(x < 0 for row in W for x in row):
        raise ValueError("W must have nonnegative entries")
    det = _det(W)
    if det == 0:
        raise ValueError("W is singular")
    if require_unimodular and abs(det) != 1:
        raise ValueError("W is not unimodular")
    Winv = _mat_inverse(W)
    alpha = nu.alpha.entries
    new = []
    for i in range(r):
        acc = WeightScalar.rational(0, nu.alpha.basis)
        for j in range(r):
            acc = acc + alpha[j] * Winv[i][j]
        new.append(acc)
    if any(a.sign() <= 0 for a in new):
        raise ValueError("W^{-1} alpha is not positive: the valuation leaves this chart")
    qm = QmValuation(WeightVector(new), nu.qm.stratum, nu.qm.tiebreak)
    n = nu.n
    M = [[0] * n for _ in range(n)]
    for i in range(r):
        for j in range(r):
            M[i][j] = W[j][i]
    for i in range(r, n):
        M[i][i] = 1
    return BlowupTransform(NuValuation(qm, nu.flag), tuple(map(tuple, W)),
                           tuple(map(tuple, M)))
