from fractions import Fraction as F

import pytest

from okounkov.bodies import (
    AffineSequence, ConstantSequence, hausdorff, hull, integrate, okounkov_body,
    sequence_limits, slice_body, volume, volume_function,
)
from okounkov.errors import UnsupportedError
from okounkov.models import predicted_body
from okounkov.wfield import WeightVector

SIMPLEX = hull([(0, 0), (1, 0), (0, 1)])


def verts(b):
    return set(b.vertices)


def test_hull_drops_interior():
    assert verts(hull([(0, 0), (1, 0), (0, 1), (F(1, 4), F(1, 4))])) == verts(SIMPLEX)


def test_hull_single_point():
    assert hull([(F(1, 3), 2)]).vertices == ((F(1, 3), F(2)),)


def test_hull_quadrilateral():
    pts = [(0, 0), (F(3, 8), 0), (F(1, 3), F(1, 3)), (0, F(21, 8))]
    q = hull(pts)
    assert len(q.vertices) == 4
    assert volume(q) == F(1, 2)
    assert q == predicted_body((7, 1))


def test_dim_cap():
    with pytest.raises(UnsupportedError):
        hull([(0, 0, 0, 0), (1, 0, 0, 0)])


def test_hull_3d_cube():
    pts = [(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)] + [(F(1, 2),) * 3]
    h = hull(pts, 3)
    assert len(h.vertices) == 8
    assert volume(h) == 1


def test_okounkov_body_simplex():
    gam = {1: [(0, 0), (1, 0), (0, 1)]}
    assert okounkov_body(gam, 1) == SIMPLEX


def test_slices():
    S = slice_body(SIMPLEX, (1, 1), F(1, 2))
    assert volume(S) == F(3, 8)
    assert slice_body(SIMPLEX, (1, 1), 0) == SIMPLEX
    assert slice_body(SIMPLEX, (1, 1), 2).is_empty()


def test_areas():
    assert volume(SIMPLEX) == F(1, 2)
    assert volume(hull([(0, 0), (F(1, 2), 0), (0, 2)])) == F(1, 2)


def test_volume_function_simplex():
    V = volume_function(SIMPLEX, WeightVector([1, 1]))
    for k in range(11):
        t = F(k, 10)
        assert V(t) == F(1, 2) - t * t / 2
        assert V(t) == volume(slice_body(SIMPLEX, (1, 1), t)) or t == 1
    assert V(0) == volume(SIMPLEX)
    assert V(V.T) == 0


def test_integrate():
    # slices x >= t of hull{(0,0),(1,0),(0,2)} have area (1 - t)^2
    V = volume_function(hull([(0, 0), (1, 0), (0, 2)]), [1])
    assert V.T == 1
    for k in range(5):
        t = F(k, 4)
        assert V(t) == (1 - t) ** 2
    assert integrate(V, 0, 1) == F(1, 3)
    assert integrate(V, F(1, 2), 1) == F(1, 24)
    assert integrate(V, F(1, 2), F(1, 2)) == 0
    with pytest.raises(ValueError):
        integrate(V, 1, 0)


def test_hausdorff():
    assert hausdorff(SIMPLEX, SIMPLEX) == 0
    big = hull([(0, 0), (2, 0), (0, 2)])
    assert hausdorff(SIMPLEX, big) >= 1


def test_limits_examples():
    shrink = AffineSequence([(0,), (0,)], [(1,), (2,)])
    lim = sequence_limits(shrink)
    assert lim["cofinite"].is_empty()
    assert lim["pointwise"].vertices == ((F(0),),)
    const = sequence_limits(ConstantSequence(SIMPLEX))
    assert const["pointwise"] == const["cofinite"] == SIMPLEX
    grow = AffineSequence([(0, 0), (1, 0), (0, 1)], [(0, 0), (0, 0), (0, -1)])
    lim = sequence_limits(grow)
    assert lim["pointwise"] == SIMPLEX == lim["cofinite"]
    assert lim["equal_volume"]
