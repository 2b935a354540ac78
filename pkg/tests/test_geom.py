import math

import pytest
from hypothesis import given, strategies as st

from dubins3d.geom import (
    Configuration,
    ProblemInstance,
    UnitVec3,
    Vec3,
    ZeroVector,
    normalize,
    point_line_distance,
)

finite_floats = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)
vectors = st.builds(Vec3, finite_floats, finite_floats, finite_floats)


def test_normalize_345():
    u = normalize(Vec3(3, 4, 0))
    assert u.as_tuple() == pytest.approx((0.6, 0.8, 0.0), abs=1e-15)


def test_normalize_axis():
    assert normalize(Vec3(0, 0, 2)).as_tuple() == (0, 0, 1)


def test_normalize_zero_vector_rejected():
    with pytest.raises(ZeroVector):
        normalize(Vec3(0, 0, 0))
    with pytest.raises(ZeroVector):
        normalize(Vec3(1e-10, 0, 0))


@given(vectors)
def test_normalize_unit_norm(v):
    if v.norm() <= 1e-9:
        return
    u = normalize(v)
    assert abs(u.dot(u) - 1.0) <= 1e-12


def test_unitvec_rejects_non_unit():
    with pytest.raises(ValueError):
        UnitVec3(1.0, 1.0, 0.0)


def test_point_line_distance_examples():
    zhat = UnitVec3(0, 0, 1)
    assert point_line_distance(Vec3(1, 0, 0), Vec3(0, 0, 0), zhat) == pytest.approx(1.0)
    assert point_line_distance(Vec3(0, 0, 7.3), Vec3(0, 0, 0), zhat) == pytest.approx(0.0, abs=1e-12)
    assert point_line_distance(Vec3(1, 1, 0), Vec3(0, 0, 0), zhat) == pytest.approx(math.sqrt(2))


@given(vectors, vectors, vectors, st.floats(min_value=-100, max_value=100))
def test_point_line_distance_invariances(p, origin, shift, t):
    direction = UnitVec3(0.6, 0.0, 0.8)
    base = point_line_distance(p, origin, direction)
    translated = point_line_distance(p + shift, origin + shift, direction)
    assert translated == pytest.approx(base, abs=1e-6 * max(1.0, base))
    flipped = point_line_distance(p, origin, -direction)
    assert flipped == pytest.approx(base, abs=1e-9 * max(1.0, base))
    # sliding the origin along the line changes nothing
    slid = point_line_distance(p, origin + t * direction, direction)
    assert slid == pytest.approx(base, abs=1e-6 * max(1.0, base))


def test_vector_arithmetic():
    a = Vec3(1, 2, 3)
    b = Vec3(-2, 0.5, 4)
    assert (a + b).as_tuple() == (-1, 2.5, 7)
    assert (a - b).as_tuple() == (3, 1.5, -1)
    assert (2.0 * a).as_tuple() == (2, 4, 6)
    assert a.dot(b) == pytest.approx(-2 + 1 + 12)
    assert a.cross(b).as_tuple() == pytest.approx((2 * 4 - 3 * 0.5, 3 * -2 - 1 * 4, 1 * 0.5 - 2 * -2))


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        Vec3(float("nan"), 0, 0)
    with pytest.raises(ValueError):
        Vec3(0, float("inf"), 0)


def test_instance_validation():
    cfg = Configuration(Vec3(0, 0, 0), UnitVec3(0, 0, 1))
    with pytest.raises(ValueError):
        ProblemInstance(cfg, cfg, radius=0.0)
    with pytest.raises(ValueError):
        ProblemInstance(cfg, cfg, radius=-1.0)
    inst = ProblemInstance(cfg, Configuration(Vec3(3, 4, 0), UnitVec3(0, 0, 1)), radius=2.0)
    assert inst.chord == pytest.approx(5.0)
