import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from opaquebound.geometry import (Arc, Interval, LineByAngle, Segment, Strip, Vec2,
                                  centered_strip, line_circle_intersections,
                                  line_hits_arc, line_hits_segment, normalize_angle,
                                  project_arc, project_point, project_segment,
                                  separation_gap, square_support, strip_separates,
                                  union_measure, union_measure_many)

coord = st.floats(-10, 10, allow_nan=False)
angle = st.floats(-10, 10, allow_nan=False)
vec = st.builds(Vec2, coord, coord)


def test_vec2_rejects_nan():
    with pytest.raises(ValueError):
        Vec2(float("nan"), 0.0)
    with pytest.raises(ValueError):
        Vec2(0.0, float("inf"))


def test_vec2_arithmetic():
    a, b = Vec2(1, 2), Vec2(3, -1)
    assert (a + b).as_tuple() == (4, 1)
    assert (a - b).as_tuple() == (-2, 3)
    assert (a * 2).as_tuple() == (2, 4)
    assert (-a).as_tuple() == (-1, -2)
    assert a.dot(b) == 1
    r = Vec2(1, 0).rotated(math.pi / 2)
    assert r.x == pytest.approx(0, abs=1e-15) and r.y == pytest.approx(1)


def test_normalize_angle_range():
    for a in np.linspace(-20, 20, 101):
        n = normalize_angle(a)
        assert 0 <= n < 2 * math.pi
        assert math.isclose(math.cos(n), math.cos(a), abs_tol=1e-12)


def test_line_convention():
    l = LineByAngle(0.3, 0.7)
    p = l.foot
    assert project_point(p, l.alpha) == pytest.approx(0.7)
    q = p + l.direction * 5.0
    assert project_point(q, l.alpha) == pytest.approx(0.7)
    assert LineByAngle(0.3 + 2 * math.pi, 0.0).alpha == pytest.approx(0.3)


def test_interval_and_strip_invariants():
    with pytest.raises(ValueError):
        Interval(1.0, 0.0)
    with pytest.raises(ValueError):
        Strip(0.0, 1.0, 1.0)
    assert Strip(0.0, -0.5, 1.0).width == 1.5


def test_arc_invariants():
    with pytest.raises(ValueError):
        Arc(Vec2(0, 0), 0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        Arc(Vec2(0, 0), 1.0, 0.0, 7.0)
    a = Arc(Vec2(0, 0), 2.0, 0.0, -math.pi / 2)
    assert a.length == pytest.approx(math.pi)
    assert a.contains_angle(-0.5) and not a.contains_angle(0.5)


@given(vec, vec, angle)
def test_projection_linear(p, q, a):
    assert project_point(p + q, a) == pytest.approx(
        project_point(p, a) + project_point(q, a), abs=1e-9)


@given(vec, vec, angle)
def test_projected_segment_no_longer_than_segment(a, b, alpha):
    s = Segment(a, b)
    assert project_segment(s, alpha).length <= s.length + 1e-9


def test_projection_equality_when_perpendicular():
    s = Segment(Vec2(0, 0), Vec2(math.cos(0.4), math.sin(0.4)))
    # the projection coordinate measures along (sin a, -cos a)
    alpha = 0.4 + math.pi / 2
    assert project_segment(s, alpha).length == pytest.approx(1.0)
    assert project_segment(s, 0.4).length == pytest.approx(0.0, abs=1e-15)


def test_project_arc_matches_dense_samples(rng):
    for _ in range(200):
        a = Arc(Vec2(*rng.uniform(-1, 1, 2)), rng.uniform(0.1, 2),
                rng.uniform(-4, 4), rng.uniform(-2 * math.pi, 2 * math.pi))
        alpha = rng.uniform(0, 2 * math.pi)
        th = a.angle_start + np.linspace(0, 1, 20001) * a.angle_sweep
        vals = (a.center.x + a.radius * np.cos(th)) * math.sin(alpha) \
            - (a.center.y + a.radius * np.sin(th)) * math.cos(alpha)
        iv = project_arc(a, alpha)
        assert iv.lo == pytest.approx(vals.min(), abs=1e-6)
        assert iv.hi == pytest.approx(vals.max(), abs=1e-6)


def test_union_measure_basic():
    ivs = [Interval(0, 1), Interval(0.5, 2), Interval(3, 4)]
    assert union_measure(ivs, Interval(-10, 10)) == pytest.approx(3.0)
    assert union_measure(ivs, Interval(0.5, 3.5)) == pytest.approx(2.0)
    assert union_measure([], Interval(0, 1)) == 0.0


def test_union_measure_monte_carlo(rng):
    for _ in range(20):
        n = rng.integers(1, 8)
        lo = rng.uniform(-2, 2, n)
        hi = lo + rng.uniform(0, 1.5, n)
        clip = Interval(-1.0, 1.0)
        x = rng.uniform(clip.lo, clip.hi, 200_000)
        covered = ((x[:, None] >= lo) & (x[:, None] <= hi)).any(axis=1)
        mc = covered.mean() * clip.length
        exact = union_measure([Interval(a, b) for a, b in zip(lo, hi)], clip)
        assert exact == pytest.approx(mc, abs=0.02)


@given(st.lists(st.tuples(coord, st.floats(0, 5)), min_size=1, max_size=8),
       st.tuples(coord, st.floats(0, 5)))
def test_union_measure_monotone_and_bounded(raw, extra):
    clip = Interval(-3.0, 3.0)
    ivs = [Interval(a, a + d) for a, d in raw]
    m = union_measure(ivs, clip)
    assert 0.0 <= m <= clip.length + 1e-12
    assert union_measure(ivs + [Interval(extra[0], extra[0] + extra[1])], clip) >= m - 1e-12


def test_union_measure_many_matches_scalar(rng):
    lo = rng.uniform(-2, 2, (6, 50))
    hi = lo + rng.uniform(0, 1, (6, 50))
    clo, chi = -np.ones(50), np.ones(50)
    vec_res = union_measure_many(lo, hi, clo, chi)
    for j in range(50):
        ref = union_measure([Interval(a, b) for a, b in zip(lo[:, j], hi[:, j])],
                            Interval(-1, 1))
        assert vec_res[j] == pytest.approx(ref, abs=1e-14)


def _parametric_hit(l: LineByAngle, s: Segment) -> bool:
    # solve foot + u*dir = a + v*(b-a) for v in [0, 1]
    d = l.direction
    e = s.b - s.a
    den = d.x * (-e.y) - d.y * (-e.x)
    rhs = s.a - l.foot
    if abs(den) < 1e-14:
        return abs(project_point(s.a, l.alpha) - l.offset) < 1e-12
    v = (d.x * rhs.y - d.y * rhs.x) / den
    return -1e-12 <= v <= 1 + 1e-12


def test_line_hits_segment_brute_force(rng):
    agree = 0
    for _ in range(10_000):
        s = Segment(Vec2(*rng.uniform(-1, 1, 2)), Vec2(*rng.uniform(-1, 1, 2)))
        l = LineByAngle(rng.uniform(0, 2 * math.pi), rng.uniform(-1, 1))
        agree += line_hits_segment(l, s) == _parametric_hit(l, s)
    assert agree == 10_000


def test_line_circle_intersections_on_circle(rng):
    for _ in range(500):
        c = Vec2(*rng.uniform(-1, 1, 2))
        rad = rng.uniform(0.1, 2)
        l = LineByAngle(rng.uniform(0, 2 * math.pi), rng.uniform(-2, 2))
        for p in line_circle_intersections(l, c, rad):
            assert (p - c).norm() == pytest.approx(rad, abs=1e-9)
            assert project_point(p, l.alpha) == pytest.approx(l.offset, abs=1e-9)


def test_line_hits_arc():
    upper = Arc(Vec2(0, 0), 1.0, 0.0, math.pi)
    assert line_hits_arc(LineByAngle(0.0, -0.5), upper)  # y = 0.5
    assert not line_hits_arc(LineByAngle(0.0, 0.5), upper)  # y = -0.5
    assert not line_hits_arc(LineByAngle(0.0, -1.5), upper)


def test_cauchy_perimeter_disc():
    # |U(alpha)| = 2 for all alpha; integral over [0, pi] is the perimeter
    val, _ = quad(lambda a: 2.0, 0.0, math.pi)
    assert val == pytest.approx(2 * math.pi, abs=1e-6)
    a = np.linspace(0, math.pi, 1001)
    width = 2 * np.hypot(np.sin(a), np.cos(a))
    assert np.allclose(width, 2.0)


def test_cauchy_perimeter_square():
    val, _ = quad(lambda a: 2 * square_support(a), 0.0, math.pi, points=[math.pi / 2])
    assert val == pytest.approx(4.0, abs=1e-6)


def test_strip_separation():
    A = [Vec2(0, 1), Vec2(1, 2)]
    B = [Vec2(0, -1), Vec2(2, -2)]
    alpha = 0.0  # projection is -y
    assert separation_gap(B, A, alpha) == pytest.approx(2.0)
    strip = centered_strip(B, A, alpha, 1.0)
    assert strip_separates(strip, A, B)
    assert not strip_separates(Strip(alpha, -5.0, 5.0), A, B)
    with pytest.raises(ValueError):
        strip_separates(strip, [], B)
