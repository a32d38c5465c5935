"""Planar primitives, projections onto directions, and incidence predicates.

Projections use the signed coordinate ``x sin(alpha) - y cos(alpha)``: the
position of a point along the normal of a line that makes angle ``alpha`` with
the horizontal axis.  Every module uses this convention, so offsets are directly
comparable between them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

EPS = 1e-12
TWO_PI = 2.0 * math.pi


def normalize_angle(a: float) -> float:
    """Reduce an angle to [0, 2*pi)."""
    a = math.fmod(a, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    # fmod of a value just below 0 can round up to exactly 2*pi
    return 0.0 if a >= TWO_PI else a


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite coordinates ({self.x}, {self.y})")

    def __add__(self, o: Vec2) -> Vec2:
        return Vec2(self.x + o.x, self.y + o.y)

    def __sub__(self, o: Vec2) -> Vec2:
        return Vec2(self.x - o.x, self.y - o.y)

    def __mul__(self, k: float) -> Vec2:
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __neg__(self) -> Vec2:
        return Vec2(-self.x, -self.y)

    def dot(self, o: Vec2) -> float:
        return self.x * o.x + self.y * o.y

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def rotated(self, angle: float) -> Vec2:
        c, s = math.cos(angle), math.sin(angle)
        return Vec2(c * self.x - s * self.y, s * self.x + c * self.y)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


def distance(a: Vec2, b: Vec2) -> float:
    return (a - b).norm()


@dataclass(frozen=True)
class Segment:
    a: Vec2
    b: Vec2

    @property
    def length(self) -> float:
        return distance(self.a, self.b)

    def point_at(self, s: float) -> Vec2:
        return self.a * (1.0 - s) + self.b * s

    @property
    def midpoint(self) -> Vec2:
        return self.point_at(0.5)


@dataclass(frozen=True)
class Arc:
    """Circular arc from ``angle_start`` sweeping ``angle_sweep`` (signed) radians."""

    center: Vec2
    radius: float
    angle_start: float
    angle_sweep: float

    def __post_init__(self) -> None:
        if not self.radius > 0.0:
            raise ValueError(f"arc radius must be positive, got {self.radius}")
        if abs(self.angle_sweep) > TWO_PI + EPS:
            raise ValueError(f"|angle_sweep| exceeds 2*pi: {self.angle_sweep}")
        object.__setattr__(self, "angle_start", normalize_angle(self.angle_start))

    @property
    def length(self) -> float:
        return abs(self.angle_sweep) * self.radius

    def point_at_angle(self, theta: float) -> Vec2:
        return Vec2(self.center.x + self.radius * math.cos(theta),
                    self.center.y + self.radius * math.sin(theta))

    def point_at(self, s: float) -> Vec2:
        return self.point_at_angle(self.angle_start + s * self.angle_sweep)

    def contains_angle(self, theta: float, eps: float = EPS) -> bool:
        """Whether direction ``theta`` (seen from the center) lies on the arc."""
        if abs(self.angle_sweep) >= TWO_PI - eps:
            return True
        lo = self.angle_start if self.angle_sweep >= 0 else normalize_angle(
            self.angle_start + self.angle_sweep)
        d = normalize_angle(theta - lo)
        span = abs(self.angle_sweep)
        return d <= span + eps or d >= TWO_PI - eps


@dataclass(frozen=True)
class LineByAngle:
    """The line ``{(x, y) : x sin(alpha) - y cos(alpha) = offset}``."""

    alpha: float
    offset: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", normalize_angle(self.alpha))

    @property
    def normal(self) -> Vec2:
        return Vec2(math.sin(self.alpha), -math.cos(self.alpha))

    @property
    def direction(self) -> Vec2:
        return Vec2(math.cos(self.alpha), math.sin(self.alpha))

    @property
    def foot(self) -> Vec2:
        """Point of the line closest to the origin."""
        return self.normal * self.offset


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, v: float, eps: float = EPS) -> bool:
        return self.lo - eps <= v <= self.hi + eps


@dataclass(frozen=True)
class Strip:
    """Slab between the lines at ``alpha`` with offsets ``lo`` and ``hi``."""

    alpha: float
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ValueError(f"strip needs lo < hi, got [{self.lo}, {self.hi}]")
        object.__setattr__(self, "alpha", normalize_angle(self.alpha))

    @property
    def width(self) -> float:
        return self.hi - self.lo


def project_point(p: Vec2, alpha: float) -> float:
    return p.x * math.sin(alpha) - p.y * math.cos(alpha)


def project_segment(s: Segment, alpha: float) -> Interval:
    u, v = project_point(s.a, alpha), project_point(s.b, alpha)
    return Interval(min(u, v), max(u, v))


def project_arc(a: Arc, alpha: float) -> Interval:
    """Projection of an arc; an interval because the arc is connected.

    Along the arc the coordinate is ``c + R sin(alpha - theta)``, so the
    extremes sit at the endpoints or where ``alpha - theta = +-pi/2``.
    """
    c = project_point(a.center, alpha)
    thetas = [a.angle_start, a.angle_start + a.angle_sweep]
    for crit in (alpha - math.pi / 2, alpha + math.pi / 2):
        if a.contains_angle(crit, eps=0.0):
            thetas.append(crit)
    vals = [c + a.radius * math.sin(alpha - th) for th in thetas]
    return Interval(min(vals), max(vals))


def union_measure(intervals: Iterable[Interval], clip: Interval) -> float:
    """Length of ``(union of intervals) & clip`` via sort-and-sweep."""
    pieces = sorted(
        (max(iv.lo, clip.lo), min(iv.hi, clip.hi)) for iv in intervals
    )
    total = 0.0
    reach = -math.inf
    for lo, hi in pieces:
        if hi <= lo:
            continue
        lo = max(lo, reach)
        if hi > lo:
            total += hi - lo
            reach = hi
    return total


def union_measure_many(lo: np.ndarray, hi: np.ndarray,
                       clip_lo: np.ndarray, clip_hi: np.ndarray) -> np.ndarray:
    """Column-wise ``union_measure`` for arrays of shape (n_intervals, n_cases).

    ``clip_lo``/``clip_hi`` have shape (n_cases,).
    """
    lo = np.maximum(np.asarray(lo, float), clip_lo)
    hi = np.minimum(np.asarray(hi, float), clip_hi)
    if lo.shape[0] == 0:
        return np.zeros(np.shape(clip_lo))
    empty = hi <= lo
    lo = np.where(empty, np.inf, lo)
    hi = np.where(empty, -np.inf, hi)
    order = np.argsort(lo, axis=0, kind="stable")
    lo = np.take_along_axis(lo, order, axis=0)
    hi = np.take_along_axis(hi, order, axis=0)
    reach = np.maximum.accumulate(hi, axis=0)
    prev = np.vstack([np.full((1,) + lo.shape[1:], -np.inf), reach[:-1]])
    contrib = hi - np.maximum(lo, prev)
    contrib = np.where(np.isfinite(contrib) & (contrib > 0), contrib, 0.0)
    return contrib.sum(axis=0)


def line_hits_segment(l: LineByAngle, s: Segment, eps: float = EPS) -> bool:
    return project_segment(s, l.alpha).contains(l.offset, eps)


def line_circle_intersections(l: LineByAngle, center: Vec2, radius: float,
                              eps: float = EPS) -> list[Vec2]:
    """Intersection points of a line with a full circle (0, 1 or 2 points)."""
    d = l.offset - project_point(center, l.alpha)
    if abs(d) > radius + eps:
        return []
    half = math.sqrt(max(radius * radius - d * d, 0.0))
    base = center + l.normal * d
    if half == 0.0:
        return [base]
    return [base + l.direction * half, base - l.direction * half]


def line_hits_arc(l: LineByAngle, a: Arc, eps: float = EPS) -> bool:
    for p in line_circle_intersections(l, a.center, a.radius, eps):
        theta = math.atan2(p.y - a.center.y, p.x - a.center.x)
        # angular slack equivalent to eps of arclength
        if a.contains_angle(theta, eps / a.radius + EPS):
            return True
    return False


def strip_separates(strip: Strip, A: Sequence[Vec2], B: Sequence[Vec2],
                    eps: float = EPS) -> bool:
    """True iff A lies on one closed side of the strip and B on the other."""
    if not A or not B:
        raise ValueError("strip_separates needs nonempty point sets")
    pa = [project_point(p, strip.alpha) for p in A]
    pb = [project_point(p, strip.alpha) for p in B]

    def below(vals: list[float]) -> bool:
        return max(vals) <= strip.lo + eps

    def above(vals: list[float]) -> bool:
        return min(vals) >= strip.hi - eps

    return (below(pa) and above(pb)) or (below(pb) and above(pa))


def separation_gap(A: Sequence[Vec2], B: Sequence[Vec2], alpha: float) -> float:
    """Signed gap ``min proj(A) - max proj(B)`` at angle ``alpha``."""
    return (min(project_point(p, alpha) for p in A)
            - max(project_point(p, alpha) for p in B))


def centered_strip(A: Sequence[Vec2], B: Sequence[Vec2], alpha: float,
                   width: float) -> Strip:
    """Strip of ``width`` centered in the gap between A (upper) and B (lower)."""
    top = min(project_point(p, alpha) for p in A)
    bottom = max(project_point(p, alpha) for p in B)
    mid = 0.5 * (top + bottom)
    return Strip(alpha, mid - 0.5 * width, mid + 0.5 * width)


def disc_support(alpha: np.ndarray | float, radius: float = 1.0):
    """Half-width of the projection of a centered disc (constant)."""
    return np.full(np.shape(alpha), radius) if np.ndim(alpha) else radius


def square_support(alpha, side: float = 1.0):
    """Half-width of the projection of the centered axis-parallel square."""
    return 0.5 * side * (np.abs(np.sin(alpha)) + np.abs(np.cos(alpha)))
