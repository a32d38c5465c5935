"""The enlarged sets K_zeta for the unit disc and the centered unit square.

``K_zeta`` holds the points from which ``K`` is seen under an angle of at least
``pi - zeta``.  For the unit disc it is the concentric disc of radius
``1 + r`` with ``zeta = 2 arccos(1/(1+r))``; for the square ``Q = [-1/2, 1/2]^2``
it is bounded by four circular arcs through adjacent vertices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import EPS, Arc, Vec2

SQRT2 = math.sqrt(2.0)
QUARTER = math.pi / 2

# exposed points: unit-disc boundary points and square vertices share directions
DISC_X = tuple(Vec2(sx / SQRT2, sy / SQRT2)
               for sx, sy in ((1, 1), (-1, 1), (-1, -1), (1, -1)))
SQUARE_X = tuple(Vec2(0.5 * sx, 0.5 * sy)
                 for sx, sy in ((1, 1), (-1, 1), (-1, -1), (1, -1)))


def disc_zeta_of_r(r: float) -> float:
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    return 2.0 * math.acos(1.0 / (1.0 + r))


def disc_r_of_zeta(zeta: float) -> float:
    if not 0.0 <= zeta < math.pi:
        raise ValueError(f"zeta must lie in [0, pi), got {zeta}")
    return 1.0 / math.cos(zeta / 2.0) - 1.0


@dataclass(frozen=True)
class DiscKZeta:
    """``U_zeta = (1 + r) U``."""

    r: float

    def __post_init__(self) -> None:
        if self.r < 0:
            raise ValueError(f"r must be >= 0, got {self.r}")

    @classmethod
    def from_zeta(cls, zeta: float) -> DiscKZeta:
        return cls(disc_r_of_zeta(zeta))

    @property
    def zeta(self) -> float:
        return disc_zeta_of_r(self.r)

    @property
    def radius(self) -> float:
        return 1.0 + self.r

    def contains(self, p: Vec2, eps: float = EPS) -> bool:
        return p.norm() <= self.radius + eps


def _check_square_zeta(zeta: float) -> None:
    # arcs for zeta >= pi/4 are never needed by the bound pipeline
    if not 0.0 < zeta < math.pi / 4 + EPS:
        raise ValueError(f"square zeta must lie in (0, pi/4], got {zeta}")


def square_arc_radius(zeta: float) -> float:
    return 1.0 / (2.0 * math.sin(zeta))


def square_arc_center(zeta: float, side: int) -> Vec2:
    """Center of the arc over side (x_side, x_side+1)."""
    c = (1.0 - 1.0 / math.tan(zeta)) / 2.0
    return Vec2(0.0, c).rotated((side % 4) * QUARTER)


def square_arc(zeta: float, side: int) -> Arc:
    """Boundary arc of Q_zeta from vertex ``x_side`` to ``x_{side+1}``."""
    if not 0.0 < zeta < math.pi / 2:
        raise ValueError(f"zeta must lie in (0, pi/2), got {zeta}")
    side %= 4
    center = square_arc_center(zeta, side)
    a, b = SQUARE_X[side], SQUARE_X[(side + 1) % 4]
    th_a = math.atan2(a.y - center.y, a.x - center.x)
    th_b = math.atan2(b.y - center.y, b.x - center.x)
    sweep = math.remainder(th_b - th_a, 2.0 * math.pi)
    return Arc(center, square_arc_radius(zeta), th_a, sweep)


@dataclass(frozen=True)
class SquareQZeta:
    zeta: float

    def __post_init__(self) -> None:
        _check_square_zeta(self.zeta)

    @property
    def arc_radius(self) -> float:
        return square_arc_radius(self.zeta)

    @property
    def arc_centers(self) -> tuple[Vec2, ...]:
        return tuple(square_arc_center(self.zeta, i) for i in range(4))

    def arcs(self) -> tuple[Arc, ...]:
        return tuple(square_arc(self.zeta, i) for i in range(4))

    def contains(self, p: Vec2, eps: float = EPS) -> bool:
        # Q_zeta is the intersection of the four arc discs
        if abs(p.x) <= 0.5 + eps and abs(p.y) <= 0.5 + eps:
            return True
        rad = self.arc_radius
        return all((p - c).norm() <= rad + eps for c in self.arc_centers)


def point_in_kzeta(body: DiscKZeta | SquareQZeta, p: Vec2) -> bool:
    return body.contains(p)


def disc_w(r: float, t: float) -> float:
    """Half-length of the chord ``<x, x_i> = t`` in ``(1 + r) U``."""
    s = (1.0 + r) ** 2 - t * t
    if s < 0.0:
        if s > -EPS:
            return 0.0
        raise ValueError(f"t = {t} exceeds 1 + r = {1.0 + r}")
    return math.sqrt(s)


def disc_endpoints(r: float, t: float, i: int) -> tuple[Vec2, Vec2]:
    """Endpoints ``(p_{i+}, p_{i-})`` of the chord ell_i of ``(1 + r) U``.

    ``p_{0+-} = t x0 +- w x1``, ``p_{1+-} = t x1 +- w x0`` and the opposite
    chords follow by central symmetry: ``p_{2+-} = -p_{0-+}``,
    ``p_{3+-} = -p_{1-+}``.
    """
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    w = disc_w(r, t)
    x0, x1 = DISC_X[0], DISC_X[1]
    if i % 2 == 0:
        plus, minus = x0 * t + x1 * w, x0 * t - x1 * w
    else:
        plus, minus = x1 * t + x0 * w, x1 * t - x0 * w
    if i % 4 >= 2:
        plus, minus = -minus, -plus
    return plus, minus


def square_ell_endpoint(zeta: float, t: float) -> Vec2:
    """``p_{1-}``: the line ``sqrt(2) <x, x1> = t`` meets the arc over side 0."""
    _check_square_zeta(zeta)
    c = (1.0 - 1.0 / math.tan(zeta)) / 2.0
    rad = square_arc_radius(zeta)
    d = c - SQRT2 * t
    disc = 2.0 * rad * rad - d * d
    if disc < 0.0:
        raise ValueError(f"t = {t} is incompatible with zeta = {zeta}")
    x = 0.5 * (d + math.sqrt(disc))
    return Vec2(x, SQRT2 * t + x)


def square_endpoints(zeta: float, t: float, i: int) -> tuple[Vec2, Vec2]:
    """``(p_{i+}, p_{i-})`` for the square.

    ``p_{1+}`` mirrors ``p_{1-}`` across the diagonal through ``x1``; the
    other chords are quarter-turn rotations of ell_1.
    """
    m = square_ell_endpoint(zeta, t)
    p = Vec2(-m.y, -m.x)
    turn = ((i - 1) % 4) * QUARTER
    return p.rotated(turn), m.rotated(turn)
