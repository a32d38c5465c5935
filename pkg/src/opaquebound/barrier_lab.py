"""Candidate barriers: construction, length and sampled opacity checks.

A barrier is opaque for ``K`` if every line meeting ``K`` meets it.  Since each
primitive (segment or arc) is connected, its projection at angle ``alpha`` is an
interval, and a line ``(alpha, offset)`` hits the primitive exactly when the
offset falls in that interval.  :func:`validate` checks that on a grid of lines.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .geometry import (EPS, Arc, LineByAngle, Segment, Vec2, disc_support,
                       line_hits_arc, line_hits_segment, square_support)
from .kzeta import SQUARE_X

INSET = 1e-9
BODIES = ("disc", "square")
HALF_PERIMETER = {"disc": math.pi, "square": 2.0}


@dataclass(frozen=True)
class Barrier:
    segments: tuple[Segment, ...] = ()
    arcs: tuple[Arc, ...] = ()
    label: str = ""

    @property
    def total_length(self) -> float:
        return total_length(self)

    def with_primitives(self, segments: Sequence[Segment] = (),
                        arcs: Sequence[Arc] = ()) -> Barrier:
        return Barrier(self.segments + tuple(segments), self.arcs + tuple(arcs),
                       self.label)


def total_length(b: Barrier) -> float:
    return math.fsum([s.length for s in b.segments] + [a.length for a in b.arcs])


@dataclass
class OpacityReport:
    body: str
    n_alpha: int
    n_offset: int
    missed: int
    missed_examples: list[LineByAngle] = field(default_factory=list)

    @property
    def samples(self) -> int:
        return self.n_alpha * self.n_offset

    @property
    def passed(self) -> bool:
        return self.missed == 0

    def to_dict(self) -> dict:
        return {
            "body": self.body,
            "samples": self.samples,
            "n_alpha": self.n_alpha,
            "n_offset": self.n_offset,
            "missed": self.missed,
            "missed_examples": [{"alpha": l.alpha, "offset": l.offset}
                                for l in self.missed_examples],
            "passed": self.passed,
        }


def _support(body: str, alpha: np.ndarray) -> np.ndarray:
    if body == "disc":
        return disc_support(alpha)
    if body == "square":
        return square_support(alpha)
    raise ValueError(f"unknown body {body!r}; expected one of {BODIES}")


def _arc_projection(arcs: Sequence[Arc], alpha: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Projection intervals of arcs, shape (n_arcs, n_alpha)."""
    sa, ca = np.sin(alpha), np.cos(alpha)
    los, his = [], []
    for a in arcs:
        c = a.center.x * sa - a.center.y * ca
        th0 = a.angle_start
        th1 = a.angle_start + a.angle_sweep
        vals = [a.radius * np.sin(alpha - th0), a.radius * np.sin(alpha - th1)]
        lo = np.minimum(*vals)
        hi = np.maximum(*vals)
        span = abs(a.angle_sweep)
        start = th0 if a.angle_sweep >= 0 else th1
        # sin(alpha - theta) peaks at theta = alpha - pi/2, bottoms at alpha + pi/2
        for crit, bound in ((alpha - math.pi / 2, "hi"), (alpha + math.pi / 2, "lo")):
            inside = np.mod(crit - start, 2 * math.pi) <= span
            if bound == "hi":
                hi = np.where(inside, a.radius, hi)
            else:
                lo = np.where(inside, -a.radius, lo)
        los.append(c + lo)
        his.append(c + hi)
    return np.array(los).reshape(-1, alpha.size), np.array(his).reshape(-1, alpha.size)


def primitive_projections(b: Barrier, alpha: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Projection intervals of all primitives, shape (n_primitives, n_alpha)."""
    alpha = np.asarray(alpha, float)
    sa, ca = np.sin(alpha), np.cos(alpha)
    parts_lo, parts_hi = [], []
    if b.segments:
        ax = np.array([[s.a.x] for s in b.segments])
        ay = np.array([[s.a.y] for s in b.segments])
        bx = np.array([[s.b.x] for s in b.segments])
        by = np.array([[s.b.y] for s in b.segments])
        pa, pb = ax * sa - ay * ca, bx * sa - by * ca
        parts_lo.append(np.minimum(pa, pb))
        parts_hi.append(np.maximum(pa, pb))
    if b.arcs:
        lo, hi = _arc_projection(b.arcs, alpha)
        parts_lo.append(lo)
        parts_hi.append(hi)
    if not parts_lo:
        empty = np.empty((0, alpha.size))
        return empty, empty
    return np.vstack(parts_lo), np.vstack(parts_hi)


def line_grid(body: str, n_alpha: int, n_offset: int,
              inset: float = INSET) -> tuple[np.ndarray, np.ndarray]:
    """Angles on ``[0, pi)`` and per-angle offsets strictly inside ``K(alpha)``.

    Returns ``alpha`` (n_alpha,) and ``offsets`` (n_alpha, n_offset).
    """
    if n_alpha < 1 or n_offset < 1:
        raise ValueError("n_alpha and n_offset must be >= 1")
    alpha = np.arange(n_alpha) * (math.pi / n_alpha)
    half = _support(body, alpha) - inset
    frac = np.linspace(-1.0, 1.0, n_offset) if n_offset > 1 else np.zeros(1)
    return alpha, half[:, None] * frac[None, :]


def _misses(b: Barrier, alpha: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    lo, hi = primitive_projections(b, alpha)
    hit = np.zeros(offsets.shape, bool)
    for k in range(lo.shape[0]):
        hit |= (offsets >= lo[k][:, None] - EPS) & (offsets <= hi[k][:, None] + EPS)
    return ~hit


def validate(b: Barrier, body: str, n_alpha: int = 1000, n_offset: int = 1000,
             threads: int = 1, chunk: int = 256, max_examples: int = 10) -> OpacityReport:
    """Count sampled lines through ``body`` that avoid the barrier."""
    alpha, offsets = line_grid(body, n_alpha, n_offset)
    bounds = list(range(0, n_alpha, chunk))

    def run(start: int) -> np.ndarray:
        sl = slice(start, start + chunk)
        return _misses(b, alpha[sl], offsets[sl])

    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(run, bounds))
    else:
        parts = [run(s) for s in bounds]
    miss = np.vstack(parts)
    ia, io = np.nonzero(miss)  # row-major: sorted by (alpha, offset)
    examples = [LineByAngle(float(alpha[i]), float(offsets[i, j]))
                for i, j in zip(ia[:max_examples], io[:max_examples])]
    return OpacityReport(body, n_alpha, n_offset, int(miss.sum()), examples)


def line_hits_barrier(l: LineByAngle, b: Barrier) -> bool:
    return (any(line_hits_segment(l, s) for s in b.segments)
            or any(line_hits_arc(l, a) for a in b.arcs))


def jones_length_lower_check(b: Barrier, body: str) -> bool:
    """Half-perimeter lower bound for a barrier already known to be opaque."""
    return total_length(b) >= HALF_PERIMETER[body] - 1e-12


def circle_barrier(radius: float = 1.0, gap: float = 0.0, gap_center: float = 0.0) -> Barrier:
    """Boundary of the disc, optionally with an arc of angle ``gap`` removed."""
    if gap <= 0.0:
        return Barrier(arcs=(Arc(Vec2(0.0, 0.0), radius, 0.0, 2 * math.pi),),
                       label="circle boundary")
    start = gap_center + gap / 2.0
    return Barrier(arcs=(Arc(Vec2(0.0, 0.0), radius, start, 2 * math.pi - gap),),
                   label=f"circle boundary with gap {gap:g}")


def square_boundary_barrier() -> Barrier:
    segs = tuple(Segment(SQUARE_X[i], SQUARE_X[(i + 1) % 4]) for i in range(4))
    return Barrier(segments=segs, label="square boundary")


def fermat_point(a: Vec2, b: Vec2, c: Vec2) -> Vec2:
    """Point minimizing the total distance to ``a, b, c``.

    Built by erecting outward equilateral triangles on two sides and
    intersecting the lines from their apexes to the opposite vertices.  When
    an angle of the triangle is 120 degrees or more, that vertex is returned.
    """
    pts = (a, b, c)
    for i in range(3):
        p, q, r = pts[i], pts[(i + 1) % 3], pts[(i + 2) % 3]
        u, v = q - p, r - p
        nu, nv = u.norm(), v.norm()
        if nu == 0 or nv == 0:
            return p
        if u.dot(v) / (nu * nv) <= -0.5:
            return p

    def apex(p: Vec2, q: Vec2, opposite: Vec2) -> Vec2:
        # third vertex of the equilateral triangle on pq, away from `opposite`
        m = (p + q) * 0.5
        d = q - p
        perp = Vec2(-d.y, d.x) * (math.sqrt(3.0) / 2.0)
        cand = m + perp
        return cand if (cand - opposite).norm() > (m - perp - opposite).norm() else m - perp

    e1 = apex(b, c, a)
    e2 = apex(c, a, b)
    # intersect line a->e1 with line b->e2
    d1, d2 = e1 - a, e2 - b
    den = d1.x * d2.y - d1.y * d2.x
    s = ((b.x - a.x) * d2.y - (b.y - a.y) * d2.x) / den
    return a + d1 * s


def jones_square_barrier() -> Barrier:
    """Steiner tree on three vertices of ``Q`` plus the half-diagonal to the fourth."""
    x0, x1, x2, x3 = SQUARE_X
    f = fermat_point(x1, x2, x3)
    segs = (Segment(f, x1), Segment(f, x2), Segment(f, x3),
            Segment(x0, Vec2(0.0, 0.0)))
    return Barrier(segments=segs, label="Steiner tree of x1, x2, x3 plus [x0, o]")


def barrier_to_dict(b: Barrier) -> dict:
    return {
        "label": b.label,
        "segments": [[[s.a.x, s.a.y], [s.b.x, s.b.y]] for s in b.segments],
        "arcs": [{"center": [a.center.x, a.center.y], "radius": a.radius,
                  "angle_start": a.angle_start, "angle_sweep": a.angle_sweep}
                 for a in b.arcs],
    }


class BarrierFormatError(ValueError):
    pass


def barrier_from_dict(d: dict) -> Barrier:
    try:
        segs = tuple(Segment(Vec2(float(a[0]), float(a[1])), Vec2(float(b[0]), float(b[1])))
                     for a, b in d.get("segments", []))
        arcs = tuple(Arc(Vec2(float(a["center"][0]), float(a["center"][1])),
                         float(a["radius"]), float(a["angle_start"]),
                         float(a["angle_sweep"]))
                     for a in d.get("arcs", []))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise BarrierFormatError(f"malformed barrier: {exc}") from exc
    label = d.get("label", "")
    if not isinstance(label, str):
        raise BarrierFormatError("label must be a string")
    return Barrier(segs, arcs, label)


def load_barrier(path: str | Path) -> Barrier:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise BarrierFormatError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise BarrierFormatError(f"{path}: top level must be an object")
    return barrier_from_dict(data)


def save_barrier(b: Barrier, path: str | Path) -> None:
    Path(path).write_text(json.dumps(barrier_to_dict(b), indent=2) + "\n")
