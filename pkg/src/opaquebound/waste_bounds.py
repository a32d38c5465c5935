"""Waste estimates: how far a barrier must exceed half the perimeter.

A barrier part whose projections cover ``K`` poorly forces the whole barrier
above the Jones bound ``p``.  ``delta`` in :class:`WasteGain` is that excess.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.integrate import simpson

from .geometry import Segment, square_support, union_measure_many
from .kzeta import DiscKZeta, SquareQZeta


class WasteSource(str, Enum):
    OUTSIDE = "outside"
    SEPARATED = "separated"


@dataclass(frozen=True)
class WasteGain:
    delta: float
    source: WasteSource
    inputs: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.delta < 0:
            raise ValueError(f"negative gain {self.delta}")


def corollary1_gain(len_outside: float, zeta: float) -> WasteGain:
    """Gain from barrier length lying outside ``K_zeta``."""
    if len_outside < 0:
        raise ValueError(f"length must be >= 0, got {len_outside}")
    if not 0.0 <= zeta <= math.pi:
        raise ValueError(f"zeta must lie in [0, pi], got {zeta}")
    delta = len_outside * (1.0 - math.cos(zeta / 2.0))
    return WasteGain(delta, WasteSource.OUTSIDE,
                     {"len_outside": len_outside, "zeta": zeta})


def corollary2_gain(eta: float, gamma: float, D: float) -> WasteGain:
    """Gain from two strip-separated pieces of length ``eta`` each.

    ``D`` is the diameter of a disc containing both regions.
    """
    if eta < 0:
        raise ValueError(f"eta must be >= 0, got {eta}")
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    if not D > 0:
        raise ValueError(f"D must be positive, got {D}")
    delta = (eta * math.sin(gamma)) ** 2 / (2.0 * D)
    return WasteGain(delta, WasteSource.SEPARATED,
                     {"eta": eta, "gamma": gamma, "D": D})


def prop2_gain(len_outside: float, r: float) -> WasteGain:
    """Disc case of :func:`corollary1_gain`, written in the enlargement ``r``."""
    if len_outside < 0 or r < 0:
        raise ValueError(f"need len_outside >= 0 and r >= 0, got {len_outside}, {r}")
    delta = len_outside * r / (1.0 + r)
    return WasteGain(delta, WasteSource.OUTSIDE,
                     {"len_outside": len_outside, "r": r})


class PreconditionError(ValueError):
    def __init__(self, index: int, segment: Segment):
        super().__init__(f"segment {index} intersects K_zeta: {segment}")
        self.index = index
        self.segment = segment


@dataclass(frozen=True)
class Lemma6Result:
    lhs: float
    rhs: float
    ok: bool

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.ok))


def _segment_dist_to_origin(s: Segment) -> float:
    d = s.b - s.a
    dd = d.dot(d)
    if dd == 0.0:
        return s.a.norm()
    u = min(max(-s.a.dot(d) / dd, 0.0), 1.0)
    return s.point_at(u).norm()


def _check_outside(segments: Sequence[Segment], kz: DiscKZeta | SquareQZeta,
                   n_probe: int = 65) -> None:
    for i, s in enumerate(segments):
        if isinstance(kz, DiscKZeta):
            inside = _segment_dist_to_origin(s) < kz.radius
        else:
            inside = any(kz.contains(s.point_at(u), eps=0.0)
                         for u in np.linspace(0.0, 1.0, n_probe))
        if inside:
            raise PreconditionError(i, s)


def lemma6_integral_check(segments: Sequence[Segment], body: str, zeta: float,
                          n_nodes: int = 2049, tol: float = 1e-4) -> Lemma6Result:
    """Compare the clipped projection integral of ``segments`` with ``4|B'| cos(zeta/2)``.

    ``body`` is ``"disc"`` (unit disc) or ``"square"`` (centered unit square).
    The integral over ``[-pi, pi]`` uses composite Simpson on ``n_nodes`` nodes.
    """
    if body == "disc":
        kz: DiscKZeta | SquareQZeta = DiscKZeta.from_zeta(zeta)
    elif body == "square":
        kz = SquareQZeta(zeta)
    else:
        raise ValueError(f"unknown body {body!r}")
    if n_nodes < 2049:
        raise ValueError("at least 2049 nodes (2048 panels) are required")
    if n_nodes % 2 == 0:
        n_nodes += 1
    _check_outside(segments, kz)
    total = sum(s.length for s in segments)
    rhs = 4.0 * total * math.cos(zeta / 2.0)
    if not segments:
        return Lemma6Result(0.0, rhs, True)

    alpha = np.linspace(-math.pi, math.pi, n_nodes)
    sa, ca = np.sin(alpha), np.cos(alpha)
    ax = np.array([[s.a.x] for s in segments])
    ay = np.array([[s.a.y] for s in segments])
    bx = np.array([[s.b.x] for s in segments])
    by = np.array([[s.b.y] for s in segments])
    pa = ax * sa - ay * ca
    pb = bx * sa - by * ca
    half = np.ones_like(alpha) if body == "disc" else square_support(alpha)
    vals = union_measure_many(np.minimum(pa, pb), np.maximum(pa, pb), -half, half)
    lhs = float(simpson(vals, x=alpha))
    return Lemma6Result(lhs, rhs, lhs <= rhs + tol)
