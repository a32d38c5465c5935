"""Lower bound ``2 + 2.3e-5`` for barriers of the centered unit square.

Three cases: much barrier length outside ``Q_zeta``, facing pieces in
neighboring regions ``R_i`` or in opposing ones.  Each case gives a gain and
the certificate keeps the smallest.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .geometry import Vec2, centered_strip, separation_gap, strip_separates
from .kzeta import (SQRT2, SQUARE_X, SquareQZeta, square_arc, square_ell_endpoint,
                    square_endpoints)
from .waste_bounds import corollary1_gain, corollary2_gain

TARGET = 2.3e-5
NEIGHBOR_RADIUS = 0.522


class VacuousParameters(ValueError):
    pass


@dataclass(frozen=True)
class SquareParams:
    zeta: float = 0.15
    t: float = 0.615
    bout_threshold: float = 0.008182
    gamma_neighbor: float = 0.19
    gamma_opposing: float = 0.194
    D_neighbor: float = 2 * NEIGHBOR_RADIUS
    D_opposing: float = SQRT2
    lam: float = math.pi / 8

    def __post_init__(self) -> None:
        if not 0.0 < self.zeta < math.pi / 4:
            raise ValueError(f"zeta = {self.zeta} must lie in (0, pi/4)")
        if not 0.0 < self.t < 1.0 / SQRT2:
            raise ValueError(f"t = {self.t} must lie in (0, 1/sqrt2)")
        # R_0 and R_1 must stay disjoint: ell_1 ends left of the y-axis
        if not square_ell_endpoint(self.zeta, self.t).x < 0.0:
            raise ValueError(f"t = {self.t} too small: neighboring regions overlap")
        if self.bout_threshold < 0:
            raise ValueError("bout_threshold must be >= 0")
        for name in ("gamma_neighbor", "gamma_opposing"):
            g = getattr(self, name)
            if not 0.0 < g:
                raise ValueError(f"{name} must be positive")
        if self.D_neighbor <= 0 or self.D_opposing <= 0:
            raise ValueError("D values must be positive")
        if self.D_opposing > SQRT2 + 1e-12:
            raise ValueError("D_opposing beyond the circumdisc diameter sqrt(2) "
                             "is not certified")

    @property
    def neighbor_radius(self) -> float:
        return self.D_neighbor / 2.0


def square_eta(t: float, bout: float) -> float:
    """Guaranteed length per region once at most ``bout`` lies outside ``Q_zeta``."""
    if bout < 0:
        raise ValueError("bout must be >= 0")
    eta = (1.0 / SQRT2 - t - bout) / 2.0
    if eta < 0:
        raise VacuousParameters(f"eta = {eta} < 0 for t = {t}, bout = {bout}")
    return eta


def ell(params: SquareParams, i: int) -> list[Vec2]:
    return list(square_endpoints(params.zeta, params.t, i))


def region_boundary(params: SquareParams, i: int, n: int = 20000) -> list[Vec2]:
    """Boundary samples of ``R_i = {x in Q_zeta : t <= sqrt2 <x, x_i> <= 1/sqrt2}``.

    The exact chord endpoints and the vertex come first, followed by the two
    arc pieces between them and the chord itself.
    """
    p_plus, p_minus = square_endpoints(params.zeta, params.t, i)
    vertex = SQUARE_X[i % 4]
    pts = [p_plus, p_minus, vertex]
    # the vertex is the junction of the arcs over sides i-1 and i
    for side in ((i - 1) % 4, i % 4):
        arc = square_arc(params.zeta, side)
        n_arc = max(n // 2, 2)
        th = arc.angle_start + np.linspace(0.0, 1.0, n_arc) * arc.angle_sweep
        xs = arc.center.x + arc.radius * np.cos(th)
        ys = arc.center.y + arc.radius * np.sin(th)
        u = (xs * vertex.x + ys * vertex.y) * 2.0 / SQRT2
        keep = u >= params.t
        pts.extend(Vec2(float(x), float(y)) for x, y in zip(xs[keep], ys[keep]))
    for s in np.linspace(0.0, 1.0, 65):
        pts.append(p_plus * (1.0 - s) + p_minus * s)
    return pts


def neighbor_center(params: SquareParams) -> Vec2:
    """Midpoint of the outer chord endpoints of ``R_0`` and ``R_1``."""
    _, p0m = square_endpoints(params.zeta, params.t, 0)
    p1p, _ = square_endpoints(params.zeta, params.t, 1)
    return (p0m + p1p) * 0.5


@dataclass(frozen=True)
class ContainmentReport:
    neighbor_center: tuple[float, float]
    neighbor_max_distance: float
    neighbor_ok: bool
    midpoint_center_distance: float
    qzeta_max_norm: float
    circumdisc_ok: bool
    samples: int


def containment_checks(params: SquareParams, n: int = 100_000) -> ContainmentReport:
    """(a) ``R_0 u R_1`` lies in a disc of diameter ``D_neighbor``;
    (b) ``Q_zeta`` lies in the circumdisc of ``Q``.

    ``midpoint_center_distance`` records the farthest point from
    ``(x_0 + x_1)/2`` for comparison; it is reported but not required.
    """
    pts = region_boundary(params, 0, n // 2) + region_boundary(params, 1, n // 2)
    xy = np.array([p.as_tuple() for p in pts])
    c = neighbor_center(params)
    far = float(np.max(np.hypot(xy[:, 0] - c.x, xy[:, 1] - c.y)))
    mid = (SQUARE_X[0] + SQUARE_X[1]) * 0.5
    far_mid = float(np.max(np.hypot(xy[:, 0] - mid.x, xy[:, 1] - mid.y)))

    kz = SquareQZeta(params.zeta)
    per_arc = max(n // 4, 2)
    norms = []
    for arc in kz.arcs():
        th = arc.angle_start + np.linspace(0.0, 1.0, per_arc) * arc.angle_sweep
        norms.append(np.hypot(arc.center.x + arc.radius * np.cos(th),
                              arc.center.y + arc.radius * np.sin(th)))
    qmax = float(np.max(np.concatenate(norms)))
    return ContainmentReport(
        neighbor_center=c.as_tuple(),
        neighbor_max_distance=far,
        neighbor_ok=far <= params.neighbor_radius + 1e-12,
        midpoint_center_distance=far_mid,
        qzeta_max_norm=qmax,
        circumdisc_ok=qmax <= 1.0 / SQRT2 + 1e-12 and params.D_opposing >= 2 * qmax - 1e-12,
        samples=len(pts) + per_arc * 4,
    )


def _witness(A: list[Vec2], B: list[Vec2], lam: float, gamma: float,
             width: float) -> bool:
    if not 0.0 < gamma < lam:
        return False
    for sign in (1.0, -1.0):
        beta = sign * (lam - gamma)
        upper, lower = (A, B) if separation_gap(A, B, beta) >= 0 else (B, A)
        if separation_gap(upper, lower, beta) < width - 1e-12:
            return False
        if not strip_separates(centered_strip(upper, lower, beta, width), upper, lower):
            return False
    return True


def strip_witness_square(params: SquareParams, pair: str, n: int = 2000) -> bool:
    """Do strips of width ``eta sin(gamma)`` at ``+-(lam - gamma)`` separate the pair?

    ``pair`` is ``"neighboring"`` (``R_0``, ``R_1``) or ``"opposing"``
    (``R_0``, ``R_2`` turned by ``-pi/4``).  The regions are represented by
    their boundary samples, which include the exact chord endpoints.
    """
    eta = square_eta(params.t, params.bout_threshold)
    if pair == "neighboring":
        A = region_boundary(params, 0, n)
        B = region_boundary(params, 1, n)
        gamma = params.gamma_neighbor
    elif pair == "opposing":
        A = [p.rotated(-math.pi / 4) for p in region_boundary(params, 0, n)]
        B = [p.rotated(-math.pi / 4) for p in region_boundary(params, 2, n)]
        gamma = params.gamma_opposing
    else:
        raise ValueError(f"unknown pair {pair!r}")
    return _witness(A, B, params.lam, gamma, eta * math.sin(gamma))


@dataclass
class SquareCertificate:
    params: SquareParams
    eta: float
    gain_outside: float
    gain_neighbor: float
    gain_opposing: float
    containment: ContainmentReport | None
    neighbor_witness: bool
    opposing_witness: bool
    final_bound: float
    target: float
    failures: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        d = asdict(self)
        d["valid"] = self.valid
        return d


def square_gains(params: SquareParams) -> tuple[float, float, float, float]:
    """``(eta, gain_outside, gain_neighbor, gain_opposing)`` without geometry checks."""
    eta = square_eta(params.t, params.bout_threshold)
    g_out = corollary1_gain(params.bout_threshold, params.zeta).delta
    g_nb = corollary2_gain(eta, params.gamma_neighbor, params.D_neighbor).delta
    g_opp = corollary2_gain(eta, params.gamma_opposing, params.D_opposing).delta
    return eta, g_out, g_nb, g_opp


def square_case_split(params: SquareParams | None = None, *,
                      samples: int = 100_000, target: float | None = None,
                      check_geometry: bool = True) -> SquareCertificate:
    params = params or SquareParams()
    if target is None:
        target = TARGET if params == SquareParams() else 0.0
    eta, g_out, g_nb, g_opp = square_gains(params)
    failures: list[str] = []
    containment = None
    nb_w = opp_w = True
    if check_geometry:
        containment = containment_checks(params, samples)
        if not containment.neighbor_ok:
            failures.append(
                f"R_0 u R_1 reaches {containment.neighbor_max_distance:.6f} from its "
                f"center, beyond radius {params.neighbor_radius}")
        if not containment.circumdisc_ok:
            failures.append("Q_zeta is not inside the circumdisc of Q")
        nb_w = strip_witness_square(params, "neighboring")
        opp_w = strip_witness_square(params, "opposing")
        if not nb_w:
            failures.append("neighboring regions are not strip-separated")
        if not opp_w:
            failures.append("opposing regions are not strip-separated")
    final = min(g_out, g_nb, g_opp)
    if final <= target:
        failures.append(f"final bound {final:.6e} does not exceed target {target:.6e}")
    return SquareCertificate(params, eta, g_out, g_nb, g_opp, containment,
                             nb_w, opp_w, final, target, failures)
