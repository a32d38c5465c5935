"""Explicit lower bound for barriers of the unit disc.

Chord regions ``R_i`` of width ``1 - t`` sit near the four points ``x_i`` inside
``(1 + r) U``.  Two of them must carry barrier pieces that face each other,
which wastes length.  Balancing that waste against the length allowed outside
``(1 + r) U`` gives a self-consistent excess ``delta(r, t)``.  This module
solves for it, maximizes it over ``(r, t)`` and assembles the certificate.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .geometry import Vec2, centered_strip, separation_gap, strip_separates
from .kzeta import disc_endpoints, disc_w, disc_zeta_of_r
from .waste_bounds import corollary1_gain, corollary2_gain, prop2_gain

log = logging.getLogger(__name__)

LAMBDA = math.pi / 8
R_MAX = 1.0 / math.cos(LAMBDA) - 1.0
GAMMA_NEIGHBOR = 0.124
R0, T0 = 0.001067, 0.965763
DELTA_TARGET = 1.076e-6

_SCAN = 64
_BISECT = 200
_RTOL = 1e-12


class InfeasibleParameters(ValueError):
    pass


@dataclass(frozen=True)
class DiscParams:
    r: float = R0
    t: float = T0
    lam: float = LAMBDA
    gamma_neighbor: float | None = GAMMA_NEIGHBOR

    def __post_init__(self) -> None:
        check_feasible(self.r, self.t)


def check_feasible(r: float, t: float) -> None:
    if not 0.0 <= r < R_MAX:
        raise InfeasibleParameters(f"r = {r} outside [0, {R_MAX:.6f})")
    if not t > (1.0 + r) * math.cos(LAMBDA):
        raise InfeasibleParameters(
            f"t = {t} must exceed (1+r) cos(pi/8) = {(1.0 + r) * math.cos(LAMBDA):.6f}")
    if t > 1.0:
        raise InfeasibleParameters(f"t = {t} exceeds 1")


def separation_denominator(r, t):
    """``2t sin(pi/8) - 2w cos(pi/8)``; positive exactly when ``t > (1+r) cos(pi/8)``."""
    w = np.sqrt(np.maximum((1.0 + r) ** 2 - np.asarray(t) ** 2, 0.0))
    return 2 * t * math.sin(LAMBDA) - 2 * w * math.cos(LAMBDA)


def is_feasible(r, t):
    r = np.asarray(r, float)
    t = np.asarray(t, float)
    with np.errstate(invalid="ignore"):
        den = separation_denominator(r, t)
    return ((r >= 0) & (r < R_MAX) & (t > (1.0 + r) * math.cos(LAMBDA))
            & (t <= 1.0) & (den > 0))


def w_of(r: float, t: float) -> float:
    return disc_w(r, t)


def alpha_plus(r: float, t: float) -> float:
    """Angle of the line through ``p'_{0+}`` and ``p'_{2-}``."""
    if t > 1.0 + r:
        raise ValueError(f"t = {t} exceeds 1 + r")
    return math.acos(t / (1.0 + r))


def _h(r, t, eta):
    w = np.sqrt(np.maximum((1.0 + r) ** 2 - t * t, 0.0))
    s, c = math.sin(LAMBDA), math.cos(LAMBDA)
    return (eta + 2 * t * c + 2 * w * s) / (2 * t * s - 2 * w * c)


def h_of(r: float, t: float, eta: float) -> float:
    """Lower limit for ``cot(gamma)`` such that the opposing strips fit."""
    w = w_of(r, t)
    den = 2 * t * math.sin(LAMBDA) - 2 * w * math.cos(LAMBDA)
    if not den > 0:
        raise InfeasibleParameters(
            f"denominator {den:.3e} <= 0 at r={r}, t={t}: regions not pi/8-separated")
    return float(_h(r, t, eta))


def gamma_star(r: float, t: float, eta: float) -> float:
    return math.atan2(1.0, h_of(r, t, eta))


def opposing_gain(r: float, t: float, eta: float) -> float:
    """``W^2 / 2D`` with ``W = eta / sqrt(1 + h^2)`` and ``D = 2(1 + r)``."""
    h = h_of(r, t, eta)
    return eta * eta / ((1.0 + h * h) * 4.0 * (1.0 + r))


def eta_prime(r, t, delta):
    """Lower bound for eta once ``|B| - pi <= delta`` (unclamped, array-friendly)."""
    return 0.5 * (1.0 - t - (1.0 + r) / r * delta)


def eta0_prime(r: float, t: float, delta: float) -> float:
    if r <= 0:
        raise ValueError("r must be positive")
    return max(float(eta_prime(r, t, delta)), 0.0)


def fixed_point_residual(delta, r, t):
    """``eta'(delta)^2 - 4(1+r)(1+h'(delta)^2) delta``; positive at ``delta = 0``."""
    e = eta_prime(r, t, delta)
    h = _h(r, t, e)
    return e * e - 4.0 * (1.0 + r) * (1.0 + h * h) * delta


def delta_max(r, t):
    """Where ``eta'`` reaches 0."""
    return r * (1.0 - t) / (1.0 + r)


def _solve_many(r: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Smallest root of the residual for feasible arrays ``r, t`` (r > 0)."""
    dmax = delta_max(r, t)
    frac = np.arange(1, _SCAN + 1) / _SCAN
    nodes = dmax[..., None] * frac
    vals = fixed_point_residual(nodes, r[..., None], t[..., None])
    # residual at dmax is -4(1+r)(1+h^2) dmax < 0, so a sign change exists
    k = np.argmax(vals <= 0.0, axis=-1)
    hi = np.take_along_axis(nodes, k[..., None], -1)[..., 0]
    lo = np.where(k > 0, hi - dmax / _SCAN, 0.0)
    for _ in range(_BISECT):
        if np.all(hi - lo <= _RTOL * hi):
            break
        mid = 0.5 * (lo + hi)
        pos = fixed_point_residual(mid, r, t) > 0.0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
    return np.where(dmax > 0, 0.5 * (lo + hi), 0.0)


@dataclass(frozen=True)
class FixedPoint:
    delta: float
    vacuous: bool


def solve_fixed_point(r: float, t: float) -> FixedPoint:
    check_feasible(r, t)
    if r == 0.0 or t >= 1.0:
        return FixedPoint(0.0, True)
    d = float(_solve_many(np.array([r]), np.array([t]))[0])
    return FixedPoint(d, d <= 0.0)


def delta_fixed_point(r: float, t: float) -> float:
    return solve_fixed_point(r, t).delta


def delta_grid(r, t, threads: int = 1) -> np.ndarray:
    """``delta(r, t)`` elementwise; infeasible cells give ``-inf``."""
    r = np.asarray(r, float)
    t = np.asarray(t, float)
    r, t = np.broadcast_arrays(r, t)
    out = np.full(r.shape, -np.inf)
    ok = is_feasible(r, t)
    live = ok & (r > 0) & (t < 1.0)
    out[ok] = 0.0
    idx = np.flatnonzero(live)
    if idx.size:
        rf, tf = r.ravel()[idx], t.ravel()[idx]
        if threads > 1 and idx.size > 4096:
            chunks = np.array_split(np.arange(idx.size), threads)
            with ThreadPoolExecutor(threads) as ex:
                parts = list(ex.map(lambda c: _solve_many(rf[c], tf[c]), chunks))
            vals = np.concatenate(parts)
        else:
            vals = _solve_many(rf, tf)
        flat = out.ravel()
        flat[idx] = vals
        out = flat.reshape(r.shape)
    return out


@dataclass(frozen=True)
class OptimumResult:
    r: float
    t: float
    delta: float
    grid_best: float


def optimize(r_range: tuple[float, float] = (0.0, R_MAX),
             t_range: tuple[float, float] = (math.cos(LAMBDA), 1.0),
             grid: tuple[int, int] = (200, 200), refine_iters: int = 40,
             threads: int = 1) -> OptimumResult:
    """Maximize ``delta(r, t)``: coarse grid, then a shrinking-box stencil search.

    Grid ties go to the lexicographically smallest ``(r, t)``.
    """
    (r_lo, r_hi), (t_lo, t_hi) = r_range, t_range
    if r_lo > r_hi or t_lo > t_hi:
        raise ValueError("empty parameter range")
    n_r, n_t = grid
    rs = np.linspace(r_lo, r_hi, n_r) if r_hi > r_lo else np.array([r_lo])
    ts = np.linspace(t_lo, t_hi, n_t) if t_hi > t_lo else np.array([t_lo])
    R, T = np.meshgrid(rs, ts, indexing="ij")
    D = delta_grid(R, T, threads)
    if not np.isfinite(D).any():
        raise InfeasibleParameters("no feasible (r, t) in the given ranges")
    k = np.unravel_index(int(np.argmax(D)), D.shape)
    r_best, t_best, d_best = float(R[k]), float(T[k]), float(D[k])
    grid_best = d_best

    step_r = (r_hi - r_lo) / max(len(rs) - 1, 1)
    step_t = (t_hi - t_lo) / max(len(ts) - 1, 1)
    offsets = np.array([-1.0, 0.0, 1.0])
    for _ in range(refine_iters):
        if step_r == 0.0 and step_t == 0.0:
            break
        while True:
            rr = np.clip(r_best + step_r * offsets, r_lo, r_hi)
            tt = np.clip(t_best + step_t * offsets, t_lo, t_hi)
            RR, TT = np.meshgrid(rr, tt, indexing="ij")
            DD = delta_grid(RR, TT)
            j = np.unravel_index(int(np.argmax(DD)), DD.shape)
            if DD[j] > d_best:
                r_best, t_best, d_best = float(RR[j]), float(TT[j]), float(DD[j])
            else:
                break
        step_r *= 0.5
        step_t *= 0.5
    return OptimumResult(r_best, t_best, d_best, grid_best)


@dataclass(frozen=True)
class NeighborResult:
    gamma: float
    separation_lhs: float
    required: float
    D: float
    numerator: float
    gain: float
    ok: bool


def neighbor_separation(r: float, t: float, gamma: float) -> float:
    """``p_{0+}(lam - gamma) - p_{1-}(lam - gamma) = sqrt2 (t sin - w cos)``."""
    w = w_of(r, t)
    b = LAMBDA - gamma
    return math.sqrt(2.0) * (t * math.sin(b) - w * math.cos(b))


def optimal_neighbor_gamma(r: float, t: float, eta: float) -> float:
    """Largest gamma whose neighboring strips still fit (bisection)."""
    f = lambda g: neighbor_separation(r, t, g) - eta * math.sin(g)
    lo, hi = 0.0, LAMBDA
    if f(lo) < 0:
        return 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) >= 0:
            lo = mid
        else:
            hi = mid
    return lo


def neighboring_gain(r: float, t: float, eta0p: float,
                     gamma: float = GAMMA_NEIGHBOR) -> NeighborResult:
    """Waste when the facing pieces lie in neighboring regions ``R_0, R_1``.

    ``R_0 u R_1`` fits in the disc around the midpoint of ``p_{0-}`` and
    ``p_{1-}`` of radius ``(t + w)/sqrt2``, so ``D = sqrt2 (t + w)``.
    """
    check_feasible(r, t)
    if eta0p < 0:
        raise ValueError("eta0p must be >= 0")
    w = w_of(r, t)
    lhs = neighbor_separation(r, t, gamma)
    required = eta0p * math.sin(gamma)
    D = math.sqrt(2.0) * (t + w)
    numerator = required * required / 2.0
    gain = corollary2_gain(eta0p, gamma, D).delta
    log.debug("neighboring case: gain = %.6e / D with D = %.9f", numerator, D)
    return NeighborResult(gamma, lhs, required, D, numerator, gain, lhs >= required)


def neighbor_disc(r: float, t: float) -> tuple[Vec2, float]:
    """Center ``m`` and radius ``rho`` of the disc holding ``R_0 u R_1``."""
    _, p0m = disc_endpoints(r, t, 0)
    _, p1m = disc_endpoints(r, t, 1)
    m = (p0m + p1m) * 0.5
    return m, (m - p0m).norm()


def region_points(r: float, t: float, i: int, n: int = 257) -> list[Vec2]:
    """Boundary samples of ``R_i = {x in (1+r)U : t <= <x, x_i> <= 1}``."""
    rad = 1.0 + r
    base = math.pi / 4 + (i % 4) * math.pi / 2
    half_in = math.acos(t / rad)
    half_out = math.acos(min(1.0 / rad, 1.0))
    pts = []
    for th in np.linspace(-half_in, half_in, n):
        if abs(th) >= half_out:
            pts.append(Vec2(rad * math.cos(base + th), rad * math.sin(base + th)))
    u = Vec2(math.cos(base), math.sin(base))
    v = Vec2(-u.y, u.x)
    w_in = math.sqrt(max(rad * rad - t * t, 0.0))
    w_out = math.sqrt(max(rad * rad - 1.0, 0.0))
    for s in np.linspace(-1.0, 1.0, n):
        pts.append(u * t + v * (s * w_in))
        pts.append(u * 1.0 + v * (s * w_out))
    return pts


def opposing_strip_witness(r: float, t: float, eta: float) -> bool:
    """Strips of width ``eta sin(gamma*)`` at ``+-(lam - gamma*)`` separate ell'_0, ell'_2."""
    g = gamma_star(r, t, eta)
    w = w_of(r, t)
    l0 = [Vec2(t, w), Vec2(t, -w)]
    l2 = [Vec2(-t, w), Vec2(-t, -w)]
    width = eta * math.sin(g)
    if width <= 0:
        return True
    ok = True
    for sign in (1.0, -1.0):
        beta = sign * (LAMBDA - g)
        upper, lower = (l0, l2) if separation_gap(l0, l2, beta) >= 0 else (l2, l0)
        strip = centered_strip(upper, lower, beta, width)
        ok &= strip_separates(strip, upper, lower, eps=1e-12)
    return ok


def neighbor_strip_witness(r: float, t: float, eta: float, gamma: float) -> bool:
    width = eta * math.sin(gamma)
    if width <= 0:
        return True
    l0 = list(disc_endpoints(r, t, 0))
    l1 = list(disc_endpoints(r, t, 1))
    ok = True
    for sign in (1.0, -1.0):
        beta = sign * (LAMBDA - gamma)
        upper, lower = (l0, l1) if separation_gap(l0, l1, beta) >= 0 else (l1, l0)
        strip = centered_strip(upper, lower, beta, width)
        ok &= strip_separates(strip, upper, lower, eps=1e-12)
    return ok


@dataclass
class DiscCertificate:
    params: DiscParams
    delta: float
    vacuous: bool
    zeta: float
    w: float
    eta_prime: float
    h_prime: float
    gamma_star: float
    W: float
    D_opposing: float
    opposing_gain: float
    neighbor_gamma: float
    neighbor_separation: float
    neighbor_required: float
    D_neighbor: float
    neighbor_numerator: float
    neighboring_gain: float
    outside_regime_ok: bool
    opposing_witness: bool
    neighbor_witness: bool
    antipodal_distance: float
    final_bound: float
    target: float
    search: dict | None = None
    notes: list[str] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        d = asdict(self)
        d["valid"] = self.valid
        return d


def disc_lower_bound(r: float | None = None, t: float | None = None, *,
                     search: bool = False,
                     gamma_neighbor: float | None = GAMMA_NEIGHBOR,
                     target: float | None = None,
                     grid: tuple[int, int] = (200, 200), refine_iters: int = 40,
                     threads: int = 1) -> DiscCertificate:
    """Full disc certificate at ``(r, t)`` (the reference point by default).

    With ``search=True`` the point comes from :func:`optimize`.  ``target``
    defaults to ``1.076e-6`` at the reference or searched point and to 0
    elsewhere.  ``gamma_neighbor=None`` uses the widest admissible gamma.
    """
    search_info = None
    if search:
        opt = optimize(grid=grid, refine_iters=refine_iters, threads=threads)
        r, t = opt.r, opt.t
        search_info = asdict(opt)
    default_point = r is None and t is None
    r = R0 if r is None else r
    t = T0 if t is None else t
    if target is None:
        target = DELTA_TARGET if (default_point or search) else 0.0
    params = DiscParams(r, t, LAMBDA, gamma_neighbor)
    failures: list[str] = []
    notes: list[str] = []

    fp = solve_fixed_point(r, t)
    delta = fp.delta
    if fp.vacuous:
        failures.append("fixed point is vacuous (eta' vanishes at delta = 0)")
    w = w_of(r, t)
    eta0 = eta0_prime(r, t, delta) if r > 0 else 0.0
    hp = h_of(r, t, eta0)
    g_star = math.atan2(1.0, hp)
    W = eta0 / math.sqrt(1.0 + hp * hp)
    D_opp = 2.0 * (1.0 + r)
    opp = opposing_gain(r, t, eta0) if eta0 > 0 else 0.0
    if g_star >= LAMBDA:
        failures.append(f"gamma* = {g_star} is not below lambda")
    if abs(opp - delta) > 1e-9 * max(delta, 1e-300):
        failures.append(f"opposing gain {opp} does not reproduce delta {delta}")

    # a barrier with |B| - pi < delta has |B_out| < (1+r)/r delta, hence eta >= eta'
    zeta = disc_zeta_of_r(r)
    outside_ok = True
    if r > 0:
        bout = (1.0 + r) / r * delta
        via_prop2 = prop2_gain(bout, r).delta
        via_cor1 = corollary1_gain(bout, zeta).delta
        outside_ok = (abs(via_prop2 - delta) <= 1e-12 * max(delta, 1e-300)
                      and abs(via_cor1 - delta) <= 1e-9 * max(delta, 1e-300)
                      and eta0 >= 0.0)
    if not outside_ok:
        failures.append("outside regime: the length threshold does not reproduce delta")

    opp_witness = opposing_strip_witness(r, t, eta0)
    if not opp_witness:
        failures.append("opposing strips do not separate ell'_0 and ell'_2")

    gamma = gamma_neighbor
    if gamma is None:
        gamma = optimal_neighbor_gamma(r, t, eta0)
    nb = neighboring_gain(r, t, eta0, gamma)
    if not nb.ok and gamma_neighbor is not None:
        gamma = optimal_neighbor_gamma(r, t, eta0)
        notes.append(f"gamma = {gamma_neighbor} does not separate R_0, R_1 here; "
                     f"using the widest admissible gamma = {gamma:.9f}")
        nb = neighboring_gain(r, t, eta0, gamma)
    if not nb.ok or gamma <= 0.0:
        failures.append("neighboring regions are not strip-separated")
    nb_witness = neighbor_strip_witness(r, t, eta0, gamma)
    if not nb_witness:
        failures.append("neighboring strips do not separate ell_0 and ell_1")
    m, rho = neighbor_disc(r, t)
    if abs(2.0 * rho - nb.D) > 1e-12:
        failures.append("neighbor disc diameter disagrees with sqrt2 (t + w)")
    outside = [p for i in (0, 1) for p in region_points(r, t, i)
               if (p - m).norm() > rho + 1e-12]
    if outside:
        failures.append(f"R_0 u R_1 leaves the neighbor disc at {outside[0]}")

    p0p, _ = disc_endpoints(r, t, 0)
    _, p2m = disc_endpoints(r, t, 2)
    antipodal = (p0p - p2m).norm()

    final = min(opp, nb.gain)
    if nb.gain < delta:
        # min(delta, gain) is still a valid bound: both cases are covered
        notes.append(f"neighboring case is binding: {nb.gain:.6e} < delta = {delta:.6e}")
    if final < target:
        failures.append(f"final bound {final:.6e} below target {target:.6e}")

    return DiscCertificate(
        params=params, delta=delta, vacuous=fp.vacuous, zeta=zeta, w=w,
        eta_prime=eta0, h_prime=hp, gamma_star=g_star, W=W, D_opposing=D_opp,
        opposing_gain=opp, neighbor_gamma=gamma,
        neighbor_separation=nb.separation_lhs, neighbor_required=nb.required,
        D_neighbor=nb.D, neighbor_numerator=nb.numerator,
        neighboring_gain=nb.gain, outside_regime_ok=outside_ok,
        opposing_witness=opp_witness, neighbor_witness=nb_witness,
        antipodal_distance=antipodal, final_bound=final, target=target,
        search=search_info, notes=notes, failures=failures)
