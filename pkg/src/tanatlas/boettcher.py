"""Boettcher coordinates at the superattracting origin, dynamic and parameter rays.

The coordinate is computed for the monic conjugate h(z) = mu^(pq)
tan^p((z/mu)^q) = z^(pq) + ... (mu the principal (pq-1)-th root of lambda,
sigma(z) = mu z the conjugacy), through the infinite product

    phi(z) = z * prod_n ( h^(n+1)(z) / (h^n(z))^m )^(m^-(n+1)),   m = pq,

with every fractional power taken as exp(m^-(n+1) * Log(ratio)) for the
principal Log.  Written this way the functional equation
phi(h(z)) = phi(z)^m holds exactly (the telescoping is an identity of
exponentials), phi(z)/z -> 1 at 0, and the product converges wherever the
orbit falls into the origin's trap, which extends the coordinate well
beyond the initial disk.  Convergence failure is the (conservative)
numerical boundary of the domain.

Parameter-plane maps: for a shift-locus parameter, lambda -> phi_lambda(v)
evaluates the coordinate of the asymptotic value; the reported value is
divided by i^p so that the ray of angle 0 is the positive real lambda axis
(the map still vanishes to order pq/(pq-1) at 0 and is proper onto the
disk).  For capture index n >= 1 the map is psi(lambda) =
phi_lambda(f^n(v)), zero exactly at component centers.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .core import FamilyParams, evaluate, is_bad
from .orbits import trap_radius as validated_trap_radius


class OutsideDomainError(ValueError):
    """The orbit is not attracted to 0, or the pullback met a singular value."""


class NotInCaptureError(ValueError):
    """Parameter is not in the required capture regime."""

    def __init__(self, msg, n=None):
        super().__init__(msg)
        self.n = n


class ContinuationLostError(RuntimeError):
    """Newton continuation failed even after bisecting the s-step."""


@dataclass(frozen=True)
class BoettcherContext:
    params: FamilyParams
    mu: complex
    trap_radius: float        # monic-plane radius with |h(z)| < |z|/2 certified
    product_terms: int = 60
    decay_constant: float = field(default=0.0)

    @classmethod
    def for_params(cls, params: FamilyParams, product_terms: int = 60):
        r_f = validated_trap_radius(params)
        r_h = abs(params.mu) * r_f  # sigma scales the certified disk
        ctx = cls(params=params, mu=params.mu, trap_radius=r_h,
                  product_terms=product_terms)
        object.__setattr__(ctx, "decay_constant", _measure_decay(ctx))
        return ctx


def monic_evaluate(ctx: BoettcherContext, z: complex) -> complex:
    """h(z) = mu * f(z/mu) = z^(pq) + ... near 0."""
    return ctx.mu * evaluate(ctx.params, z / ctx.mu)


def _measure_decay(ctx) -> float:
    """Largest |factor - 1| / |z|^(pq) over probe points in the trap disk;
    logs the super-exponential decay promised by the monic normal form."""
    m = ctx.params.m
    worst = 0.0
    for k in range(8):
        z = cmath.rect(0.4 * ctx.trap_radius, 2 * math.pi * k / 8)
        zm = 1 + 0j
        for _ in range(m):
            zm *= z
        h1 = monic_evaluate(ctx, z)
        if h1 == 0 or is_bad(h1):
            continue
        worst = max(worst, abs(h1 / zm - 1) / max(1e-300, abs(z)) ** (m - 1))
    return worst


def boettcher_coord(ctx: BoettcherContext, z: complex) -> complex:
    """Boettcher coordinate of the monic conjugate at z (monic plane).

    Satisfies phi(h(z)) = phi(z)^(pq) to rounding and phi(z)/z -> 1 at 0.
    Raises OutsideDomainError when the forward orbit of z under h is not
    attracted to 0 within the truncation budget or hits a precritical point.
    """
    if z == 0:
        return 0j
    if is_bad(z):
        raise OutsideDomainError("z is not finite")
    m = ctx.params.m
    stop = 1e-9 * abs(ctx.mu)
    acc = cmath.log(z)
    zn = z
    weight = 1.0
    for _ in range(ctx.product_terms):
        if abs(zn) < stop:
            return cmath.exp(acc)
        zn1 = monic_evaluate(ctx, zn)
        if zn1 == 0:
            raise OutsideDomainError("pullback met a precritical point")
        if is_bad(zn1):
            raise OutsideDomainError("orbit left the plane (pole hit)")
        znm = 1 + 0j
        for _ in range(m):
            znm *= zn
        lf = cmath.log(zn1 / znm)
        weight /= m
        acc += weight * lf
        # tail is negligible only once the orbit is certified attracted
        if abs(zn1) < ctx.trap_radius and abs(lf) * weight < 1e-16:
            return cmath.exp(acc)
        zn = zn1
    raise OutsideDomainError(
        f"orbit not attracted to 0 within {ctx.product_terms} product terms")


def boettcher_coord_f(ctx: BoettcherContext, z: complex) -> complex:
    """Coordinate in the family plane: phi_lambda(z) = phi_h(mu z)."""
    return boettcher_coord(ctx, ctx.mu * z)


def _ipow(n: int) -> complex:
    return (1 + 0j, 1j, -1 + 0j, -1j)[n % 4]


def param_phi(lam: complex, p: int, q: int, product_terms: int = 60) -> complex:
    """The shift-locus coordinate lambda -> phi_lambda(v_lambda) / i^p.

    Real positive on the segment (0, t*), modulus in (0, 1), degree
    pq/(pq-1) vanishing at lambda = 0.  Raises NotInCaptureError when the
    asymptotic value is not attracted to 0 (the product cannot converge);
    genuine membership of the single unbounded shift-locus component is the
    caller's responsibility (classify_parameter in exact mode checks it).
    """
    params = FamilyParams(lam, p, q)
    ctx = BoettcherContext.for_params(params, product_terms)
    try:
        val = boettcher_coord_f(ctx, params.v)
    except OutsideDomainError as exc:
        raise NotInCaptureError(f"lambda={lam} is not a capture-0 parameter: {exc}",
                                n=0) from exc
    return val / _ipow(p)


def param_psi(lam: complex, p: int, q: int, n: int, product_terms: int = 60) -> complex:
    """Capture-component coordinate psi(lambda) = phi_lambda(f^n(v)), n >= 1.

    Zero exactly at component centers.  Raises NotInCaptureError when the
    n-th image of the asymptotic value is not attracted to 0.
    """
    if n < 1:
        raise ValueError("param_psi needs n >= 1; use param_phi for n = 0")
    params = FamilyParams(lam, p, q)
    z = params.v
    for _ in range(n):
        z = evaluate(params, z)
        if is_bad(z):
            raise NotInCaptureError(f"orbit of v hits infinity before step {n}", n=n)
    if z == 0:
        return 0j
    ctx = BoettcherContext.for_params(params, product_terms)
    try:
        return boettcher_coord_f(ctx, z)
    except OutsideDomainError as exc:
        raise NotInCaptureError(f"lambda={lam} is not a capture parameter: {exc}",
                                n=n) from exc


@dataclass(frozen=True)
class RayPoint:
    s: float
    theta: float
    point: complex   # dynamic-plane z (monic coordinates) or parameter lambda


@dataclass(frozen=True)
class RayTrace:
    theta: float
    points: list
    landing: complex
    landed: bool
    max_residual: float
    final_gap: float   # |last - previous|, the Cauchy contraction measure


def _estimate_landing(pts):
    """Landing point from the ray tail.

    Geometric (Aitken-type) extrapolation is applied only when the last
    difference ratios are stable; otherwise the final point is already the
    best estimate (the tail is super-geometric for regular boundary points).
    """
    if len(pts) < 3:
        return pts[-1], False
    tail = pts[-8:] if len(pts) >= 8 else pts[:]
    x2, x1, x0 = tail[-1], tail[-2], tail[-3]
    d1, d2 = x1 - x0, x2 - x1
    scale = 1 + abs(x2)
    if abs(d1) < 1e-14 * scale:
        return x2, True
    r = d2 / d1
    stable = False
    if len(tail) >= 4 and abs(r) < 0.95:
        d0 = x0 - tail[-4]
        if abs(d0) > 1e-14 * scale:
            stable = abs(d1 / d0 - r) < 0.15
    if stable:
        est = x2 + d2 * r / (1 - r)
        landed = abs(d2 * r / (1 - r)) < 1e-5 * scale
        return est, landed
    return x2, abs(d2) < 1e-6 * scale


def _newton_trace(coord, seed, theta, s_min, steps, s_end, residual_tol=1e-11,
                  accept_tol=1e-9, max_newton=60):
    """March coord(x) = s e^(2 pi i theta) over a geometric s-grid.

    coord must be holomorphic in its argument; derivative is taken by
    central differences.  Each failed target bisects the s-step up to 20
    times before ContinuationLostError.
    """
    target_dir = cmath.exp(2j * math.pi * theta)
    ratio = (s_end / s_min) ** (1.0 / steps)
    pts = []
    x = seed
    s_prev = None
    s = s_min
    max_resid = 0.0
    k = 0
    while k <= steps:
        tgt = s * target_dir
        xt, resid = _newton_solve(coord, x, tgt, residual_tol, max_newton)
        if xt is None or resid > accept_tol:
            # bisect the s-step toward the last accepted point
            ok = False
            if s_prev is not None:
                s_lo, s_hi = s_prev, s
                x_try = x
                for _ in range(20):
                    s_mid = math.sqrt(s_lo * s_hi)
                    xm, rm = _newton_solve(coord, x_try, s_mid * target_dir,
                                           residual_tol, max_newton)
                    if xm is not None and rm <= accept_tol:
                        s_lo, x_try = s_mid, xm
                    else:
                        s_hi = s_mid
                    if s_hi / s_lo < 1 + 1e-12:
                        break
                xt, resid = _newton_solve(coord, x_try, tgt, residual_tol, max_newton)
                ok = xt is not None and resid <= accept_tol
            if not ok:
                raise ContinuationLostError(
                    f"continuation lost at s={s:.6g}, theta={theta}")
        x = xt
        max_resid = max(max_resid, resid)
        pts.append(RayPoint(s=s, theta=theta, point=x))
        s_prev = s
        s = min(s * ratio, s_end)
        k += 1
        if s_prev >= s_end:
            break
    values = [pt.point for pt in pts]
    landing, landed = _estimate_landing(values)
    gap = abs(values[-1] - values[-2]) if len(values) > 1 else math.inf
    return RayTrace(theta=theta, points=pts, landing=landing, landed=landed,
                    max_residual=max_resid, final_gap=gap)


def _coord_try(coord, x):
    try:
        return coord(x)
    except (OutsideDomainError, NotInCaptureError, ValueError, ZeroDivisionError,
            OverflowError):
        return None


def _newton_solve(coord, x0, target, tol, max_steps):
    """(solution, residual) or (None, inf) if Newton failed.

    The derivative stencil falls back to one-sided differences and steps are
    halved when an iterate leaves the coordinate's domain; rays run close to
    the domain boundary at the far end of the s-grid.
    """
    x = x0
    fx = _coord_try(coord, x)
    if fx is None:
        return None, math.inf
    best, best_resid = x, abs(fx - target)
    for _ in range(max_steps):
        g = fx - target
        resid = abs(g)
        if resid < best_resid:
            best, best_resid = x, resid
        if resid < tol:
            return x, resid
        h = 1e-7 * (1 + abs(x))
        fp = _coord_try(coord, x + h)
        fm = _coord_try(coord, x - h)
        if fp is not None and fm is not None:
            d = (fp - fm) / (2 * h)
        elif fm is not None:
            d = (fx - fm) / h
        elif fp is not None:
            d = (fp - fx) / h
        else:
            return best, best_resid
        if d == 0 or is_bad(d):
            return best, best_resid
        step = g / d
        xn = x - step
        fn = _coord_try(coord, xn)
        halvings = 0
        while fn is None and halvings < 10:
            step /= 2
            xn = x - step
            fn = _coord_try(coord, xn)
            halvings += 1
        if fn is None:
            return best, best_resid
        x, fx = xn, fn
    return best, best_resid


def trace_dynamic_ray(ctx: BoettcherContext, theta: float, s_min: float = 0.05,
                      steps: int = 80, s_end: float = 1 - 1e-4) -> RayTrace:
    """Ray of angle theta in the immediate basin, monic-plane coordinates.

    Solves boettcher_coord(z) = s e^(2 pi i theta) along a geometric s-grid
    from s_min toward s_end; family-plane points are z / mu.  For shift-locus
    parameters the coordinate is injective only below the level of the
    asymptotic value, |phi(v)|; past it the continuation follows whichever
    branch Newton reaches, or raises ContinuationLostError at a fold.
    """
    seed = s_min * cmath.exp(2j * math.pi * theta)
    return _newton_trace(lambda z: boettcher_coord(ctx, z), seed, theta,
                         s_min, steps, s_end)


def trace_param_ray(p: int, q: int, n: int, theta: float, seed: complex,
                    s_min: float = 0.05, steps: int = 80,
                    s_end: float = 1 - 1e-4) -> RayTrace:
    """Parameter ray of angle theta in the shift locus (n = 0) or a capture
    component (n >= 1, via psi); seed must lie inside the component."""
    if n == 0:
        coord = lambda lam: param_phi(lam, p, q)
    else:
        coord = lambda lam: param_psi(lam, p, q, n)
    # start the grid from the seed's own level when it is already deeper
    try:
        s0 = abs(coord(seed))
    except NotInCaptureError as exc:
        raise ContinuationLostError(f"seed {seed} is not inside the component") from exc
    s_start = max(s_min, min(0.9, s0))
    return _newton_trace(coord, seed, theta, s_start, steps, s_end)
