"""Distinguished parameters: centers, Misiurewicz points, parabolic
thresholds, virtual-cycle parameters, and the symmetry conjugacy checks.

All Newton searches in lambda use the exact chain-rule derivative of the
iterated asymptotic-value orbit,

    d/dlambda f^(k+1)(v) = tan^p(z_k^q) + f'(z_k) * d/dlambda f^k(v),
    d/dlambda v = i^p,

which is stable over deep compositions (finite differences in lambda serve
as the independent cross-check in the test suite).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .core import (
    FamilyParams,
    derivative,
    evaluate,
    is_bad,
    pole,
    sector_roots,
)
from .orbits import NoConvergenceError, t_star


class ParityUnsupportedError(ValueError):
    pass


class WrongOrderError(ValueError):
    """A smaller iterate of the asymptotic value already vanishes."""


@dataclass(frozen=True)
class Landmark:
    kind: str               # center | misiurewicz | parabolic | virtual_cycle
    lam: complex
    order: int
    certificate: dict = field(default_factory=dict)


def _ipow(n: int) -> complex:
    return (1 + 0j, 1j, -1 + 0j, -1j)[n % 4]


def _orbit_and_dlam(lam: complex, p: int, q: int, n: int):
    """(f^n(v), d/dlambda f^n(v)) by the chain-rule recurrence."""
    params = FamilyParams(lam, p, q)
    z = params.v
    dz = _ipow(p)
    for _ in range(n):
        fz = evaluate(params, z)
        if is_bad(fz):
            return fz, complex(math.inf, math.inf)
        # df/dlambda at fixed z equals f(z)/lambda
        dz = fz / lam + derivative(params, z) * dz
        z = fz
        if is_bad(dz):
            return z, complex(math.inf, math.inf)
    return z, dz


def _center_merit(lam: complex, p: int, q: int, n: int):
    """(R, R') for R(lambda) = tan((f^(n-1)(v))^q).

    f^n(v) = lambda R^p vanishes to order p at a center; R has the same
    zeros but simple, so Newton stays quadratic and the defining residual
    |f^n(v)| certifies far below tolerance.
    """
    u, du = _orbit_and_dlam(lam, p, q, n - 1)
    if is_bad(u) or is_bad(du):
        return complex(math.inf, math.inf), complex(math.inf, math.inf)
    w = u ** q
    r = cmath.tan(w)
    dr = (1.0 / cmath.cos(w)) ** 2 * q * u ** (q - 1) * du
    return r, dr


def find_center(p: int, q: int, n: int, seed: complex, tol: float = 1e-9,
                max_steps: int = 60) -> Landmark:
    """Newton in lambda on f^n(v) = 0; certifies minimality of the order.

    Seeds should come from a parameter scan (cells classified Capture{n});
    Newton basins for deep orders are small.
    """
    if n < 1:
        raise ValueError("center order must be >= 1")
    lam = complex(seed)
    for _ in range(max_steps):
        r, dr = _center_merit(lam, p, q, n)
        if is_bad(r) or is_bad(dr) or dr == 0:
            raise NoConvergenceError(f"center Newton left the domain at {lam}")
        if abs(r) < 1e-14:
            break
        lam = lam - r / dr
    g, _ = _orbit_and_dlam(lam, p, q, n)
    if not abs(g) < tol:
        raise NoConvergenceError(f"center Newton stalled: residual {abs(g):.2e}")
    params = FamilyParams(lam, p, q)
    z = params.v
    for k in range(1, n):
        z = evaluate(params, z)
        if abs(z) < 1e-6:
            raise WrongOrderError(f"f^{k}(v) already vanishes at {lam}")
    return Landmark(kind="center", lam=lam, order=n,
                    certificate={"residual": abs(g)})


def misiurewicz_t_star(p: int, q: int) -> Landmark:
    """The boundary parameter t* = (pi/4)^(1/q) whose asymptotic value lands
    on the repelling fixed point t* with multiplier pq*pi/2 (pq even).

    The landing takes one step when i^p lambda is +-t*, two steps when it is
    +-i t* (the first image is then -t*, which maps to t* by evenness).
    """
    if (p * q) % 2:
        raise ParityUnsupportedError("t* omega_j are Misiurewicz only for pq even")
    ts = t_star(q)
    params = FamilyParams(ts, p, q)
    fixed_residual = abs(evaluate(params, ts) - ts)
    mult = derivative(params, ts)
    z = params.v
    landing = None
    for k in range(1, 3):
        z = evaluate(params, z)
        if abs(z - ts) < 1e-10:
            landing = k
            break
    cert = {
        "fixed_point_residual": fixed_residual,
        "multiplier": mult,
        "multiplier_target": p * q * math.pi / 2,
        "multiplier_residual": abs(mult - p * q * math.pi / 2),
        "landing_steps": landing,
        "landing_residual": abs(z - ts) if landing else math.inf,
    }
    return Landmark(kind="misiurewicz", lam=complex(ts), order=1, certificate=cert)


# --- real tanh auxiliary family g_t(x) = t tanh^p(x^q) --------------------

def tanh_family(t: float, p: int, q: int):
    def g(x: float) -> float:
        return t * math.tanh(x ** q) ** p

    def gp(x: float) -> float:
        th = math.tanh(x ** q)
        sech2 = 1.0 - th * th
        return t * p * th ** (p - 1) * sech2 * q * x ** (q - 1)

    return g, gp


def _fixed_point_merit(p, q):
    # t0 = min over x > 0 of x / tanh^p(x^q); the minimizer is the parabolic point
    def merit(x):
        return x / math.tanh(x ** q) ** p
    return merit


def find_parabolic_t0(p: int, q: int, tol: float = 1e-12):
    """(t0, x0, Landmark): threshold of the real family g_t = t tanh^p(x^q).

    Solves g(x) = x, g'(x) = 1 by damped Newton on the 2x2 system, seeded
    from a coarse sweep of the merit x/tanh^p(x^q).  Certifies t0 >= 1 > t*
    and the bracketing behavior at t0 +- 1e-3 (below: the asymptotic value
    b_t = t is attracted to 0; above: a non-zero attracting fixed point).
    """
    merit = _fixed_point_merit(p, q)
    xs = [0.05 * k for k in range(4, 200)]
    x = min(xs, key=merit)
    t = merit(x)
    # damped Newton on F = (g(x) - x, g'(x) - 1), numeric Jacobian
    for _ in range(80):
        g, gp = tanh_family(t, p, q)
        f1 = g(x) - x
        f2 = gp(x) - 1.0
        if abs(f1) < tol and abs(f2) < tol:
            break
        h = 1e-7
        g1, gp1 = tanh_family(t + h, p, q)
        g2, gp2 = tanh_family(t, p, q)
        j11 = (g1(x) - g(x)) / h          # dF1/dt
        j12 = (g2(x + h) - g2(x)) / h - 1.0   # dF1/dx
        j21 = (gp1(x) - gp(x)) / h        # dF2/dt
        j22 = (gp2(x + h) - gp2(x)) / h   # dF2/dx
        det = j11 * j22 - j12 * j21
        if det == 0:
            raise NoConvergenceError("singular Jacobian in the parabolic search")
        dt = (f1 * j22 - f2 * j12) / det
        dx = (j11 * f2 - j21 * f1) / det
        scale = 1.0
        while scale > 1e-4:
            tn, xn = t - scale * dt, x - scale * dx
            if tn > 0 and xn > 0:
                gn, gpn = tanh_family(tn, p, q)
                if abs(gn(xn) - xn) + abs(gpn(xn) - 1) <= abs(f1) + abs(f2):
                    break
            scale /= 2
        t, x = t - scale * dt, x - scale * dx
    g, gp = tanh_family(t, p, q)
    res_fix = abs(g(x) - x)
    res_mult = abs(gp(x) - 1.0)
    if not (res_fix < 1e-9 and res_mult < 1e-9):
        raise NoConvergenceError(
            f"parabolic Newton stalled: |g(x)-x|={res_fix:.2e}, |g'-1|={res_mult:.2e}")
    delta = 1e-3
    below_attracted = _real_orbit_reaches_zero(t - delta, p, q)
    above_fp = _attracting_fixed_point_above(t + delta, p, q, x)
    cert = {
        "fixed_residual": res_fix,
        "multiplier_residual": res_mult,
        "t_star": t_star(q),
        "ge_one": t >= 1.0,
        "below_goes_to_zero": below_attracted,
        "above_attracting_fp": above_fp is not None,
        "above_fp": above_fp,
    }
    lm = Landmark(kind="parabolic", lam=complex(t), order=1, certificate=cert)
    return t, x, lm


def _real_orbit_reaches_zero(t, p, q, max_iter=100_000):
    g, _ = tanh_family(t, p, q)
    x = t  # the finite asymptotic value of g_t is b_t = t
    for _ in range(max_iter):
        x = g(x)
        if x < 1e-8:
            return True
    return False


def _attracting_fixed_point_above(t, p, q, x0):
    """Bisection for the attracting fixed point in (x0, inf), if any."""
    g, gp = tanh_family(t, p, q)
    lo = x0
    hi = max(4.0 * x0, 16.0)
    if g(lo) - lo <= 0 or g(hi) - hi >= 0:
        return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) - mid > 0:
            lo = mid
        else:
            hi = mid
    xf = 0.5 * (lo + hi)
    if abs(gp(xf)) < 1:
        return xf
    return None


def find_virtual_cycle_param(p: int, q: int, n: int, k: int, j: int,
                             seed: complex | None = None, tol: float = 1e-9) -> Landmark:
    """Parameter with f^(n-1)(v) = infinity (the asymptotic value is a
    prepole of order n - 1); order n >= 2.  Solves f^(n-2)(v) = pole(k, j),
    in closed form for n = 2 and by Newton in lambda otherwise.
    """
    if n < 2:
        raise ValueError("virtual cycle order must be >= 2")
    ref = FamilyParams(1.0, p, q)
    target = pole(ref, k, j)
    if n == 2:
        lam = target / _ipow(p)
    else:
        if seed is None:
            raise ValueError("a seed is required for order > 2")
        lam = complex(seed)
        for _ in range(80):
            g, dg = _orbit_and_dlam(lam, p, q, n - 2)
            g = g - target
            if is_bad(g) or is_bad(dg) or dg == 0:
                raise NoConvergenceError(f"virtual-cycle Newton left the domain at {lam}")
            if abs(g) < tol:
                break
            lam = lam - g / dg
        g, _ = _orbit_and_dlam(lam, p, q, n - 2)
        if not abs(g - target) < tol:
            raise NoConvergenceError("virtual-cycle Newton stalled")
    params = FamilyParams(lam, p, q)
    z = params.v
    for _ in range(n - 1):
        z = evaluate(params, z)
        if is_bad(z):
            break
    inv_residual = 0.0 if is_bad(z) else abs(1.0 / z)
    cert = {"prepole_target": target, "inverse_residual": inv_residual}
    return Landmark(kind="virtual_cycle", lam=lam, order=n, certificate=cert)


def verify_symmetries(p: int, q: int, t: float, samples: int = 200, seed: int = 0):
    """Numerical check of the ray conjugacies of the parameter plane.

    For each j: lambda = t omega_j satisfies
        f_lambda(omega_j z) = (-1)^(j p) omega_j f_t(z)          (pq even)
        f_lambda(i^p omega_j z) = s^p omega_j g_t(z), s = i^(pq) (-1)^j
                                                                  (pq odd)
    and lambda = t xi_j (pq even) satisfies
        f_lambda(eta z) = (s/i)^p eta g_t(z), eta = i^p xi_j, s = eta^q.
    Returns a report dict with the worst residual per case; failures are
    listed, not raised.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    import random

    rng = random.Random(seed)
    roots = sector_roots(q)
    ft = FamilyParams(t, p, q)
    cases = []

    def gt(z):
        # t * tanh^p(z^q) via tan: tanh(w) = -i tan(iw)
        w = z ** q
        return t * (-1j * cmath.tan(1j * w)) ** p

    for j in range(2 * q):
        om = roots.omega[j]
        fl = FamilyParams(t * om, p, q)
        factor = (-1.0) ** (j * p)
        cases.append((f"omega_{j}_tan", fl,
                      lambda z, om=om: om * z,
                      lambda z, c=factor * om: c * evaluate(ft, z)))
        if (p * q) % 2 == 1:
            # conjugacy to the real tanh family along the same ray
            s = _ipow(p * q) * (-1.0) ** j
            cases.append((f"omega_{j}_tanh", fl,
                          lambda z, om=om: _ipow(p) * om * z,
                          lambda z, c=(s ** p) * om: c * gt(z)))
    if (p * q) % 2 == 0:
        for j in range(2 * q):
            xi = roots.xi[j]
            eta = _ipow(p) * xi
            s = eta ** q
            eps = (s / 1j) ** p
            fl = FamilyParams(t * xi, p, q)
            cases.append((f"xi_{j}", fl,
                          lambda z, eta=eta: eta * z,
                          lambda z, c=eps * eta: c * gt(z)))
    report = {"cases": {}, "max_residual": 0.0, "failures": []}
    for name, fl, send, expect in cases:
        worst = 0.0
        for _ in range(samples):
            z = complex(rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2))
            lhs = evaluate(fl, send(z))
            rhs = expect(z)
            if is_bad(lhs) or is_bad(rhs) or abs(rhs) > 1e6:
                continue
            worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
        report["cases"][name] = worst
        report["max_residual"] = max(report["max_residual"], worst)
        if worst > 1e-12:
            report["failures"].append(name)
    return report


def revalidate_center_from_perturbed_seed(lm: Landmark, p: int, q: int,
                                          eps: float = 1e-3) -> float:
    """Local-uniqueness probe: re-run the center search from lm.lam + eps;
    returns the distance between the two results."""
    again = find_center(p, q, lm.order, lm.lam + eps)
    return abs(again.lam - lm.lam)
