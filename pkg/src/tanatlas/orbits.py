"""Orbit iteration, cycle detection/refinement, point and parameter taxonomy.

A dynamic-plane point is attracted to the superattracting origin, attracted
to a non-zero cycle, escapes through a pole (numerically: reaches infinity
or |z| > R_MAX), or stays undecided within the iteration budget.  A
parameter is a capture (asymptotic value attracted to 0, with the index of
the first basin entry), a shell (attracted to a non-zero attracting cycle),
or undecided.

Cycle search uses Brent's tortoise/hare with a global power-of-two snapshot
schedule (the vectorized and compiled kernels implement the identical
schedule so classifications agree cell for cell), followed by Newton
refinement of f^period(z) = z and reduction to the minimal period.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .core import FamilyParams, derivative, evaluate, is_bad

R_MAX = 1e8          # numerical infinity for orbits
CYCLE_TOL = 1e-6     # Brent return-distance tolerance
MAX_PERIOD = 64      # longest cycle the detector will propose
NEWTON_MAX_STEPS = 50
MULT_ATTRACT_TOL = 1e-9   # attracting means |mult| < 1 - this
TRAP_BOUNDARY_SAMPLES = 64


class NoConvergenceError(RuntimeError):
    pass


class DerivativeSingularError(RuntimeError):
    """Chain-rule multiplier product left the representable range."""


@dataclass(frozen=True)
class AttractedToZero:
    steps: int


@dataclass(frozen=True)
class AttractedToCycle:
    period: int
    multiplier: complex
    representative: complex


@dataclass(frozen=True)
class NeutralCandidate:
    period: int
    multiplier: complex
    representative: complex


@dataclass(frozen=True)
class PoleEscape:
    steps: int


@dataclass(frozen=True)
class Undecided:
    steps: int


@dataclass(frozen=True)
class Capture:
    n: int
    mode: str = "fast"  # fast n is an upper bound for the true basin-entry index


@dataclass(frozen=True)
class Shell:
    period: int
    multiplier: complex


@dataclass(frozen=True)
class ParamUndecided:
    steps: int = 0


@dataclass(frozen=True)
class CycleInfo:
    period: int
    point: complex
    multiplier: complex
    residual: float


def t_star(q: int) -> float:
    """(pi/4)^(1/q), radius of the disk certified inside the shift locus."""
    return (math.pi / 4.0) ** (1.0 / q)


def default_trap_radius(params: FamilyParams) -> float:
    # near 0, |f(z)| ~ |lambda| |z|^(pq); 0.25 leaves a 2x contraction margin
    return min(0.1, (0.25 / abs(params.lam)) ** (1.0 / (params.m - 1)))


def validate_trap_radius(params: FamilyParams, r: float, shrink_tries: int = 8) -> float:
    """Largest r' <= r (halving) with |f(z)| < |z|/2 on boundary samples."""
    for _ in range(shrink_tries):
        ok = True
        for i in range(TRAP_BOUNDARY_SAMPLES):
            z = cmath.rect(r, 2 * math.pi * i / TRAP_BOUNDARY_SAMPLES)
            w = evaluate(params, z)
            if is_bad(w) or abs(w) >= r / 2:
                ok = False
                break
        if ok:
            return r
        r /= 2
    raise ValueError("could not validate a trap radius; |lambda| too extreme")


def trap_radius(params: FamilyParams) -> float:
    return validate_trap_radius(params, default_trap_radius(params))


def iterate_orbit(params: FamilyParams, z0: complex, max_iter: int, trap_radius=None):
    """Forward orbit [z0, f(z0), ...], truncated at infinity, |z| > R_MAX,
    trap entry (when a trap radius is given), or max_iter steps."""
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    orbit = [complex(z0)]
    z = complex(z0)
    for _ in range(max_iter):
        if is_bad(z) or abs(z) > R_MAX:
            break
        if trap_radius is not None and abs(z) < trap_radius:
            break
        z = evaluate(params, z)
        orbit.append(z)
    return orbit


def _cycle_chain(params: FamilyParams, z: complex, period: int):
    """(f^period(z), product of f' along the orbit).  Raises on blow-up."""
    w = z
    d = 1 + 0j
    for _ in range(period):
        dw = derivative(params, w)
        if is_bad(dw):
            raise DerivativeSingularError("derivative at a pole inside the chain")
        d *= dw
        ad = abs(d)
        if ad > 1e300 or (ad != 0 and ad < 1e-300):
            raise DerivativeSingularError("multiplier chain product out of range")
        w = evaluate(params, w)
        if is_bad(w):
            raise DerivativeSingularError("orbit left the plane during refinement")
    return w, d


def refine_cycle(params: FamilyParams, guess: complex, period: int) -> CycleInfo:
    """Newton-polish f^period(z) = z from `guess`; returns the certified cycle.

    Raises NoConvergenceError after 50 steps, DerivativeSingularError when
    the chain-rule product degenerates.
    """
    z = complex(guess)
    for _ in range(NEWTON_MAX_STEPS):
        w, d = _cycle_chain(params, z, period)
        g = w - z
        if abs(g) < 1e-12 * (1 + abs(z)):
            break
        gp = d - 1
        if gp == 0:
            raise NoConvergenceError("vanishing Newton denominator (parabolic?)")
        z = z - g / gp
    w, d = _cycle_chain(params, z, period)
    res = abs(w - z)
    if not res < 1e-10 * (1 + abs(z)):
        raise NoConvergenceError(f"cycle residual {res:.2e} after Newton")
    return CycleInfo(period=period, point=z, multiplier=d, residual=res)


def minimal_period(params: FamilyParams, info: CycleInfo) -> CycleInfo:
    """Reduce a refined cycle to its minimal period (candidates can come back
    as multiples of the true period)."""
    for d in range(1, info.period):
        if info.period % d:
            continue
        w, md = _cycle_chain(params, info.point, d)
        if abs(w - info.point) < 1e-8 * (1 + abs(info.point)):
            return CycleInfo(period=d, point=info.point, multiplier=md,
                             residual=abs(w - info.point))
    return info


def detect_cycle(orbit, tol: float = CYCLE_TOL):
    """Brent scan of a precomputed orbit; returns a candidate CycleInfo
    (period and point only; residual is the return distance) or None."""
    if not orbit:
        return None
    ref = orbit[0]
    ref_step = 0
    power = 1
    for step in range(1, len(orbit)):
        z = orbit[step]
        if is_bad(z):
            return None
        dist = abs(z - ref)
        per = step - ref_step
        if dist < tol and 0 < per <= MAX_PERIOD:
            return CycleInfo(period=per, point=z, multiplier=0j, residual=dist)
        if step == power:
            ref = z
            ref_step = step
            power *= 2
    return None


def _classify_from_candidate(params, z, period):
    """Refine a Brent candidate into a final orbit class, or None to keep going."""
    try:
        info = minimal_period(params, refine_cycle(params, z, period))
    except (NoConvergenceError, DerivativeSingularError):
        return None
    am = abs(info.multiplier)
    if am < 1 - MULT_ATTRACT_TOL:
        return AttractedToCycle(info.period, info.multiplier, info.point)
    if abs(am - 1) <= MULT_ATTRACT_TOL:
        return NeutralCandidate(info.period, info.multiplier, info.point)
    return None


def classify_point(params: FamilyParams, z0: complex, max_iter: int = 2000,
                   trap_radius_hint=None):
    """Classify the forward orbit of z0.

    Trap entry certifies attraction to 0; Brent + Newton certify a non-zero
    attracting cycle; infinity or |z| > R_MAX is a pole escape; anything
    else is Undecided (neutral parameters legitimately end up there).
    """
    r_trap = trap_radius(params) if trap_radius_hint is None else trap_radius_hint
    z = complex(z0)
    if abs(z) < r_trap:
        return AttractedToZero(steps=0)
    ref = z
    ref_step = 0
    power = 1
    for step in range(1, max_iter + 1):
        z = evaluate(params, z)
        if is_bad(z) or abs(z) > R_MAX:
            return PoleEscape(steps=step)
        if abs(z) < r_trap:
            return AttractedToZero(steps=step)
        per = step - ref_step
        if abs(z - ref) < CYCLE_TOL and 0 < per <= MAX_PERIOD:
            out = _classify_from_candidate(params, z, per)
            if out is not None:
                return out
            return Undecided(steps=step)
        if step == power:
            ref = z
            ref_step = step
            power *= 2
    return Undecided(steps=max_iter)


def capture_radius(params: FamilyParams, r_trap: float) -> float:
    """Radius whose disk certifies membership in the immediate basin.

    For |lambda| < t* the whole disk D(0, t*) is forward-contracting and
    contained in B0 (so the step-0 test is exact there); otherwise only the
    validated trap disk is certified.
    """
    ts = t_star(params.q)
    return ts if abs(params.lam) < ts else r_trap


def classify_parameter(params: FamilyParams, max_iter: int = 2000, mode: str = "fast",
                       resolution: int = 2048, window=None):
    """Classify lambda by the fate of the asymptotic value v = i^p lambda.

    In fast mode the capture index is the first entry of the orbit of v
    into the certified disk (exact when |lambda| < t*, an upper bound
    otherwise).  Exact mode re-derives the index by rendering the
    attracted-to-zero set, extracting the connected component of 0, and
    reporting the first orbit point inside it.  For p odd the two
    asymptotic values are captured together or not at all, so classifying
    v suffices.
    """
    if mode not in ("fast", "exact"):
        raise ValueError("mode must be 'fast' or 'exact'")
    r_trap = trap_radius(params)
    r_cap = capture_radius(params, r_trap)
    v = params.v
    z = v
    if abs(z) < r_cap:
        fast = Capture(n=0, mode="fast")
    else:
        fast = None
        ref = z
        ref_step = 0
        power = 1
        for step in range(1, max_iter + 1):
            z = evaluate(params, z)
            if is_bad(z) or abs(z) > R_MAX:
                fast = ParamUndecided(steps=step)
                break
            if abs(z) < r_cap:
                fast = Capture(n=step, mode="fast")
                break
            per = step - ref_step
            if abs(z - ref) < CYCLE_TOL and 0 < per <= MAX_PERIOD:
                out = _classify_from_candidate(params, z, per)
                if isinstance(out, AttractedToCycle):
                    fast = Shell(period=out.period, multiplier=out.multiplier)
                else:
                    fast = ParamUndecided(steps=step)
                break
            if step == power:
                ref = z
                ref_step = step
                power *= 2
        if fast is None:
            fast = ParamUndecided(steps=max_iter)
    if mode == "fast" or not isinstance(fast, Capture):
        return fast
    from . import raster  # deferred: raster machinery only needed for exact mode

    n_exact = raster.exact_capture_index(params, max_iter=max_iter,
                                         resolution=resolution, window=window)
    if n_exact is None:
        return fast
    return Capture(n=n_exact, mode="exact")
