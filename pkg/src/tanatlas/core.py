"""Core evaluation for the family f(z) = lambda * tan^p(z^q), pq > 1.

Everything downstream (orbits, Boettcher coordinates, symbolic coding,
rasters) is built on the primitives here: a numerically stable evaluator,
the closed-form derivative, the singular-value geometry (poles, zeros,
asymptotic values, symmetry rays) and the closed-form inverse branches.

Conventions:

* "at infinity" is a value, not an error; use `is_infinite` to test for it.
* All fractional powers are principal (argument in (-pi, pi]); branch
  variation is expressed only through explicit `BranchIndex` triples.
* omega_j = exp(i*pi*j/q) are the q-th roots of +-1 (j even: +1, j odd: -1)
  and xi_j = exp(i*pi*(2j+1)/(2q)) the q-th roots of +-i.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import NamedTuple

# tan(z) is replaced by its limit +-i once |Im z| passes this cutoff; the
# truncation error is below 2e^-40 < 5e-18 and sinh/cosh can no longer overflow.
TAN_IM_CUTOFF = 20.0

# relative distance from z^q to a pole of tan below which we declare infinity
POLE_PROXIMITY_TOL = 1e-14

AT_INFINITY = complex(math.inf, math.inf)

HALF_PI = math.pi / 2.0


class SingularValueError(ValueError):
    """Requested preimage of 0 or an asymptotic value: branches degenerate."""


class BranchUndefinedError(ValueError):
    """The p-th root sheet landed on +-i, where arctan has no value."""


def is_infinite(z: complex) -> bool:
    return math.isinf(z.real) or math.isinf(z.imag)


def is_bad(z: complex) -> bool:
    """Infinite or NaN in either component."""
    return not (math.isfinite(z.real) and math.isfinite(z.imag))


class BranchIndex(NamedTuple):
    """Label (k, j, l) of one inverse branch of f.

    k: integer translate of the principal arctan, z^q = arctan(u) + k*pi
    j: q-th root sheet, in [0, q-1]
    l: p-th root sheet of (w/lambda)^(1/p), in [0, p-1]

    k is not clamped here; alphabet truncation belongs to the symbolic layer.
    For k >= 0 the branch lives in the sector of the even ray omega_{2j},
    for k < 0 in the sector of the odd ray omega_{2j+1} (the sign of k plays
    the role of the ray-parity label used for prepole symbols).
    """

    k: int
    j: int
    l: int


@dataclass(frozen=True)
class SectorRoots:
    omega: tuple  # 2q values, q-th roots of +-1
    xi: tuple     # 2q values, q-th roots of +-i


def sector_roots(q: int) -> SectorRoots:
    om = tuple(cmath.exp(1j * math.pi * j / q) for j in range(2 * q))
    xi = tuple(cmath.exp(1j * math.pi * (2 * j + 1) / (2 * q)) for j in range(2 * q))
    return SectorRoots(omega=om, xi=xi)


def _ipow(n: int) -> complex:
    """i**n for integer n, exact."""
    return (1 + 0j, 1j, -1 + 0j, -1j)[n % 4]


@dataclass(frozen=True)
class FamilyParams:
    """The triple (lambda, p, q) with pq > 1, plus derived quantities.

    mu is the principal (pq-1)-th root of lambda; sigma(z) = mu*z conjugates
    f to the monic map h(z) = mu^(pq) tan^p((z/mu)^q) = z^(pq) + ... .
    """

    lam: complex
    p: int
    q: int
    mu: complex = field(init=False)
    m: int = field(init=False)

    def __post_init__(self):
        if self.lam == 0:
            raise ValueError("lambda must be nonzero")
        if self.p < 1 or self.q < 1 or self.p * self.q <= 1:
            raise ValueError("need integers p, q >= 1 with p*q > 1")
        m = self.p * self.q
        lam = complex(self.lam)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "mu", lam ** (1.0 / (m - 1)))

    @property
    def v(self) -> complex:
        """Asymptotic value i^p * lambda."""
        return _ipow(self.p) * self.lam

    @property
    def v_prime(self) -> complex:
        """Asymptotic value (-i)^p * lambda; equals v for p even, -v for p odd."""
        return _ipow(-self.p) * self.lam

    def roots(self) -> SectorRoots:
        return sector_roots(self.q)


def stable_tan(w: complex) -> complex:
    """tan(w) via the real/imaginary split, with asymptotic saturation.

    tan(x+iy) = (sin 2x + i sinh 2y) / (cos 2x + cosh 2y).  For |y| >= 20
    the limit +-i is returned exactly.  Within 1e-14 (relative) of a pole
    of tan the value is declared at-infinity.
    """
    x, y = w.real, w.imag
    if abs(y) >= TAN_IM_CUTOFF:
        return 1j if y > 0 else -1j
    k = math.floor((x - HALF_PI) / math.pi + 0.5)
    dx = x - (HALF_PI + k * math.pi)
    if math.hypot(dx, y) < POLE_PROXIMITY_TOL * max(1.0, abs(w)):
        return AT_INFINITY
    den = math.cos(2.0 * x) + math.cosh(2.0 * y)
    if den == 0.0:
        return AT_INFINITY
    return complex(math.sin(2.0 * x) / den, math.sinh(2.0 * y) / den)


def _zpow(z: complex, n: int) -> complex:
    """Integer power by repeated multiplication (matches the kernels)."""
    out = 1 + 0j
    for _ in range(n):
        out *= z
    return out


def evaluate(params: FamilyParams, z: complex) -> complex:
    """f(z) = lambda * tan^p(z^q).  Total: returns AT_INFINITY at poles."""
    if is_bad(z):
        return AT_INFINITY
    t = stable_tan(_zpow(z, params.q))
    if is_infinite(t):
        return AT_INFINITY
    return params.lam * _zpow(t, params.p)


def derivative(params: FamilyParams, z: complex) -> complex:
    """f'(z) = pq * lambda * z^(q-1) * tan^(p-1)(z^q) * sec^2(z^q).

    Returns AT_INFINITY when z^q sits at a pole of tan (order p+1 blow-up).
    """
    p, q = params.p, params.q
    w = _zpow(z, q)
    t = stable_tan(w)
    if is_infinite(t):
        return AT_INFINITY
    if abs(w.imag) >= TAN_IM_CUTOFF:
        # sec^2(w) = 4 e^{2isw} / (1 + e^{2isw})^2 with the tiny term dropped
        s = 1.0 if w.imag > 0 else -1.0
        sec2 = 4.0 * cmath.exp(2j * s * w)
    else:
        c = cmath.cos(w)
        sec2 = 1.0 / (c * c)
    return p * q * params.lam * _zpow(z, q - 1) * _zpow(t, p - 1) * sec2


def asymptotic_values(params: FamilyParams) -> tuple:
    """(v, v') = (i^p lambda, (-i)^p lambda)."""
    return params.v, params.v_prime


def pole(params: FamilyParams, k: int, j: int) -> complex:
    """Pole (k*pi + pi/2)^(1/q) * omega_j, k >= 0, j in [0, 2q-1]."""
    if k < 0:
        raise ValueError("pole index k must be >= 0")
    r = (k * math.pi + HALF_PI) ** (1.0 / params.q)
    return r * cmath.exp(1j * math.pi * j / params.q)


def zero(params: FamilyParams, k: int, j: int) -> complex:
    """Zero (k*pi)^(1/q) * omega_j; the origin for k = 0."""
    if k < 0:
        raise ValueError("zero index k must be >= 0")
    if k == 0:
        return 0j
    r = (k * math.pi) ** (1.0 / params.q)
    return r * cmath.exp(1j * math.pi * j / params.q)


def branch_pole(params: FamilyParams, k: int, j: int) -> complex:
    """The pole in the sector of branch (k, j, .): principal root of
    (k*pi + pi/2) times the j-th q-th root of unity.  k may be negative;
    k >= 0 lands on an even ray, k < 0 on the adjacent odd ray."""
    s = complex(k * math.pi + HALF_PI)
    return s ** (1.0 / params.q) * cmath.exp(2j * math.pi * j / params.q)


def inverse_branch(params: FamilyParams, w: complex, b: BranchIndex) -> complex:
    """The preimage of w selected by branch b = (k, j, l).

    Inverts f = L o P o T o Q factor by factor: u = (w/lambda)^(1/p) on the
    l-th sheet, s = arctan(u) + k*pi (principal arctan), z = s^(1/q) on the
    j-th sheet.  Raises SingularValueError for w in {0, v, v'} and
    BranchUndefinedError when u falls on +-i.
    """
    if is_bad(w):
        raise SingularValueError("w is at infinity")
    if w == 0 or w == params.v or w == params.v_prime:
        raise SingularValueError(f"w={w} is a singular value of f")
    p, q = params.p, params.q
    u = w / params.lam if p == 1 else (w / params.lam) ** (1.0 / p)
    if b.l % p:
        u *= cmath.exp(2j * math.pi * (b.l % p) / p)
    if abs(u - 1j) < 1e-12 or abs(u + 1j) < 1e-12:
        raise BranchUndefinedError("sheet value u fell on +-i")
    s = cmath.atan(u) + b.k * math.pi
    z = s if q == 1 else s ** (1.0 / q)
    if b.j % q:
        z *= cmath.exp(2j * math.pi * (b.j % q) / q)
    return z


def symmetry_image(params: FamilyParams, z: complex, j: int):
    """(omega_j * z, relation) with relation the parity-table prediction:
    f(omega_j z) equals f(z) unless both p and j are odd, where it is -f(z)."""
    om = cmath.exp(1j * math.pi * (j % (2 * params.q)) / params.q)
    negated = (params.p % 2 == 1) and (j % 2 == 1)
    return om * z, ("negated" if negated else "equal")
