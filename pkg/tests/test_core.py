"""Tests for the core evaluator, derivative, singular geometry and branches."""

import cmath
import math

import numpy as np
import pytest

from tanatlas.core import (
    BranchIndex,
    BranchUndefinedError,
    FamilyParams,
    SingularValueError,
    asymptotic_values,
    branch_pole,
    derivative,
    evaluate,
    inverse_branch,
    is_infinite,
    pole,
    sector_roots,
    symmetry_image,
    zero,
)

T_STAR_Q2 = (math.pi / 4.0) ** 0.5  # 0.8862269254527580


def test_family_params_mu_invariant():
    for lam, p, q in [(1 + 0j, 1, 2), (0.4 + 0.1j, 3, 2), (-2.3 + 1.7j, 2, 2)]:
        fp = FamilyParams(lam, p, q)
        assert fp.m == p * q
        assert abs(fp.mu ** (p * q - 1) - lam) < 1e-12 * abs(lam)


def test_family_params_validation():
    with pytest.raises(ValueError):
        FamilyParams(0, 1, 2)
    with pytest.raises(ValueError):
        FamilyParams(1.0, 1, 1)  # pq = 1 excluded
    with pytest.raises(ValueError):
        FamilyParams(1.0, 0, 3)


def test_eval_fixed_origin():
    fp = FamilyParams(1 + 0j, 1, 2)
    assert evaluate(fp, 0j) == 0


def test_eval_quarter_pi_point():
    fp = FamilyParams(1, 1, 2)
    z = (math.pi / 4) ** 0.5
    assert abs(evaluate(fp, z) - 1) < 1e-14


def test_eval_asymptotic_tract():
    # deep in the upper tract tan saturates to i, so f -> i^p * lambda
    fp = FamilyParams(1, 2, 1)
    got = evaluate(fp, 50j)
    assert abs(got - (-1)) < 1e-15


def test_eval_at_zero_lattice():
    fp = FamilyParams(0.7 + 0.2j, 3, 2)
    for k in range(1, 4):
        for j in range(4):
            assert abs(evaluate(fp, zero(fp, k, j))) < 1e-9


def test_eval_near_pole_is_infinite():
    fp = FamilyParams(1.5, 1, 2)
    z = pole(fp, 0, 0)
    assert is_infinite(evaluate(fp, z))
    # exact pole of tan in w-coordinates used to divide by zero; stays total
    fp22 = FamilyParams(-math.sqrt(math.pi / 2), 2, 2)
    assert is_infinite(evaluate(fp22, math.sqrt(math.pi / 2)))


def test_pole_blowup_oracle():
    for lam, p, q in [(1.1 - 0.3j, 1, 2), (0.5j, 3, 2), (2.0, 2, 2)]:
        fp = FamilyParams(lam, p, q)
        z = pole(fp, 1, 1) * (1 + 1e-9)
        val = evaluate(fp, z)
        assert is_infinite(val) or abs(val) > 1e6


def test_pole_zero_positions():
    fp = FamilyParams(1, 1, 2)
    assert abs(pole(fp, 0, 0) - 1.2533141373155003) < 1e-15
    fp32 = FamilyParams(1, 3, 2)
    want = math.sqrt(3 * math.pi / 2) * 1j
    assert abs(pole(fp32, 1, 1) - want) < 1e-14
    assert zero(fp, 0, 3) == 0
    assert abs(zero(fp, 2, 2) + math.sqrt(2 * math.pi)) < 1e-14


def test_stable_tan_against_mpmath():
    # quadruple-precision oracle on a moderate-imaginary box; relative
    # accuracy is claimed away from the poles of tan, where the split
    # formula's denominator cancels (those points blow up anyway)
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 40
    rng = np.random.default_rng(0)
    fp = FamilyParams(0.9 - 0.4j, 1, 2)
    n = 5000
    zs = rng.uniform(-2.2, 2.2, n) + 1j * rng.uniform(-2.2, 2.2, n)
    worst = 0.0
    for z in zs:
        w = z * z
        if abs(w.imag) > 15:
            continue
        k = math.floor((w.real - math.pi / 2) / math.pi + 0.5)
        if math.hypot(w.real - (math.pi / 2 + k * math.pi), w.imag) < 1e-2:
            continue
        ref = complex(mp.tan(mp.mpc(w))) * fp.lam
        got = evaluate(fp, z)
        if is_infinite(got) or abs(ref) > 1e12:
            continue
        worst = max(worst, abs(got - ref) / max(1e-300, abs(ref)))
    assert worst < 1e-12


def test_periodicity_in_w():
    # f depends on z only through z^q, and tan has period pi
    rng = np.random.default_rng(1)
    fp = FamilyParams(1.3 + 0.2j, 2, 2)
    for _ in range(200):
        w = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        z1 = w ** 0.5
        z2 = (w + math.pi) ** 0.5
        a, b = evaluate(fp, z1), evaluate(fp, z2)
        if is_infinite(a) or is_infinite(b):
            continue
        assert abs(a - b) < 1e-12 * max(1.0, abs(a))


def test_lambda_symmetries():
    rng = np.random.default_rng(2)
    for p, q in [(1, 2), (3, 2), (2, 2), (2, 1)]:
        lam = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        fp = FamilyParams(lam, p, q)
        fneg = FamilyParams(-lam, p, q)
        fbar = FamilyParams(lam.conjugate(), p, q)
        for _ in range(100):
            z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            a = evaluate(fp, z)
            if is_infinite(a):
                continue
            assert abs(evaluate(fneg, z) + a) < 1e-12 * max(1.0, abs(a))
            assert abs(evaluate(fbar, z.conjugate()) - a.conjugate()) < 1e-12 * max(1.0, abs(a))


def test_derivative_misiurewicz_multiplier():
    # at lambda = t* the point t* is fixed with multiplier pq*pi/2
    fp = FamilyParams(T_STAR_Q2, 1, 2)
    assert abs(derivative(fp, T_STAR_Q2) - math.pi) < 1e-12


def test_derivative_superattracting_origin():
    for p, q in [(1, 2), (3, 2), (2, 1)]:
        fp = FamilyParams(1.7 - 0.4j, p, q)
        assert derivative(fp, 0j) == 0


def test_derivative_matches_finite_differences():
    fp = FamilyParams(1 + 1j, 3, 2)
    z = 0.3 + 0.2j
    h = 1e-6
    fd = (evaluate(fp, z + h) - evaluate(fp, z - h)) / (2 * h)
    an = derivative(fp, z)
    assert abs(an - fd) < 1e-6 * abs(an)


def test_derivative_fd_random_panel():
    rng = np.random.default_rng(3)
    for p, q in [(1, 2), (2, 2), (3, 2), (3, 1)]:
        fp = FamilyParams(complex(rng.uniform(0.3, 1.5), rng.uniform(-1, 1)), p, q)
        checked = 0
        while checked < 40:
            z = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
            an = derivative(fp, z)
            if is_infinite(an) or abs(an) < 1e-8:
                continue
            h = 1e-6
            fd = (evaluate(fp, z + h) - evaluate(fp, z - h)) / (2 * h)
            assert abs(an - fd) < 1e-5 * max(1.0, abs(an))
            checked += 1


def test_derivative_at_pole_is_infinite():
    fp = FamilyParams(1, 1, 2)
    assert is_infinite(derivative(fp, pole(fp, 0, 0)))


def test_asymptotic_values_examples():
    v, vp = asymptotic_values(FamilyParams(2j, 3, 2))
    assert abs(v - 2) < 1e-15 and abs(vp + 2) < 1e-15
    v, vp = asymptotic_values(FamilyParams(1, 2, 1))
    assert v == vp == -1
    v, vp = asymptotic_values(FamilyParams(1.22 + 1.3j, 3, 2))
    assert abs(v - (1.3 - 1.22j)) < 1e-15
    # parity relations
    for p in (1, 2, 3, 4):
        fp = FamilyParams(0.7 + 0.4j, p, 2)
        if p % 2 == 0:
            assert fp.v == fp.v_prime
        else:
            assert fp.v == -fp.v_prime


def test_sector_roots_invariants():
    for q in (1, 2, 3, 5):
        r = sector_roots(q)
        assert len(r.omega) == len(r.xi) == 2 * q
        for j, om in enumerate(r.omega):
            want = 1.0 if j % 2 == 0 else -1.0
            assert abs(om ** q - want) < 1e-13
        for j, xi in enumerate(r.xi):
            want = 1j if j % 2 == 0 else -1j
            assert abs(xi ** q - want) < 1e-13


def _random_nonsingular_w(rng, params):
    while True:
        w = cmath.rect(rng.uniform(0.5, 2.0), rng.uniform(-math.pi, math.pi))
        if min(abs(w - params.v), abs(w - params.v_prime), abs(w)) > 1e-3:
            return w


@pytest.mark.parametrize("lam,p,q", [(1.0, 1, 2), (0.8 + 0.3j, 2, 2), (1.1 - 0.7j, 3, 2), (2.0j, 1, 3)])
def test_inverse_branch_forward_oracle(lam, p, q):
    fp = FamilyParams(lam, p, q)
    rng = np.random.default_rng(4)
    for _ in range(100):
        w = _random_nonsingular_w(rng, fp)
        for k in range(-3, 4):
            for j in range(q):
                for l in range(p):
                    z = inverse_branch(fp, w, BranchIndex(k, j, l))
                    got = evaluate(fp, z)
                    assert abs(got - w) < 1e-10 * max(1.0, abs(w))


def test_inverse_branch_distinctness():
    fp = FamilyParams(0.9 + 0.1j, 3, 2)
    rng = np.random.default_rng(5)
    w = _random_nonsingular_w(rng, fp)
    seen = []
    for k in range(-2, 3):
        for j in range(2):
            for l in range(3):
                seen.append(inverse_branch(fp, w, BranchIndex(k, j, l)))
    for a in range(len(seen)):
        for b in range(a + 1, len(seen)):
            assert abs(seen[a] - seen[b]) > 1e-10


def test_inverse_branch_quarter_pi():
    fp = FamilyParams(1, 1, 2)
    z = inverse_branch(fp, 1.0 + 0j, BranchIndex(0, 0, 0))
    assert abs(z - (math.pi / 4) ** 0.5) < 1e-14


def test_inverse_branch_sheet_rotation():
    fp = FamilyParams(1.2 - 0.5j, 2, 3)
    w = 0.9 + 0.4j
    base = inverse_branch(fp, w, BranchIndex(1, 0, 1))
    for j in range(1, 3):
        got = inverse_branch(fp, w, BranchIndex(1, j, 1))
        assert abs(got - base * cmath.exp(2j * math.pi * j / 3)) < 1e-13


def test_inverse_branch_roundtrip_principal():
    # inverse o eval is the identity on the principal sector
    rng = np.random.default_rng(6)
    for p, q in [(1, 2), (2, 2)]:
        fp = FamilyParams(0.8 + 0.2j, p, q)
        done = 0
        while done < 50:
            r = rng.uniform(0.15, 1.1)
            th = rng.uniform(-math.pi / q + 0.05, math.pi / q - 0.05)
            z = cmath.rect(r, th)
            w0 = z ** q
            if abs(w0.real) > math.pi / 2 - 0.1:
                continue
            u = cmath.tan(w0)
            if u != 0 and not (-math.pi / p < cmath.phase(u) <= math.pi / p):
                continue  # stay on the principal l-sheet
            w = evaluate(fp, z)
            if is_infinite(w) or w == 0:
                continue
            try:
                back = inverse_branch(fp, w, BranchIndex(0, 0, 0))
            except (SingularValueError, BranchUndefinedError):
                continue
            assert abs(back - z) < 1e-9 * max(1.0, abs(z))
            done += 1


def test_inverse_branch_singular_values():
    fp = FamilyParams(1.5j, 3, 2)
    for w in (0j, fp.v, fp.v_prime):
        with pytest.raises(SingularValueError):
            inverse_branch(fp, w, BranchIndex(0, 0, 0))
    # u = +-i guard: w = lam * (i*(1+eps))^p just off the singular value
    fp12 = FamilyParams(1.0, 1, 2)
    with pytest.raises((SingularValueError, BranchUndefinedError)):
        inverse_branch(fp12, 1j * (1 + 1e-14), BranchIndex(0, 0, 0))


def test_branch_pole_matches_pole_lattice():
    fp = FamilyParams(1, 1, 2)
    q = fp.q
    for k in range(0, 3):
        for j in range(q):
            assert abs(branch_pole(fp, k, j) - pole(fp, k, 2 * j)) < 1e-13
    for k in range(-3, 0):
        for j in range(q):
            assert abs(branch_pole(fp, k, j) - pole(fp, -k - 1, 2 * j + 1)) < 1e-13


def test_symmetry_image_relations():
    rng = np.random.default_rng(7)
    cases = [(2, 2, 1, "equal"), (3, 2, 1, "negated"), (3, 2, 2, "equal"), (2, 2, 0, "equal")]
    for p, q, j, want in cases:
        fp = FamilyParams(0.9 + 0.3j, p, q)
        for _ in range(40):
            z = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
            zi, rel = symmetry_image(fp, z, j)
            assert rel == want
            a, b = evaluate(fp, zi), evaluate(fp, z)
            if is_infinite(a) or is_infinite(b):
                continue
            target = b if rel == "equal" else -b
            assert abs(a - target) < 1e-12 * max(1.0, abs(b))
    # j = 0 is the identity
    fp = FamilyParams(1.0, 3, 2)
    zi, rel = symmetry_image(fp, 0.3 + 0.4j, 0)
    assert zi == 0.3 + 0.4j and rel == "equal"
