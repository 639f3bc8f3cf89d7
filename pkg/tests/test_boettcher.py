"""Tests for the Boettcher machinery: product coordinate, parameter maps, rays."""

import cmath
import math

import numpy as np
import pytest

from tanatlas.core import FamilyParams, evaluate
from tanatlas.boettcher import (
    BoettcherContext,
    NotInCaptureError,
    OutsideDomainError,
    boettcher_coord,
    boettcher_coord_f,
    monic_evaluate,
    param_phi,
    param_psi,
    trace_dynamic_ray,
    trace_param_ray,
)

T_STAR = (math.pi / 4) ** 0.5


def _ctx(lam, p, q):
    return BoettcherContext.for_params(FamilyParams(lam, p, q))


def test_monic_fixes_origin_and_leading_coefficient():
    for lam, p, q in [(0.4 + 0.1j, 1, 2), (0.2 * cmath.exp(1j * math.pi / 3), 3, 2)]:
        ctx = _ctx(lam, p, q)
        assert monic_evaluate(ctx, 0j) == 0
        z = 1e-3 + 0j
        lead = monic_evaluate(ctx, z) / z ** (p * q)
        assert abs(lead - 1) < 1e-4


def test_monic_conjugacy_residual():
    rng = np.random.default_rng(0)
    ctx = _ctx(0.7 - 0.3j, 2, 2)
    r = ctx.trap_radius / abs(ctx.mu)
    for _ in range(100):
        z = cmath.rect(rng.uniform(0, r), rng.uniform(-math.pi, math.pi))
        lhs = ctx.mu * evaluate(ctx.params, z)
        rhs = monic_evaluate(ctx, ctx.mu * z)
        assert abs(lhs - rhs) < 1e-11 * max(1.0, abs(lhs))


def test_coord_fixes_origin():
    assert boettcher_coord(_ctx(0.5, 1, 2), 0j) == 0


@pytest.mark.parametrize("lam,p,q", [(0.4 + 0.1j, 1, 2), (0.4 + 0.1j, 3, 2),
                                     (0.2 * cmath.exp(1j * math.pi / 3), 1, 2),
                                     (0.2 * cmath.exp(1j * math.pi / 3), 3, 2)])
def test_functional_equation(lam, p, q):
    ctx = _ctx(lam, p, q)
    rng = np.random.default_rng(1)
    m = p * q
    worst = 0.0
    n = 0
    while n < 1000:
        z = cmath.rect(rng.uniform(0, ctx.trap_radius), rng.uniform(-math.pi, math.pi))
        if z == 0:
            continue
        try:
            a = boettcher_coord(ctx, monic_evaluate(ctx, z))
            b = boettcher_coord(ctx, z) ** m
        except OutsideDomainError:
            continue
        worst = max(worst, abs(a - b))
        n += 1
    assert worst < 1e-8


def test_tangency_at_origin():
    for lam, p, q in [(0.4 + 0.1j, 1, 2), (0.2 * cmath.exp(1j * math.pi / 3), 3, 2)]:
        ctx = _ctx(lam, p, q)
        for k in range(8):
            z = cmath.rect(1e-4, 2 * math.pi * k / 8)
            assert abs(boettcher_coord(ctx, z) / z - 1) < 1e-3


def test_product_tail_bound():
    ctx = _ctx(0.4 + 0.1j, 1, 2)
    m = ctx.params.m
    rng = np.random.default_rng(2)
    for _ in range(200):
        z = cmath.rect(rng.uniform(1e-4, 1e-2), rng.uniform(-math.pi, math.pi))
        assert abs(boettcher_coord(ctx, z) - z) < 10 * abs(z) ** m


def test_coord_modulus_below_one_and_injectivity():
    ctx = _ctx(0.4 + 0.1j, 1, 2)
    rng = np.random.default_rng(3)
    pts = []
    vals = []
    for _ in range(10_000):
        z = cmath.rect(rng.uniform(0, ctx.trap_radius), rng.uniform(-math.pi, math.pi))
        if z == 0:
            continue
        w = boettcher_coord(ctx, z)
        assert abs(w) < 1
        pts.append(z)
        vals.append(w)
    pts = np.array(pts)
    vals = np.array(vals)
    order = np.argsort(vals.view(np.float64).reshape(-1, 2)[:, 0], kind="stable")
    sv = vals[order]
    sp = pts[order]
    close = np.abs(np.diff(sv)) < 1e-10
    for i in np.nonzero(close)[0]:
        assert abs(sp[i + 1] - sp[i]) < 1e-8


def test_coord_outside_domain():
    ctx = _ctx(2 * cmath.exp(1j * math.pi / 4), 3, 2)  # shell parameter
    with pytest.raises(OutsideDomainError):
        # the asymptotic value tends to the non-zero fixed point, never to 0
        boettcher_coord_f(ctx, ctx.params.v)


def test_param_phi_real_ray_monotone():
    ts = np.linspace(0.3, T_STAR - 1e-4, 12)
    vals = [param_phi(float(t), 1, 2) for t in ts]
    for w in vals:
        assert abs(w.imag) < 1e-12
        assert w.real > 0
    mags = [abs(w) for w in vals]
    assert all(b > a for a, b in zip(mags, mags[1:]))
    assert mags[-1] > 0.99  # properness: |phi| -> 1 at the boundary


def test_param_phi_small_lambda():
    w = param_phi(1e-3 * cmath.exp(1j * math.pi / 5), 1, 2)
    assert abs(w) < 0.1


def test_param_phi_vanishing_degree():
    # |phi| ~ |lambda|^(pq/(pq-1)): slope of the log-log fit within 5%
    for p, q in [(1, 2), (3, 2)]:
        m = p * q
        lams = [10 ** e * cmath.exp(1j * math.pi / 5) for e in (-2, -3, -4)]
        mags = [abs(param_phi(l, p, q)) for l in lams]
        slopes = []
        for i in range(len(lams) - 1):
            slopes.append((math.log(mags[i + 1]) - math.log(mags[i]))
                          / (math.log(abs(lams[i + 1])) - math.log(abs(lams[i]))))
        want = m / (m - 1)
        for s in slopes:
            assert abs(s - want) < 0.05 * want


def test_param_phi_rejects_shell_parameter():
    with pytest.raises(NotInCaptureError):
        param_phi(2 * cmath.exp(1j * math.pi / 4), 3, 2)


def test_param_psi_center_is_zero():
    lam = 1j * math.sqrt(math.pi)  # center of a first-order capture component
    assert abs(param_psi(lam, 3, 2, 1)) < 1e-9


def test_param_psi_capture_one_value():
    w = param_psi(1.75j, 3, 2, 1)
    assert 0 < abs(w) < 1


def test_param_psi_continuity():
    lam = 1.75j
    a = param_psi(lam, 3, 2, 1)
    b = param_psi(lam + 1e-6, 3, 2, 1)
    assert abs(a - b) < 1e-3


def test_param_ray_zero_lands_at_t_star():
    trace = trace_param_ray(1, 2, 0, theta=0.0, seed=0.3 + 0j, steps=60)
    assert trace.max_residual < 1e-9
    assert abs(trace.landing - T_STAR) < 1e-4
    for pt in trace.points:
        assert abs(pt.point.imag) < 1e-9  # the ray is the real segment


def test_dynamic_ray_zero_real_positive():
    # shift-locus parameter: the coordinate is injective below |phi(v)|
    # (about 0.16 here), so the ray is traced inside that level
    ctx = _ctx(0.4, 1, 2)
    trace = trace_dynamic_ray(ctx, theta=0.0, s_min=0.01, steps=50, s_end=0.15)
    assert trace.max_residual < 1e-9
    for pt in trace.points:
        assert pt.point.real > 0
        assert abs(pt.point.imag) < 1e-9


def test_dynamic_ray_deep_in_capture_basin():
    # no asymptotic value in B0 for a capture-1 parameter: phi extends to the
    # whole immediate basin and the ray runs deep toward the boundary
    ctx = _ctx(1.75j, 3, 2)
    trace = trace_dynamic_ray(ctx, theta=0.125, s_min=0.05, steps=60, s_end=0.9)
    assert trace.max_residual < 1e-9
    assert abs(trace.points[-1].s - 0.9) < 1e-12


def test_ray_points_satisfy_residual_invariant():
    ctx = _ctx(0.4 + 0.1j, 1, 2)
    trace = trace_dynamic_ray(ctx, theta=0.25, s_min=0.01, steps=40, s_end=0.15)
    for pt in trace.points:
        w = boettcher_coord(ctx, pt.point)
        assert abs(w - pt.s * cmath.exp(2j * math.pi * pt.theta)) < 1e-9
