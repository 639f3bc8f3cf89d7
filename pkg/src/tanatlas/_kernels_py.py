"""Vectorized numpy fallback for the raster classification kernels.

Selected by `tanatlas.kernels` when the compiled extension is unavailable.
The state machine here (trap entry, escape, global-schedule Brent detection,
Newton refinement, minimal-period reduction, attract/neutral thresholds)
matches `orbits.classify_point` / `orbits.classify_parameter` step for step;
every cell is computed independently, so results do not depend on how the
grid is partitioned across workers.
"""

import math

import numpy as np

BACKEND = "python"

# tag encodings shared with the compiled kernel and the raster legend
DYN_UNDECIDED, DYN_ZERO, DYN_CYCLE, DYN_POLE, DYN_NEUTRAL = 0, 1, 2, 3, 4
PAR_UNDECIDED, PAR_CAPTURE, PAR_SHELL = 0, 1, 2

R_MAX = 1e8
CYCLE_TOL = 1e-6
MAX_PERIOD = 64
TAN_IM_CUTOFF = 20.0
POLE_PROXIMITY_TOL = 1e-14
HALF_PI = math.pi / 2.0

_INF = complex(np.inf, np.inf)


def _zpow_vec(z, n):
    out = np.ones_like(z)
    for _ in range(n):
        out = out * z
    return out


def _eval_vec(lam, p, q, z):
    """f on an array; infinite cells come out with non-finite components."""
    w = _zpow_vec(z, q)
    x = w.real
    y = w.imag
    t = np.empty_like(z)
    big = np.abs(y) >= TAN_IM_CUTOFF
    t[big] = np.where(y[big] > 0, 1j, -1j)
    nb = ~big
    xs, ys, ws = x[nb], y[nb], w[nb]
    k = np.floor((xs - HALF_PI) / math.pi + 0.5)
    dx = xs - (HALF_PI + k * math.pi)
    atpole = np.hypot(dx, ys) < POLE_PROXIMITY_TOL * np.maximum(1.0, np.abs(ws))
    with np.errstate(all="ignore"):
        den = np.cos(2.0 * xs) + np.cosh(2.0 * ys)
        atpole |= den == 0.0
        tv = np.sin(2.0 * xs) / den + 1j * (np.sinh(2.0 * ys) / den)
    t[nb] = np.where(atpole, _INF, tv)
    infmask = ~np.isfinite(t.real) | ~np.isfinite(t.imag)
    with np.errstate(all="ignore"):
        out = lam * _zpow_vec(t, p)
    return np.where(infmask, _INF, out)


def _deriv_vec(lam, p, q, z):
    """f' on an array, with the same saturation branches as core.derivative."""
    w = _zpow_vec(z, q)
    x = w.real
    y = w.imag
    t = np.empty_like(z)
    sec2 = np.empty_like(z)
    big = np.abs(y) >= TAN_IM_CUTOFF
    if big.any():
        s = np.where(y[big] > 0, 1.0, -1.0)
        t[big] = np.where(y[big] > 0, 1j, -1j)
        ex = np.exp(-2.0 * s * y[big])
        sec2[big] = 4.0 * (ex * np.cos(2.0 * s * x[big])) \
            + 1j * (4.0 * (ex * np.sin(2.0 * s * x[big])))
    nb = ~big
    xs, ys, ws = x[nb], y[nb], w[nb]
    k = np.floor((xs - HALF_PI) / math.pi + 0.5)
    dx = xs - (HALF_PI + k * math.pi)
    atpole = np.hypot(dx, ys) < POLE_PROXIMITY_TOL * np.maximum(1.0, np.abs(ws))
    with np.errstate(all="ignore"):
        den = np.cos(2.0 * xs) + np.cosh(2.0 * ys)
        atpole |= den == 0.0
        tv = np.sin(2.0 * xs) / den + 1j * (np.sinh(2.0 * ys) / den)
        c = np.cos(ws)
        sv = 1.0 / (c * c)
    t[nb] = np.where(atpole, _INF, tv)
    sec2[nb] = np.where(atpole, _INF, sv)
    with np.errstate(all="ignore"):
        out = (p * q) * lam * _zpow_vec(z, q - 1) * _zpow_vec(t, p - 1) * sec2
    badmask = ~np.isfinite(t.real) | ~np.isfinite(t.imag)
    return np.where(badmask, _INF, out)


def _finite(z):
    return np.isfinite(z.real) & np.isfinite(z.imag)


def _chain(lam, p, q, z, steps, fail):
    """f^steps and the chain-rule multiplier, flagging blow-ups in `fail`."""
    w = z.copy()
    d = np.ones_like(z)
    for _ in range(steps):
        with np.errstate(all="ignore"):
            dw = _deriv_vec(lam, p, q, w)
        bad = ~_finite(dw)
        d = d * np.where(bad, 1, dw)
        with np.errstate(all="ignore"):
            ad = np.abs(d)
        bad |= (ad > 1e300) | ((ad != 0) & (ad < 1e-300))
        with np.errstate(all="ignore"):
            w = _eval_vec(lam, p, q, w)
        bad |= ~_finite(w)
        fail |= bad
    return w, d, fail


def _refine_pool(lam, p, q, det_z, det_per):
    """Newton-refine detected cycle candidates and reduce to minimal period.

    Returns (ok, period, point, mult); ok is False where refinement failed.
    """
    n = det_z.size
    ok = np.zeros(n, bool)
    period = det_per.copy()
    mult = np.zeros(n, np.complex128)
    point = det_z.copy()
    for P in np.unique(det_per):
        P = int(P)
        sel = np.nonzero(det_per == P)[0]
        zz = det_z[sel].copy()
        ll = lam[sel]
        conv = np.zeros(sel.size, bool)
        fail = np.zeros(sel.size, bool)
        for _ in range(50):
            w, d, fail = _chain(ll, p, q, zz, P, fail)
            g = w - zz
            with np.errstate(all="ignore"):
                newconv = np.abs(g) < 1e-12 * (1 + np.abs(zz))
            conv |= newconv & ~fail
            upd = ~conv & ~fail
            if not upd.any():
                break
            with np.errstate(all="ignore"):
                step = g / (d - 1)
            badstep = ~_finite(step)
            fail |= upd & badstep
            zz = np.where(upd & ~badstep, zz - step, zz)
        w, d, fail = _chain(ll, p, q, zz, P, fail)
        with np.errstate(all="ignore"):
            res = np.abs(w - zz)
            good = ~fail & np.isfinite(res) & (res < 1e-10 * (1 + np.abs(zz)))
        minper = np.full(sel.size, P, np.int32)
        mm = d.copy()
        for dd in range(1, P):
            if P % dd:
                continue
            f2 = np.zeros(sel.size, bool)
            w2, d2, f2 = _chain(ll, p, q, zz, dd, f2)
            with np.errstate(all="ignore"):
                hit = good & ~f2 & (np.abs(w2 - zz) < 1e-8 * (1 + np.abs(zz))) & (minper == P)
            minper[hit] = dd
            mm[hit] = d2[hit]
        ok[sel] = good
        period[sel] = minper
        mult[sel] = mm
        point[sel] = zz
    return ok, period, point, mult


def _sweep(lam_cells, p, q, z0, trap_r, max_iter, tag, aux1, aux2,
           capture_tag, escape_tag):
    """Shared orbit sweep: trap entry, escape, Brent detection.

    lam_cells is a scalar (dynamic grid, fixed lambda) or a per-cell array
    (parameter grid); trap_r likewise.  Tags capture/escape cells in place;
    returns (det_step, det_per, det_z) describing Brent detections for the
    refinement stage.  Undecided leftovers keep tag 0 with aux1 = max_iter.
    """
    n = z0.size
    z = z0.copy()
    alive = np.ones(n, bool)
    in0 = np.abs(z) < trap_r
    tag[in0] = capture_tag
    aux1[in0] = 0
    aux2[in0] = np.abs(z[in0])
    alive &= ~in0
    ref = z.copy()
    ref_step = 0
    power = 1
    det_step = np.zeros(n, np.int32)
    det_per = np.zeros(n, np.int32)
    det_z = np.zeros(n, np.complex128)
    lam_is_arr = isinstance(lam_cells, np.ndarray)
    trap_is_arr = isinstance(trap_r, np.ndarray)
    for step in range(1, max_iter + 1):
        if not alive.any():
            break
        idx = np.nonzero(alive)[0]
        ll = lam_cells[idx] if lam_is_arr else lam_cells
        tr = trap_r[idx] if trap_is_arr else trap_r
        zn = _eval_vec(ll, p, q, z[idx])
        with np.errstate(all="ignore"):
            azn = np.abs(zn)
        esc = ~_finite(zn) | (azn > R_MAX)
        z[idx] = np.where(esc, _INF, zn)
        intrap = ~esc & (azn < tr)
        cap = idx[intrap]
        tag[cap] = capture_tag
        aux1[cap] = step
        aux2[cap] = azn[intrap]
        eidx = idx[esc]
        tag[eidx] = escape_tag
        aux1[eidx] = step
        aux2[eidx] = 0.0
        alive[cap] = False
        alive[eidx] = False
        live = ~esc & ~intrap
        sidx = idx[live]
        per = step - ref_step
        if 0 < per <= MAX_PERIOD and sidx.size:
            with np.errstate(all="ignore"):
                close = np.abs(z[sidx] - ref[sidx]) < CYCLE_TOL
            didx = sidx[close]
            det_step[didx] = step
            det_per[didx] = per
            det_z[didx] = z[didx]
            alive[didx] = False
        if step == power:
            ref[alive] = z[alive]
            ref_step = step
            power *= 2
    still = np.nonzero(alive)[0]
    aux1[still] = max_iter
    with np.errstate(all="ignore"):
        az = np.abs(z[still])
    aux2[still] = np.where(np.isfinite(az), az, 0.0)
    return det_step, det_per, det_z


def classify_dynamic(lam, p, q, z0, max_iter, trap_r):
    """Classify a flat array of dynamic-plane seeds at fixed lambda.

    Returns (tag uint8, aux1 int32, aux2 float64).
    """
    n = z0.size
    tag = np.zeros(n, np.uint8)
    aux1 = np.zeros(n, np.int32)
    aux2 = np.zeros(n, np.float64)
    det_step, det_per, det_z = _sweep(complex(lam), p, q, z0.astype(np.complex128),
                                      float(trap_r), max_iter, tag, aux1, aux2,
                                      DYN_ZERO, DYN_POLE)
    pool = np.nonzero(det_per > 0)[0]
    if pool.size:
        ok, per, pt, mult = _refine_pool(np.full(pool.size, complex(lam)), p, q,
                                         det_z[pool], det_per[pool])
        am = np.abs(mult)
        att = ok & (am < 1 - 1e-9)
        neu = ok & ~att & (np.abs(am - 1) <= 1e-9)
        gi = pool[att]
        tag[gi] = DYN_CYCLE
        aux1[gi] = per[att]
        aux2[gi] = am[att]
        ni = pool[neu]
        tag[ni] = DYN_NEUTRAL
        aux1[ni] = per[neu]
        aux2[ni] = am[neu]
        rest = pool[~att & ~neu]
        tag[rest] = DYN_UNDECIDED
        aux1[rest] = det_step[rest]
        aux2[rest] = 0.0
    return tag, aux1, aux2


def basin_dem(lam, p, q, z0, max_iter, trap_r):
    """Trap entry plus a boundary distance estimate for basin cartography.

    Returns (entered uint8, entry_step int32, dem float64): dem is the
    Milnor-style estimate |w| log(1/|w|) / |(f^n)'(z)| evaluated at the
    first trap entry, a distance-to-Julia-set scale used to wall off
    boundary-straddling cells before component labeling.
    """
    n = z0.size
    z = z0.astype(np.complex128).copy()
    entered = np.zeros(n, np.uint8)
    entry = np.zeros(n, np.int32)
    dem = np.zeros(n, np.float64)
    chain = np.ones(n, np.complex128)
    alive = np.ones(n, bool)
    a0 = np.abs(z) < trap_r
    entered[a0] = 1
    wf = np.maximum(np.abs(z[a0]), 1e-12)
    with np.errstate(all="ignore"):
        dem[a0] = np.where(wf < 1, wf * np.log(1 / wf), 0.0)
    alive &= ~a0
    for step in range(1, max_iter + 1):
        if not alive.any():
            break
        idx = np.nonzero(alive)[0]
        with np.errstate(all="ignore"):
            dw = _deriv_vec(lam, p, q, z[idx])
            zn = _eval_vec(lam, p, q, z[idx])
            azn = np.abs(zn)
        bad = ~_finite(zn) | (azn > R_MAX) | ~_finite(dw)
        with np.errstate(all="ignore"):
            ch = chain[idx] * dw
            over = np.abs(ch) > 1e280
        chain[idx] = np.where(over, 1e280 + 0j, ch)
        z[idx] = np.where(bad, _INF, zn)
        hit = ~bad & (azn < trap_r)
        hidx = idx[hit]
        entered[hidx] = 1
        entry[hidx] = step
        wf = np.maximum(azn[hit], 1e-12)
        with np.errstate(all="ignore"):
            dem[hidx] = wf * np.log(1 / wf) / np.abs(chain[hidx])
        alive[idx[bad]] = False
        alive[hidx] = False
    return entered, entry, dem


def classify_param(p, q, lams, max_iter):
    """Classify a flat array of parameters by the orbit of v = i^p lambda.

    Capture index n is the first entry into the certified disk: the t* disk
    when |lambda| < t* (exact by the contraction inequality), the validated
    trap-disk formula otherwise (upper bound for the basin-entry index).
    Escaping and neutral orbits are undecided; lambda = 0 is a parameter
    singularity and is left undecided.
    """
    n = lams.size
    tag = np.zeros(n, np.uint8)
    aux1 = np.zeros(n, np.int32)
    aux2 = np.zeros(n, np.float64)
    lams = lams.astype(np.complex128)
    work = np.nonzero(lams != 0)[0]
    if work.size == 0:
        return tag, aux1, aux2
    ll = lams[work]
    al = np.abs(ll)
    m = p * q
    ts = (math.pi / 4.0) ** (1.0 / q)
    with np.errstate(all="ignore"):
        rtrap = np.minimum(0.1, (0.25 / al) ** (1.0 / (m - 1)))
    rcap = np.where(al < ts, ts, rtrap)
    ip = (1 + 0j, 1j, -1 + 0j, -1j)[p % 4]
    v = ip * ll
    ttag = np.zeros(ll.size, np.uint8)
    ta1 = np.zeros(ll.size, np.int32)
    ta2 = np.zeros(ll.size, np.float64)
    det_step, det_per, det_z = _sweep(ll, p, q, v, rcap, max_iter,
                                      ttag, ta1, ta2, PAR_CAPTURE, PAR_UNDECIDED)
    pool = np.nonzero(det_per > 0)[0]
    if pool.size:
        ok, per, pt, mult = _refine_pool(ll[pool], p, q, det_z[pool], det_per[pool])
        am = np.abs(mult)
        att = ok & (am < 1 - 1e-9)
        gi = pool[att]
        ttag[gi] = PAR_SHELL
        ta1[gi] = per[att]
        ta2[gi] = am[att]
        rest = pool[~att]
        ttag[rest] = PAR_UNDECIDED
        ta1[rest] = det_step[rest]
        ta2[rest] = 0.0
    tag[work] = ttag
    aux1[work] = ta1
    aux2[work] = ta2
    return tag, aux1, aux2
