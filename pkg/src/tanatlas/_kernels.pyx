# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled orbit-classification kernels.

Scalar C mirror of the state machine in `_kernels_py` (trap entry, escape,
global-schedule Brent detection, Newton refinement, minimal-period
reduction); see that module for the semantics.  The grid loops release the
GIL so row blocks can run on a thread pool.
"""

import numpy as np

from libc.math cimport (INFINITY, M_PI, cos, cosh, exp, fabs, floor, fmax,
                        fmin, hypot, isfinite, log, pow, sin, sinh)

cdef double R_MAX = 1e8
cdef double CYCLE_TOL = 1e-6
cdef int MAX_PERIOD = 64
cdef double TAN_IM_CUTOFF = 20.0
cdef double POLE_PROX = 1e-14

cdef int DYN_UNDECIDED = 0
cdef int DYN_ZERO = 1
cdef int DYN_CYCLE = 2
cdef int DYN_POLE = 3
cdef int DYN_NEUTRAL = 4
cdef int PAR_UNDECIDED = 0
cdef int PAR_CAPTURE = 1
cdef int PAR_SHELL = 2

BACKEND = "compiled"

cdef double HALF_PI = M_PI / 2.0


cdef inline bint _finite(double complex z) nogil:
    return isfinite(z.real) and isfinite(z.imag)


cdef inline double complex _at_inf() nogil:
    return INFINITY + 1j * INFINITY


cdef inline double complex _eval(double complex lam, int p, int q, double complex z) nogil:
    """lambda * tan^p(z^q), mirroring core.evaluate branch for branch."""
    cdef double complex w = 1.0 + 0j
    cdef int i
    for i in range(q):
        w = w * z
    cdef double x = w.real
    cdef double y = w.imag
    cdef double complex t
    cdef double k, dx, den
    if fabs(y) >= TAN_IM_CUTOFF:
        t = 1j if y > 0 else -1j
    else:
        k = floor((x - HALF_PI) / M_PI + 0.5)
        dx = x - (HALF_PI + k * M_PI)
        if hypot(dx, y) < POLE_PROX * fmax(1.0, abs(w)):
            return _at_inf()
        den = cos(2.0 * x) + cosh(2.0 * y)
        if den == 0.0:
            return _at_inf()
        t = (sin(2.0 * x) / den) + 1j * (sinh(2.0 * y) / den)
    cdef double complex tp = 1.0 + 0j
    for i in range(p):
        tp = tp * t
    return lam * tp


cdef inline double complex _deriv(double complex lam, int p, int q, double complex z) nogil:
    """f'(z) with the same saturation branches as core.derivative."""
    cdef double complex w = 1.0 + 0j
    cdef int i
    for i in range(q):
        w = w * z
    cdef double x = w.real
    cdef double y = w.imag
    cdef double complex t, sec2, c
    cdef double k, dx, den, s, ex
    if fabs(y) >= TAN_IM_CUTOFF:
        s = 1.0 if y > 0 else -1.0
        t = 1j if y > 0 else -1j
        ex = exp(-2.0 * s * y)
        sec2 = (4.0 * (ex * cos(2.0 * s * x))) + 1j * (4.0 * (ex * sin(2.0 * s * x)))
    else:
        k = floor((x - HALF_PI) / M_PI + 0.5)
        dx = x - (HALF_PI + k * M_PI)
        if hypot(dx, y) < POLE_PROX * fmax(1.0, abs(w)):
            return _at_inf()
        den = cos(2.0 * x) + cosh(2.0 * y)
        if den == 0.0:
            return _at_inf()
        t = (sin(2.0 * x) / den) + 1j * (sinh(2.0 * y) / den)
        c = cos(x) * cosh(y) - 1j * (sin(x) * sinh(y))
        sec2 = 1.0 / (c * c)
    cdef double complex zq1 = 1.0 + 0j
    for i in range(q - 1):
        zq1 = zq1 * z
    cdef double complex tp1 = 1.0 + 0j
    for i in range(p - 1):
        tp1 = tp1 * t
    return (p * q) * lam * zq1 * tp1 * sec2


cdef inline bint _chain(double complex lam, int p, int q, double complex z, int steps,
                        double complex *w_out, double complex *d_out) nogil:
    """f^steps and chain-rule multiplier; False on blow-up."""
    cdef double complex w = z
    cdef double complex d = 1.0 + 0j
    cdef double complex dw
    cdef double ad
    cdef int i
    for i in range(steps):
        dw = _deriv(lam, p, q, w)
        if not _finite(dw):
            return False
        d = d * dw
        ad = abs(d)
        if ad > 1e300 or (ad != 0 and ad < 1e-300):
            return False
        w = _eval(lam, p, q, w)
        if not _finite(w):
            return False
    w_out[0] = w
    d_out[0] = d
    return True


cdef inline int _refine(double complex lam, int p, int q, double complex zc, int per,
                        int *out_per, double complex *out_mult) nogil:
    """Newton-polish a Brent candidate: 1 attracting, 2 neutral, 0 failed."""
    cdef double complex z = zc
    cdef double complex w, d, g, gp, step, w2, d2, mm
    cdef int it, dd, minper
    cdef double am
    for it in range(50):
        if not _chain(lam, p, q, z, per, &w, &d):
            return 0
        g = w - z
        if abs(g) < 1e-12 * (1 + abs(z)):
            break
        gp = d - 1.0
        if gp == 0:
            return 0
        step = g / gp
        if not _finite(step):
            return 0
        z = z - step
    if not _chain(lam, p, q, z, per, &w, &d):
        return 0
    if not (abs(w - z) < 1e-10 * (1 + abs(z))):
        return 0
    minper = per
    mm = d
    for dd in range(1, per):
        if per % dd:
            continue
        if not _chain(lam, p, q, z, dd, &w2, &d2):
            continue
        if abs(w2 - z) < 1e-8 * (1 + abs(z)):
            minper = dd
            mm = d2
            break
    out_per[0] = minper
    out_mult[0] = mm
    am = abs(mm)
    if am < 1.0 - 1e-9:
        return 1
    if fabs(am - 1.0) <= 1e-9:
        return 2
    return 0


cdef inline int _cell_dynamic(double complex lam, int p, int q, double complex z0,
                              int max_iter, double trap_r,
                              int *aux1, double *aux2) nogil:
    cdef double complex z = z0
    cdef double complex ref, mult
    cdef int step, per, res, rper
    cdef int ref_step = 0
    cdef int power = 1
    cdef double az
    if abs(z) < trap_r:
        aux1[0] = 0
        aux2[0] = abs(z)
        return DYN_ZERO
    ref = z
    for step in range(1, max_iter + 1):
        z = _eval(lam, p, q, z)
        if not _finite(z) or abs(z) > R_MAX:
            aux1[0] = step
            aux2[0] = 0.0
            return DYN_POLE
        az = abs(z)
        if az < trap_r:
            aux1[0] = step
            aux2[0] = az
            return DYN_ZERO
        per = step - ref_step
        if 1 <= per <= MAX_PERIOD and abs(z - ref) < CYCLE_TOL:
            res = _refine(lam, p, q, z, per, &rper, &mult)
            if res == 1:
                aux1[0] = rper
                aux2[0] = abs(mult)
                return DYN_CYCLE
            if res == 2:
                aux1[0] = rper
                aux2[0] = abs(mult)
                return DYN_NEUTRAL
            aux1[0] = step
            aux2[0] = 0.0
            return DYN_UNDECIDED
        if step == power:
            ref = z
            ref_step = step
            power *= 2
    aux1[0] = max_iter
    aux2[0] = abs(z)
    return DYN_UNDECIDED


cdef inline int _cell_param(int p, int q, double complex lam, int max_iter,
                            int *aux1, double *aux2) nogil:
    cdef double complex z, ref, mult, v
    cdef int step, per, res, rper
    cdef int ref_step = 0
    cdef int power = 1
    cdef double az, al, rtrap, rcap, ts
    cdef int m = p * q
    cdef int pr = p % 4
    if lam == 0:
        aux1[0] = 0
        aux2[0] = 0.0
        return PAR_UNDECIDED
    al = abs(lam)
    rtrap = fmin(0.1, pow(0.25 / al, 1.0 / (m - 1)))
    ts = pow(M_PI / 4.0, 1.0 / q)
    rcap = ts if al < ts else rtrap
    if pr == 0:
        v = lam
    elif pr == 1:
        v = 1j * lam
    elif pr == 2:
        v = -lam
    else:
        v = -1j * lam
    z = v
    if abs(z) < rcap:
        aux1[0] = 0
        aux2[0] = abs(z)
        return PAR_CAPTURE
    ref = z
    for step in range(1, max_iter + 1):
        z = _eval(lam, p, q, z)
        if not _finite(z) or abs(z) > R_MAX:
            aux1[0] = step
            aux2[0] = 0.0
            return PAR_UNDECIDED
        az = abs(z)
        if az < rcap:
            aux1[0] = step
            aux2[0] = az
            return PAR_CAPTURE
        per = step - ref_step
        if 1 <= per <= MAX_PERIOD and abs(z - ref) < CYCLE_TOL:
            res = _refine(lam, p, q, z, per, &rper, &mult)
            if res == 1:
                aux1[0] = rper
                aux2[0] = abs(mult)
                return PAR_SHELL
            aux1[0] = step
            aux2[0] = 0.0
            return PAR_UNDECIDED
        if step == power:
            ref = z
            ref_step = step
            power *= 2
    aux1[0] = max_iter
    aux2[0] = abs(z)
    return PAR_UNDECIDED


cdef inline unsigned char _cell_dem(double complex lam, int p, int q,
                                    double complex z0, int max_iter, double trap_r,
                                    int *entry, double *dem) nogil:
    """Trap entry + Milnor distance estimate |w| log(1/|w|) / |(f^n)'|."""
    cdef double complex z = z0
    cdef double complex chain = 1.0 + 0j
    cdef double complex dw
    cdef int step
    cdef double az, wf, ach
    entry[0] = 0
    dem[0] = 0.0
    az = abs(z)
    if az < trap_r:
        wf = fmax(az, 1e-12)
        dem[0] = wf * log(1.0 / wf) if wf < 1 else 0.0
        return 1
    for step in range(1, max_iter + 1):
        dw = _deriv(lam, p, q, z)
        z = _eval(lam, p, q, z)
        if not _finite(z) or abs(z) > R_MAX or not _finite(dw):
            return 0
        chain = chain * dw
        ach = abs(chain)
        if ach > 1e280:
            chain = 1e280 + 0j
        az = abs(z)
        if az < trap_r:
            entry[0] = step
            wf = fmax(az, 1e-12)
            dem[0] = (wf * log(1.0 / wf)) / abs(chain)
            return 1
    return 0


def classify_dynamic(lam, int p, int q, z0, int max_iter, double trap_r):
    """Classify a flat complex array of dynamic-plane seeds at fixed lambda."""
    z0 = np.ascontiguousarray(z0, dtype=np.complex128)
    cdef double complex[::1] zv = z0
    cdef Py_ssize_t n = zv.shape[0]
    tag = np.zeros(n, np.uint8)
    aux1 = np.zeros(n, np.int32)
    aux2 = np.zeros(n, np.float64)
    cdef unsigned char[::1] tv = tag
    cdef int[::1] a1 = aux1
    cdef double[::1] a2 = aux2
    cdef double complex clam = lam
    cdef Py_ssize_t i
    cdef int ia
    cdef double da
    with nogil:
        for i in range(n):
            tv[i] = <unsigned char> _cell_dynamic(clam, p, q, zv[i], max_iter,
                                                  trap_r, &ia, &da)
            a1[i] = ia
            a2[i] = da
    return tag, aux1, aux2


def basin_dem(lam, int p, int q, z0, int max_iter, double trap_r):
    """Trap entry plus boundary distance estimate; see _kernels_py.basin_dem."""
    z0 = np.ascontiguousarray(z0, dtype=np.complex128)
    cdef double complex[::1] zv = z0
    cdef Py_ssize_t n = zv.shape[0]
    entered = np.zeros(n, np.uint8)
    entry = np.zeros(n, np.int32)
    dem = np.zeros(n, np.float64)
    cdef unsigned char[::1] ev = entered
    cdef int[::1] sv = entry
    cdef double[::1] dv = dem
    cdef double complex clam = lam
    cdef Py_ssize_t i
    cdef int ia
    cdef double da
    with nogil:
        for i in range(n):
            ev[i] = _cell_dem(clam, p, q, zv[i], max_iter, trap_r, &ia, &da)
            sv[i] = ia
            dv[i] = da
    return entered, entry, dem


def classify_param(int p, int q, lams, int max_iter):
    """Classify a flat complex array of parameters by the orbit of v."""
    lams = np.ascontiguousarray(lams, dtype=np.complex128)
    cdef double complex[::1] lv = lams
    cdef Py_ssize_t n = lv.shape[0]
    tag = np.zeros(n, np.uint8)
    aux1 = np.zeros(n, np.int32)
    aux2 = np.zeros(n, np.float64)
    cdef unsigned char[::1] tv = tag
    cdef int[::1] a1 = aux1
    cdef double[::1] a2 = aux2
    cdef Py_ssize_t i
    cdef int ia
    cdef double da
    with nogil:
        for i in range(n):
            tv[i] = <unsigned char> _cell_param(p, q, lv[i], max_iter, &ia, &da)
            a1[i] = ia
            a2[i] = da
    return tag, aux1, aux2
