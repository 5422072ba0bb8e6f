# cython: language_level=3
"""Compiled versions of the numerical hot spots.

Function-for-function twin of ``ktt._pykernels``: identical algorithms and
thresholds, evaluated per element in C instead of vectorized NumPy.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport (M_PI, cos, erfc, exp, fabs, floor, lgamma, log, log1p,
                        sin, sqrt)
from libc.stdlib cimport free, malloc

cnp.import_array()

NAME = "cython"

cdef double FRESNEL_SERIES_MAX = 1.6
cdef double GF_SMALL_A = 1.0
cdef int GF_SERIES_TERMS = 20
cdef double GF_TOL = 1e-17
cdef double EPS = 1e-16
cdef double FPMIN = 1e-300
cdef int MAXIT = 1000

ctypedef double complex cplx


cdef inline cplx cexp_i(double phase) nogil:
    return cos(phase) + 1j * sin(phase)


cdef inline double cabs_(cplx z) nogil:
    return sqrt(z.real * z.real + z.imag * z.imag)


# ---------------------------------------------------------------- Fresnel

cdef void fresnel1(double x, double *c, double *s) nogil:
    cdef double ax = fabs(x), fact, term, csum, ssum, sign, pix2, n, a
    cdef int k
    cdef cplx b, cc, d, h, delta, cs
    if ax <= FRESNEL_SERIES_MAX:
        fact = 0.5 * M_PI * ax * ax
        term = ax
        csum = ax
        ssum = 0.0
        for k in range(1, 60):
            term = term * fact / k
            sign = -1.0 if (k // 2) % 2 else 1.0
            if k % 2:
                ssum += sign * term / (2 * k + 1)
            else:
                csum += sign * term / (2 * k + 1)
            if term < EPS * 1e-2 * (csum if csum > 1e-300 else 1e-300):
                break
        c[0] = csum
        s[0] = ssum
    else:
        pix2 = M_PI * ax * ax
        b = 1.0 - 1j * pix2
        cc = 1.0 / FPMIN
        d = 1.0 / b
        h = d
        n = -1.0
        for k in range(2, MAXIT):
            n += 2.0
            a = -n * (n + 1.0)
            b = b + 4.0
            d = 1.0 / (a * d + b)
            cc = b + a / cc
            delta = cc * d
            h = h * delta
            if fabs(delta.real - 1.0) + fabs(delta.imag) < EPS:
                break
        h = (ax - 1j * ax) * h
        cs = (0.5 + 0.5j) * (1.0 - cexp_i(0.5 * pix2) * h)
        c[0] = cs.real
        s[0] = cs.imag
    if x < 0:
        c[0] = -c[0]
        s[0] = -s[0]


def fresnel(u):
    """Fresnel integrals ``C(u)``, ``S(u)`` (see ``_pykernels.fresnel``)."""
    cdef double[::1] uv = np.ascontiguousarray(np.atleast_1d(np.asarray(u, dtype=float)))
    cdef Py_ssize_t i, n = uv.shape[0]
    c = np.empty(n)
    s = np.empty(n)
    cdef double[::1] cv = c, sv = s
    with nogil:
        for i in range(n):
            fresnel1(uv[i], &cv[i], &sv[i])
    return c, s


# ------------------------------------------------ generalized Fresnel moments

cdef inline cplx j0(double b) nogil:
    cdef double h
    if b == 0.0:
        return 1.0
    h = 0.5 * b
    return sin(b) / b + 1j * (sin(h) * sin(h) * 2.0 / b)


cdef inline int backward_start(int nmax, double absb) nogil:
    cdef int top = nmax + 1
    cdef double prod = 1.0
    while prod > GF_TOL:
        top += 1
        prod *= (absb + 1.0) / top
    return top


cdef inline int series_terms(double absa) nogil:
    cdef int m = 0
    cdef double term = 1.0
    while term > GF_TOL and m < GF_SERIES_TERMS:
        m += 1
        term *= 0.5 * absa / m
    return m


cdef int gf_small(int nk, double a, double b, cplx *out) nogil:
    cdef int nterms = series_terms(fabs(a))
    cdef int nmax = nk - 1 + 2 * nterms
    cdef double absb = fabs(b)
    cdef int top = backward_start(nmax, absb)
    cdef cplx *j = <cplx *> malloc((nmax + 1) * sizeof(cplx))
    cdef cplx eib = cexp_i(b), jm, coef, ib = 1j * b
    cdef int m, k
    if j == NULL:
        return -1
    j[0] = j0(b)
    if absb >= 1.0:
        jm = j[0]
        for m in range(1, nmax + 1):
            if m > absb:
                break
            jm = (eib - m * jm) / (1j * b)
            j[m] = jm
    jm = eib / (top + 1.0 - ib)
    for m in range(top, 0, -1):
        jm = (eib - ib * jm) * (1.0 / m)
        if m - 1 <= nmax and m - 1 > 0 and m - 1 > absb:
            j[m - 1] = jm
    for k in range(nk):
        out[k] = 0.0
    coef = 1.0
    for m in range(nterms + 1):
        if m:
            coef = coef * (0.5j * a) / m
        for k in range(nk):
            out[k] = out[k] + coef * j[k + 2 * m]
    free(j)
    return 0


cdef void gf_large(int nk, double a, double b, cplx *out) nogil:
    cdef double sg = 1.0 if a > 0 else -1.0
    cdef double absa = fabs(a)
    cdef double z = sqrt(absa / M_PI)
    cdef double ell = sg * b / sqrt(M_PI * absa)
    cdef double g = -0.5 * sg * b * b / absa
    cdef double w0 = ell, w1 = ell + z, c0, s0, c1, s1
    cdef cplx m0, m1, m2, eg, e0, e1, isp
    fresnel1(w0, &c0, &s0)
    fresnel1(w1, &c1, &s1)
    m0 = (c1 - c0) + 1j * sg * (s1 - s0)
    eg = cexp_i(g)
    out[0] = eg * m0 / z
    if nk > 1:
        e0 = cexp_i(0.5 * sg * M_PI * w0 * w0)
        e1 = cexp_i(0.5 * sg * M_PI * w1 * w1)
        isp = 1j * sg * M_PI
        m1 = (e1 - e0) / isp
        out[1] = eg * (m1 - ell * m0) / (z * z)
        if nk > 2:
            m2 = (w1 * e1 - w0 * e0) / isp - m0 / isp
            out[2] = eg * (m2 - 2.0 * ell * m1 + ell * ell * m0) / (z * z * z)


cdef int gf(int nk, double a, double b, cplx *out) nogil:
    if fabs(a) < GF_SMALL_A:
        return gf_small(nk, a, b, out)
    gf_large(nk, a, b, out)
    return 0


def gfresnel(int nk, double a, double b):
    """Scalar generalized Fresnel moments (see ``_pykernels.gfresnel``)."""
    cdef cplx out[3]
    if nk < 1 or nk > 3:
        raise ValueError("nk must be 1, 2 or 3")
    if gf(nk, a, b, out) != 0:
        raise MemoryError()
    return [out[k].real for k in range(nk)], [out[k].imag for k in range(nk)]


def clothoid_xy(double x0, double y0, double th0, double k0, double dk, s):
    """Clothoid positions at arc lengths ``s`` (see ``_pykernels.clothoid_xy``)."""
    cdef double[::1] sv = np.ascontiguousarray(np.atleast_1d(np.asarray(s, dtype=float)))
    cdef Py_ssize_t i, n = sv.shape[0]
    x = np.empty(n)
    y = np.empty(n)
    cdef double[::1] xv = x, yv = y
    cdef cplx w, rot = cexp_i(th0)
    cdef cplx out[1]
    cdef double si
    cdef int err = 0
    with nogil:
        for i in range(n):
            si = sv[i]
            if dk == 0.0:
                w = j0(k0 * si)
            else:
                if gf(1, dk * si * si, k0 * si, out) != 0:
                    err = 1
                    break
                w = out[0]
            w = w * rot
            xv[i] = x0 + si * w.real
            yv[i] = y0 + si * w.imag
    if err:
        raise MemoryError()
    return x, y


# ------------------------------------------------------- incomplete gamma

cdef void gamma_parts(double a, double x, double gln, double *p, double *q) nogil:
    cdef double pref = exp(-x + a * log(x) - gln)
    cdef double ap, term, total, b, c, d, h, an, delta
    cdef int i
    if x < a + 1.0:
        ap = a
        term = 1.0 / a
        total = term
        for i in range(MAXIT * 10):
            ap += 1.0
            term = term * x / ap
            total += term
            if fabs(term) < fabs(total) * EPS:
                break
        p[0] = total * pref
        q[0] = 1.0 - p[0]
    else:
        b = x + 1.0 - a
        c = 1.0 / FPMIN
        d = 1.0 / b
        h = d
        for i in range(1, MAXIT):
            an = -i * (i - a)
            b += 2.0
            d = an * d + b
            if fabs(d) < FPMIN:
                d = FPMIN
            c = b + an / c
            if fabs(c) < FPMIN:
                c = FPMIN
            d = 1.0 / d
            delta = d * c
            h *= delta
            if fabs(delta - 1.0) < EPS:
                break
        q[0] = pref * h
        p[0] = 1.0 - q[0]


cdef inline bint isposinf(double x) nogil:
    return x > 1.7976931348623157e308


def gammainc(double a, x):
    """Regularized lower incomplete gamma ``P(a, x)``."""
    cdef double[::1] xv = np.ascontiguousarray(np.atleast_1d(np.asarray(x, dtype=float)))
    cdef Py_ssize_t i, n = xv.shape[0]
    out = np.empty(n)
    cdef double[::1] ov = out
    cdef double gln = lgamma(a), p, q
    with nogil:
        for i in range(n):
            if isposinf(xv[i]):
                ov[i] = 1.0
            elif xv[i] > 0:
                gamma_parts(a, xv[i], gln, &p, &q)
                ov[i] = p
            else:
                ov[i] = 0.0
    return out


def gammaincc(double a, x):
    """Regularized upper incomplete gamma ``Q(a, x)``."""
    cdef double[::1] xv = np.ascontiguousarray(np.atleast_1d(np.asarray(x, dtype=float)))
    cdef Py_ssize_t i, n = xv.shape[0]
    out = np.empty(n)
    cdef double[::1] ov = out
    cdef double gln = lgamma(a), p, q
    with nogil:
        for i in range(n):
            if isposinf(xv[i]):
                ov[i] = 0.0
            elif xv[i] > 0:
                gamma_parts(a, xv[i], gln, &p, &q)
                ov[i] = q
            else:
                ov[i] = 1.0
    return out


# -------------------------------------------------------- incomplete beta

cdef double betacf(double a, double b, double x) nogil:
    cdef double qab = a + b, qap = a + 1.0, qam = a - 1.0
    cdef double c = 1.0, d, h, aa, delta
    cdef int m, m2
    d = 1.0 - qab * x / qap
    if fabs(d) < FPMIN:
        d = FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, MAXIT):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if fabs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if fabs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if fabs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if fabs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if fabs(delta - 1.0) < EPS:
            break
    return h


def betainc(double a, double b, x):
    """Regularized incomplete beta ``I_x(a, b)``."""
    cdef double[::1] xv = np.ascontiguousarray(np.atleast_1d(np.asarray(x, dtype=float)))
    cdef Py_ssize_t i, n = xv.shape[0]
    out = np.empty(n)
    cdef double[::1] ov = out
    cdef double lnorm = lgamma(a + b) - lgamma(a) - lgamma(b), xi, bt
    with nogil:
        for i in range(n):
            xi = xv[i]
            if xi >= 1.0:
                ov[i] = 1.0
            elif xi <= 0.0 or xi != xi:
                ov[i] = 0.0
            else:
                bt = exp(lnorm + a * log(xi) + b * log1p(-xi))
                if xi < (a + 1.0) / (a + b + 2.0):
                    ov[i] = bt * betacf(a, b, xi) / a
                else:
                    ov[i] = 1.0 - bt * betacf(b, a, 1.0 - xi) / b
    return out


# ---------------------------------------------------------------- normal

def norm_cdf(z):
    """Standard normal CDF from the C library ``erfc``."""
    cdef double[::1] zv = np.ascontiguousarray(np.atleast_1d(np.asarray(z, dtype=float)))
    cdef Py_ssize_t i, n = zv.shape[0]
    out = np.empty(n)
    cdef double[::1] ov = out
    with nogil:
        for i in range(n):
            ov[i] = 0.5 * erfc(-zv[i] / 1.4142135623730951)
    return out
