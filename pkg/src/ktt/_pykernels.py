"""NumPy implementations of the numerical hot spots.

Same functions, same algorithms and same thresholds as the compiled
``_ckernels`` module; the two are checked against each other in the test
suite.  Everything here is vectorized over the array argument.

Functions
---------
fresnel(u)                      Fresnel integrals C(u), S(u).
gfresnel(nk, a, b)              Moments of exp(i(a t^2/2 + b t)) on [0, 1].
clothoid_xy(x0, y0, th0, k0, dk, s)
                                Points of a clothoid at arc lengths s.
gammainc(a, x), gammaincc(a, x) Regularized incomplete gamma P and Q.
betainc(a, b, x)                Regularized incomplete beta I_x(a, b).
norm_cdf(z)                     Standard normal CDF.
"""
import math

import numpy as np

NAME = "python"

FRESNEL_SERIES_MAX = 1.6
GF_SMALL_A = 1.0
GF_SERIES_TERMS = 20
GF_TOL = 1e-17
EPS = 1e-16
FPMIN = 1e-300
MAXIT = 1000


def _as_array(x):
    return np.atleast_1d(np.asarray(x, dtype=float))


# ---------------------------------------------------------------- Fresnel


def fresnel(u):
    """Fresnel integrals ``C(u) = int_0^u cos(pi v^2/2) dv`` and ``S(u)``.

    Maclaurin series for ``|u| <= 1.6``; above that, the complementary error
    function continued fraction evaluated with the modified Lentz method.
    """
    u = _as_array(u)
    ax = np.abs(u)
    c = np.zeros_like(ax)
    s = np.zeros_like(ax)

    small = ax <= FRESNEL_SERIES_MAX
    if small.any():
        x = ax[small]
        fact = 0.5 * math.pi * x * x
        term = x.copy()
        csum = x.copy()
        ssum = np.zeros_like(x)
        for k in range(1, 60):
            term = term * fact / k
            sign = -1.0 if (k // 2) % 2 else 1.0
            if k % 2:
                ssum += sign * term / (2 * k + 1)
            else:
                csum += sign * term / (2 * k + 1)
            if np.all(term < EPS * 1e-2 * np.maximum(csum, 1e-300)):
                break
        c[small] = csum
        s[small] = ssum

    big = ~small
    if big.any():
        x = ax[big]
        pix2 = math.pi * x * x
        b = 1.0 - 1j * pix2
        cc = np.full(x.shape, 1.0 / FPMIN, dtype=complex)
        d = 1.0 / b
        h = d.copy()
        n = -1
        for _ in range(2, MAXIT):
            n += 2
            a = -n * (n + 1.0)
            b = b + 4.0
            d = 1.0 / (a * d + b)
            cc = b + a / cc
            delta = cc * d
            h = h * delta
            if np.all(np.abs(delta.real - 1.0) + np.abs(delta.imag) < EPS):
                break
        h = (x - 1j * x) * h
        cs = (0.5 + 0.5j) * (1.0 - np.exp(0.5j * pix2) * h)
        c[big] = cs.real
        s[big] = cs.imag

    neg = u < 0
    c[neg] = -c[neg]
    s[neg] = -s[neg]
    return c, s


# ------------------------------------------------ generalized Fresnel moments


def _jn(nmax, b):
    """``J_n(b) = int_0^1 t^n exp(i b t) dt`` for n = 0..nmax, shape (nmax+1, len(b)).

    Forward recurrence where it is stable (n <= |b|), Miller-style backward
    recurrence above.
    """
    absb = np.abs(b)
    eib = np.exp(1j * b)
    out = np.empty((nmax + 1, b.size), dtype=complex)
    out[0] = np.sinc(b / math.pi) + 0.5j * b * np.sinc(b / (2 * math.pi)) ** 2

    fwd = absb >= 1.0
    if fwd.any():
        bf = np.where(fwd, b, 1.0)
        jm = out[0].copy()
        for m in range(1, nmax + 1):
            jm = (eib - m * jm) / (1j * bf)
            out[m] = np.where(m <= absb, jm, 0.0)

    top = _backward_start(nmax, absb.max() if b.size else 0.0)
    jm = eib / (top + 1.0 - 1j * b)
    for m in range(top, 0, -1):
        jm = (eib - 1j * b * jm) / m
        if m - 1 <= nmax and m - 1 > 0:
            out[m - 1] = np.where(m - 1 <= absb, out[m - 1], jm)
    return out


def _backward_start(nmax, absb):
    # index where downward recurrence starts: error shrinks by |b|/m per step
    top = nmax + 1
    prod = 1.0
    while prod > GF_TOL:
        top += 1
        prod *= (absb + 1.0) / top
    return top


def _series_terms(absa):
    # smallest M with (|a|/2)^M / M! below tolerance
    m = 0
    term = 1.0
    while term > GF_TOL and m < GF_SERIES_TERMS:
        m += 1
        term *= 0.5 * absa / m
    return m


def _gf_small(nk, a, b):
    nterms = _series_terms(np.abs(a).max())
    j = _jn(nk - 1 + 2 * nterms, b)
    res = np.zeros((nk, a.size), dtype=complex)
    coef = np.ones(a.size, dtype=complex)
    for m in range(nterms + 1):
        if m:
            coef = coef * (0.5j * a) / m
        for k in range(nk):
            res[k] += coef * j[k + 2 * m]
    return res


def _gf_large(nk, a, b):
    sg = np.sign(a)
    absa = np.abs(a)
    z = np.sqrt(absa / math.pi)
    ell = sg * b / np.sqrt(math.pi * absa)
    g = -0.5 * sg * b * b / absa
    w0 = ell
    w1 = ell + z
    c0, s0 = fresnel(w0)
    c1, s1 = fresnel(w1)
    m0 = (c1 - c0) + 1j * sg * (s1 - s0)
    eg = np.exp(1j * g)
    res = np.zeros((nk, a.size), dtype=complex)
    res[0] = eg * m0 / z
    if nk > 1:
        e0 = np.exp(0.5j * sg * math.pi * w0 * w0)
        e1 = np.exp(0.5j * sg * math.pi * w1 * w1)
        isp = 1j * sg * math.pi
        m1 = (e1 - e0) / isp
        res[1] = eg * (m1 - ell * m0) / (z * z)
        if nk > 2:
            m2 = (w1 * e1 - w0 * e0) / isp - m0 / isp
            res[2] = eg * (m2 - 2.0 * ell * m1 + ell * ell * m0) / (z * z * z)
    return res


def gfresnel_array(nk, a, b):
    """Vectorized ``int_0^1 t^k exp(i(a t^2/2 + b t)) dt`` for k < nk (complex)."""
    a = _as_array(a)
    b = _as_array(b)
    a, b = np.broadcast_arrays(a, b)
    res = np.zeros((nk, a.size), dtype=complex)
    small = np.abs(a) < GF_SMALL_A
    if small.any():
        res[:, small] = _gf_small(nk, a[small], b[small])
    if (~small).any():
        res[:, ~small] = _gf_large(nk, a[~small], b[~small])
    return res


def gfresnel(nk, a, b):
    """Scalar generalized Fresnel moments.

    Returns ``(X, Y)``, two lists of length ``nk`` with
    ``X[k] = int_0^1 t^k cos(a t^2/2 + b t) dt`` and ``Y[k]`` the sine analogue.
    """
    res = gfresnel_array(nk, a, b)[:, 0]
    return [r.real for r in res], [r.imag for r in res]


def clothoid_xy(x0, y0, th0, k0, dk, s):
    """Positions along a clothoid with start ``(x0, y0)``, heading ``th0``,
    curvature ``k0`` and curvature rate ``dk``, at arc lengths ``s``."""
    s = _as_array(s)
    if dk == 0.0:
        b = k0 * s
        w = np.sinc(b / math.pi) + 0.5j * b * np.sinc(b / (2 * math.pi)) ** 2
    else:
        w = gfresnel_array(1, dk * s * s, k0 * s)[0]
    w = w * complex(math.cos(th0), math.sin(th0))
    return x0 + s * w.real, y0 + s * w.imag


# ------------------------------------------------------- incomplete gamma


def _gamma_parts(a, x):
    """Return (P, Q) for x > 0 computed by the series or continued fraction."""
    gln = math.lgamma(a)
    p = np.empty_like(x)
    q = np.empty_like(x)
    pref = np.exp(-x + a * np.log(x) - gln)

    ser = x < a + 1.0
    if ser.any():
        xs = x[ser]
        ap = a
        term = np.full(xs.shape, 1.0 / a)
        total = term.copy()
        for _ in range(MAXIT * 10):
            ap += 1.0
            term = term * xs / ap
            total += term
            if np.all(np.abs(term) < np.abs(total) * EPS):
                break
        p[ser] = total * pref[ser]
        q[ser] = 1.0 - p[ser]

    cf = ~ser
    if cf.any():
        xc = x[cf]
        b = xc + 1.0 - a
        c = np.full(xc.shape, 1.0 / FPMIN)
        d = 1.0 / b
        h = d.copy()
        for i in range(1, MAXIT):
            an = -i * (i - a)
            b = b + 2.0
            d = an * d + b
            d = np.where(np.abs(d) < FPMIN, FPMIN, d)
            c = b + an / c
            c = np.where(np.abs(c) < FPMIN, FPMIN, c)
            d = 1.0 / d
            delta = d * c
            h = h * delta
            if np.all(np.abs(delta - 1.0) < EPS):
                break
        q[cf] = pref[cf] * h
        p[cf] = 1.0 - q[cf]
    return p, q


def gammainc(a, x):
    """Regularized lower incomplete gamma ``P(a, x)``; 0 for x <= 0."""
    x = _as_array(x)
    out = np.zeros_like(x)
    pos = x > 0
    if pos.any():
        out[pos] = _gamma_parts(float(a), x[pos])[0]
    out[np.isposinf(x)] = 1.0
    return out


def gammaincc(a, x):
    """Regularized upper incomplete gamma ``Q(a, x)``; 1 for x <= 0."""
    x = _as_array(x)
    out = np.ones_like(x)
    pos = x > 0
    if pos.any():
        out[pos] = _gamma_parts(float(a), x[pos])[1]
    out[np.isposinf(x)] = 0.0
    return out


# -------------------------------------------------------- incomplete beta


def _betacf(a, b, x):
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < FPMIN, FPMIN, d)
    d = 1.0 / d
    h = d.copy()
    for m in range(1, MAXIT):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < FPMIN, FPMIN, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < FPMIN, FPMIN, c)
        d = 1.0 / d
        h = h * d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < FPMIN, FPMIN, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < FPMIN, FPMIN, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) < EPS):
            break
    return h


def betainc(a, b, x):
    """Regularized incomplete beta ``I_x(a, b)``, clamped to [0, 1] outside (0, 1)."""
    a = float(a)
    b = float(b)
    x = _as_array(x)
    out = np.where(x >= 1.0, 1.0, 0.0)
    inner = (x > 0.0) & (x < 1.0)
    if inner.any():
        xi = x[inner]
        lbt = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
               + a * np.log(xi) + b * np.log1p(-xi))
        bt = np.exp(lbt)
        lower = xi < (a + 1.0) / (a + b + 2.0)
        res = np.empty_like(xi)
        if lower.any():
            res[lower] = bt[lower] * _betacf(a, b, xi[lower]) / a
        if (~lower).any():
            res[~lower] = 1.0 - bt[~lower] * _betacf(b, a, 1.0 - xi[~lower]) / b
        out[inner] = res
    return out


# ---------------------------------------------------------------- normal


def norm_cdf(z):
    """Standard normal CDF via ``erfc(x) = Q(1/2, x^2)``."""
    z = _as_array(z)
    tail = 0.5 * gammaincc(0.5, 0.5 * z * z)
    return np.where(z < 0, tail, 1.0 - tail)
