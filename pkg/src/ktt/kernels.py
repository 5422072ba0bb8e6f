"""Bell-shaped velocity kernels.

Each stroke's speed is one of six unimodal lobes whose area is the stroke
amplitude ``D``.  This module evaluates them, integrates them in closed form
(the integral drives the arc-length inversion in :mod:`ktt.reconstruct`),
and converts between kernel parameters and the first two moments of the
lobe.

Moments are always expressed on the absolute time axis: ``M`` is the mean
time of the lobe treated as a density and ``V`` its variance.

Parameter conventions (``shape`` keys):

=========================  ===================================================
Gaussian                   ``mu`` (s, absolute), ``sigma2`` (s^2); t0 unused
Lognormal                  ``mu``, ``sigma2`` of ``log(t - t0)``
Gamma                      ``alpha`` (shape), ``beta`` (rate, 1/s)
Beta                       ``alpha``, ``beta``, ``scale`` (s, lobe duration)
DoubleBoundedLognormal     ``mu``, ``sigma2`` of ``log((t-t0)/(te-t))``, ``te``
GEV                        ``xi``, ``mu`` (s, relative to t0), ``sigma`` (s)
=========================  ===================================================
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from statistics import NormalDist
from types import MappingProxyType
from typing import Mapping

import numpy as np

from ._backend import kernels as _k
from .errors import (InfeasibleMomentsError, InvalidInputError, NumericFailureError,
                     UndefinedMomentError)
from .optimize import golden_section

EULER_GAMMA = 0.57721566490153286061
SQRT_2PI = math.sqrt(2.0 * math.pi)


class KernelKind(str, Enum):
    GAUSSIAN = "Gaussian"
    LOGNORMAL = "Lognormal"
    GAMMA = "Gamma"
    BETA = "Beta"
    DBL = "DoubleBoundedLognormal"
    GEV = "GEV"

    @classmethod
    def parse(cls, name: str) -> "KernelKind":
        key = name.strip().lower().replace("-", "").replace("_", "")
        for kind in cls:
            if key in (kind.value.lower(), kind.name.lower()):
                return kind
        raise InvalidInputError(f"unknown kernel kind {name!r}")


SHAPE_KEYS = {
    KernelKind.GAUSSIAN: ("mu", "sigma2"),
    KernelKind.LOGNORMAL: ("mu", "sigma2"),
    KernelKind.GAMMA: ("alpha", "beta"),
    KernelKind.BETA: ("alpha", "beta", "scale"),
    KernelKind.DBL: ("mu", "sigma2", "te"),
    KernelKind.GEV: ("xi", "mu", "sigma"),
}


@dataclass(frozen=True)
class KernelParams:
    """Velocity parameters of one stroke."""

    kind: KernelKind
    t0: float
    D: float
    shape: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        kind = KernelKind(self.kind)
        shape = dict(self.shape)
        if kind is KernelKind.BETA:
            shape.setdefault("scale", 1.0)
        keys = SHAPE_KEYS[kind]
        if set(shape) != set(keys):
            raise InvalidInputError(f"{kind.value} expects shape keys {keys}, got {sorted(shape)}")
        shape = {k: float(shape[k]) for k in keys}
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "D", float(self.D))
        object.__setattr__(self, "shape", MappingProxyType(shape))
        _validate(self)

    def __getitem__(self, key):
        return self.shape[key]

    def replace(self, t0=None, D=None, **shape) -> "KernelParams":
        new_shape = dict(self.shape)
        new_shape.update(shape)
        return KernelParams(self.kind, self.t0 if t0 is None else t0,
                            self.D if D is None else D, new_shape)

    def shifted(self, dt: float) -> "KernelParams":
        """The same lobe moved ``dt`` seconds later."""
        if self.kind is KernelKind.GAUSSIAN:
            return self.replace(t0=self.t0 + dt, mu=self.shape["mu"] + dt)
        if self.kind is KernelKind.DBL:
            return self.replace(t0=self.t0 + dt, te=self.shape["te"] + dt)
        return self.replace(t0=self.t0 + dt)

    def __eq__(self, other):
        if not isinstance(other, KernelParams):
            return NotImplemented
        return (self.kind is other.kind and self.t0 == other.t0 and self.D == other.D
                and dict(self.shape) == dict(other.shape))

    def __hash__(self):
        return hash((self.kind, self.t0, self.D, tuple(self.shape.items())))


@dataclass(frozen=True)
class Moments:
    M: float
    V: float

    def __post_init__(self):
        object.__setattr__(self, "M", float(self.M))
        object.__setattr__(self, "V", float(self.V))
        if not (math.isfinite(self.M) and math.isfinite(self.V)) or self.V <= 0:
            raise InvalidInputError(f"moments need finite M and V > 0, got {self}")


def _validate(p: KernelParams):
    s = p.shape
    if not all(math.isfinite(v) for v in (p.t0, p.D, *s.values())):
        raise InvalidInputError("kernel parameters must be finite")
    if p.D <= 0:
        raise InvalidInputError("D must be positive")
    kind = p.kind
    if kind in (KernelKind.GAUSSIAN, KernelKind.LOGNORMAL, KernelKind.DBL) and s["sigma2"] <= 0:
        raise InvalidInputError("sigma2 must be positive")
    if kind in (KernelKind.GAMMA, KernelKind.BETA) and (s["alpha"] <= 0 or s["beta"] <= 0):
        raise InvalidInputError("alpha and beta must be positive")
    if kind is KernelKind.BETA and s["scale"] <= 0:
        raise InvalidInputError("Beta scale must be positive")
    if kind is KernelKind.DBL and s["te"] <= p.t0:
        raise InvalidInputError("te must exceed t0")
    if kind is KernelKind.GEV:
        if s["sigma"] <= 0:
            raise InvalidInputError("GEV sigma must be positive")
        if s["xi"] >= 0.5:
            raise UndefinedMomentError("GEV needs xi < 0.5 (finite variance)")


# ------------------------------------------------------------- evaluation


def _gev_log_s(p: KernelParams, t):
    """``log s`` on the shifted axis, and a mask of points inside the support."""
    xi = p["xi"]
    z = (t - p.t0 - p["mu"]) / p["sigma"]
    if xi == 0.0:
        return -z, np.ones(z.shape, dtype=bool)
    arg = xi * z
    inside = arg > -1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        log_s = -np.log1p(np.where(inside, arg, 0.0)) / xi
    return log_s, inside


def evaluate(p: KernelParams, t):
    """Speed of the stroke at times ``t``; exactly 0 outside the kernel's support."""
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    out = np.zeros_like(t)
    s = p.shape
    kind = p.kind
    if kind is KernelKind.GAUSSIAN:
        sig = math.sqrt(s["sigma2"])
        out = p.D / (sig * SQRT_2PI) * np.exp(-0.5 * (t - s["mu"]) ** 2 / s["sigma2"])
    elif kind is KernelKind.LOGNORMAL:
        x = t - p.t0
        m = x > 0
        xm = x[m]
        sig = math.sqrt(s["sigma2"])
        out[m] = p.D / (sig * SQRT_2PI * xm) * np.exp(-0.5 * (np.log(xm) - s["mu"]) ** 2
                                                     / s["sigma2"])
    elif kind is KernelKind.GAMMA:
        x = t - p.t0
        m = x > 0
        xm = x[m]
        a, b = s["alpha"], s["beta"]
        out[m] = p.D * np.exp(a * math.log(b) + (a - 1.0) * np.log(xm) - b * xm - math.lgamma(a))
    elif kind is KernelKind.BETA:
        T = s["scale"]
        u = (t - p.t0) / T
        m = (u > 0) & (u < 1)
        um = u[m]
        a, b = s["alpha"], s["beta"]
        lbeta = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
        out[m] = p.D / T * np.exp((a - 1.0) * np.log(um) + (b - 1.0) * np.log1p(-um) - lbeta)
    elif kind is KernelKind.DBL:
        te = s["te"]
        x = t - p.t0
        r = te - t
        m = (x > 0) & (r > 0)
        xm, rm = x[m], r[m]
        sig = math.sqrt(s["sigma2"])
        out[m] = (p.D * (te - p.t0) / (sig * SQRT_2PI * xm * rm)
                  * np.exp(-0.5 * (np.log(xm / rm) - s["mu"]) ** 2 / s["sigma2"]))
    elif kind is KernelKind.GEV:
        log_s, inside = _gev_log_s(p, t)
        with np.errstate(over="ignore", invalid="ignore"):
            val = np.exp((s["xi"] + 1.0) * log_s - np.exp(log_s))
        out = np.where(inside, p.D / s["sigma"] * np.nan_to_num(val, nan=0.0, posinf=0.0), 0.0)
    return float(out[0]) if scalar else out


def cumulative(p: KernelParams, t):
    """Integral of the speed from minus infinity to ``t`` (closed forms)."""
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    s = p.shape
    kind = p.kind
    out = np.zeros_like(t)
    if kind is KernelKind.GAUSSIAN:
        out = p.D * _k.norm_cdf((t - s["mu"]) / math.sqrt(s["sigma2"]))
    elif kind is KernelKind.LOGNORMAL:
        x = t - p.t0
        m = x > 0
        out[m] = p.D * _k.norm_cdf((np.log(x[m]) - s["mu"]) / math.sqrt(s["sigma2"]))
    elif kind is KernelKind.GAMMA:
        out = p.D * _k.gammainc(s["alpha"], s["beta"] * (t - p.t0))
    elif kind is KernelKind.BETA:
        out = p.D * _k.betainc(s["alpha"], s["beta"], (t - p.t0) / s["scale"])
    elif kind is KernelKind.DBL:
        te = s["te"]
        x = t - p.t0
        r = te - t
        m = (x > 0) & (r > 0)
        out[m] = p.D * _k.norm_cdf((np.log(x[m] / r[m]) - s["mu"]) / math.sqrt(s["sigma2"]))
        out[r <= 0] = p.D
    elif kind is KernelKind.GEV:
        log_s, inside = _gev_log_s(p, t)
        with np.errstate(over="ignore"):
            val = p.D * np.exp(-np.exp(log_s))
        z = t - p.t0 - s["mu"]
        # outside the support: below a lower bound (xi > 0) or above an upper bound (xi < 0)
        out = np.where(inside, val, np.where(z > 0, p.D, 0.0))
    return float(out[0]) if scalar else out


def _quantile(p: KernelParams, q: float) -> float:
    """Time at which the cumulative reaches ``q * D`` (bisection)."""
    target = q * p.D
    lo, hi = support(p, 0.0)
    if not math.isfinite(lo):
        step = 1.0
        lo = (hi if math.isfinite(hi) else p.t0) - step
        while cumulative(p, lo) > target:
            step *= 2.0
            lo -= step
    if not math.isfinite(hi):
        step = 1.0
        hi = max(lo, p.t0) + step
        while cumulative(p, hi) < target:
            step *= 2.0
            hi += step
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if cumulative(p, mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def support(p: KernelParams, tail: float = 0.0) -> tuple[float, float]:
    """Interval holding the lobe.

    With ``tail == 0`` the exact support (possibly infinite).  With
    ``tail > 0`` a finite interval leaving at most ``tail * D`` of mass on
    each unbounded side.
    """
    s = p.shape
    kind = p.kind
    inf = math.inf
    if kind is KernelKind.BETA:
        return p.t0, p.t0 + s["scale"]
    if kind is KernelKind.DBL:
        return p.t0, s["te"]
    if kind is KernelKind.GEV:
        xi, mu, sig = s["xi"], s["mu"], s["sigma"]
        lo, hi = -inf, inf
        if xi > 0:
            lo = p.t0 + mu - sig / xi
        elif xi < 0:
            hi = p.t0 + mu - sig / xi
        if tail > 0:
            def q(y):
                # quantile at cumulative probability exp(-y)
                if xi == 0:
                    return p.t0 + mu - sig * math.log(y)
                return p.t0 + mu + sig * math.expm1(-xi * math.log(y)) / xi
            if not math.isfinite(lo):
                lo = q(-math.log(tail))
            if not math.isfinite(hi):
                hi = q(-math.log1p(-tail))
        return lo, hi
    if tail <= 0:
        if kind is KernelKind.GAUSSIAN:
            return -inf, inf
        return p.t0, inf
    z = -NormalDist().inv_cdf(tail)
    if kind is KernelKind.GAUSSIAN:
        sig = math.sqrt(s["sigma2"])
        return s["mu"] - z * sig, s["mu"] + z * sig
    if kind is KernelKind.LOGNORMAL:
        sig = math.sqrt(s["sigma2"])
        return p.t0, p.t0 + math.exp(s["mu"] + z * sig)
    # Gamma: upper quantile by bisection on the regularized upper function
    a, b = s["alpha"], s["beta"]
    hi = (a + 1.0) / b
    while _k.gammaincc(a, np.array([b * hi]))[0] > tail:
        hi *= 2.0
    lo_x = 0.0
    for _ in range(200):
        mid = 0.5 * (lo_x + hi)
        if _k.gammaincc(a, np.array([b * mid]))[0] > tail:
            lo_x = mid
        else:
            hi = mid
        if hi - lo_x < 1e-15 * hi:
            break
    return p.t0, p.t0 + hi


def effective_span(p: KernelParams, tail: float = 0.005) -> tuple[float, float]:
    """Central interval holding all but ``tail`` of the mass on each side."""
    return _quantile(p, tail), _quantile(p, 1.0 - tail)


def peak_time(p: KernelParams) -> float:
    """Location of the maximum (closed form where available)."""
    s = p.shape
    kind = p.kind
    if kind is KernelKind.GAUSSIAN:
        return s["mu"]
    if kind is KernelKind.LOGNORMAL:
        return p.t0 + math.exp(s["mu"] - s["sigma2"])
    if kind is KernelKind.GAMMA:
        return p.t0 + max(s["alpha"] - 1.0, 0.0) / s["beta"]
    if kind is KernelKind.BETA:
        a, b = s["alpha"], s["beta"]
        if a > 1 and b > 1:
            return p.t0 + s["scale"] * (a - 1.0) / (a + b - 2.0)
    if kind is KernelKind.GEV:
        xi = s["xi"]
        if xi == 0:
            return p.t0 + s["mu"]
        if xi > -1:
            return p.t0 + s["mu"] + s["sigma"] * ((1.0 + xi) ** -xi - 1.0) / xi
    lo, hi = support(p, 1e-9)
    grid = np.linspace(lo, hi, 4001)
    i = int(np.argmax(evaluate(p, grid)))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    x, _ = golden_section(lambda t: -evaluate(p, t), lo, hi, tol=1e-12)
    return x


# ---------------------------------------------------------------- moments

# zeta(2..6) for the small-xi expansion of log Gamma(1 - x)
_ZETA = (math.pi ** 2 / 6, 1.2020569031595942, math.pi ** 4 / 90,
         1.0369277551433699, math.pi ** 6 / 945)


def _gev_g_terms(xi: float) -> tuple[float, float]:
    """Return ``(g1 - 1)/xi`` and ``(g2 - g1^2)/xi^2`` with ``g_k = Gamma(1 - k xi)``.

    Both are computed without cancellation near xi = 0.
    """
    if abs(xi) < 1e-3:
        l1 = EULER_GAMMA * xi + sum(z * xi ** (k + 2) / (k + 2) for k, z in enumerate(_ZETA))
        # log g2 - 2 log g1 = sum_k zeta(k) (2^k - 2) xi^k / k, k >= 2
        d = sum(z * (2 ** (k + 2) - 2) * xi ** k / (k + 2) for k, z in enumerate(_ZETA))
        first = EULER_GAMMA + sum(z * xi ** (k + 1) / (k + 2) for k, z in enumerate(_ZETA))
        if xi != 0:
            first = math.expm1(l1) / xi
        var = math.exp(2.0 * l1) * (d if xi == 0 else math.expm1(d * xi * xi) / (xi * xi))
        return first, var
    l1 = math.lgamma(1.0 - xi)
    l2 = math.lgamma(1.0 - 2.0 * xi)
    return math.expm1(l1) / xi, math.exp(2.0 * l1) * math.expm1(l2 - 2.0 * l1) / (xi * xi)


_GH_NODES, _GH_WEIGHTS = np.polynomial.hermite_e.hermegauss(160)
_GH_WEIGHTS = _GH_WEIGHTS / _GH_WEIGHTS.sum()


def _logitnormal_moments(mu, sigma):
    """Mean and second raw moment of ``expit(mu + sigma Z)`` and their gradients."""
    p = 0.5 * (1.0 + np.tanh(0.5 * (mu + sigma * _GH_NODES)))
    w = _GH_WEIGHTS
    dp = p * (1.0 - p)
    e1 = w @ p
    e2 = w @ (p * p)
    jac = np.array([[w @ dp, w @ (dp * _GH_NODES)],
                    [w @ (2 * p * dp), w @ (2 * p * dp * _GH_NODES)]])
    return e1, e2, jac


def params_to_moments(p: KernelParams) -> Moments:
    """First moment and variance of the lobe (absolute time axis)."""
    s = p.shape
    kind = p.kind
    if kind is KernelKind.GAUSSIAN:
        return Moments(s["mu"], s["sigma2"])
    if kind is KernelKind.LOGNORMAL:
        mu, s2 = s["mu"], s["sigma2"]
        return Moments(p.t0 + math.exp(mu + 0.5 * s2), math.expm1(s2) * math.exp(2 * mu + s2))
    if kind is KernelKind.GAMMA:
        a, b = s["alpha"], s["beta"]
        return Moments(p.t0 + a / b, a / (b * b))
    if kind is KernelKind.BETA:
        a, b, T = s["alpha"], s["beta"], s["scale"]
        n = a + b
        return Moments(p.t0 + T * a / n, T * T * a * b / (n * n * (n + 1.0)))
    if kind is KernelKind.GEV:
        xi, mu, sig = s["xi"], s["mu"], s["sigma"]
        if xi >= 0.5:
            raise UndefinedMomentError("GEV variance is undefined for xi >= 0.5")
        first, var = _gev_g_terms(xi)
        return Moments(p.t0 + mu + sig * first, sig * sig * var)
    # DBL: logit-normal moments scaled to the (t0, te) window
    W = s["te"] - p.t0
    e1, e2, _ = _logitnormal_moments(s["mu"], math.sqrt(s["sigma2"]))
    return Moments(float(p.t0 + W * e1), float(W * W * (e2 - e1 * e1)))


def _solve_logitnormal(m1, var, mu0=0.6, sigma0=math.sqrt(0.2)):
    """(mu, sigma) of the logit-normal law with mean ``m1`` and variance ``var``.

    Damped Newton on (mu, log sigma) starting from (mu0, sigma0).
    """
    target = np.array([m1, var + m1 * m1])
    x = np.array([mu0, math.log(sigma0)])

    def resid(x):
        e1, e2, jac = _logitnormal_moments(x[0], math.exp(x[1]))
        return np.array([e1, e2]) - target, jac

    r, jac = resid(x)
    for _ in range(200):
        norm = np.abs(r / target).max()
        if norm < 1e-13:
            return float(x[0]), math.exp(x[1])
        jac = jac * np.array([1.0, math.exp(x[1])])
        try:
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        while lam > 1e-8:
            xn = x + lam * step
            xn[1] = min(xn[1], 3.0)
            rn, jn = resid(xn)
            if np.abs(rn / target).max() < norm:
                break
            lam *= 0.5
        else:
            break
        x, r, jac = xn, rn, jn
    if np.abs(r / target).max() < 1e-9:
        return float(x[0]), math.exp(x[1])
    raise NumericFailureError(f"logit-normal moment inversion failed for m1={m1}, var={var}")


def _lobe_error(p: KernelParams, lobe):
    t, v = lobe
    return float(np.sum((evaluate(p, t) - v) ** 2))


def _lobe_area(lobe):
    t, v = lobe
    return float(np.trapezoid(v, t))


def _gev_from_moments(mr, V, xi):
    first, var = _gev_g_terms(xi)
    sig = math.sqrt(V / var)
    return {"xi": xi, "mu": mr - sig * first, "sigma": sig}


def _dbl_from_moments(m: Moments, t0, W):
    m1 = (m.M - t0) / W
    var = m.V / (W * W)
    if not (0 < m1 < 1) or var >= m1 * (1 - m1):
        raise InfeasibleMomentsError("moments outside the double-bounded window")
    mu, sig = _solve_logitnormal(m1, var)
    return {"mu": mu, "sigma2": sig * sig, "te": t0 + W}


def moments_to_params(kind, m: Moments, t0: float, lobe_end: float, lobe=None) -> dict:
    """Shape parameters reproducing the lobe moments ``m``.

    Gaussian, Lognormal, Gamma and Beta are inverted analytically (Beta on
    the time axis normalized to ``(t0, lobe_end)``).  GEV starts from the
    Gumbel solution (xi = 0) and DBL from ``mu = 0.6, sigma2 = 0.2`` with
    ``te = lobe_end``; if ``lobe = (t, v)`` samples are given, xi (GEV) or
    te (DBL) is then refined by golden-section search on the squared error
    between the kernel and the lobe, with the remaining parameters re-solved
    so the moments stay exact.

    Raises
    ------
    InfeasibleMomentsError
        If no member of the family has these moments.
    """
    kind = KernelKind(kind)
    M, V = m.M, m.V
    mr = M - t0
    if kind is KernelKind.GAUSSIAN:
        return {"mu": M, "sigma2": V}
    if mr <= 0 and kind is not KernelKind.GEV:
        raise InfeasibleMomentsError(f"{kind.value} needs the mean after t0")
    if kind is KernelKind.LOGNORMAL:
        s2 = math.log1p(V / (mr * mr))
        # log(M^2 / sqrt(V + M^2)); the printed log(M / sqrt(V + M^2)) drops a factor M
        return {"mu": math.log(mr) - 0.5 * s2, "sigma2": s2}
    if kind is KernelKind.GAMMA:
        return {"alpha": mr * mr / V, "beta": mr / V}
    if kind is KernelKind.BETA:
        T = lobe_end - t0
        if T <= 0:
            raise InfeasibleMomentsError("Beta needs lobe_end > t0")
        mn = mr / T
        vn = V / (T * T)
        if not 0 < mn < 1 or vn >= mn * (1 - mn):
            raise InfeasibleMomentsError(f"Beta needs 0 < M < 1 and V < M(1-M); got M={mn}, V={vn}")
        k = mn * (1 - mn) / vn - 1.0
        return {"alpha": k * mn, "beta": k * (1 - mn), "scale": T}

    area = _lobe_area(lobe) if lobe is not None else 1.0
    if kind is KernelKind.GEV:
        shape = _gev_from_moments(mr, V, 0.0)
        if lobe is None:
            return shape

        def err(xi):
            try:
                return _lobe_error(KernelParams(kind, t0, area, _gev_from_moments(mr, V, xi)), lobe)
            except (InvalidInputError, ValueError, OverflowError):
                return math.inf

        xi, e = golden_section(err, -0.45, 0.45, tol=1e-6, maxiter=200)
        if e < err(0.0):
            shape = _gev_from_moments(mr, V, xi)
        return shape

    # double-bounded lognormal
    W = lobe_end - t0
    if W <= 0:
        raise InfeasibleMomentsError("DBL needs lobe_end > t0")
    for _ in range(60):
        m1 = mr / W
        if 0 < m1 < 1 and V / (W * W) < 0.95 * m1 * (1 - m1):
            break
        W *= 1.25
    shape = _dbl_from_moments(m, t0, W)
    if lobe is None:
        return shape

    def err(logw):
        try:
            sh = _dbl_from_moments(m, t0, math.exp(logw))
            return _lobe_error(KernelParams(kind, t0, area, sh), lobe)
        except (InfeasibleMomentsError, NumericFailureError, InvalidInputError):
            return math.inf

    lw0 = math.log(W)
    lw, e = golden_section(err, lw0 - 0.7, lw0 + 0.7, tol=1e-6, maxiter=200)
    if e < err(lw0):
        shape = _dbl_from_moments(m, t0, math.exp(lw))
    return shape


def numeric_moments(p: KernelParams) -> Moments:
    """Moments by adaptive quadrature of the normalized lobe (test oracle)."""
    from scipy import integrate

    lo, hi = support(p, 1e-6)
    ex_lo, ex_hi = support(p, 0.0)
    c = min(max(peak_time(p), lo), hi)
    pieces = [(lo, c), (c, hi)]
    if not math.isfinite(ex_hi):
        pieces.append((hi, math.inf))
    if not math.isfinite(ex_lo):
        pieces.append((-math.inf, lo))

    width = hi - lo

    def integrate_power(fn, k):
        total = err = 0.0
        for a, b in pieces:
            if a == b:
                continue
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                val, abserr = integrate.quad(fn, a, b, epsabs=0.0, epsrel=1e-13, limit=500)
            if not (math.isfinite(val) and math.isfinite(abserr)):
                raise NumericFailureError(f"quadrature failed on [{a}, {b}]")
            total += val
            err += abserr
        if err > 1e-9 * abs(total) + 1e-12 * width ** k:
            raise NumericFailureError(f"quadrature error estimate {err:.3g} too large")
        return total

    f = lambda t: evaluate(p, t) / p.D
    mass = integrate_power(f, 0)
    d1 = integrate_power(lambda t: (t - c) * f(t), 1) / mass
    M = c + d1
    V = integrate_power(lambda t: (t - M) ** 2 * f(t), 2) / mass
    return Moments(M, V)
