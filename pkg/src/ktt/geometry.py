"""Link curves between virtual target points: circular arcs and clothoids.

Both link kinds are represented by a :class:`ClothoidSegment`, an
arc-length parameterized curve whose curvature varies linearly,
``kappa(s) = kappa0 + kappa_rate * s``.  A circular arc is the special case
``kappa_rate == 0`` and a straight line has both curvature terms zero.
Positive curvature turns counterclockwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._backend import kernels as _k
from .errors import FitFailureError, InvalidInputError, OutOfRangeError

# Coefficients of the rational initial guess for the G1 root in the
# normalized turning angles (Bertolazzi and Frego, 2015).
_CF = (2.989696028701907, 0.716228953608281, -0.458969738821509,
       -0.502821153340377, 0.261062141752652, -0.045854475238709)
MAX_NEWTON = 100
NEWTON_TOL = 1e-14
STRAIGHT_TOL = 1e-14


class LinkKind(str, Enum):
    ARC = "Arc"
    CLOTHOID = "Clothoid"

    @classmethod
    def parse(cls, name: str) -> "LinkKind":
        key = name.strip().lower()
        aliases = {"arc": cls.ARC, "circle": cls.ARC, "clothoid": cls.CLOTHOID}
        if key in aliases:
            return aliases[key]
        raise InvalidInputError(f"unknown link kind {name!r}")


def wrap_angle(a):
    """Map angles into ``(-pi, pi]``."""
    w = np.mod(np.asarray(a, dtype=float) + math.pi, 2.0 * math.pi) - math.pi
    w = np.where(w == -math.pi, math.pi, w)
    return float(w) if np.ndim(w) == 0 else w


def _point(p) -> tuple[float, float]:
    x, y = (float(v) for v in p)
    if not (math.isfinite(x) and math.isfinite(y)):
        raise InvalidInputError(f"point must be finite, got {p!r}")
    return (x, y)


@dataclass(frozen=True)
class LinkSpec:
    """Geometry request for one stroke.

    Angles are wrapped into ``(-pi, pi]`` on construction.
    """

    kind: LinkKind
    p_start: tuple[float, float]
    p_end: tuple[float, float]
    theta_s: float
    theta_e: float

    def __post_init__(self):
        object.__setattr__(self, "kind", LinkKind(self.kind))
        ps, pe = _point(self.p_start), _point(self.p_end)
        if ps == pe:
            raise InvalidInputError("link endpoints must differ")
        for name in ("theta_s", "theta_e"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise InvalidInputError(f"{name} must be finite")
            object.__setattr__(self, name, wrap_angle(v))
        object.__setattr__(self, "p_start", ps)
        object.__setattr__(self, "p_end", pe)

    @property
    def chord(self) -> float:
        return math.hypot(self.p_end[0] - self.p_start[0], self.p_end[1] - self.p_start[1])

    @property
    def chord_angle(self) -> float:
        return math.atan2(self.p_end[1] - self.p_start[1], self.p_end[0] - self.p_start[0])

    def relative_angles(self) -> tuple[float, float]:
        """Start and end tangents measured from the chord direction."""
        phi = self.chord_angle
        return wrap_angle(self.theta_s - phi), wrap_angle(self.theta_e - phi)


@dataclass(frozen=True)
class ClothoidSegment:
    origin: tuple[float, float]
    theta0: float
    kappa0: float
    kappa_rate: float
    L: float

    def __post_init__(self):
        object.__setattr__(self, "origin", _point(self.origin))
        for name in ("theta0", "kappa0", "kappa_rate", "L"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise InvalidInputError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if self.L <= 0:
            raise InvalidInputError("segment length must be positive")

    def curvature(self, s):
        return self.kappa0 + self.kappa_rate * np.asarray(s, dtype=float)

    @property
    def end(self) -> tuple[tuple[float, float], float]:
        return point_at(self, self.L)


def fresnel(u):
    """Fresnel integrals ``C(u), S(u)`` with the ``pi v^2 / 2`` kernel."""
    scalar = np.ndim(u) == 0
    c, s = _k.fresnel(np.atleast_1d(np.asarray(u, dtype=float)))
    if scalar:
        return float(c[0]), float(s[0])
    return c, s


def length(seg: ClothoidSegment) -> float:
    return seg.L


def points(seg: ClothoidSegment, s):
    """Vectorized positions and unwrapped tangent angles at arc lengths ``s``.

    No range check; callers must keep ``s`` within ``[0, L]``.
    """
    s = np.asarray(s, dtype=float)
    x, y = _k.clothoid_xy(seg.origin[0], seg.origin[1], seg.theta0, seg.kappa0,
                          seg.kappa_rate, np.ravel(s))
    th = seg.theta0 + s * (seg.kappa0 + 0.5 * seg.kappa_rate * s)
    return np.reshape(x, s.shape), np.reshape(y, s.shape), th


def point_at(seg: ClothoidSegment, s: float):
    """Point and tangent angle (wrapped) at arc length ``s``.

    Raises
    ------
    OutOfRangeError
        If ``s`` lies outside ``[0, L]`` (a slack of ``1e-12 L`` is clipped).
    """
    s = float(s)
    slack = 1e-12 * seg.L
    if not (-slack <= s <= seg.L + slack):
        raise OutOfRangeError(f"arc length {s} outside [0, {seg.L}]")
    s = min(max(s, 0.0), seg.L)
    x, y, th = points(seg, np.array([s]))
    return (float(x[0]), float(y[0])), wrap_angle(float(th[0]))


def make_arc(spec: LinkSpec) -> ClothoidSegment:
    """Circular arc from ``p_start`` to ``p_end`` leaving along ``theta_s``.

    ``theta_e`` is not used: a circle through two points is fixed by one
    tangent.  The realized end tangent is ``theta_s + kappa * L``.
    """
    phi0, _ = spec.relative_angles()
    r = spec.chord
    if abs(phi0) > math.pi * (1.0 - 1e-9):
        raise InvalidInputError("start tangent points away from the end point; no finite arc")
    if phi0 == 0.0:
        return ClothoidSegment(spec.p_start, spec.theta_s, 0.0, 0.0, r)
    L = r * phi0 / math.sin(phi0)
    return ClothoidSegment(spec.p_start, spec.theta_s, -2.0 * phi0 / L, 0.0, L)


def _g1_guess(phi0: float, phi1: float) -> float:
    X = phi0 / math.pi
    Y = phi1 / math.pi
    xy = X * Y
    c = _CF
    return (phi0 + phi1) * (c[0] + xy * (c[1] + c[2] * xy) + (c[3] + c[4] * xy) * (X * X + Y * Y)
                            + c[5] * (X ** 4 + Y ** 4))


def _g1_residual(A: float, delta: float, phi0: float):
    """Normalized end-point offset orthogonal to the chord, its derivative, and X."""
    X, Y = _k.gfresnel(3, 2.0 * A, delta - A)
    cp, sp = math.cos(phi0), math.sin(phi0)
    xs = cp * X[0] - sp * Y[0]
    g = sp * X[0] + cp * Y[0]
    dg = cp * (X[2] - X[1]) - sp * (Y[2] - Y[1])
    return g, dg, xs


def _g1_bracket(delta: float, phi0: float, guess: float) -> float:
    """Guarded fallback: scan outward from ``guess`` for a sign change with a
    positive chord projection, then bisect."""
    def g(A):
        r, _, xs = _g1_residual(A, delta, phi0)
        return r, xs

    step = 0.05 * max(1.0, abs(guess), abs(delta))
    prev_a, (prev_g, prev_x) = guess, g(guess)
    for direction in (1.0, -1.0):
        a0, g0, x0 = prev_a, prev_g, prev_x
        for i in range(1, 400):
            a1 = guess + direction * i * step
            g1, x1 = g(a1)
            if g0 == 0.0 and x0 > 0:
                return a0
            if g0 * g1 <= 0 and x0 > 0 and x1 > 0:
                lo, hi, glo = a0, a1, g0
                for _ in range(200):
                    mid = 0.5 * (lo + hi)
                    gm, _ = g(mid)
                    if gm == 0.0 or mid in (lo, hi):
                        return mid
                    if (gm < 0) == (glo < 0):
                        lo, glo = mid, gm
                    else:
                        hi = mid
                return 0.5 * (lo + hi)
            a0, g0, x0 = a1, g1, x1
    raise FitFailureError("no admissible root for the G1 clothoid problem")


def solve_g1(spec: LinkSpec) -> tuple[ClothoidSegment, int]:
    """Fit a G1 clothoid and report the number of Newton iterations used.

    The iteration count is ``-1`` when the bisection fallback was needed.
    """
    phi0, phi1 = spec.relative_angles()
    if abs(phi0) >= math.pi or abs(phi1) >= math.pi:
        raise InvalidInputError("end tangents must lie within (-pi, pi) of the chord direction")
    r = spec.chord
    if abs(phi0) < STRAIGHT_TOL and abs(phi1) < STRAIGHT_TOL:
        return ClothoidSegment(spec.p_start, spec.theta_s, 0.0, 0.0, r), 0
    delta = phi1 - phi0
    A = guess = _g1_guess(phi0, phi1)
    iters = -1
    for it in range(1, MAX_NEWTON + 1):
        g, dg, xs = _g1_residual(A, delta, phi0)
        if abs(g) < NEWTON_TOL:
            iters = it - 1
            break
        if dg == 0.0 or not math.isfinite(dg):
            break
        A -= g / dg
    if iters < 0 or xs <= 0:
        A = _g1_bracket(delta, phi0, guess)
        iters = -1
    _, _, xs = _g1_residual(A, delta, phi0)
    if not xs > 0:
        raise FitFailureError("G1 clothoid fit produced a non-positive length")
    L = r / xs
    seg = ClothoidSegment(spec.p_start, spec.theta_s, (delta - A) / L, 2.0 * A / (L * L), L)
    return seg, iters


def fit_g1(spec: LinkSpec) -> ClothoidSegment:
    """Clothoid from ``p_start`` to ``p_end`` matching both end tangents.

    Raises
    ------
    FitFailureError
        If neither Newton nor the bracketing fallback finds a root.
    InvalidInputError
        If an end tangent is exactly opposite to the chord direction.
    """
    return solve_g1(spec)[0]


def realize(spec: LinkSpec) -> ClothoidSegment:
    """Build the segment for ``spec`` according to its link kind."""
    if spec.kind is LinkKind.ARC:
        return make_arc(spec)
    return fit_g1(spec)
