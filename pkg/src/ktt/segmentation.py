"""Stroke segmentation: salient points, tangent angles and per-stroke seeds."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .kernels import Moments
from .trajectory import SpeedProfile, Trajectory

DEFAULT_PROMINENCE = 0.05
DEFAULT_GAP = 0.04
DEFAULT_ANTICIPATION = 0.2
COLLINEAR_TOL = 1e-12
MIN_INTERIOR = 5


@dataclass(frozen=True)
class SalientPoint:
    index: int
    t: float
    p: tuple[float, float]


@dataclass(frozen=True)
class StrokeSeed:
    sp_prev: SalientPoint
    sp: SalientPoint
    mp: tuple[float, float]
    mp1: tuple[float, float]
    mp2: tuple[float, float]
    theta_s: float
    theta_e: float
    t0: float
    lobe_end: float
    D_raw: float
    moments: Moments


def _salient(traj: Trajectory, i: int) -> SalientPoint:
    return SalientPoint(int(i), float(traj.t[i]), (float(traj.x[i]), float(traj.y[i])))


def find_salient_indices(sp: SpeedProfile, min_prominence: float = DEFAULT_PROMINENCE,
                         min_gap: float = DEFAULT_GAP) -> list[int]:
    """Indices of the first sample, the retained speed minima and the last sample.

    A minimum is retained when its prominence is at least
    ``min_prominence * max(v)``.  Minima closer than ``min_gap`` seconds to
    each other or to either end are thinned, keeping the more prominent.
    """
    from scipy.signal import find_peaks

    n = len(sp)
    if n < 4:
        raise InvalidInputError("salient-point detection needs at least 4 samples")
    vmax = float(np.max(sp.v))
    idx = [0]
    if vmax > 0:
        dt = (sp.t[-1] - sp.t[0]) / (n - 1)
        distance = max(1, int(math.ceil(min_gap / dt - 1e-9)))
        minima, _ = find_peaks(-sp.v, prominence=min_prominence * vmax, distance=distance)
        t_first, t_last = sp.t[0], sp.t[-1]
        idx += [int(i) for i in minima
                if sp.t[i] - t_first >= min_gap and t_last - sp.t[i] >= min_gap]
    idx.append(n - 1)
    return idx


def find_salient_points(sp: SpeedProfile, min_prominence: float = DEFAULT_PROMINENCE,
                        min_gap: float = DEFAULT_GAP, traj: Trajectory | None = None
                        ) -> list[SalientPoint]:
    """Salient points delimiting strokes on a speed profile.

    Positions are taken from ``traj`` when given (it must share the profile's
    time grid); otherwise they are reported as ``(nan, nan)``.
    """
    idx = find_salient_indices(sp, min_prominence, min_gap)
    if traj is not None:
        if len(traj) != len(sp):
            raise InvalidInputError("trajectory and speed profile must share a time grid")
        return [_salient(traj, i) for i in idx]
    return [SalientPoint(i, float(sp.t[i]), (math.nan, math.nan)) for i in idx]


def _arc_points(traj: Trajectory, i0: int, i1: int, fractions):
    """Points at given fractions of the polyline arc length between two samples."""
    x = traj.x[i0:i1 + 1]
    y = traj.y[i0:i1 + 1]
    cum = np.concatenate([[0.0], np.cumsum(np.hypot(np.diff(x), np.diff(y)))])
    total = cum[-1]
    if total == 0:
        return [(float(x[0]), float(y[0]))] * len(fractions)
    return [(float(np.interp(f * total, cum, x)), float(np.interp(f * total, cum, y)))
            for f in fractions]


def circle_tangent(p, q, r, at: int) -> float:
    """Tangent angle of the circle through ``p, q, r`` at ``p`` (``at=0``) or
    ``r`` (``at=2``), oriented along the traversal ``p -> q -> r``.

    Collinear points yield the chord direction ``r - p``.
    """
    p, q, r = (np.asarray(v, dtype=float) for v in (p, q, r))
    u, w = q - p, r - p
    cross = u[0] * w[1] - u[1] * w[0]
    scale = np.hypot(*u) * np.hypot(*w)
    if abs(cross) <= COLLINEAR_TOL * scale or scale == 0:
        return math.atan2(w[1], w[0])
    # circumcentre relative to p
    uu, ww = u @ u, w @ w
    cx = (w[1] * uu - u[1] * ww) / (2.0 * cross)
    cy = (u[0] * ww - w[0] * uu) / (2.0 * cross)
    rad = -np.array([cx, cy]) if at == 0 else w - np.array([cx, cy])
    sgn = 1.0 if cross > 0 else -1.0
    return math.atan2(sgn * rad[0], -sgn * rad[1])


def stroke_geometry(traj: Trajectory, sp_prev: SalientPoint, sp: SalientPoint):
    """``(theta_s, theta_e, mp, mp1, mp2)`` for the stroke between two salient points."""
    i0, i1 = sp_prev.index, sp.index
    if not 0 <= i0 < i1 < len(traj):
        raise InvalidInputError("salient points must be ordered and inside the trajectory")
    mp1, mp, mp2 = _arc_points(traj, i0, i1, (0.25, 0.5, 0.75))
    a = (float(traj.x[i0]), float(traj.y[i0]))
    b = (float(traj.x[i1]), float(traj.y[i1]))
    if i1 - i0 - 1 < MIN_INTERIOR:
        warnings.warn("too few samples for the three-point circle; using finite-difference tangents",
                      stacklevel=2)
        th_s = math.atan2(traj.y[i0 + 1] - traj.y[i0], traj.x[i0 + 1] - traj.x[i0])
        th_e = math.atan2(traj.y[i1] - traj.y[i1 - 1], traj.x[i1] - traj.x[i1 - 1])
    else:
        th_s = circle_tangent(a, mp1, mp, at=0)
        th_e = circle_tangent(mp, mp2, b, at=2)
    return th_s, th_e, mp, mp1, mp2


def estimate_angles(traj: Trajectory, sp_prev: SalientPoint, sp: SalientPoint):
    """Start and end tangent angles of a stroke and its arc-length midpoint.

    ``theta_s`` is the tangent at ``sp_prev`` of the circle through
    ``sp_prev``, the quarter point and the midpoint; ``theta_e`` the tangent
    at ``sp`` of the circle through the midpoint, the three-quarter point and
    ``sp``.  Returns ``(theta_s, theta_e, mp)``.
    """
    th_s, th_e, mp, _, _ = stroke_geometry(traj, sp_prev, sp)
    return th_s, th_e, mp


def lobe_moments(t: np.ndarray, v: np.ndarray):
    """Trapezoidal area, mean time and variance of a speed lobe."""
    area = float(np.trapezoid(v, t))
    if area <= 0:
        return area, math.nan, math.nan
    M = float(np.trapezoid(t * v, t)) / area
    V = float(np.trapezoid((t - M) ** 2 * v, t)) / area
    return area, M, V


def seed_strokes(traj: Trajectory, sp: SpeedProfile, salient: list[SalientPoint],
                 anticipation: float = DEFAULT_ANTICIPATION) -> list[StrokeSeed]:
    """One seed per pair of consecutive salient points.

    The lobe of stroke ``j`` is the speed between its two delimiting minima.
    ``t0`` is the opening minimum moved earlier by ``anticipation`` times the
    lobe duration, but never before the minimum preceding it.  Lobes with
    zero area are dropped with a warning.
    """
    if len(salient) < 2:
        raise InvalidInputError("need at least 2 salient points")
    if len(traj) != len(sp):
        raise InvalidInputError("trajectory and speed profile must share a time grid")
    seeds = []
    for j in range(1, len(salient)):
        a, b = salient[j - 1], salient[j]
        sl = slice(a.index, b.index + 1)
        area, M, V = lobe_moments(sp.t[sl], sp.v[sl])
        if not (area > 0 and V > 0):
            warnings.warn(f"dropping zero-area lobe between t={a.t:.4f} and t={b.t:.4f}",
                          stacklevel=2)
            continue
        t0 = a.t - anticipation * (b.t - a.t)
        if j >= 2:
            t0 = max(t0, salient[j - 2].t)
        th_s, th_e, mp, mp1, mp2 = stroke_geometry(traj, a, b)
        seeds.append(StrokeSeed(a, b, mp, mp1, mp2, th_s, th_e, t0, b.t, area, Moments(M, V)))
    return seeds
