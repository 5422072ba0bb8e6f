"""Forward synthesis of trajectories and velocities from an action plan.

Each stroke moves along its link curve; the distance travelled at time
``t`` is ``s(t) = L * cumulative(kernel, t) / D``.  Strokes overlap in time
and their displacements (and velocities) add up vectorially.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidInputError
from .geometry import ClothoidSegment, LinkSpec, points, realize
from .kernels import KernelParams, cumulative, evaluate
from .trajectory import SpeedProfile, Trajectory, VelocityProfile

LENGTH_RTOL = 1e-9
CHAIN_TOL = 1e-12


class AngleMode(str, Enum):
    LINK = "link"
    INTERP = "interp"


@dataclass(frozen=True)
class Stroke:
    """One kernel driving one link; the kernel area equals the link length."""

    kernel: KernelParams
    link: LinkSpec
    segment: ClothoidSegment

    def __post_init__(self):
        if abs(self.kernel.D - self.segment.L) > LENGTH_RTOL * self.segment.L:
            raise InvalidInputError(f"kernel D={self.kernel.D} differs from link length {self.segment.L}")
        if self.segment.origin != self.link.p_start:
            raise InvalidInputError("segment does not start at the link's start point")

    @classmethod
    def build(cls, kernel: KernelParams, link: LinkSpec) -> "Stroke":
        """Realize ``link`` and set the kernel amplitude to its length."""
        seg = realize(link)
        return cls(kernel.replace(D=seg.L), link, seg)

    @property
    def L(self) -> float:
        return self.segment.L


@dataclass(frozen=True)
class ActionPlan:
    start_point: tuple[float, float]
    strokes: tuple[Stroke, ...] = ()

    def __post_init__(self):
        sp = tuple(float(v) for v in self.start_point)
        strokes = tuple(self.strokes)
        prev = sp
        for j, st in enumerate(strokes):
            if math.dist(st.link.p_start, prev) > CHAIN_TOL * max(1.0, math.hypot(*prev)):
                raise InvalidInputError(f"stroke {j} does not start at the previous target point")
            prev = st.link.p_end
        object.__setattr__(self, "start_point", sp)
        object.__setattr__(self, "strokes", strokes)

    def __len__(self):
        return len(self.strokes)

    @property
    def target_points(self) -> list[tuple[float, float]]:
        return [self.start_point] + [st.link.p_end for st in self.strokes]

    def time_span(self, tail: float = 1e-9) -> tuple[float, float]:
        """Interval outside of which every stroke has moved less than ``tail * D``."""
        from .kernels import support
        if not self.strokes:
            return 0.0, 0.0
        spans = [support(st.kernel, tail) for st in self.strokes]
        return min(s[0] for s in spans), max(s[1] for s in spans)


def arclength_position(stroke: Stroke, t):
    """Distance travelled along the link at times ``t``."""
    frac = np.asarray(cumulative(stroke.kernel, t)) / stroke.kernel.D
    s = np.minimum(stroke.L, np.clip(frac, 0.0, 1.0) * stroke.L)
    return float(s) if np.ndim(s) == 0 else s


def stroke_contribution(stroke: Stroke, times, angle_mode=AngleMode.LINK):
    """Displacement and velocity of one stroke on a time grid.

    Returns ``(dx, dy, vx, vy)`` arrays; the displacement is measured from
    the link's start point.
    """
    times = np.asarray(times, dtype=float)
    seg = stroke.segment
    L = seg.L
    frac = np.clip(np.asarray(cumulative(stroke.kernel, times)) / stroke.kernel.D, 0.0, 1.0)
    s = frac * L
    dx = np.zeros_like(times)
    dy = np.zeros_like(times)
    moving = (frac > 0) & (frac < 1)
    done = frac >= 1
    if moving.any():
        x, y, _ = points(seg, s[moving])
        dx[moving] = x - seg.origin[0]
        dy[moving] = y - seg.origin[1]
    if done.any():
        ex, ey, _ = points(seg, np.array([L]))
        dx[done] = ex[0] - seg.origin[0]
        dy[done] = ey[0] - seg.origin[1]
    speed = np.asarray(evaluate(stroke.kernel, times)) * (L / stroke.kernel.D)
    if AngleMode(angle_mode) is AngleMode.LINK:
        th = seg.theta0 + s * (seg.kappa0 + 0.5 * seg.kappa_rate * s)
    else:
        th_end = seg.theta0 + L * (seg.kappa0 + 0.5 * seg.kappa_rate * L)
        th = seg.theta0 + frac * (th_end - seg.theta0)
    return dx, dy, speed * np.cos(th), speed * np.sin(th)


def _check_times(times) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1:
        raise InvalidInputError("times must be a 1-D sequence")
    if np.any(np.diff(times) < 0):
        raise InvalidInputError("times must be sorted")
    return times


def reconstruct_velocity(plan: ActionPlan, times, angle_mode=AngleMode.LINK) -> VelocityProfile:
    """Vector sum of the stroke velocities."""
    times = _check_times(times)
    vx = np.zeros_like(times)
    vy = np.zeros_like(times)
    for st in plan.strokes:
        _, _, sx, sy = stroke_contribution(st, times, angle_mode)
        vx += sx
        vy += sy
    return VelocityProfile(times, vx, vy)


def reconstruct_speed(plan: ActionPlan, times, angle_mode=AngleMode.LINK) -> SpeedProfile:
    """Magnitude of the summed stroke velocities."""
    return reconstruct_velocity(plan, times, angle_mode).speed()


def reconstruct_trajectory(plan: ActionPlan, times, meta: str = "reconstruction") -> Trajectory:
    """Start point plus the summed stroke displacements."""
    times = _check_times(times)
    x = np.full_like(times, plan.start_point[0])
    y = np.full_like(times, plan.start_point[1])
    for st in plan.strokes:
        dx, dy, _, _ = stroke_contribution(st, times)
        x += dx
        y += dy
    return Trajectory(times, x, y, meta)
