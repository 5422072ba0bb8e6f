"""Trajectory containers, resampling and speed estimation."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError

DEFAULT_CUTOFF = 10.0
UNIFORM_RTOL = 1e-6


class Sample(NamedTuple):
    t: float
    x: float
    y: float


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Timestamped planar samples, stored column-wise.

    Timestamps must be strictly increasing.  Operations that need a minimum
    number of samples (resampling, speed estimation) check it themselves.
    """

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    meta: str = ""

    def __post_init__(self):
        t, x, y = _frozen(self.t), _frozen(self.x), _frozen(self.y)
        if not (t.ndim == x.ndim == y.ndim == 1) or not (t.size == x.size == y.size):
            raise InvalidInputError("t, x and y must be 1-D arrays of equal length")
        if t.size == 0:
            raise InvalidInputError("trajectory has no samples")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise InvalidInputError("trajectory samples must be finite")
        if np.any(np.diff(t) <= 0):
            raise InvalidInputError("timestamps must be strictly increasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "meta", str(self.meta))

    @classmethod
    def from_samples(cls, samples, meta: str = "") -> "Trajectory":
        arr = np.array([tuple(s) for s in samples], dtype=float).reshape(-1, 3)
        return cls(arr[:, 0], arr[:, 1], arr[:, 2], meta)

    @property
    def samples(self) -> list[Sample]:
        return [Sample(*map(float, s)) for s in zip(self.t, self.x, self.y)]

    def __len__(self):
        return self.t.size

    def __eq__(self, other):
        if not isinstance(other, Trajectory):
            return NotImplemented
        return (self.meta == other.meta and np.array_equal(self.t, other.t)
                and np.array_equal(self.x, other.x) and np.array_equal(self.y, other.y))

    __hash__ = None

    @property
    def xy(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])

    def path_length(self) -> float:
        return float(np.sum(np.hypot(np.diff(self.x), np.diff(self.y))))

    def transformed(self, scale=1.0, angle=0.0, shift=(0.0, 0.0)) -> "Trajectory":
        """Similarity transform: scale, rotate about the origin, then translate."""
        c, s = math.cos(angle), math.sin(angle)
        x = scale * (c * self.x - s * self.y) + shift[0]
        y = scale * (s * self.x + c * self.y) + shift[1]
        return Trajectory(self.t, x, y, self.meta)

    def sample_rate(self) -> float:
        """Rate of a uniformly sampled trajectory; raises if not uniform."""
        if self.t.size < 2:
            raise InvalidInputError("need at least 2 samples for a sample rate")
        dt = np.diff(self.t)
        mean = (self.t[-1] - self.t[0]) / (self.t.size - 1)
        if np.max(np.abs(dt - mean)) > UNIFORM_RTOL * mean:
            raise InvalidInputError("timestamps are not uniformly spaced")
        return 1.0 / mean


@dataclass(frozen=True, eq=False)
class SpeedProfile:
    t: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        t, v = _frozen(self.t), _frozen(self.v)
        if t.shape != v.shape or t.ndim != 1:
            raise InvalidInputError("t and v must be 1-D arrays of equal length")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise InvalidInputError("speeds must be finite and nonnegative")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "v", v)

    def __len__(self):
        return self.t.size


@dataclass(frozen=True, eq=False)
class VelocityProfile:
    """Vector velocity on a time grid."""

    t: np.ndarray
    vx: np.ndarray
    vy: np.ndarray

    def __post_init__(self):
        t, vx, vy = _frozen(self.t), _frozen(self.vx), _frozen(self.vy)
        if not (t.shape == vx.shape == vy.shape) or t.ndim != 1:
            raise InvalidInputError("t, vx and vy must be 1-D arrays of equal length")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "vx", vx)
        object.__setattr__(self, "vy", vy)

    def speed(self) -> SpeedProfile:
        return SpeedProfile(self.t, np.hypot(self.vx, self.vy))


def collapse_duplicates(t, x, y):
    """Merge samples sharing a timestamp into their mean position.

    Emits a warning when anything was merged.  Inputs need not be sorted by
    time but equal timestamps must be adjacent.
    """
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.size == 0:
        return t, x, y
    new = np.concatenate([[True], t[1:] != t[:-1]])
    if new.all():
        return t, x, y
    groups = np.cumsum(new) - 1
    counts = np.bincount(groups)
    warnings.warn(f"collapsed {int(np.sum(counts > 1))} duplicated timestamp(s)", stacklevel=2)
    return (t[new], np.bincount(groups, x) / counts, np.bincount(groups, y) / counts)


def resample_uniform(traj: Trajectory, rate: float) -> Trajectory:
    """Resample onto a uniform grid with natural cubic splines.

    The grid spans exactly ``[t_first, t_last]`` with
    ``round((t_last - t_first) * rate) + 1`` samples, so the realized rate
    can differ from ``rate`` by less than half a sample over the span.  The
    end samples are copied from the input.
    """
    from scipy.interpolate import CubicSpline

    if not (rate > 0 and math.isfinite(rate)):
        raise InvalidInputError("rate must be positive")
    if len(traj) < 4:
        raise InvalidInputError("resampling needs at least 4 samples")
    t0, t1 = traj.t[0], traj.t[-1]
    n = max(int(round((t1 - t0) * rate)) + 1, 2)
    grid = np.linspace(t0, t1, n)
    x = CubicSpline(traj.t, traj.x, bc_type="natural")(grid)
    y = CubicSpline(traj.t, traj.y, bc_type="natural")(grid)
    x[0], y[0], x[-1], y[-1] = traj.x[0], traj.y[0], traj.x[-1], traj.y[-1]
    return Trajectory(grid, x, y, traj.meta)


def _lowpass(signal: np.ndarray, cutoff: float, rate: float) -> np.ndarray:
    from scipy.signal import butter, filtfilt

    b, a = butter(2, cutoff / (0.5 * rate))
    padlen = min(3 * max(len(a), len(b)) * 10, signal.size - 1)
    # filter the offset from the first sample so constant signals stay exact
    c = signal[0]
    return filtfilt(b, a, signal - c, padtype="odd", padlen=padlen) + c


def velocity_profile(traj: Trajectory, smooth_cutoff: float | None = DEFAULT_CUTOFF) -> VelocityProfile:
    """Vector velocity by centered differences (one-sided at the ends).

    With ``smooth_cutoff`` set, x and y are first passed through a
    second-order Butterworth low-pass run forward and backward.  ``None``
    differentiates the raw samples.
    """
    if len(traj) < 4:
        raise InvalidInputError("velocity estimation needs at least 4 samples")
    rate = traj.sample_rate()
    x, y = traj.x, traj.y
    if smooth_cutoff is not None:
        if not 0 < smooth_cutoff < 0.5 * rate:
            raise InvalidInputError(f"smooth_cutoff must lie in (0, {0.5 * rate}) Hz")
        x, y = _lowpass(x, smooth_cutoff, rate), _lowpass(y, smooth_cutoff, rate)
    dt = 1.0 / rate
    return VelocityProfile(traj.t, np.gradient(x, dt), np.gradient(y, dt))


def speed_profile(traj: Trajectory, smooth_cutoff: float | None = DEFAULT_CUTOFF) -> SpeedProfile:
    """Speed ``sqrt(x'^2 + y'^2)`` of a uniformly sampled trajectory."""
    return velocity_profile(traj, smooth_cutoff).speed()
