"""Seeded synthetic action plans and trajectories with known ground truth."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GenerationError, InvalidInputError, KTTError
from .geometry import LinkKind, LinkSpec
from .kernels import KernelKind, KernelParams, effective_span, support
from .reconstruct import ActionPlan, Stroke, reconstruct_speed, reconstruct_trajectory
from .trajectory import Trajectory

MIN_CHORD = 0.1
MAX_ATTEMPTS = 100
LEAD = 0.1
SPAN_TAIL = 0.005
WINDOW_TAIL = 1e-8


@dataclass(frozen=True)
class SynthSpec:
    n_strokes: int = 3
    kernel_kind: KernelKind = KernelKind.LOGNORMAL
    link_kind: LinkKind = LinkKind.CLOTHOID
    overlap_fraction: float = 0.2
    seed: int = 0
    rate: float = 200.0
    max_turn: float = 0.8
    check_segmentation: bool = True

    def __post_init__(self):
        object.__setattr__(self, "kernel_kind", KernelKind(self.kernel_kind))
        object.__setattr__(self, "link_kind", LinkKind(self.link_kind))
        if int(self.n_strokes) < 1:
            raise InvalidInputError("n_strokes must be at least 1")
        if not 0 <= self.overlap_fraction <= 0.6:
            raise InvalidInputError("overlap_fraction must lie in [0, 0.6]")
        if not self.rate > 0:
            raise InvalidInputError("rate must be positive")


def _draw_shape(kind: KernelKind, rng: np.random.Generator) -> KernelParams:
    """A bell-shaped lobe of roughly 0.2 to 0.45 s, placed near t = 0."""
    u = rng.uniform
    if kind is KernelKind.GAUSSIAN:
        return KernelParams(kind, 0.0, 1.0, {"mu": 0.0, "sigma2": u(0.03, 0.055) ** 2})
    if kind is KernelKind.LOGNORMAL:
        return KernelParams(kind, 0.0, 1.0, {"mu": u(-1.9, -1.5), "sigma2": u(0.18, 0.32) ** 2})
    if kind is KernelKind.GAMMA:
        a = u(5.0, 10.0)
        return KernelParams(kind, 0.0, 1.0, {"alpha": a, "beta": a / u(0.12, 0.2)})
    if kind is KernelKind.BETA:
        return KernelParams(kind, 0.0, 1.0, {"alpha": u(2.5, 4.5), "beta": u(2.5, 4.5),
                                             "scale": u(0.25, 0.4)})
    if kind is KernelKind.DBL:
        return KernelParams(kind, 0.0, 1.0, {"mu": u(-0.3, 0.3), "sigma2": u(0.25, 0.5),
                                             "te": u(0.3, 0.45)})
    return KernelParams(kind, 0.0, 1.0, {"xi": u(-0.25, 0.1), "mu": 0.0,
                                         "sigma": u(0.03, 0.055)})


def _draw_points(n: int, rng: np.random.Generator) -> np.ndarray:
    pts = [rng.uniform(0.0, 1.0, 2)]
    while len(pts) < n + 1:
        for _ in range(1000):
            p = rng.uniform(0.0, 1.0, 2)
            if np.hypot(*(p - pts[-1])) >= MIN_CHORD:
                break
        pts.append(p)
    return np.array(pts)


def count_peaks(v: np.ndarray, rel: float = 1e-3) -> int:
    """Strict local maxima of a sampled profile, ignoring ripples below ``rel * max``."""
    from scipy.signal import find_peaks

    peaks, _ = find_peaks(v, prominence=rel * float(np.max(v)))
    return len(peaks)


def _attempt(spec: SynthSpec, rng: np.random.Generator):
    n = spec.n_strokes
    pts = _draw_points(n, rng)
    strokes = []
    start = LEAD
    for j in range(n):
        p0, p1 = pts[j], pts[j + 1]
        chord = math.atan2(p1[1] - p0[1], p1[0] - p0[0])
        ts = chord + rng.uniform(-spec.max_turn, spec.max_turn)
        te = chord + rng.uniform(-spec.max_turn, spec.max_turn)
        link = LinkSpec(spec.link_kind, tuple(p0), tuple(p1), ts, te)
        k = _draw_shape(spec.kernel_kind, rng)
        lo, hi = effective_span(k, SPAN_TAIL)
        k = k.shifted(start - lo)
        strokes.append(Stroke.build(k, link))
        start = start + (hi - lo) * (1.0 - spec.overlap_fraction)
    plan = ActionPlan(tuple(pts[0]), strokes)
    t_lo, t_hi = plan.time_span(WINDOW_TAIL)
    t_lo = min(0.0, t_lo)
    count = int(math.ceil((t_hi - t_lo) * spec.rate)) + 1
    times = t_lo + np.arange(count) / spec.rate
    traj = reconstruct_trajectory(plan, times, meta=f"synth-{spec.seed}")
    fine = np.arange(t_lo, times[-1], 1e-3)
    if count_peaks(reconstruct_speed(plan, fine).v) != n:
        return None
    if spec.check_segmentation:
        from .extract import ExtractorConfig, segment
        try:
            seeds, _ = segment(traj, ExtractorConfig())
        except KTTError:
            return None
        if len(seeds) != n:
            return None
    return plan, traj


def generate_synthetic(spec: SynthSpec | None = None, **kwargs):
    """Draw a random plan and synthesize its trajectory.

    Target points are drawn in the unit box with consecutive chords of at
    least 0.1.  Stroke ``j + 1`` starts before stroke ``j`` ends by
    ``overlap_fraction`` of stroke ``j``'s central 99% span.  A draw is
    rejected unless its 1 kHz speed profile has exactly ``n_strokes`` local
    maxima and (with ``check_segmentation``) the default segmentation finds
    ``n_strokes`` strokes.

    Returns
    -------
    (ActionPlan, Trajectory)

    Raises
    ------
    GenerationError
        After 100 rejected draws.
    """
    spec = spec or SynthSpec(**kwargs)
    rng = np.random.default_rng(spec.seed)
    for _ in range(MAX_ATTEMPTS):
        try:
            out = _attempt(spec, rng)
        except KTTError:
            out = None
        if out is not None:
            return out
    raise GenerationError(f"no acceptable plan after {MAX_ATTEMPTS} draws")


def s_curve(seed: int, rate: float = 200.0, kind: KernelKind = KernelKind.LOGNORMAL):
    """Single-stroke trajectory along a cubic with one inflexion point.

    The path ``y = a x (1 - x)(1 - 2x)`` for ``x`` in ``[0, 1]`` is scaled,
    rotated and traversed with the arc-length law of one kernel.  It is not
    generated from any link model.
    """
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.5, 1.0) * rng.choice([-1.0, 1.0])
    scale = rng.uniform(0.5, 1.5)
    rot = rng.uniform(-math.pi, math.pi)
    xs = np.linspace(0.0, 1.0, 20001)
    ys = a * xs * (1 - xs) * (1 - 2 * xs)
    cum = np.concatenate([[0.0], np.cumsum(np.hypot(np.diff(xs), np.diff(ys)))])
    k = _draw_shape(KernelKind(kind), rng)
    lo, _ = effective_span(k, SPAN_TAIL)
    k = k.shifted(LEAD - lo)
    t_lo, t_hi = support(k, WINDOW_TAIL)
    t_lo = min(0.0, t_lo)
    times = t_lo + np.arange(int(math.ceil((t_hi - t_lo) * rate)) + 1) / rate
    from .kernels import cumulative
    frac = np.clip(np.asarray(cumulative(k, times)) / k.D, 0.0, 1.0)
    s = frac * cum[-1]
    px = np.interp(s, cum, xs)
    py = np.interp(s, cum, ys)
    c, sn = math.cos(rot), math.sin(rot)
    x = scale * (c * px - sn * py)
    y = scale * (sn * px + c * py)
    return Trajectory(times, x, y, meta=f"s-curve-{seed}")
