"""Inverse problem: recover an action plan from an observed trajectory.

The pipeline segments the speed profile into strokes, initializes one
kernel and one link per stroke from the segmentation seeds, then refines
all parameters by coordinate descent.  Every coordinate is searched by a
golden-section line search and a step is kept only if it raises
``min(SNR_t, SNR_v)`` without lowering ``SNR_t + SNR_v``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ExtractionError, InfeasibleMomentsError, InvalidInputError, KTTError
from .geometry import LinkKind, LinkSpec
from .kernels import KernelKind, KernelParams, moments_to_params
from .metrics import ReconstructionReport, _db, snr_t, snr_v
from .optimize import golden_section
from .reconstruct import (ActionPlan, AngleMode, Stroke, reconstruct_trajectory,
                          reconstruct_velocity, stroke_contribution)
from .segmentation import (DEFAULT_ANTICIPATION, DEFAULT_GAP, DEFAULT_PROMINENCE,
                           StrokeSeed, find_salient_points, seed_strokes)
from .trajectory import (DEFAULT_CUTOFF, SpeedProfile, Trajectory, resample_uniform,
                         speed_profile, velocity_profile)


@dataclass(frozen=True)
class ExtractorConfig:
    """Settings for :func:`extract`.

    ``snr_stop`` is the per-pass gain (dB) below which refinement stops once
    both SNRs improve by less than it.  ``tp_drift`` bounds the distance of a
    virtual target point from its seed, as a fraction of the adjacent seed
    chord.  Step sizes shrink by ``step_shrink`` after every pass.
    """

    kernel_kind: KernelKind = KernelKind.LOGNORMAL
    link_kind: LinkKind = LinkKind.CLOTHOID
    max_passes: int = 8
    snr_stop: float = 0.01
    min_prominence: float = DEFAULT_PROMINENCE
    min_gap: float = DEFAULT_GAP
    anticipation: float = DEFAULT_ANTICIPATION
    smooth_cutoff: float = DEFAULT_CUTOFF
    resample_rate: float = 200.0
    angle_mode: AngleMode = AngleMode.LINK
    tp_drift: float = 0.1
    line_search_iters: int = 12
    step_shrink: float = 0.6

    def __post_init__(self):
        object.__setattr__(self, "kernel_kind", KernelKind(self.kernel_kind))
        object.__setattr__(self, "link_kind", LinkKind(self.link_kind))
        object.__setattr__(self, "angle_mode", AngleMode(self.angle_mode))
        if int(self.max_passes) < 1:
            raise InvalidInputError("max_passes must be at least 1")
        if not self.snr_stop > 0:
            raise InvalidInputError("snr_stop must be positive")
        if not 0 <= self.tp_drift:
            raise InvalidInputError("tp_drift must be nonnegative")
        if int(self.line_search_iters) < 1 or not 0 < self.step_shrink <= 1:
            raise InvalidInputError("invalid line-search settings")

    @property
    def config_id(self) -> str:
        return f"{self.kernel_kind.value}/{self.link_kind.value}"

    def segmentation_key(self):
        return (self.min_prominence, self.min_gap, self.anticipation, self.smooth_cutoff,
                self.resample_rate)


@dataclass(frozen=True)
class ExtractionResult:
    plan: ActionPlan
    report: ReconstructionReport
    passes_used: int
    warnings: tuple[str, ...] = ()
    history: tuple[tuple[float, float], ...] = field(default=(), repr=False)


# Shape coordinates refined per kind: (key, "log" | "add", initial half-width).
# Location parameters are covered by the common time shift.
_SHAPE_COORDS = {
    KernelKind.GAUSSIAN: (("sigma2", "log", 0.4),),
    KernelKind.LOGNORMAL: (("mu", "add", 0.25), ("sigma2", "log", 0.4)),
    KernelKind.GAMMA: (("alpha", "log", 0.3), ("beta", "log", 0.3)),
    KernelKind.BETA: (("alpha", "log", 0.3), ("beta", "log", 0.3), ("scale", "log", 0.2)),
    KernelKind.DBL: (("mu", "add", 0.4), ("sigma2", "log", 0.4), ("te", "span", 0.2)),
    KernelKind.GEV: (("xi", "add", 0.1), ("sigma", "log", 0.3)),
}
_THETA_STEP = 0.3


def _prepare(traj: Trajectory, cfg: ExtractorConfig) -> Trajectory:
    try:
        traj.sample_rate()
        return traj
    except KTTError:
        return resample_uniform(traj, cfg.resample_rate)


def segment(traj: Trajectory, cfg: ExtractorConfig) -> tuple[list[StrokeSeed], SpeedProfile]:
    """Seeds for ``traj`` (already uniformly sampled) under ``cfg``."""
    if len(traj) < 4:
        raise ExtractionError("trajectory too short to segment")
    sp = speed_profile(traj, cfg.smooth_cutoff)
    if not np.max(sp.v) > 0:
        raise ExtractionError("trajectory never moves; no strokes to extract")
    salient = find_salient_points(sp, cfg.min_prominence, cfg.min_gap, traj=traj)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        seeds = seed_strokes(traj, sp, salient, cfg.anticipation)
    if not seeds:
        raise ExtractionError("no speed lobes found")
    return seeds, sp


def _initial_kernel(seed: StrokeSeed, kind: KernelKind, sp, notes: list[str], j: int) -> KernelParams:
    sl = slice(seed.sp_prev.index, seed.sp.index + 1)
    lobe = (sp.t[sl], sp.v[sl])
    try:
        shape = moments_to_params(kind, seed.moments, seed.t0, seed.lobe_end, lobe=lobe)
        return KernelParams(kind, seed.t0, 1.0, shape)
    except (InfeasibleMomentsError, KTTError, ValueError) as exc:
        msg = f"stroke {j}: {kind.value} infeasible ({exc}); using Gaussian"
        warnings.warn(msg, stacklevel=3)
        notes.append(msg)
        shape = moments_to_params(KernelKind.GAUSSIAN, seed.moments, seed.t0, seed.lobe_end)
        return KernelParams(KernelKind.GAUSSIAN, seed.t0, 1.0, shape)


class _Refiner:
    """Coordinate-descent state with cached per-stroke contributions."""

    def __init__(self, traj, v_ref, seeds, kernels, cfg):
        self.cfg = cfg
        self.t = traj.t
        self.x_ref, self.y_ref = traj.x, traj.y
        self.vx_ref, self.vy_ref = v_ref.vx, v_ref.vy
        xo = traj.x - traj.x.mean()
        yo = traj.y - traj.y.mean()
        self.sig_t = float(np.sum(xo * xo + yo * yo))
        self.sig_v = float(np.sum(v_ref.vx ** 2 + v_ref.vy ** 2))
        self.kernels = list(kernels)
        self.thetas = [[s.theta_s, s.theta_e] for s in seeds]
        self.tp_seed = np.array([seeds[0].sp_prev.p] + [s.sp.p for s in seeds], dtype=float)
        self.tps = self.tp_seed.copy()
        n = len(seeds)
        chords = np.hypot(*np.diff(self.tp_seed, axis=0).T)
        dirs = np.diff(self.tp_seed, axis=0)
        # frame and drift radius of each target point from its adjacent seed chords
        self.frame = []
        self.radius = []
        for i in range(n + 1):
            j = max(i - 1, 0)
            c = chords[j]
            u = dirs[j] / c if c > 0 else np.array([1.0, 0.0])
            self.frame.append((u, np.array([-u[1], u[0]])))
            adj = [chords[k] for k in (i - 1, i) if 0 <= k < n]
            self.radius.append(cfg.tp_drift * min(adj))
        self.offsets = np.zeros((n + 1, 2))
        self.durations = [s.lobe_end - s.sp_prev.t for s in seeds]
        self.strokes = [self._make(j, self.kernels[j], self.tps[j], self.tps[j + 1], *self.thetas[j])
                        for j in range(n)]
        self.contrib = [self._contrib(s) for s in self.strokes]
        self.sums = [sum(c[k] for c in self.contrib) for k in range(4)]
        self.value = self._score(self.sums)
        self.steps = [self.value]

    def _make(self, j, kernel, p0, p1, th_s, th_e):
        link = LinkSpec(self.cfg.link_kind, tuple(p0), tuple(p1), th_s, th_e)
        return Stroke.build(kernel, link)

    def _contrib(self, stroke):
        return stroke_contribution(stroke, self.t, self.cfg.angle_mode)

    def _score(self, sums):
        x = self.tps[0][0] + sums[0]
        y = self.tps[0][1] + sums[1]
        et = float(np.sum((self.x_ref - x) ** 2 + (self.y_ref - y) ** 2))
        ev = float(np.sum((self.vx_ref - sums[2]) ** 2 + (self.vy_ref - sums[3]) ** 2))
        return _db(self.sig_t, et), _db(self.sig_v, ev)

    def _trial(self, changes, start=None):
        """Score after replacing strokes ``{j: stroke}`` (and optionally the start point)."""
        sums = list(self.sums)
        new = {}
        for j, st in changes.items():
            c = self._contrib(st)
            new[j] = c
            for k in range(4):
                sums[k] = sums[k] - self.contrib[j][k] + c[k]
        if start is not None:
            saved = self.tps[0].copy()
            self.tps[0] = start
            score = self._score(sums)
            self.tps[0] = saved
        else:
            score = self._score(sums)
        return score, sums, new

    def _line_search(self, build, half_width):
        """Minimize over ``delta`` in ``[-h, h]``; ``build(delta)`` returns (changes, start)."""
        if half_width <= 0:
            return False

        def objective(delta):
            try:
                changes, start = build(delta)
                (st, sv), _, _ = self._trial(changes, start)
            except (KTTError, ValueError, ArithmeticError, FloatingPointError):
                return math.inf
            return -min(st, sv)

        tol = 2 * half_width * 0.618 ** self.cfg.line_search_iters
        delta, f = golden_section(objective, -half_width, half_width, tol=tol,
                                  maxiter=self.cfg.line_search_iters)
        cur = min(self.value)
        if not (-f > cur and math.isfinite(f)):
            return False
        changes, start = build(delta)
        score, sums, new = self._trial(changes, start)
        if min(score) <= cur or sum(score) < sum(self.value):
            return False
        for j, st in changes.items():
            self.strokes[j] = st
            self.kernels[j] = st.kernel
            self.contrib[j] = new[j]
        if start is not None:
            self.tps[0] = start
        self.sums = sums
        self.value = score
        self.steps.append(score)
        return True

    # builders for each coordinate ---------------------------------------

    def _with_kernel(self, j, kernel):
        st = self.strokes[j]
        return {j: Stroke(kernel.replace(D=st.L), st.link, st.segment)}, None

    def _with_tp(self, i, offset):
        tp = self.tp_seed[i] + offset[0] * self.frame[i][0] + offset[1] * self.frame[i][1]
        changes = {}
        n = len(self.strokes)
        if i >= 1:
            j = i - 1
            changes[j] = self._make(j, self.kernels[j], self.tps[j], tp, *self.thetas[j])
        if i < n:
            changes[i] = self._make(i, self.kernels[i], tp, self.tps[i + 1], *self.thetas[i])
        return changes, (tp if i == 0 else None)

    def _with_theta(self, j, which, value):
        th = list(self.thetas[j])
        th[which] = value
        return {j: self._make(j, self.kernels[j], self.tps[j], self.tps[j + 1], *th)}, None

    def run_pass(self, scale):
        n = len(self.strokes)
        for j in range(n):
            dur = self.durations[j]
            self._line_search(lambda d, j=j: self._with_kernel(j, self.kernels[j].shifted(d)),
                              0.15 * dur * scale)
            for key, mode, h in _SHAPE_COORDS[self.kernels[j].kind]:
                self._line_search(lambda d, j=j, key=key, mode=mode: self._with_kernel(
                    j, _perturb(self.kernels[j], key, mode, d)), h * scale)
            for i in ([0, 1] if j == 0 else [j + 1]):
                for axis in (0, 1):
                    self._search_tp(i, axis, scale)
            self._line_search(lambda d, j=j: self._with_theta(j, 0, self.thetas[j][0] + d),
                              _THETA_STEP * scale) and self._commit_theta(j)
            if self.cfg.link_kind is LinkKind.CLOTHOID:
                self._line_search(lambda d, j=j: self._with_theta(j, 1, self.thetas[j][1] + d),
                                  _THETA_STEP * scale) and self._commit_theta(j)

    def _commit_theta(self, j):
        link = self.strokes[j].link
        self.thetas[j] = [link.theta_s, link.theta_e]

    def _search_tp(self, i, axis, scale):
        r = self.radius[i]
        base = self.offsets[i].copy()
        accepted = {}

        def build(delta):
            off = base.copy()
            off[axis] += delta
            if np.hypot(*off) > r * (1 + 1e-12):
                raise ValueError("target point drift exceeds bound")
            accepted["off"] = off
            return self._with_tp(i, off)

        if self._line_search(build, r * scale):
            off = accepted["off"]
            self.offsets[i] = off
            self.tps[i] = self.tp_seed[i] + off[0] * self.frame[i][0] + off[1] * self.frame[i][1]

    def plan(self) -> ActionPlan:
        return ActionPlan(tuple(self.tps[0]), self.strokes)


def _perturb(p: KernelParams, key: str, mode: str, d: float) -> KernelParams:
    v = p.shape[key]
    if mode == "log":
        return p.replace(**{key: v * math.exp(d)})
    if mode == "span":
        return p.replace(**{key: p.t0 + (v - p.t0) * math.exp(d)})
    return p.replace(**{key: v + d})


def extract(traj: Trajectory, cfg: ExtractorConfig | None = None, seeds=None) -> ExtractionResult:
    """Recover an action plan whose reconstruction matches ``traj``.

    Raises
    ------
    ExtractionError
        If the trajectory has no detectable speed lobe.
    """
    cfg = cfg or ExtractorConfig()
    traj = _prepare(traj, cfg)
    if seeds is None:
        seeds, sp = segment(traj, cfg)
    else:
        seeds, sp = seeds
    notes: list[str] = []
    kernels = [_initial_kernel(s, cfg.kernel_kind, sp, notes, j) for j, s in enumerate(seeds)]
    v_ref = velocity_profile(traj, None)
    ref = _Refiner(traj, v_ref, seeds, kernels, cfg)
    passes = 0
    scale = 1.0
    for passes in range(1, cfg.max_passes + 1):
        before = ref.value
        ref.run_pass(scale)
        gain_t = ref.value[0] - before[0]
        gain_v = ref.value[1] - before[1]
        if gain_t < cfg.snr_stop and gain_v < cfg.snr_stop:
            break
        scale *= cfg.step_shrink
    plan = ref.plan()
    rec = reconstruct_trajectory(plan, traj.t)
    v_rec = reconstruct_velocity(plan, traj.t, cfg.angle_mode)
    report = ReconstructionReport(snr_t(traj, rec), snr_v(v_ref, v_rec), len(plan))
    return ExtractionResult(plan, report, passes, tuple(notes), tuple(ref.steps))


def compare_configs(traj: Trajectory, cfgs) -> list:
    """One report per config; a failing config yields its exception in place.

    Configs sharing segmentation settings reuse one segmentation, so their
    stroke seeds are identical.
    """
    cfgs = list(cfgs)
    if not cfgs:
        raise InvalidInputError("need at least one config")
    cache = {}
    out = []
    for cfg in cfgs:
        try:
            prepared = _prepare(traj, cfg)
            key = cfg.segmentation_key()
            if key not in cache:
                cache[key] = segment(prepared, cfg)
            out.append(extract(prepared, cfg, seeds=cache[key]).report)
        except KTTError as exc:
            out.append(exc)
    return out
