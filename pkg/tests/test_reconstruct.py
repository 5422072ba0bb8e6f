"""Forward synthesis from action plans."""
import math

import numpy as np
import pytest

from ktt.errors import InvalidInputError
from ktt.geometry import LinkSpec
from ktt.kernels import KernelParams, evaluate
from ktt.reconstruct import (ActionPlan, AngleMode, Stroke, arclength_position,
                             reconstruct_speed, reconstruct_trajectory, reconstruct_velocity)
from ktt.synth import SynthSpec, generate_synthetic
from ktt.trajectory import velocity_profile

TIMES = np.linspace(-0.5, 2.5, 601)


def gauss_stroke(p0, p1, mu, s2=0.004, ts=None, te=None, kind="Arc"):
    ang = math.atan2(p1[1] - p0[1], p1[0] - p0[0])
    ts = ang if ts is None else ts
    te = ang if te is None else te
    k = KernelParams("Gaussian", 0.0, 1.0, {"mu": mu, "sigma2": s2})
    return Stroke.build(k, LinkSpec(kind, p0, p1, ts, te))


class TestPlan:
    def test_build_sets_length(self):
        st = gauss_stroke((0, 0), (0, 2), 0.5, ts=0.0)
        assert st.kernel.D == pytest.approx(math.pi) and st.L == st.kernel.D

    def test_mismatched_length(self):
        st = gauss_stroke((0, 0), (2, 0), 0.5)
        with pytest.raises(InvalidInputError):
            Stroke(st.kernel.replace(D=3.0), st.link, st.segment)

    def test_chaining(self):
        a = gauss_stroke((0, 0), (1, 0), 0.5)
        b = gauss_stroke((1, 0), (1, 1), 1.0)
        c = gauss_stroke((5, 5), (6, 5), 1.5)
        assert ActionPlan((0, 0), [a, b]).target_points == [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)]
        with pytest.raises(InvalidInputError):
            ActionPlan((0, 0), [a, c])
        with pytest.raises(InvalidInputError):
            ActionPlan((0.5, 0), [a])


class TestSpeed:
    def test_empty(self):
        assert np.all(reconstruct_speed(ActionPlan((1, 2)), TIMES).v == 0)
        traj = reconstruct_trajectory(ActionPlan((1, 2)), TIMES)
        assert np.all(traj.x == 1) and np.all(traj.y == 2)

    def test_single_straight_gaussian(self):
        st = gauss_stroke((0, 0), (2, 1), 0.7)
        v = reconstruct_speed(ActionPlan((0, 0), [st]), TIMES).v
        assert np.max(np.abs(v - evaluate(st.kernel, TIMES))) <= 1e-9

    def test_disjoint_strokes(self):
        a = gauss_stroke((0, 0), (1, 0), 0.4, 0.002)
        b = gauss_stroke((1, 0), (1, 1.5), 1.6, 0.002, ts=0.3, te=2.5, kind="Clothoid")
        v = reconstruct_speed(ActionPlan((0, 0), [a, b]), TIMES).v
        first = TIMES < 1.0
        assert np.max(np.abs(v[first] - evaluate(a.kernel, TIMES[first]))) <= 1e-9
        assert np.max(np.abs(v[~first] - evaluate(b.kernel, TIMES[~first]))) <= 1e-9

    def test_interp_mode_matches_on_arcs(self):
        st = gauss_stroke((0, 0), (1, 1), 0.6, ts=math.pi / 2)
        plan = ActionPlan((0, 0), [st])
        a = reconstruct_velocity(plan, TIMES, AngleMode.LINK)
        b = reconstruct_velocity(plan, TIMES, "interp")
        # on an arc the tangent is linear in arc length, so both modes agree
        assert np.allclose(a.vx, b.vx, atol=1e-12) and np.allclose(a.vy, b.vy, atol=1e-12)

    def test_unsorted_times(self):
        with pytest.raises(InvalidInputError):
            reconstruct_speed(ActionPlan((0, 0)), [0.0, 1.0, 0.5])


class TestTrajectory:
    def test_arclength(self):
        st = gauss_stroke((0, 0), (3, 0), 0.5)
        assert arclength_position(st, -10.0) == 0.0
        assert arclength_position(st, 10.0) == st.L
        assert arclength_position(st, 0.5) == pytest.approx(1.5, abs=1e-9)
        s = arclength_position(st, TIMES)
        assert np.all(np.diff(s) >= 0)

    def test_straight_stroke(self):
        st = gauss_stroke((1, 1), (1 + 2 * 0.6, 1 + 2 * 0.8), 0.5)
        traj = reconstruct_trajectory(ActionPlan((1, 1), [st]), np.array([0.5, 5.0]))
        assert traj.x[1] == pytest.approx(2.2, abs=1e-8) and traj.y[1] == pytest.approx(2.6, abs=1e-8)
        assert traj.x[0] == pytest.approx(1.6, abs=1e-6) and traj.y[0] == pytest.approx(1.8, abs=1e-6)

    def test_chained_passes_target(self):
        a = gauss_stroke((0, 0), (1, 0), 0.4, 0.002, ts=0.4, te=-0.4, kind="Clothoid")
        b = gauss_stroke((1, 0), (2, 1), 1.6, 0.002, ts=0.0, te=1.2, kind="Clothoid")
        traj = reconstruct_trajectory(ActionPlan((0, 0), [a, b]), np.array([1.0, 3.0]))
        assert math.hypot(traj.x[0] - 1, traj.y[0]) <= 1e-6
        assert math.hypot(traj.x[1] - 2, traj.y[1] - 1) <= 1e-6

    @pytest.mark.parametrize("seed", range(6))
    def test_synthetic_plan_properties(self, seed):
        kinds = ["Gaussian", "Lognormal", "Gamma", "Beta", "DoubleBoundedLognormal", "GEV"]
        spec = SynthSpec(n_strokes=1 + seed % 4, kernel_kind=kinds[seed], overlap_fraction=0.3,
                         seed=seed, check_segmentation=False)
        plan, _ = generate_synthetic(spec)
        lo, hi = plan.time_span(1e-12)
        t = np.arange(lo, hi, 1e-3)
        traj = reconstruct_trajectory(plan, t)
        total = sum(st.L for st in plan.strokes)
        assert traj.path_length() <= total + 1e-6
        end = plan.target_points[-1]
        assert math.hypot(traj.x[-1] - end[0], traj.y[-1] - end[1]) <= 1e-6 * total
        fd = velocity_profile(traj, None).speed().v
        v = reconstruct_speed(plan, t).v
        rms = math.sqrt(np.mean((fd - v) ** 2) / np.mean(v ** 2))
        assert rms <= 5e-3
