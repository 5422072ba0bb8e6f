"""Trajectory containers, resampling and speed estimation."""
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ktt.errors import InvalidInputError
from ktt.trajectory import (Sample, SpeedProfile, Trajectory, collapse_duplicates,
                            resample_uniform, speed_profile, velocity_profile)


def circle(R=2.0, omega=3.0, rate=200.0, T=3.0):
    t = np.arange(int(T * rate) + 1) / rate
    return Trajectory(t, R * np.cos(omega * t), R * np.sin(omega * t), "circle")


class TestTrajectory:
    def test_round_trip_samples(self):
        tr = Trajectory.from_samples([(0, 1, 2), (0.1, 2, 3), Sample(0.2, 3, 4)], meta="m")
        assert tr.samples[2] == Sample(0.2, 3.0, 4.0)
        assert len(tr) == 3 and tr.meta == "m"
        assert tr == Trajectory([0, 0.1, 0.2], [1, 2, 3], [2, 3, 4], "m")

    def test_read_only(self):
        tr = circle()
        with pytest.raises(ValueError):
            tr.x[0] = 5

    @pytest.mark.parametrize("t,x,y", [
        ([0, 1, 1], [0, 0, 0], [0, 0, 0]),
        ([0, 2, 1], [0, 0, 0], [0, 0, 0]),
        ([0, 1], [0, 0, 0], [0, 0, 0]),
        ([0, 1, 2], [0, math.nan, 0], [0, 0, 0]),
        ([], [], []),
    ])
    def test_invalid(self, t, x, y):
        with pytest.raises(InvalidInputError):
            Trajectory(t, x, y)

    def test_sample_rate(self):
        assert circle(rate=250).sample_rate() == pytest.approx(250)
        with pytest.raises(InvalidInputError):
            Trajectory([0, 0.1, 0.3], [0, 0, 0], [0, 0, 0]).sample_rate()

    def test_transformed(self):
        tr = Trajectory([0, 1], [1, 0], [0, 0])
        out = tr.transformed(2.0, math.pi / 2, (1, 1))
        assert np.allclose(out.x, [1, 1]) and np.allclose(out.y, [3, 1])

    def test_collapse_duplicates(self):
        with pytest.warns(UserWarning, match="collapsed 1"):
            t, x, y = collapse_duplicates([0, 1, 1, 2], [0, 1, 3, 4], [0, 0, 2, 0])
        assert list(t) == [0, 1, 2] and list(x) == [0, 2, 4] and list(y) == [0, 1, 0]
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            collapse_duplicates([0, 1], [0, 0], [0, 0])


class TestResample:
    def test_identity_on_uniform(self):
        tr = circle()
        out = resample_uniform(tr, 200.0)
        assert np.max(np.abs(out.t - tr.t)) <= 1e-12
        assert np.max(np.abs(out.x - tr.x)) <= 1e-12 and np.max(np.abs(out.y - tr.y)) <= 1e-12

    def test_idempotent(self):
        once = resample_uniform(circle(rate=173.0), 100.0)
        twice = resample_uniform(once, 100.0)
        assert np.max(np.abs(once.x - twice.x)) <= 1e-12

    def test_too_few_samples(self):
        with pytest.raises(InvalidInputError):
            resample_uniform(Trajectory([0, 1], [0, 1], [0, 1]), 100.0)
        with pytest.raises(InvalidInputError):
            resample_uniform(circle(), 0.0)

    def test_line_irregular(self, rng):
        t = np.sort(np.concatenate([[0, 1], rng.uniform(0, 1, 40)]))
        out = resample_uniform(Trajectory(t, t, 2 * t), 100.0)
        assert len(out) == 101
        assert np.allclose(np.diff(out.t), 0.01, atol=1e-12)
        assert np.max(np.abs(out.y - 2 * out.x)) <= 1e-9

    def test_endpoints_exact(self, rng):
        t = np.cumsum(rng.uniform(0.002, 0.01, 60))
        tr = Trajectory(t, np.sin(t * 7), np.cos(t * 5))
        out = resample_uniform(tr, 200.0)
        assert (out.t[0], out.x[0], out.y[0]) == (tr.t[0], tr.x[0], tr.y[0])
        assert (out.t[-1], out.x[-1], out.y[-1]) == (tr.t[-1], tr.x[-1], tr.y[-1])

    def test_arc_length_preserved(self, rng):
        t = np.cumsum(rng.uniform(0.003, 0.008, 400))
        src = Trajectory(t, np.cos(2 * t), np.sin(2 * t))
        out = resample_uniform(src, 200.0)
        assert out.path_length() == pytest.approx(src.path_length(), rel=5e-3)


class TestSpeed:
    def test_constant_position(self):
        t = np.arange(50) / 100
        sp = speed_profile(Trajectory(t, np.ones(50), np.ones(50)))
        assert np.all(sp.v == 0)

    def test_linear(self):
        t = np.arange(400) / 200
        tr = Trajectory(t, 3 * np.cos(0.4) * t, 3 * np.sin(0.4) * t)
        v = speed_profile(tr).v
        assert np.max(np.abs(v[20:-20] - 3)) <= 1e-6
        assert np.max(np.abs(speed_profile(tr, None).v - 3)) <= 1e-9

    def test_circle(self):
        v = speed_profile(circle(R=2, omega=3)).v
        assert np.max(np.abs(v[100:-100] / 6 - 1)) <= 1e-3

    def test_nonuniform_rejected(self):
        t = np.array([0, 0.01, 0.02, 0.04, 0.05])
        with pytest.raises(InvalidInputError):
            speed_profile(Trajectory(t, t, t))

    def test_cutoff_range(self):
        with pytest.raises(InvalidInputError):
            speed_profile(circle(), smooth_cutoff=150.0)

    def test_velocity_direction(self):
        vel = velocity_profile(circle(R=1, omega=1), None)
        assert vel.vy[300] == pytest.approx(math.cos(1.5), abs=1e-4)

    def test_profile_invariants(self):
        with pytest.raises(InvalidInputError):
            SpeedProfile([0, 1], [0, -1])

    @settings(max_examples=25, deadline=None)
    @given(k=st.floats(0.01, 100), dx=st.floats(-1e3, 1e3), dy=st.floats(-1e3, 1e3))
    def test_translation_invariance_and_scaling(self, k, dx, dy):
        tr = circle(R=1.3, omega=2.1, T=1.0)
        base = speed_profile(tr).v
        moved = speed_profile(tr.transformed(1.0, 0.0, (dx, dy))).v
        scaled = speed_profile(tr.transformed(k)).v
        assert np.allclose(moved, base, rtol=1e-9, atol=1e-9 * max(abs(dx), abs(dy), 1))
        assert np.allclose(scaled, k * base, rtol=1e-9)
