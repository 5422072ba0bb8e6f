"""SNR metrics and the Jarque-Bera and Mann-Whitney tests."""
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from ktt.errors import DegenerateSampleError, InvalidInputError
from ktt.metrics import (ReconstructionReport, TestResult, jarque_bera, mann_whitney_u, snr_t,
                         snr_v)
from ktt.trajectory import Trajectory, VelocityProfile

TH = np.linspace(0, 2 * np.pi, 400, endpoint=False)
T = np.arange(TH.size) / 100.0
CIRCLE = Trajectory(T, np.cos(TH), np.sin(TH))
VEL = VelocityProfile(T, -np.sin(TH) * (1 + 0.3 * np.cos(3 * TH)), np.cos(TH))


def brute_force_p(a, b):
    """Two-sided permutation p-value of U over all splits of the pooled sample."""
    pooled = list(a) + list(b)
    na = len(a)

    def u_stat(xs, ys):
        return sum(Fraction(1) if x > y else Fraction(1, 2) if x == y else 0
                   for x in xs for y in ys)

    obs = u_stat(a, b)
    us = []
    for idx in itertools.combinations(range(len(pooled)), na):
        chosen = set(idx)
        xs = [pooled[i] for i in idx]
        ys = [pooled[i] for i in range(len(pooled)) if i not in chosen]
        us.append(u_stat(xs, ys))
    total = len(us)
    lower = Fraction(sum(u <= obs for u in us), total)
    upper = Fraction(sum(u >= obs for u in us), total)
    return obs, min(Fraction(1), 2 * min(lower, upper))


class TestSNR:
    def test_identical(self):
        assert snr_t(CIRCLE, CIRCLE) == 120.0
        assert snr_v(VEL, VEL) == 120.0

    def test_centroid_reconstruction(self):
        flat = Trajectory(T, np.full(T.size, CIRCLE.x.mean()), np.full(T.size, CIRCLE.y.mean()))
        assert snr_t(CIRCLE, flat) == pytest.approx(0.0, abs=1e-12)

    def test_scaled_circle(self):
        assert snr_t(CIRCLE, CIRCLE.transformed(0.9)) == pytest.approx(20.0, abs=1e-9)

    def test_velocity_cases(self):
        zero = VelocityProfile(T, np.zeros(T.size), np.zeros(T.size))
        half = VelocityProfile(T, 0.5 * VEL.vx, 0.5 * VEL.vy)
        assert snr_v(VEL, zero) == pytest.approx(0.0, abs=1e-12)
        assert snr_v(VEL, half) == pytest.approx(10 * math.log10(4), abs=1e-12)

    def test_grid_mismatch(self):
        other = Trajectory(T + 0.5, CIRCLE.x, CIRCLE.y)
        with pytest.raises(InvalidInputError):
            snr_t(CIRCLE, other)
        with pytest.raises(InvalidInputError):
            snr_v(VEL, VelocityProfile(T[:-1], VEL.vx[:-1], VEL.vy[:-1]))

    @settings(max_examples=30, deadline=None)
    @given(dx=st.floats(-100, 100), dy=st.floats(-100, 100))
    def test_translation_invariance(self, dx, dy):
        rec = CIRCLE.transformed(0.95, 0.05)
        base = snr_t(CIRCLE, rec)
        moved = snr_t(CIRCLE.transformed(shift=(dx, dy)), rec.transformed(shift=(dx, dy)))
        assert moved == pytest.approx(base, abs=1e-9)

    def test_noise_ladder(self):
        rng = np.random.default_rng(3)
        nx, ny = rng.standard_normal((2, T.size))
        values = [snr_v(VEL, VelocityProfile(T, VEL.vx + a * nx, VEL.vy + a * ny))
                  for a in (1e-4, 1e-3, 1e-2, 0.1, 1.0)]
        assert all(x > y for x, y in zip(values, values[1:]))

    def test_report(self):
        r = ReconstructionReport(30.0, 24.0, 3)
        assert r.snr_t_per_n == 10.0 and r.snr_v_per_n == 8.0
        with pytest.raises(InvalidInputError):
            ReconstructionReport(1.0, 1.0, 0)


class TestJarqueBera:
    def test_matches_scipy(self, rng):
        x = rng.standard_normal(300)
        res = jarque_bera(x)
        ref = stats.jarque_bera(x)
        assert res.statistic == pytest.approx(ref.statistic, rel=1e-12)
        assert res.p_value == pytest.approx(ref.pvalue, rel=1e-10)

    def test_normal_rarely_rejected(self):
        rejections = sum(jarque_bera(np.random.default_rng(s).standard_normal(10000)).reject_at_5pct
                         for s in range(100))
        assert rejections <= 10

    def test_lognormal_rejected(self, rng):
        res = jarque_bera(np.exp(rng.standard_normal(500)))
        assert res.reject_at_5pct and res.statistic > 5.99

    def test_symmetric_kurtosis_only(self):
        x = [-1, -1, 1, 1] * 2
        # S = 0, K = 1: JB = 8/6 * (1 - 3)^2 / 4
        assert jarque_bera(x).statistic == pytest.approx(8 / 6, rel=1e-14)

    def test_degenerate(self):
        with pytest.raises(DegenerateSampleError):
            jarque_bera([2.0] * 10)
        with pytest.raises(InvalidInputError):
            jarque_bera([1, 2, 3])

    def test_reject_flag(self):
        assert TestResult(1.0, 0.049).reject_at_5pct and not TestResult(1.0, 0.05).reject_at_5pct


class TestMannWhitney:
    def test_identical_samples(self):
        res = mann_whitney_u([1, 2, 3, 4], [1, 2, 3, 4])
        assert res.statistic == 8.0 and res.p_value == 1.0

    def test_separated(self):
        res = mann_whitney_u([1, 2, 3], [4, 5, 6])
        assert res.statistic == 0.0 and res.p_value == pytest.approx(0.1, abs=1e-15)

    @pytest.mark.parametrize("seed", range(5))
    def test_brute_force_four_by_four(self, seed):
        rng = np.random.default_rng(seed)
        a, b = rng.integers(0, 6, 4).tolist(), rng.integers(0, 6, 4).tolist()
        u, p = brute_force_p(a, b)
        res = mann_whitney_u(a, b)
        assert res.statistic == float(u) and res.p_value == float(p)

    def test_matches_scipy_exact_without_ties(self, rng):
        a, b = rng.standard_normal(7), rng.standard_normal(9) + 0.5
        ref = stats.mannwhitneyu(a, b, alternative="two-sided", method="exact")
        res = mann_whitney_u(a, b)
        assert res.statistic == ref.statistic and res.p_value == pytest.approx(ref.pvalue, rel=1e-12)

    def test_asymptotic_matches_scipy(self, rng):
        a, b = rng.integers(0, 10, 30), rng.integers(2, 12, 25)
        ref = stats.mannwhitneyu(a, b, alternative="two-sided", method="asymptotic")
        res = mann_whitney_u(a, b)
        assert res.statistic == ref.statistic and res.p_value == pytest.approx(ref.pvalue, rel=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(a=st.lists(st.integers(0, 8), min_size=1, max_size=9),
           b=st.lists(st.integers(0, 8), min_size=1, max_size=9))
    def test_symmetry(self, a, b):
        ab, ba = mann_whitney_u(a, b), mann_whitney_u(b, a)
        assert ba.statistic == len(a) * len(b) - ab.statistic
        assert ba.p_value == ab.p_value

    def test_exact_and_normal_agree_at_boundary(self):
        for seed in range(20):
            rng = np.random.default_rng(seed)
            a, b = rng.standard_normal(10), rng.standard_normal(10) + rng.uniform(0, 1.5)
            exact = mann_whitney_u(a, b, method="exact").p_value
            approx = mann_whitney_u(a, b, method="asymptotic").p_value
            assert abs(exact - approx) <= 0.02

    def test_errors(self):
        with pytest.raises(InvalidInputError):
            mann_whitney_u([], [1])
        with pytest.raises(InvalidInputError):
            mann_whitney_u([1], [2], method="bootstrap")
