"""Trajectory, plan and report files."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ktt.errors import InvalidInputError, ParseError, UnsupportedKindError, UnsupportedVersionError
from ktt.geometry import LinkSpec
from ktt.io import (ReportRow, dump_plan, load_plan, read_plan, read_report, read_trajectory,
                    write_plan, write_report, write_series, write_trajectory)
from ktt.kernels import KernelKind, KernelParams, evaluate
from ktt.reconstruct import ActionPlan, Stroke
from ktt.synth import SynthSpec, generate_synthetic
from ktt.trajectory import Trajectory, VelocityProfile


def plan_fields(plan):
    return [(s.kernel, s.link) for s in plan.strokes], plan.start_point


class TestTrajectoryFiles:
    def test_csv(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("t,x,y\n0,1,2\n0.01,1.5,2\n0.02,2,2.5\n")
        (tr,) = read_trajectory(p)
        assert len(tr) == 3 and tr.x[2] == 2.0 and tr.meta == str(p)

    def test_csv_decreasing(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("t,x,y\n0,1,2\n0.02,1.5,2\n0.01,2,2.5\n")
        with pytest.raises(InvalidInputError):
            read_trajectory(p)

    def test_csv_malformed_line(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("t,x,y\n0,1,2\n0.01,abc,2\n")
        with pytest.raises(ParseError) as info:
            read_trajectory(p)
        assert info.value.line == 3
        p.write_text("time,x,y\n0,1,2\n")
        with pytest.raises(ParseError):
            read_trajectory(p)

    def test_csv_duplicates(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("t,x,y\n0,0,0\n0.01,1,0\n0.01,3,0\n0.02,4,0\n")
        with pytest.warns(UserWarning):
            (tr,) = read_trajectory(p)
        assert list(tr.x) == [0, 2, 4]

    def test_pen_split(self, tmp_path):
        rows = ["7"]
        rows += [f"{i} {2 * i} {10 * i} 1 0 0 100" for i in range(3)]
        rows += ["9 9 30 0 0 0 0"]
        rows += [f"{i} {i} {10 * i} 1 0 0 100" for i in range(4, 7)]
        p = tmp_path / "sig.txt"
        p.write_text("\n".join(rows) + "\n")
        trajs = read_trajectory(p)
        assert len(trajs) == 2
        assert sum(len(t) for t in trajs) == 7 - 1
        assert trajs[0].t[1] == pytest.approx(0.01)
        assert trajs[1].meta.endswith("#1")

    def test_pen_count_mismatch(self, tmp_path):
        p = tmp_path / "sig.txt"
        p.write_text("3\n0 0 0 1 0 0 0\n")
        with pytest.raises(ParseError):
            read_trajectory(p, "pen")

    def test_write_read(self, tmp_path):
        t = np.arange(10) / 7.0
        tr = Trajectory(t, np.sin(t) / 3, np.exp(t) * math.pi)
        write_trajectory(tr, tmp_path / "o.csv")
        (back,) = read_trajectory(tmp_path / "o.csv")
        assert np.array_equal(back.t, tr.t) and np.array_equal(back.y, tr.y)

    def test_missing_file(self, tmp_path):
        with pytest.raises(InvalidInputError):
            read_trajectory(tmp_path / "nope.csv")


class TestPlans:
    def test_five_stroke_round_trip(self, tmp_path):
        plan, _ = generate_synthetic(SynthSpec(5, "Gamma", "Clothoid", 0.3, seed=5))
        text = write_plan(plan, tmp_path / "p.plan")
        back = read_plan(tmp_path / "p.plan")
        assert plan_fields(back) == plan_fields(plan)
        assert dump_plan(back) == text

    @pytest.mark.parametrize("kind", list(KernelKind))
    @pytest.mark.parametrize("link", ["Arc", "Clothoid"])
    @settings(max_examples=5, deadline=None)
    @given(seed=st.integers(0, 1000))
    def test_lossless_all_kinds(self, kind, link, seed):
        plan, _ = generate_synthetic(SynthSpec(2, kind, link, 0.2, seed=seed,
                                               check_segmentation=False))
        assert plan_fields(load_plan(dump_plan(plan))) == plan_fields(plan)

    def test_gumbel_preserved(self):
        k = KernelParams("GEV", 0.1, 1.0, {"xi": 0.0, "mu": 0.2, "sigma": 0.05})
        plan = ActionPlan((0, 0), [Stroke.build(k, LinkSpec("Arc", (0, 0), (1, 0), 0.2, 0))])
        back = load_plan(dump_plan(plan))
        t = np.linspace(0, 1, 50)
        assert back.strokes[0].kernel["xi"] == 0.0
        assert np.array_equal(evaluate(back.strokes[0].kernel, t), evaluate(plan.strokes[0].kernel, t))

    def test_unknown_kind(self):
        plan, _ = generate_synthetic(n_strokes=1, seed=0)
        bad = dump_plan(plan).replace("kernel = Lognormal", "kernel = Cauchy")
        with pytest.raises(UnsupportedKindError) as info:
            load_plan(bad)
        assert info.value.line is not None

    def test_version(self):
        plan, _ = generate_synthetic(n_strokes=1, seed=0)
        with pytest.raises(UnsupportedVersionError):
            load_plan(dump_plan(plan).replace("version = 1", "version = 2"))

    def test_malformed(self):
        plan, _ = generate_synthetic(n_strokes=1, seed=0)
        text = dump_plan(plan)
        with pytest.raises(ParseError):
            load_plan(text.replace("t0 =", "t0 = nan #"))
        with pytest.raises(ParseError):
            load_plan(text.replace("strokes = 1", "strokes = 2"))
        with pytest.raises(ParseError):
            load_plan(text.replace("D = ", "D = 1"))
        with pytest.raises(ParseError):
            load_plan("format = something\nversion = 1\n")


class TestReports:
    def test_round_trip(self, tmp_path):
        rows = [ReportRow("a.csv", "Lognormal/Clothoid", 31.5, 25.25, 3, 4, ""),
                ReportRow("b.csv", "GEV/Arc", 1 / 3, 17.0, 2, 8, "stroke 0: x; y")]
        write_report(rows, tmp_path / "r.csv")
        assert read_report(tmp_path / "r.csv") == rows
        header = (tmp_path / "r.csv").read_text().splitlines()[0]
        assert header == "source,config,snr_t,snr_v,n,snr_t_per_n,snr_v_per_n,passes,warnings"

    def test_bad_header(self, tmp_path):
        (tmp_path / "r.csv").write_text("a,b\n")
        with pytest.raises(ParseError):
            read_report(tmp_path / "r.csv")

    def test_series(self, tmp_path):
        t = np.arange(5) / 10
        tr = Trajectory(t, t, 2 * t)
        v = VelocityProfile(t, np.ones(5), 2 * np.ones(5))
        write_series(tmp_path / "s.csv", tr, tr, v, v)
        lines = (tmp_path / "s.csv").read_text().splitlines()
        assert lines[0] == "t,x,y,x_rec,y_rec,v,v_rec" and len(lines) == 6
        assert float(lines[1].split(",")[5]) == pytest.approx(math.sqrt(5))
