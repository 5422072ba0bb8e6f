"""Plan extraction and configuration comparison."""
from dataclasses import replace

import numpy as np
import pytest

from ktt.errors import ExtractionError, InvalidInputError
from ktt.extract import ExtractorConfig, compare_configs, extract, segment
from ktt.kernels import KernelKind, peak_time
from ktt.synth import SynthSpec, generate_synthetic
from ktt.trajectory import Trajectory


@pytest.fixture(scope="module")
def gaussian_case():
    plan, traj = generate_synthetic(SynthSpec(1, "Gaussian", "Clothoid", 0.0, seed=21))
    return plan, traj, extract(traj, ExtractorConfig("Gaussian", "Clothoid"))


def test_single_gaussian_recovery(gaussian_case):
    plan, _, res = gaussian_case
    true, got = plan.strokes[0].kernel, res.plan.strokes[0].kernel
    assert got.D == pytest.approx(true.D, rel=0.02)
    assert abs(peak_time(got) - peak_time(true)) <= 0.005
    assert res.report.snr_v >= 30
    assert res.report.n_strokes == 1


def test_overlapping_lognormal_arc():
    _, traj = generate_synthetic(SynthSpec(4, "Lognormal", "Arc", 0.3, seed=8))
    res = extract(traj, ExtractorConfig("Lognormal", "Arc"))
    assert res.report.snr_t >= 15 and res.report.snr_v >= 15
    assert len(res.plan) == 4


def test_constant_input():
    t = np.arange(100) / 200
    with pytest.raises(ExtractionError):
        extract(Trajectory(t, np.ones(100), np.zeros(100)))


def test_history_monotone(gaussian_case):
    hist = gaussian_case[2].history
    totals = [a + b for a, b in hist]
    assert len(hist) > 1
    assert all(y >= x for x, y in zip(totals, totals[1:]))
    mins = [min(a, b) for a, b in hist]
    assert all(y >= x for x, y in zip(mins, mins[1:]))


def test_passes_bounded():
    _, traj = generate_synthetic(SynthSpec(2, "Gamma", "Clothoid", 0.2, seed=3))
    res = extract(traj, ExtractorConfig("Gamma", max_passes=2))
    assert 1 <= res.passes_used <= 2


def test_deterministic():
    _, traj = generate_synthetic(SynthSpec(2, "Beta", "Clothoid", 0.2, seed=4))
    a, b = extract(traj), extract(traj)
    assert a.plan == b.plan and a.report == b.report


def test_scale_equivariance():
    _, traj = generate_synthetic(SynthSpec(2, "Lognormal", "Clothoid", 0.2, seed=6))
    k = 3.0
    a = extract(traj)
    b = extract(traj.transformed(k))
    assert b.report.snr_t == pytest.approx(a.report.snr_t, abs=0.01)
    assert b.report.snr_v == pytest.approx(a.report.snr_v, abs=0.01)
    for sa, sb in zip(a.plan.strokes, b.plan.strokes):
        assert sb.kernel.D == pytest.approx(k * sa.kernel.D, rel=1e-6)
    assert np.allclose(np.array(b.plan.target_points), k * np.array(a.plan.target_points),
                       rtol=1e-6, atol=1e-9)


def test_nonuniform_input_is_resampled():
    _, traj = generate_synthetic(SynthSpec(1, "Lognormal", "Clothoid", 0.0, seed=2))
    keep = np.ones(len(traj), bool)
    keep[3::7] = False
    res = extract(Trajectory(traj.t[keep], traj.x[keep], traj.y[keep]))
    assert res.report.snr_t > 20


def test_infeasible_kernel_falls_back():
    _, traj = generate_synthetic(SynthSpec(2, "Lognormal", "Clothoid", 0.0, seed=1))
    cfg = ExtractorConfig(max_passes=1)
    seeds, sp = segment(traj, cfg)
    # an onset after the lobe's mean time admits no lognormal
    bad = [replace(seeds[0], t0=seeds[0].moments.M + 0.01)] + seeds[1:]
    with pytest.warns(UserWarning, match="using Gaussian"):
        res = extract(traj, cfg, seeds=(bad, sp))
    kinds = [s.kernel.kind for s in res.plan.strokes]
    assert kinds == [KernelKind.GAUSSIAN, KernelKind.LOGNORMAL]
    assert len(res.warnings) == 1 and res.warnings[0].startswith("stroke 0")


def test_config_validation():
    with pytest.raises(InvalidInputError):
        ExtractorConfig(max_passes=0)
    with pytest.raises(InvalidInputError):
        ExtractorConfig(snr_stop=0)
    assert ExtractorConfig("GEV", "Arc").config_id == "GEV/Arc"


@pytest.fixture(scope="module")
def signature():
    return generate_synthetic(SynthSpec(3, "Lognormal", "Clothoid", 0.25, seed=13))[1]


class TestCompare:
    def test_all_configs(self, signature):
        cfgs = [ExtractorConfig(k, l, max_passes=2) for k in KernelKind for l in ("Arc", "Clothoid")]
        reps = compare_configs(signature, cfgs)
        assert len(reps) == 12
        assert len({r.n_strokes for r in reps}) == 1

    def test_repeatable(self, signature):
        cfg = ExtractorConfig(max_passes=2)
        a, b = compare_configs(signature, [cfg, cfg])
        assert a == b

    def test_errors_kept_in_place(self, signature):
        t = np.arange(50) / 200
        still = Trajectory(t, np.zeros(50), np.zeros(50))
        (rep,) = compare_configs(still, [ExtractorConfig()])
        assert isinstance(rep, ExtractionError)
