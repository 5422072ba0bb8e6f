"""Command-line driver."""
import json
import subprocess
import sys

import pytest

from ktt.cli import main
from ktt.io import read_report, write_report, ReportRow


@pytest.fixture(scope="module")
def fixture_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    assert main(["synth", "--n-strokes", "2", "--seed", "3", "--out-traj", str(d / "sig.csv"),
                 "--out-plan", str(d / "truth.plan")]) == 0
    return d


def test_extract_then_reconstruct(fixture_dir, capsys):
    d = fixture_dir
    code = main(["extract", str(d / "sig.csv"), "--max-passes", "3", "--out-plan", str(d / "x.plan"),
                 "--out-report", str(d / "r.csv"), "--out-series", str(d / "s.csv")])
    assert code == 0
    (row,) = read_report(d / "r.csv")
    capsys.readouterr()
    assert main(["reconstruct", "--plan", str(d / "x.plan"), "--reference", str(d / "sig.csv"),
                 "--out", str(d / "rec.csv")]) == 0
    out = capsys.readouterr().out
    fields = dict(f.split("=") for f in out.split())
    assert float(fields["SNR_t"]) == pytest.approx(row.snr_t, abs=0.01)
    assert float(fields["SNR_v"]) == pytest.approx(row.snr_v, abs=0.01)
    assert (d / "s.csv").read_text().startswith("t,x,y,x_rec,y_rec,v,v_rec\n")
    assert (d / "rec.csv").exists()


def test_unknown_kernel(fixture_dir, capsys):
    assert main(["extract", str(fixture_dir / "sig.csv"), "--kernel", "cauchy"]) == 2
    err = capsys.readouterr().err
    assert "usage:" in err and "cauchy" in err


def test_compare_cartesian_product(fixture_dir):
    rep = fixture_dir / "cmp.csv"
    code = main(["compare", str(fixture_dir / "sig.csv"), "--kernels", "gaussian,lognormal",
                 "--links", "arc,clothoid", "--max-passes", "1", "--out-report", str(rep)])
    assert code == 0
    rows = read_report(rep)
    assert len(rows) == 4
    assert {r.config for r in rows} == {"Gaussian/Arc", "Gaussian/Clothoid", "Lognormal/Arc",
                                        "Lognormal/Clothoid"}


def test_missing_file_continues(fixture_dir, capsys):
    code = main(["extract", str(fixture_dir / "nope.csv"), str(fixture_dir / "sig.csv"),
                 "--max-passes", "1"])
    captured = capsys.readouterr()
    assert code == 1
    assert "nope.csv" in captured.err and "Lognormal/Clothoid" in captured.out


def test_deterministic_outputs(fixture_dir):
    d = fixture_dir
    for name in ("a", "b"):
        assert main(["extract", str(d / "sig.csv"), "--max-passes", "2",
                     "--out-plan", str(d / f"{name}.plan"), "--out-report", str(d / f"{name}.csv")]) == 0
    assert (d / "a.plan").read_bytes() == (d / "b.plan").read_bytes()
    assert (d / "a.csv").read_bytes() == (d / "b.csv").read_bytes()


def test_config_env(fixture_dir, monkeypatch, capsys):
    cfg = fixture_dir / "cfg.json"
    cfg.write_text(json.dumps({"max_passes": 1, "kernel_kind": "Gamma"}))
    monkeypatch.setenv("KTT_CONFIG", str(cfg))
    assert main(["extract", str(fixture_dir / "sig.csv"), "--kernel", "gev"]) == 0
    assert "GEV/Clothoid" in capsys.readouterr().out
    cfg.write_text(json.dumps({"bogus": 1}))
    assert main(["extract", str(fixture_dir / "sig.csv")]) == 2


def test_stats(tmp_path, capsys):
    rows = [ReportRow(f"s{i}", "A" if i % 2 else "B", 20.0 + i, 15.0 + (i * 7919 % 13), 2)
            for i in range(24)]
    write_report(rows, tmp_path / "r.csv")
    assert main(["stats", "--report", str(tmp_path / "r.csv"), "--test", "jb"]) == 0
    assert "test=jb" in capsys.readouterr().out
    assert main(["stats", "--report", str(tmp_path / "r.csv"), "--test", "mwu", "--a", "A",
                 "--b", "B", "--column", "snr_t"]) == 0
    assert "reject_at_5pct=" in capsys.readouterr().out
    assert main(["stats", "--report", str(tmp_path / "r.csv"), "--test", "mwu"]) == 2


def test_synth_s_curve(tmp_path):
    assert main(["synth", "--s-curve", "--seed", "2", "--out-traj", str(tmp_path / "s.csv")]) == 0
    assert (tmp_path / "s.csv").read_text().startswith("t,x,y\n")


def test_module_entry_point(fixture_dir):
    out = subprocess.run([sys.executable, "-m", "ktt", "extract", str(fixture_dir / "sig.csv"),
                          "--link", "spline"], capture_output=True, text=True)
    assert out.returncode == 2 and "spline" in out.stderr
