"""Command-line driver.

Exit status: 0 on success, 1 when some inputs failed (the batch goes on),
2 on usage errors.  Diagnostics go to standard error.

Defaults for extractor settings can be put in a JSON object whose path is
given by the ``KTT_CONFIG`` environment variable; keys are
:class:`~ktt.extract.ExtractorConfig` field names.  Command-line flags win.
"""
from __future__ import annotations

import argparse
import glob
import itertools
import json
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from .errors import KTTError
from .extract import ExtractorConfig, extract
from .geometry import LinkKind
from .io import (ReportRow, read_plan, read_report, read_trajectory, write_plan, write_report,
                 write_series, write_trajectory)
from .kernels import KernelKind
from .metrics import jarque_bera, mann_whitney_u, snr_t, snr_v
from .reconstruct import reconstruct_trajectory, reconstruct_velocity
from .trajectory import velocity_profile

CONFIG_ENV = "KTT_CONFIG"
DEFAULT_RATE = 200.0


class UsageError(Exception):
    pass


def _kernel(name: str) -> KernelKind:
    try:
        return KernelKind.parse(name)
    except KTTError:
        raise argparse.ArgumentTypeError(
            f"unknown kernel {name!r} (choose from {', '.join(k.value for k in KernelKind)})") from None


def _link(name: str) -> LinkKind:
    try:
        return LinkKind.parse(name)
    except KTTError:
        raise argparse.ArgumentTypeError(f"unknown link {name!r} (choose arc or clothoid)") from None


def _listof(conv):
    def parse(text: str):
        return [conv(p) for p in text.split(",") if p.strip()]
    return parse


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _base_config() -> dict:
    path = os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot load {CONFIG_ENV}={path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError(f"{CONFIG_ENV} must hold a JSON object")
    known = set(ExtractorConfig.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise UsageError(f"unknown config keys in {path}: {sorted(unknown)}")
    return data


def _config(args, **overrides) -> ExtractorConfig:
    fields = _base_config()
    if getattr(args, "rate", None) is not None:
        fields["resample_rate"] = args.rate
    if getattr(args, "max_passes", None) is not None:
        fields["max_passes"] = args.max_passes
    fields.update(overrides)
    try:
        return ExtractorConfig(**fields)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid configuration: {exc}") from None


def _expand(patterns) -> list[Path]:
    out = []
    for pat in patterns:
        hits = sorted(glob.glob(pat))
        out.extend(Path(h) for h in hits) if hits else out.append(Path(pat))
    return out


def _output_path(base: str | None, src: Path, k: int, nseg: int, directory: bool, suffix: str):
    if base is None:
        return None
    tag = f"_{k}" if nseg > 1 else ""
    if directory:
        d = Path(base)
        d.mkdir(parents=True, exist_ok=True)
        return d / f"{src.stem}{tag}{suffix}"
    p = Path(base)
    return p.with_name(f"{p.stem}{tag}{p.suffix}") if tag else p


def _is_dir_target(base: str | None, n_inputs: int) -> bool:
    return base is not None and (n_inputs > 1 or base.endswith(os.sep) or Path(base).is_dir())


def _err(msg: str):
    print(f"ktt: {msg}", file=sys.stderr)


def _warn_to_stderr():
    def show(message, category, filename, lineno, file=None, line=None):
        print(f"ktt: warning: {message}", file=sys.stderr)
    warnings.showwarning = show


# -------------------------------------------------------------- commands


def cmd_extract(args) -> int:
    cfg = _config(args, kernel_kind=args.kernel, link_kind=args.link)
    inputs = _expand(args.inputs)
    failed = False
    rows = []
    plan_dir = _is_dir_target(args.out_plan, len(inputs))
    series_dir = _is_dir_target(args.out_series, len(inputs))
    for src in inputs:
        try:
            trajs = read_trajectory(src, args.format)
        except KTTError as exc:
            _err(str(exc))
            failed = True
            continue
        for k, traj in enumerate(trajs):
            try:
                res = extract(traj, cfg)
            except KTTError as exc:
                _err(f"{traj.meta}: extraction failed: {exc}")
                failed = True
                continue
            rep = res.report
            rows.append(ReportRow(traj.meta, cfg.config_id, rep.snr_t, rep.snr_v, rep.n_strokes,
                                  res.passes_used, "; ".join(res.warnings)))
            print(f"{traj.meta}\t{cfg.config_id}\tSNR_t={rep.snr_t:.2f}\tSNR_v={rep.snr_v:.2f}"
                  f"\tN={rep.n_strokes}\tpasses={res.passes_used}")
            p = _output_path(args.out_plan, src, k, len(trajs), plan_dir, ".plan")
            if p is not None:
                write_plan(res.plan, p)
            p = _output_path(args.out_series, src, k, len(trajs), series_dir, ".series.csv")
            if p is not None:
                from .extract import _prepare
                ref = _prepare(traj, cfg)
                rec = reconstruct_trajectory(res.plan, ref.t)
                write_series(p, ref, rec, velocity_profile(ref, None),
                             reconstruct_velocity(res.plan, ref.t, cfg.angle_mode))
    if args.out_report:
        write_report(rows, args.out_report)
    return 1 if failed else 0


def cmd_reconstruct(args) -> int:
    try:
        plan = read_plan(args.plan)
    except KTTError as exc:
        _err(str(exc))
        return 1
    ref = None
    if args.reference:
        try:
            ref = read_trajectory(args.reference, args.format)[0]
        except KTTError as exc:
            _err(str(exc))
            return 1
        times = ref.t
    else:
        lo, hi = plan.time_span(1e-9)
        rate = args.rate or DEFAULT_RATE
        times = lo + np.arange(int(np.ceil((hi - lo) * rate)) + 1) / rate
    rec = reconstruct_trajectory(plan, times)
    if args.out:
        write_trajectory(rec, args.out)
    if ref is not None:
        st = snr_t(ref, rec)
        sv = snr_v(velocity_profile(ref, None), reconstruct_velocity(plan, times, args.angle_mode))
        print(f"SNR_t={st:.4f}\tSNR_v={sv:.4f}\tN={len(plan)}")
    return 0


def cmd_compare(args) -> int:
    configs = [_config(args, kernel_kind=k, link_kind=l)
               for k, l in itertools.product(args.kernels, args.links)]
    from .extract import compare_configs
    rows, failed = [], False
    for src in _expand(args.inputs):
        try:
            trajs = read_trajectory(src, args.format)
        except KTTError as exc:
            _err(str(exc))
            failed = True
            continue
        for traj in trajs:
            for cfg, rep in zip(configs, compare_configs(traj, configs)):
                if isinstance(rep, Exception):
                    _err(f"{traj.meta} [{cfg.config_id}]: {rep}")
                    failed = True
                    continue
                rows.append(ReportRow(traj.meta, cfg.config_id, rep.snr_t, rep.snr_v, rep.n_strokes))
    print(f"{'source':<30} {'config':<32} {'SNR_t':>8} {'SNR_v':>8} {'N':>3} {'SNR_t/N':>8} {'SNR_v/N':>8}")
    for r in rows:
        print(f"{r.source:<30} {r.config:<32} {r.snr_t:8.2f} {r.snr_v:8.2f} {r.n:3d} "
              f"{r.snr_t_per_n:8.2f} {r.snr_v_per_n:8.2f}")
    if args.out_report:
        write_report(rows, args.out_report)
    return 1 if failed else 0


def cmd_synth(args) -> int:
    from .synth import SynthSpec, generate_synthetic, s_curve
    try:
        if args.s_curve:
            plan, traj = None, s_curve(args.seed, args.rate, args.kernel)
        else:
            plan, traj = generate_synthetic(SynthSpec(args.n_strokes, args.kernel, args.link,
                                                      args.overlap, args.seed, args.rate))
    except KTTError as exc:
        _err(str(exc))
        return 1
    if args.out_traj:
        write_trajectory(traj, args.out_traj)
    if args.out_plan and plan is not None:
        write_plan(plan, args.out_plan)
    print(f"{traj.meta}\tsamples={len(traj)}\tstrokes={len(plan) if plan else 1}")
    return 0


def cmd_stats(args) -> int:
    try:
        rows = read_report(args.report)
    except (KTTError, OSError) as exc:
        _err(str(exc))
        return 1

    def column(cfg):
        return [getattr(r, args.column) for r in rows if cfg is None or r.config == cfg]

    try:
        if args.test == "jb":
            res = jarque_bera(column(args.config))
        else:
            if not (args.a and args.b):
                raise UsageError("--test mwu needs --a CONFIG and --b CONFIG")
            a, b = column(args.a), column(args.b)
            if not a or not b:
                raise UsageError("no report rows for one of the configs")
            res = mann_whitney_u(a, b)
    except KTTError as exc:
        _err(str(exc))
        return 1
    print(f"test={args.test}\tstatistic={res.statistic:.6g}\tp={res.p_value:.6g}"
          f"\treject_at_5pct={str(res.reject_at_5pct).lower()}")
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ktt", description="Kinematic Theory Transform tools")
    sub = p.add_subparsers(dest="command", required=True)

    def inputs(sp):
        sp.add_argument("inputs", nargs="+", help="trajectory files or glob patterns")
        sp.add_argument("--format", choices=["csv", "pen"], default=None,
                        help="input format (default: guess)")
        sp.add_argument("--rate", type=_positive, default=None,
                        help="resampling rate for non-uniform input, Hz")
        sp.add_argument("--max-passes", type=int, default=None)

    e = sub.add_parser("extract", help="decompose trajectories into action plans")
    inputs(e)
    e.add_argument("--kernel", type=_kernel, default=KernelKind.LOGNORMAL)
    e.add_argument("--link", type=_link, default=LinkKind.CLOTHOID)
    e.add_argument("--out-plan")
    e.add_argument("--out-report")
    e.add_argument("--out-series")
    e.set_defaults(func=cmd_extract)

    r = sub.add_parser("reconstruct", help="synthesize a trajectory from a plan")
    r.add_argument("--plan", required=True)
    r.add_argument("--rate", type=_positive, default=None)
    r.add_argument("--out")
    r.add_argument("--reference", help="trajectory to score against (its time grid is used)")
    r.add_argument("--format", choices=["csv", "pen"], default=None)
    r.add_argument("--angle-mode", choices=["link", "interp"], default="link")
    r.set_defaults(func=cmd_reconstruct)

    c = sub.add_parser("compare", help="extract with every kernel x link combination")
    inputs(c)
    c.add_argument("--kernels", type=_listof(_kernel), default=list(KernelKind))
    c.add_argument("--links", type=_listof(_link), default=list(LinkKind))
    c.add_argument("--out-report")
    c.set_defaults(func=cmd_compare)

    s = sub.add_parser("synth", help="generate a synthetic plan and trajectory")
    s.add_argument("--n-strokes", type=int, default=3)
    s.add_argument("--kernel", type=_kernel, default=KernelKind.LOGNORMAL)
    s.add_argument("--link", type=_link, default=LinkKind.CLOTHOID)
    s.add_argument("--overlap", type=float, default=0.2)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--rate", type=_positive, default=DEFAULT_RATE)
    s.add_argument("--s-curve", action="store_true", help="single stroke along an S-shaped cubic")
    s.add_argument("--out-traj")
    s.add_argument("--out-plan")
    s.set_defaults(func=cmd_synth)

    st = sub.add_parser("stats", help="hypothesis tests over a report column")
    st.add_argument("--report", required=True)
    st.add_argument("--test", choices=["jb", "mwu"], required=True)
    st.add_argument("--column", default="snr_v",
                    choices=["snr_t", "snr_v", "snr_t_per_n", "snr_v_per_n"])
    st.add_argument("--config", help="restrict Jarque-Bera to one config id")
    st.add_argument("--a", help="first config id for Mann-Whitney")
    st.add_argument("--b", help="second config id for Mann-Whitney")
    st.set_defaults(func=cmd_stats)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors this way
        return exc.code if isinstance(exc.code, int) else 2
    saved = warnings.showwarning
    _warn_to_stderr()
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        _err(str(exc))
        return 2
    finally:
        warnings.showwarning = saved


if __name__ == "__main__":
    sys.exit(main())
