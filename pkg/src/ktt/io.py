"""File formats: trajectories, action plans, extraction reports and series."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (InvalidInputError, KTTError, ParseError, UnsupportedKindError,
                     UnsupportedVersionError)
from .geometry import LinkKind, LinkSpec, realize
from .kernels import SHAPE_KEYS, KernelKind, KernelParams
from .reconstruct import ActionPlan, Stroke
from .trajectory import Trajectory, collapse_duplicates

PLAN_FORMAT = "ktt-plan"
PLAN_VERSION = "1"
REPORT_COLUMNS = ("source", "config", "snr_t", "snr_v", "n", "snr_t_per_n", "snr_v_per_n",
                  "passes", "warnings")


def _num(v: float) -> str:
    return format(float(v), ".17g")


# ---------------------------------------------------------------- trajectories


def _trajectory(t, x, y, meta, path):
    t, x, y = np.asarray(t, float), np.asarray(x, float), np.asarray(y, float)
    if t.size and np.any(np.diff(t) < 0):
        raise InvalidInputError(f"{path}: timestamps decrease")
    t, x, y = collapse_duplicates(t, x, y)
    return Trajectory(t, x, y, meta)


def _read_delimited(path: Path, lines: list[str]) -> list[Trajectory]:
    rows = []
    header_seen = False
    for no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.replace(";", ",").split(",")]
        if not header_seen:
            if [p.lower() for p in parts[:3]] != ["t", "x", "y"]:
                raise ParseError("expected header 't,x,y'", line=no, path=path)
            header_seen = True
            continue
        if len(parts) != 3:
            raise ParseError(f"expected 3 fields, got {len(parts)}", line=no, path=path)
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise ParseError(f"non-numeric field in {line!r}", line=no, path=path) from None
    if not header_seen:
        raise ParseError("missing header 't,x,y'", path=path)
    if not rows:
        raise ParseError("no samples", path=path)
    a = np.array(rows)
    return [_trajectory(a[:, 0], a[:, 1], a[:, 2], str(path), path)]


def _read_pen(path: Path, lines: list[str]) -> list[Trajectory]:
    body = [(no, ln.split()) for no, ln in enumerate(lines, start=1) if ln.strip()]
    if not body:
        raise ParseError("empty file", path=path)
    no, first = body[0]
    try:
        count = int(first[0])
    except (ValueError, IndexError):
        raise ParseError("first line must be the sample count", line=no, path=path) from None
    if len(first) != 1:
        raise ParseError("first line must hold only the sample count", line=no, path=path)
    samples = body[1:]
    if len(samples) != count:
        raise ParseError(f"header announces {count} samples, found {len(samples)}", path=path)
    segments, cur = [], []
    for no, parts in samples:
        if len(parts) != 7:
            raise ParseError(f"expected 7 fields, got {len(parts)}", line=no, path=path)
        try:
            x, y, t_ms, button = float(parts[0]), float(parts[1]), float(parts[2]), float(parts[3])
        except ValueError:
            raise ParseError("non-numeric field", line=no, path=path) from None
        if button == 0:
            if cur:
                segments.append(cur)
                cur = []
            continue
        cur.append((t_ms / 1000.0, x, y))
    if cur:
        segments.append(cur)
    out = []
    for k, seg in enumerate(segments):
        a = np.array(seg)
        meta = f"{path}#{k}" if len(segments) > 1 else str(path)
        out.append(_trajectory(a[:, 0], a[:, 1], a[:, 2], meta, path))
    return out


def read_trajectory(path, format: str | None = None) -> list[Trajectory]:
    """Read one file into trajectories.

    ``format`` is ``"csv"`` (header ``t,x,y``), ``"pen"`` (sample count, then
    ``x y t_ms button azimuth altitude pressure`` rows; rows with
    ``button == 0`` are pen-up and split the recording) or ``None`` to guess
    from the first non-empty line.  Repeated timestamps are merged with a
    warning.
    """
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from None
    if format is None:
        first = next((ln.split() for ln in lines if ln.strip()), [""])
        format = "pen" if len(first) == 1 and first[0].isdigit() else "csv"
    if format == "csv":
        return _read_delimited(path, lines)
    if format == "pen":
        return _read_pen(path, lines)
    raise InvalidInputError(f"unknown trajectory format {format!r}")


def write_trajectory(traj: Trajectory, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("t,x,y\n")
        for t, x, y in zip(traj.t, traj.x, traj.y):
            fh.write(f"{_num(t)},{_num(x)},{_num(y)}\n")


# ------------------------------------------------------------------- plans


@dataclass
class PlanDocument:
    """Serialized form of an action plan."""

    version: str
    start_point: tuple[float, float]
    strokes: list[dict] = field(default_factory=list)


def plan_to_document(plan: ActionPlan) -> PlanDocument:
    strokes = []
    for st in plan.strokes:
        k, l = st.kernel, st.link
        strokes.append({"kernel": k.kind.value, "t0": k.t0, "D": k.D, "shape": dict(k.shape),
                        "link": l.kind.value, "tp_start": l.p_start, "tp_end": l.p_end,
                        "theta_s": l.theta_s, "theta_e": l.theta_e})
    return PlanDocument(PLAN_VERSION, plan.start_point, strokes)


def document_to_plan(doc: PlanDocument) -> ActionPlan:
    if doc.version != PLAN_VERSION:
        raise UnsupportedVersionError(f"unsupported plan version {doc.version!r}")
    strokes = []
    for s in doc.strokes:
        kernel = KernelParams(KernelKind(s["kernel"]), s["t0"], s["D"], s["shape"])
        link = LinkSpec(LinkKind(s["link"]), s["tp_start"], s["tp_end"], s["theta_s"], s["theta_e"])
        strokes.append(Stroke(kernel, link, realize(link)))
    return ActionPlan(doc.start_point, strokes)


def dump_plan(plan: ActionPlan) -> str:
    """Line-oriented ``key = value`` text with 17 significant digits."""
    doc = plan_to_document(plan)
    out = ["# ktt action plan", f"format = {PLAN_FORMAT}", f"version = {doc.version}",
           f"start_point = {_num(doc.start_point[0])} {_num(doc.start_point[1])}",
           f"strokes = {len(doc.strokes)}"]
    for j, s in enumerate(doc.strokes):
        out += ["", f"[stroke {j}]", f"kernel = {s['kernel']}", f"t0 = {_num(s['t0'])}",
                f"D = {_num(s['D'])}"]
        out += [f"shape.{k} = {_num(v)}" for k, v in s["shape"].items()]
        out += [f"link = {s['link']}",
                f"tp_start = {_num(s['tp_start'][0])} {_num(s['tp_start'][1])}",
                f"tp_end = {_num(s['tp_end'][0])} {_num(s['tp_end'][1])}",
                f"theta_s = {_num(s['theta_s'])}", f"theta_e = {_num(s['theta_e'])}"]
    return "\n".join(out) + "\n"


def _parse_document(text: str, path=None) -> PlanDocument:
    header: dict[str, tuple[str, int]] = {}
    strokes: list[dict] = []
    cur = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].split()
            if len(name) != 2 or name[0] != "stroke" or name[1] != str(len(strokes)):
                raise ParseError(f"unexpected section {line!r}", line=no, path=path)
            cur = {"_line": no}
            strokes.append(cur)
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {line!r}", line=no, path=path)
        key, value = (p.strip() for p in line.split("=", 1))
        target = header if cur is None else cur
        if key in target:
            raise ParseError(f"duplicate key {key!r}", line=no, path=path)
        target[key] = (value, no)

    def get(d, key):
        if key not in d:
            raise ParseError(f"missing key {key!r}", line=d.get("_line"), path=path)
        return d[key]

    fmt, no = get(header, "format")
    if fmt != PLAN_FORMAT:
        raise ParseError(f"not a plan file (format {fmt!r})", line=no, path=path)
    version, no = get(header, "version")
    if version != PLAN_VERSION:
        raise UnsupportedVersionError(f"unsupported plan version {version!r}", line=no, path=path)

    def num(entry, n=1):
        value, no = entry
        try:
            vals = [float(v) for v in value.split()]
        except ValueError:
            raise ParseError(f"bad number in {value!r}", line=no, path=path) from None
        if len(vals) != n or not all(math.isfinite(v) for v in vals):
            raise ParseError(f"expected {n} finite number(s), got {value!r}", line=no, path=path)
        return vals[0] if n == 1 else tuple(vals)

    start = num(get(header, "start_point"), 2)
    count = int(num(get(header, "strokes")))
    if count != len(strokes):
        raise ParseError(f"header announces {count} strokes, found {len(strokes)}", path=path)
    out = []
    for s in strokes:
        kname, no = get(s, "kernel")
        try:
            kind = KernelKind(kname)
        except ValueError:
            raise UnsupportedKindError(f"unsupported kernel kind {kname!r}", line=no, path=path) from None
        lname, lno = get(s, "link")
        try:
            link = LinkKind(lname)
        except ValueError:
            raise UnsupportedKindError(f"unsupported link kind {lname!r}", line=lno, path=path) from None
        shape_keys = {k[6:] for k in s if k.startswith("shape.")}
        if shape_keys != set(SHAPE_KEYS[kind]):
            raise ParseError(f"{kind.value} needs shape keys {SHAPE_KEYS[kind]}", line=no, path=path)
        known = {"_line", "kernel", "t0", "D", "link", "tp_start", "tp_end", "theta_s", "theta_e"}
        extra = set(s) - known - {f"shape.{k}" for k in shape_keys}
        if extra:
            raise ParseError(f"unknown keys {sorted(extra)}", line=s["_line"], path=path)
        out.append({"kernel": kind.value, "t0": num(get(s, "t0")), "D": num(get(s, "D")),
                    "shape": {k: num(s[f"shape.{k}"]) for k in SHAPE_KEYS[kind]},
                    "link": link.value, "tp_start": num(get(s, "tp_start"), 2),
                    "tp_end": num(get(s, "tp_end"), 2), "theta_s": num(get(s, "theta_s")),
                    "theta_e": num(get(s, "theta_e"))})
    return PlanDocument(version, start, out)


def load_plan(text: str, path=None) -> ActionPlan:
    """Parse plan text; numeric fields round-trip exactly."""
    doc = _parse_document(text, path)
    try:
        return document_to_plan(doc)
    except KTTError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"invalid plan: {exc}", path=path) from None


def write_plan(plan: ActionPlan, path=None) -> str:
    text = dump_plan(plan)
    if path is not None:
        Path(path).write_text(text)
    return text


def read_plan(path) -> ActionPlan:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from None
    return load_plan(text, path)


# ----------------------------------------------------------------- reports


@dataclass(frozen=True)
class ReportRow:
    source: str
    config: str
    snr_t: float
    snr_v: float
    n: int
    passes: int = 0
    warnings: str = ""

    @property
    def snr_t_per_n(self):
        return self.snr_t / self.n

    @property
    def snr_v_per_n(self):
        return self.snr_v / self.n


def write_report(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for r in rows:
            w.writerow([r.source, r.config, _num(r.snr_t), _num(r.snr_v), r.n, _num(r.snr_t_per_n),
                        _num(r.snr_v_per_n), r.passes, r.warnings])


def read_report(path) -> list[ReportRow]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != REPORT_COLUMNS:
            raise ParseError("unexpected report header", line=1, path=path)
        for no, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(REPORT_COLUMNS):
                raise ParseError("wrong number of columns", line=no, path=path)
            try:
                rows.append(ReportRow(rec[0], rec[1], float(rec[2]), float(rec[3]), int(rec[4]),
                                      int(rec[7]), rec[8]))
            except ValueError:
                raise ParseError("bad numeric field", line=no, path=path) from None
    return rows


def write_series(path, original: Trajectory, reconstructed: Trajectory, v_orig, v_rec) -> None:
    """Aligned original and reconstructed positions and speeds, one row per sample."""
    sp_o = np.hypot(v_orig.vx, v_orig.vy)
    sp_r = np.hypot(v_rec.vx, v_rec.vy)
    with open(path, "w", newline="") as fh:
        fh.write("t,x,y,x_rec,y_rec,v,v_rec\n")
        for row in zip(original.t, original.x, original.y, reconstructed.x, reconstructed.y,
                       sp_o, sp_r):
            fh.write(",".join(_num(v) for v in row) + "\n")
