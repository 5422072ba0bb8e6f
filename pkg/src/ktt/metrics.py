"""Reconstruction quality metrics and the two hypothesis tests used to
summarize them."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._backend import kernels as _k
from .errors import DegenerateSampleError, InvalidInputError
from .trajectory import Trajectory, VelocityProfile

SNR_CAP = 120.0
EXACT_MWU_MAX = 20


@dataclass(frozen=True)
class ReconstructionReport:
    snr_t: float
    snr_v: float
    n_strokes: int

    def __post_init__(self):
        if self.n_strokes < 1:
            raise InvalidInputError("a report needs at least one stroke")
        object.__setattr__(self, "snr_t", float(self.snr_t))
        object.__setattr__(self, "snr_v", float(self.snr_v))
        object.__setattr__(self, "n_strokes", int(self.n_strokes))

    @property
    def snr_t_per_n(self) -> float:
        return self.snr_t / self.n_strokes

    @property
    def snr_v_per_n(self) -> float:
        return self.snr_v / self.n_strokes


@dataclass(frozen=True)
class TestResult:
    __test__ = False  # not a pytest class

    statistic: float
    p_value: float

    @property
    def reject_at_5pct(self) -> bool:
        return self.p_value < 0.05


def _db(signal: float, error: float) -> float:
    if error == 0:
        return SNR_CAP if signal > 0 else 0.0
    if signal == 0:
        return -SNR_CAP
    return float(np.clip(10.0 * math.log10(signal / error), -SNR_CAP, SNR_CAP))


def _same_grid(a, b):
    if a.shape != b.shape or not np.allclose(a, b, rtol=0, atol=1e-9 * max(1.0, np.abs(a).max())):
        raise InvalidInputError("signals must share the same time grid")


def snr_t(original: Trajectory, reconstructed: Trajectory) -> float:
    """Trajectory SNR in dB, signal power taken about the original's centroid."""
    _same_grid(original.t, reconstructed.t)
    xo = original.x - original.x.mean()
    yo = original.y - original.y.mean()
    sig = float(np.sum(xo * xo + yo * yo))
    err = float(np.sum((original.x - reconstructed.x) ** 2 + (original.y - reconstructed.y) ** 2))
    return _db(sig, err)


def snr_v(original: VelocityProfile, reconstructed: VelocityProfile) -> float:
    """Velocity SNR in dB on vector velocities."""
    _same_grid(original.t, reconstructed.t)
    sig = float(np.sum(original.vx ** 2 + original.vy ** 2))
    err = float(np.sum((original.vx - reconstructed.vx) ** 2 + (original.vy - reconstructed.vy) ** 2))
    return _db(sig, err)


def jarque_bera(samples) -> TestResult:
    """Normality test from sample skewness and kurtosis.

    The p-value is the chi-squared(2) upper tail, ``exp(-JB / 2)``.
    """
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n < 8:
        raise InvalidInputError("Jarque-Bera needs at least 8 samples")
    d = x - x.mean()
    m2 = float(np.mean(d ** 2))
    if m2 <= 1e-300 or np.ptp(x) == 0:
        raise DegenerateSampleError("samples have zero variance")
    S = float(np.mean(d ** 3)) / m2 ** 1.5
    K = float(np.mean(d ** 4)) / m2 ** 2
    jb = n / 6.0 * (S * S + 0.25 * (K - 3.0) ** 2)
    return TestResult(jb, math.exp(-0.5 * jb))


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="mergesort")
    sorted_v = values[order]
    ranks = np.empty(values.size)
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and sorted_v[j + 1] == sorted_v[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


@lru_cache(maxsize=256)
def _rank_sum_distribution(doubled: tuple[int, ...], na: int) -> dict[int, Fraction]:
    """Exact law of the doubled rank sum of a random ``na``-subset of the pooled ranks."""
    # counts[k][s]: number of k-subsets with doubled rank sum s
    counts = [dict() for _ in range(na + 1)]
    counts[0][0] = 1
    for r in doubled:
        for k in range(min(na, len(doubled)) - 1, -1, -1):
            row = counts[k]
            if not row:
                continue
            nxt = counts[k + 1]
            for s, c in row.items():
                nxt[s + r] = nxt.get(s + r, 0) + c
    total = math.comb(len(doubled), na)
    return {s: Fraction(c, total) for s, c in counts[na].items()}


def mann_whitney_u(a, b, method: str = "auto") -> TestResult:
    """Two-sided Mann-Whitney U test; ``statistic`` is U for sample ``a``.

    With ``method="auto"`` the exact permutation law of the midrank sum is
    used when the pooled size is at most 20, otherwise the normal
    approximation with tie and continuity corrections.  ``"exact"`` and
    ``"asymptotic"`` force one of the two.
    """
    if method not in ("auto", "exact", "asymptotic"):
        raise InvalidInputError(f"unknown method {method!r}")
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    na, nb = a.size, b.size
    if na < 1 or nb < 1:
        raise InvalidInputError("both samples must be non-empty")
    ranks = _midranks(np.concatenate([a, b]))
    ra = float(ranks[:na].sum())
    u = ra - na * (na + 1) / 2.0
    n = na + nb
    if method == "exact" or (method == "auto" and n <= EXACT_MWU_MAX):
        doubled = tuple(sorted(int(round(2 * r)) for r in ranks))
        dist = _rank_sum_distribution(doubled, na)
        obs = int(round(2 * ra))
        lower = sum(p for s, p in dist.items() if s <= obs)
        upper = sum(p for s, p in dist.items() if s >= obs)
        p = min(Fraction(1), 2 * min(lower, upper))
        return TestResult(u, float(p))
    mean = na * nb / 2.0
    _, tie_counts = np.unique(ranks, return_counts=True)
    tie_term = float(np.sum(tie_counts ** 3 - tie_counts)) / (n * (n - 1))
    var = na * nb / 12.0 * ((n + 1) - tie_term)
    if var <= 0:
        return TestResult(u, 1.0)
    z = (abs(u - mean) - 0.5) / math.sqrt(var)
    z = max(z, 0.0)
    p = 2.0 * float(_k.norm_cdf(np.array([-z]))[0])
    return TestResult(u, min(1.0, p))


def report(original: Trajectory, reconstructed: Trajectory, v_orig: VelocityProfile,
           v_rec: VelocityProfile, n_strokes: int) -> ReconstructionReport:
    return ReconstructionReport(snr_t(original, reconstructed), snr_v(v_orig, v_rec), n_strokes)
