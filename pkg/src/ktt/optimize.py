"""Derivative-free one-dimensional minimization."""
import math

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f, lo, hi, tol=1e-6, maxiter=200):
    """Minimize a unimodal ``f`` on ``[lo, hi]`` by golden-section search.

    Stops when the bracket is narrower than ``tol`` or after ``maxiter``
    reductions.  Returns ``(x, f(x))`` for the best point evaluated.
    """
    if hi < lo:
        lo, hi = hi, lo
    c = hi - INVPHI * (hi - lo)
    d = lo + INVPHI * (hi - lo)
    fc = f(c)
    fd = f(d)
    best = (c, fc) if fc <= fd else (d, fd)
    it = 0
    while hi - lo > tol and it < maxiter:
        it += 1
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - INVPHI * (hi - lo)
            fc = f(c)
            if fc < best[1]:
                best = (c, fc)
        else:
            lo, c, fc = c, d, fd
            d = lo + INVPHI * (hi - lo)
            fd = f(d)
            if fd < best[1]:
                best = (d, fd)
    return best
