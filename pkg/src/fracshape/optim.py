"""Small derivative-free search helpers shared by the geometry modules."""

from __future__ import annotations

import numpy as np

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0
_INVPHI2 = (3.0 - np.sqrt(5.0)) / 2.0


def golden_max(fn, lo, hi, iters: int = 70):
    """Golden-section maximization, vectorized over independent brackets.

    ``fn`` must map a float array of bracket points to an equally shaped
    array of values.  Returns ``(argmax, max)`` arrays (scalars collapse).
    Unimodality inside each bracket is the caller's responsibility; on
    multimodal slices this still returns a local maximum.
    """
    lo = np.asarray(lo, dtype=float).copy()
    hi = np.asarray(hi, dtype=float).copy()
    scalar = lo.ndim == 0
    lo = np.atleast_1d(lo)
    hi = np.atleast_1d(hi)
    for _ in range(iters):
        c = lo + _INVPHI2 * (hi - lo)
        d = lo + _INVPHI * (hi - lo)
        keep_left = np.asarray(fn(c)) >= np.asarray(fn(d))
        hi = np.where(keep_left, d, hi)
        lo = np.where(keep_left, lo, c)
    mid = 0.5 * (lo + hi)
    val = np.asarray(fn(mid))
    if scalar:
        return float(mid[0]), float(val.reshape(-1)[0])
    return mid, val


def golden_min(fn, lo, hi, iters: int = 70):
    """Golden-section minimization; see :func:`golden_max`."""
    arg, neg = golden_max(lambda t: -np.asarray(fn(t)), lo, hi, iters=iters)
    return arg, -neg


def coordinate_descent(fn, x0, step0: float, step_min: float = 1e-9, max_rounds: int = 200):
    """Greedy per-coordinate descent with a halving step schedule.

    Minimizes ``fn`` (scalar-valued, takes a 1d point).  Robust rather
    than fast; the shape-metric objectives it serves are cheap and only
    a few dimensions.
    """
    x = np.asarray(x0, dtype=float).copy()
    best = float(fn(x))
    step = float(step0)
    rounds = 0
    while step > step_min and rounds < max_rounds:
        improved = False
        for i in range(x.size):
            for sgn in (+1.0, -1.0):
                trial = x.copy()
                trial[i] += sgn * step
                val = float(fn(trial))
                if val < best - 1e-15:
                    x, best = trial, val
                    improved = True
        if not improved:
            step *= 0.5
        rounds += 1
    return x, best
