"""Critical reflection planes: support values, cap reflection, violation scan.

For a direction e the scan slides the plane {x.e = mu} down from the
support value Lambda_e, reflecting the boundary of the cap beyond the
plane and measuring how far outside the domain it lands.  The critical
offset is the first mu where that excess turns positive; the witness
point classifies the touching case (interior tangency vs an orthogonal
crossing on the plane itself).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .domains import Chart, ImplicitDomain, ProjectionError
from .optim import golden_max

TAG_TANGENCY = "internal-tangency"
TAG_ORTHOGONAL = "boundary-orthogonality"
TAG_UNRESOLVED = "unresolved"

# Level excess above this counts as a genuine inclusion violation; below
# it is indistinguishable from projection/rounding residue.
_VIOLATION_EPS = 1e-12


@dataclass(frozen=True)
class CriticalPlaneResult:
    e: np.ndarray
    Lambda: float
    lam: float
    case_tag: str
    witness: Optional[np.ndarray]
    tol: float


def _unit(e) -> np.ndarray:
    e = np.asarray(e, dtype=float)
    norm = float(np.linalg.norm(e))
    if not norm > 0.0:
        raise ValueError("direction must be a nonzero vector")
    return e / norm


def reflect(x, mu: float, e) -> np.ndarray:
    """Mirror image of ``x`` across the plane {x.e = mu} (vectorized)."""
    x = np.asarray(x, dtype=float)
    e = np.asarray(e, dtype=float)
    side = np.sum(x * e, axis=-1) - mu
    return x - 2.0 * side[..., None] * e


def support_value(d: ImplicitDomain, e) -> float:
    """sup of x.e over the domain (exact when the domain knows it)."""
    e = _unit(e)
    if d.support_fn is not None:
        return float(d.support_fn(e))
    if not d.boundary_param:
        raise ProjectionError("support value needs a boundary parametrization")
    best = -math.inf
    for ch in d.boundary_param:
        m = 4096 * (4 if ch.dense else 1)
        t = ch.lo + (ch.hi - ch.lo) * (np.arange(m) + 0.5) / m
        vals = np.asarray(ch.fn(t), dtype=float) @ e
        spacing = (ch.hi - ch.lo) / m

        def height(tt, _fn=ch.fn):
            return np.asarray(_fn(tt), dtype=float) @ e

        for idx in np.argsort(vals)[-4:]:
            lo = max(ch.lo, t[idx] - 2.0 * spacing)
            hi = min(ch.hi, t[idx] + 2.0 * spacing)
            _, v = golden_max(height, lo, hi)
            best = max(best, float(v))
    return best


def _chart_grids(d: ImplicitDomain, n: int, seed: int):
    """Deterministic per-chart parameter grids (seed shifts the phase)."""
    charts = d.boundary_param
    base = max(64, n // max(1, len(charts)))
    phase = (0.5 + seed * 0.6180339887498949) % 1.0
    grids = []
    for ch in charts:
        m = base * (4 if ch.dense else 1)
        t = ch.lo + (ch.hi - ch.lo) * (np.arange(m) + phase) / m
        grids.append((ch, t, np.asarray(ch.fn(t), dtype=float)))
    return grids


def violation(d: ImplicitDomain, grids, mu: float, e: np.ndarray, refine: bool = True):
    """Worst exterior excess of the reflected cap boundary at offset ``mu``.

    Returns ``(excess, reflected_point)``; excess <= 0 means the reflected
    cap stayed inside on every sample.  Refinement polishes the argmax in
    the chart parameter (points pushed off the cap are penalized by their
    distance to the plane, which keeps the refined max on the cap side).
    """
    best_val, best_pt = -math.inf, None
    for ch, t, pts in grids:
        side = pts @ e - mu
        mask = side > 0.0
        if not np.any(mask):
            continue
        refl = pts[mask] - 2.0 * side[mask, None] * e
        lv = np.atleast_1d(np.asarray(d.level(refl), dtype=float))
        i = int(np.argmax(lv))
        val, pt = float(lv[i]), refl[i]
        if refine:
            spacing = (ch.hi - ch.lo) / t.size

            def gain(tt, _fn=ch.fn):
                q = np.asarray(_fn(tt), dtype=float)
                s_ = q @ e - mu
                r = q - 2.0 * np.asarray(s_)[..., None] * e
                return np.where(s_ > 0.0, np.asarray(d.level(r), dtype=float),
                                -np.abs(s_))

            t0 = t[mask][i]
            t_ref, v_ref = golden_max(gain, max(ch.lo, t0 - 2.0 * spacing),
                                      min(ch.hi, t0 + 2.0 * spacing))
            if float(v_ref) > val:
                q = np.asarray(ch.fn(float(t_ref)), dtype=float)
                val = float(v_ref)
                pt = q - 2.0 * (float(q @ e) - mu) * e
        if val > best_val:
            best_val, best_pt = val, np.asarray(pt, dtype=float)
    return best_val, best_pt


def critical_lambda(d: ImplicitDomain, e, tol: float = 1e-6,
                    n_samples: int = 8192, seed: int = 0) -> CriticalPlaneResult:
    """Critical plane offset in direction ``e``: downward scan plus bisection.

    The scan step is Lambda/200; the first offset whose reflected cap
    pokes outside brackets the critical value, which bisection then pins
    to ``tol``.  The witness is the worst reflected point just below the
    critical offset; a witness within 10 tol of the plane is tagged as the
    orthogonal-crossing case, otherwise as interior tangency.  A clean
    sweep all the way down (a reflection-symmetric domain in an exactly
    symmetric direction never violates) comes back unresolved.
    """
    e = _unit(e)
    if not d.boundary_param:
        raise ProjectionError("critical plane scan needs a boundary parametrization")
    lam_top = support_value(d, e)
    lam_bot = -support_value(d, -e)
    grids = _chart_grids(d, n_samples, seed)

    step = max(abs(lam_top), tol) / 200.0
    hi_mu = lam_top
    lo_mu = None
    mu = lam_top - step
    while mu > lam_bot - 0.5 * step:
        v, _ = violation(d, grids, mu, e)
        if v > _VIOLATION_EPS:
            lo_mu = mu
            break
        hi_mu = mu
        mu -= step
    if lo_mu is None:
        return CriticalPlaneResult(e=e, Lambda=lam_top, lam=lam_bot,
                                   case_tag=TAG_UNRESOLVED, witness=None, tol=tol)

    while hi_mu - lo_mu > tol:
        mid = 0.5 * (lo_mu + hi_mu)
        v, _ = violation(d, grids, mid, e)
        if v > _VIOLATION_EPS:
            lo_mu = mid
        else:
            hi_mu = mid
    lam = 0.5 * (lo_mu + hi_mu)

    v_w, witness = violation(d, grids, lam - tol, e)
    if witness is None or v_w <= _VIOLATION_EPS:
        return CriticalPlaneResult(e=e, Lambda=lam_top, lam=lam,
                                   case_tag=TAG_UNRESOLVED, witness=witness, tol=tol)
    case = (TAG_ORTHOGONAL if abs(float(witness @ e) - lam) <= 10.0 * tol
            else TAG_TANGENCY)
    return CriticalPlaneResult(e=e, Lambda=lam_top, lam=lam, case_tag=case,
                               witness=witness, tol=tol)


def reflected_domain(d: ImplicitDomain, res: CriticalPlaneResult) -> ImplicitDomain:
    """The domain's mirror image across the critical plane of ``res``."""
    e = np.asarray(res.e, dtype=float)
    lam = float(res.lam)
    n = d.dim
    H = np.eye(n) - 2.0 * np.outer(e, e)

    def level(pts):
        return d.level(reflect(pts, lam, e))

    exact = None
    if d.exact_sdf is not None:
        def exact(pts, _sdf=d.exact_sdf):
            return _sdf(reflect(pts, lam, e))

    charts = None
    if d.boundary_param:
        def flip(ch):
            def fn(t, _fn=ch.fn):
                return reflect(np.asarray(_fn(t), dtype=float), lam, e)
            return Chart(fn, ch.lo, ch.hi, ch.dense)

        charts = tuple(flip(ch) for ch in d.boundary_param)

    normal = None
    if d.normal is not None:
        def normal(pts, _nrm=d.normal):
            return np.asarray(_nrm(reflect(pts, lam, e)), dtype=float) @ H

    support = None
    if d.support_fn is not None:
        def support(v, _sup=d.support_fn):
            v = np.asarray(v, dtype=float)
            return float(_sup(H @ v)) + 2.0 * lam * float(e @ v)

    corners = d.bbox[np.array(np.meshgrid(*[[0, 1]] * n)).T.reshape(-1, n),
                     np.arange(n)]
    refl_corners = reflect(corners, lam, e)
    bbox = np.stack([refl_corners.min(axis=0), refl_corners.max(axis=0)])
    return ImplicitDomain(level=level, bbox=bbox, exact_sdf=exact,
                          boundary_param=charts, regularity=d.regularity,
                          interior_ball_radius=d.interior_ball_radius,
                          normal=normal, support_fn=support)


def to_record(res: CriticalPlaneResult) -> dict:
    """JSON-ready record of a critical plane result."""
    return {
        "e": [float(v) for v in res.e],
        "Lambda": res.Lambda,
        "lambda": res.lam,
        "case": res.case_tag,
        "witness": None if res.witness is None else [float(v) for v in res.witness],
        "tol": res.tol,
    }
