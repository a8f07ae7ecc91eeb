"""Scripted exponent experiments.

Three scans tie the geometry, plane-sweep, and measure estimators
together: the stretched-ball stability probe (seminorm against ball
deviation), the bump-family critical-plane scaling, and the slab-measure
sharpness table.  Rows of a scan are independent; they are computed in
grid order with per-row derived seeds, so re-running a config reproduces
the table byte for byte.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .domains import (ImplicitDomain, bump_domain, ellipsoid, radial_extremes,
                      shape_metrics)
from .measures import slab_measure
from .movingplanes import TAG_UNRESOLVED, critical_lambda
from .seminorm import OptimBudget, ellipsoid_seminorm
from .specfun import FracParams, ParameterDomainError


@dataclass(frozen=True)
class FitResult:
    """Least-squares power law y = exp(intercept) * x**slope."""

    slope: float
    intercept: float
    r2: float
    points: tuple


def exponent_fit(points) -> FitResult:
    """Fit a line through (log x, log y).

    Needs at least three strictly positive points; fewer would make the
    reported r2 meaningless.
    """
    pts = tuple((float(x), float(y)) for x, y in points)
    if len(pts) < 3:
        raise ValueError(f"power-law fit needs >= 3 points, got {len(pts)}")
    if any(x <= 0.0 or y <= 0.0 for x, y in pts):
        raise ValueError("power-law fit needs strictly positive coordinates")
    lx = np.log([x for x, _ in pts])
    ly = np.log([y for _, y in pts])
    design = np.stack([lx, np.ones_like(lx)], axis=-1)
    (slope, intercept), *_ = np.linalg.lstsq(design, ly, rcond=None)
    resid = ly - (slope * lx + intercept)
    ss_res = float(resid @ resid)
    ss_tot = float(((ly - ly.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return FitResult(slope=float(slope), intercept=float(intercept), r2=r2, points=pts)


def config_hash(config: dict) -> str:
    """Short content hash of a JSON-serializable config, for artifact names."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]


def write_table(path, rows: Sequence[dict], fieldnames: Sequence[str]) -> None:
    """CSV writer with repr-exact floats so identical runs share bytes."""
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(fieldnames))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v
                             for k, v in row.items()})


# ---------------------------------------------------------------------------
# stretched-ball stability probe

PROBE_FIELDS = ("eps", "rho_shape", "seminorm", "flag")


@dataclass(frozen=True)
class ProbeResult:
    rows: tuple
    fit: Optional[FitResult]


def stability_probe(p: FracParams, eps_grid, budget: Optional[OptimBudget] = None,
                    seed: int = 0) -> ProbeResult:
    """Rows (eps, ball-deviation, boundary seminorm) over a stretch grid.

    The fit regresses deviation on seminorm in log-log coordinates; slope
    near 1 is the linear-stability signature of this family.  Grids
    shorter than three rows get the table but no fit.
    """
    eps_list = [float(e) for e in eps_grid]
    if not eps_list:
        raise ParameterDomainError("empty stretch grid")
    if not all(0.0 < e < 0.25 for e in eps_list):
        raise ParameterDomainError("stretch grid must lie inside (0, 1/4)")
    rows = []
    for i, eps in enumerate(eps_list):
        dom = ellipsoid(p, eps)
        metrics = shape_metrics(dom, seed=seed + i)
        sem = ellipsoid_seminorm(p, eps, budget=budget or OptimBudget(seed=seed + i))
        rows.append({"eps": eps, "rho_shape": metrics.rho_shape,
                     "seminorm": sem.value,
                     "flag": "" if sem.converged else "seminorm-unconverged"})
    fit = None
    clean = [r for r in rows if not r["flag"]]
    if len(clean) >= 3:
        fit = exponent_fit([(r["seminorm"], r["rho_shape"]) for r in clean])
    return ProbeResult(rows=tuple(rows), fit=fit)


# ---------------------------------------------------------------------------
# bump-family critical-plane scaling

SCAN_FIELDS = ("eps", "lam", "slab", "slab_err", "case", "flag")

_SWEEP = (1.0, 0.0)  # the bump breaks symmetry along the first axis


@dataclass(frozen=True)
class ScanResult:
    rows: tuple
    lambda_fit: Optional[FitResult]
    slab_fit: Optional[FitResult]


def _row_flags(res, est, tol: float):
    flags = []
    if res.case_tag == TAG_UNRESOLVED:
        flags.append("unresolved")
    if abs(res.lam) < 100.0 * tol:
        flags.append("lambda-below-resolution")
    if est is not None and est.flag:
        flags.append(est.flag)
    return "+".join(flags)


def counterexample_scan(alpha: float, eps_grid, gamma: float, tol: float = 1e-8,
                        n_slab: int = 200_000, seed: int = 0) -> ScanResult:
    """Critical plane offset and slab measure of the bump family vs eps.

    Both columns should scale like eps**(1 - 1/alpha).  Rows whose plane
    offset falls within 100x of the sweep tolerance are flagged and kept
    out of the fits.
    """
    alphaf = float(alpha)
    gammaf = float(gamma)
    if not alphaf > 1.0:
        raise ParameterDomainError(f"bump aspect exponent must exceed 1, got {alpha!r}")
    if not 0.0 < gammaf < 0.25:
        raise ParameterDomainError(f"slab half-width restricted to (0, 1/4), got {gamma!r}")
    eps_list = [float(e) for e in eps_grid]
    if not eps_list:
        raise ParameterDomainError("empty bump-height grid")
    rows = []
    for i, eps in enumerate(eps_list):
        dom = bump_domain(eps, alphaf)
        res = critical_lambda(dom, _SWEEP, tol=tol, seed=seed + i)
        est = slab_measure(dom, res, gammaf, n_slab, seed=seed + i)
        rows.append({"eps": eps, "lam": res.lam, "slab": est.value,
                     "slab_err": est.error, "case": res.case_tag,
                     "flag": _row_flags(res, est, tol)})
    clean = [r for r in rows
             if not r["flag"] and r["lam"] > 0.0 and r["slab"] > 0.0]
    lambda_fit = slab_fit = None
    if len(clean) >= 3:
        lambda_fit = exponent_fit([(r["eps"], r["lam"]) for r in clean])
        slab_fit = exponent_fit([(r["eps"], r["slab"]) for r in clean])
    return ScanResult(rows=tuple(rows), lambda_fit=lambda_fit, slab_fit=slab_fit)


# ---------------------------------------------------------------------------
# slab-measure sharpness table

LEMMA_FIELDS = ("eps", "gamma", "lam", "gap", "slab", "slab_err",
                "ratio_thm52", "ratio_lem53", "ratio_linear", "flag")


@dataclass(frozen=True)
class LemmaResult:
    rows: tuple


def geometric_lemma_check(alpha: float, eps_grid, gamma_grid, tol: float = 1e-8,
                          n_slab: int = 200_000, seed: int = 0,
                          family: Callable[[float, float], ImplicitDomain] = None,
                          ) -> LemmaResult:
    """Slab measure against three candidate denominators on the bump family.

    ``gap`` is the annulus width rho_e - rho_i about the construction's
    center (the origin), the sandwich the sharpness statements are phrased
    in.  ``ratio_thm52`` divides by gamma * gap**(1 - 1/alpha) and should
    stay in a bounded band; ``ratio_lem53`` divides by
    gamma * (gap + gamma*|lam|); ``ratio_linear`` divides by gamma * gap
    and is the one that blows up as eps -> 0.  A degenerate row (gap at
    rounding level) is flagged ``skip`` with NaN ratios.

    ``family`` swaps the domain constructor, mainly so degenerate inputs
    can be exercised; it defaults to the bump family.
    """
    alphaf = float(alpha)
    if not alphaf > 1.0:
        raise ParameterDomainError(f"bump aspect exponent must exceed 1, got {alpha!r}")
    gamma_list = [float(g) for g in gamma_grid]
    if not gamma_list or not all(0.0 < g <= 0.25 for g in gamma_list):
        raise ParameterDomainError("slab grid must lie inside (0, 1/4]")
    eps_list = [float(e) for e in eps_grid]
    if not eps_list:
        raise ParameterDomainError("empty bump-height grid")
    make = family or (lambda eps, a: bump_domain(eps, a))
    rows = []
    for i, eps in enumerate(eps_list):
        dom = make(eps, alphaf)
        res = critical_lambda(dom, _SWEEP, tol=tol, seed=seed + i)
        rho_i, rho_e = radial_extremes(dom)
        gap = rho_e - rho_i
        for j, g in enumerate(gamma_list):
            est = slab_measure(dom, res, g, n_slab, seed=seed + 1000 * i + j)
            row = {"eps": eps, "gamma": g, "lam": res.lam, "gap": gap,
                   "slab": est.value, "slab_err": est.error}
            if gap <= 1e-12:
                row.update(ratio_thm52=float("nan"), ratio_lem53=float("nan"),
                           ratio_linear=float("nan"), flag="skip")
            else:
                row.update(
                    ratio_thm52=est.value / (g * gap ** (1.0 - 1.0 / alphaf)),
                    ratio_lem53=est.value / (g * (gap + g * abs(res.lam))),
                    ratio_linear=est.value / (g * gap),
                    flag=_row_flags(res, est, tol))
            rows.append(row)
    return LemmaResult(rows=tuple(rows))
