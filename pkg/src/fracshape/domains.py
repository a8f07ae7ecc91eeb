"""Implicit domains: balls, stretched ellipsoids, bump-perturbed disks, erosion.

Domains are level-set based (negative inside).  All callables stored on a
domain are vectorized over a trailing coordinate axis: points have shape
``(..., n)`` and values come back with shape ``(...,)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .optim import coordinate_descent, golden_max, golden_min


class DomainParameterError(ValueError):
    """Invalid geometric parameters (radius, stretch, bump size...)."""


class ProjectionError(RuntimeError):
    """Boundary projection failed to reach its residual tolerance."""


@dataclass(frozen=True)
class Chart:
    """One-parameter boundary patch ``t in [lo, hi] -> point``.

    ``dense`` marks patches whose features need a finer default sampling
    (the bump support, for instance).
    """

    fn: Callable[[np.ndarray], np.ndarray]
    lo: float
    hi: float
    dense: bool = False


@dataclass(frozen=True)
class Regularity:
    """Claimed boundary regularity: a C^alpha bound M valid at scale rho."""

    alpha: float
    M: float
    rho: float


@dataclass(frozen=True)
class DiskDeviation:
    """Certificate that the domain agrees with the disk of ``radius``
    (centered at the origin) outside the given boxes.

    Used by the measure estimators to split off a closed-form disk part.
    Each box is a ``(2, n)`` array of (lower, upper) corners.
    """

    radius: float
    boxes: tuple


@dataclass(frozen=True)
class ImplicitDomain:
    level: Callable[[np.ndarray], np.ndarray]
    bbox: np.ndarray
    exact_sdf: Optional[Callable[[np.ndarray], np.ndarray]] = None
    boundary_param: Optional[tuple] = None
    regularity: Optional[Regularity] = None
    interior_ball_radius: Optional[float] = None
    normal: Optional[Callable[[np.ndarray], np.ndarray]] = None
    support_fn: Optional[Callable[[np.ndarray], float]] = None
    disk_deviation: Optional[DiskDeviation] = None
    recipe: Optional[dict] = None

    @property
    def dim(self) -> int:
        return self.bbox.shape[1]

    def contains(self, pts) -> np.ndarray:
        return self.level(np.asarray(pts, dtype=float)) < 0.0


@dataclass(frozen=True)
class ShapeMetrics:
    rho_shape: float
    rho_i: float
    rho_e: float
    center: np.ndarray


def _dec(x) -> str:
    """Decimal-string form of a numeric parameter for recipes."""
    return x if isinstance(x, str) else repr(float(x))


# ---------------------------------------------------------------------------
# balls


def ball(center, r) -> ImplicitDomain:
    center = np.atleast_1d(np.asarray(center, dtype=float))
    rf = float(r)
    if not rf > 0.0:
        raise DomainParameterError(f"ball radius must be positive, got {r!r}")
    n = center.size

    def sdf(pts):
        pts = np.asarray(pts, dtype=float)
        return np.linalg.norm(pts - center, axis=-1) - rf

    def normal(pts):
        pts = np.asarray(pts, dtype=float)
        d = pts - center
        return d / np.maximum(np.linalg.norm(d, axis=-1, keepdims=True), 1e-300)

    charts = None
    if n == 2:
        def arc(t):
            t = np.asarray(t, dtype=float)
            return center + rf * np.stack([np.cos(t), np.sin(t)], axis=-1)

        charts = (Chart(arc, 0.0, 2.0 * math.pi),)

    dev = None
    if n == 2 and np.all(center == 0.0):
        dev = DiskDeviation(radius=rf, boxes=())

    bbox = np.stack([center - rf, center + rf])
    return ImplicitDomain(
        level=sdf,
        bbox=bbox,
        exact_sdf=sdf,
        boundary_param=charts,
        interior_ball_radius=rf,
        normal=normal,
        support_fn=lambda e: float(center @ np.asarray(e, dtype=float)) + rf,
        disk_deviation=dev,
        recipe={"kind": "ball", "params": {"center": [_dec(c) for c in center], "r": _dec(r)},
                "regularity": None},
    )


# ---------------------------------------------------------------------------
# ellipsoids with semi-axes (1+eps, 1, ..., 1)


def _ellipse_axis_distance(p1, a, b):
    """Distance to the ellipse from points on the major axis (p2 = 0)."""
    p1 = np.abs(p1)
    f2 = a * a - b * b
    inner = p1 < f2 / a if f2 > 0 else np.zeros_like(p1, dtype=bool)
    x_hat = np.where(inner, a * a * p1 / max(f2, 1e-300), 0.0)
    y_hat = np.where(inner, b * np.sqrt(np.maximum(0.0, 1.0 - (x_hat / a) ** 2)), 0.0)
    d_inner = np.hypot(p1 - x_hat, y_hat)
    return np.where(inner, d_inner, np.abs(p1 - a))


def _ellipse_distance(p1, p2, a, b, iters: int = 90):
    """Unsigned distance from (p1, p2) to the ellipse x^2/a^2 + y^2/b^2 = 1.

    Solves the normal-foot equation for the Lagrange parameter t by damped
    bisection (monotone, bracket guaranteed), vectorized over points.  The
    axis p2 == 0 case has closed-form feet and is handled separately.
    """
    p1 = np.abs(np.asarray(p1, dtype=float))
    p2 = np.abs(np.asarray(p2, dtype=float))
    if a == b:
        return np.abs(np.hypot(p1, p2) - a)
    # Below this height the on-axis feet are accurate to ~1e-12 and the
    # floating-point bracket for the off-axis solve degenerates.
    off_axis = p2 > 1e-12
    q1 = np.where(off_axis, p1, 0.0)
    q2 = np.where(off_axis, p2, 1.0)  # placeholder keeps the bracket valid

    b2 = b * b
    t_lo = np.full_like(q1, -b2 * (1.0 - 1e-12) if b2 > 0 else 0.0)
    t_hi = math.sqrt(2.0) * (a * q1 + b * q2) + 1.0

    def foot_gap(t):
        with np.errstate(over="ignore", divide="ignore"):
            u = a * q1 / (t + a * a)
            v = b * q2 / (t + b2)
            return u * u + v * v - 1.0

    for _ in range(iters):
        mid = 0.5 * (t_lo + t_hi)
        pos = foot_gap(mid) > 0.0
        t_lo = np.where(pos, mid, t_lo)
        t_hi = np.where(pos, t_hi, mid)
    t = 0.5 * (t_lo + t_hi)
    f1 = a * a * q1 / (t + a * a)
    f2 = b2 * q2 / (t + b2)
    d_off = np.hypot(q1 - f1, q2 - f2)
    res = np.abs(foot_gap(t))
    if np.any(off_axis) and float(np.max(np.where(off_axis, res, 0.0))) > 1e-10:
        raise ProjectionError(
            f"ellipse projection residual {float(np.max(res)):.3e} above 1e-10")
    return np.where(off_axis, d_off, _ellipse_axis_distance(p1, a, b))


def _ellipsoid_domain(n: int, eps, eps_str=None) -> ImplicitDomain:
    epsf = float(eps)
    if not 0.0 <= epsf < 0.25:
        raise DomainParameterError(f"ellipsoid stretch restricted to [0, 1/4), got {eps!r}")
    if n < 2:
        raise DomainParameterError("ellipsoid needs dimension >= 2")
    a = 1.0 + epsf

    def level(pts):
        pts = np.asarray(pts, dtype=float)
        return (pts[..., 0] / a) ** 2 + np.sum(pts[..., 1:] ** 2, axis=-1) - 1.0

    def sdf(pts):
        pts = np.asarray(pts, dtype=float)
        shape = pts.shape[:-1]
        flat = pts.reshape(-1, n)
        radial = np.linalg.norm(flat[:, 1:], axis=1)
        d = _ellipse_distance(flat[:, 0], radial, a, 1.0)
        inside = level(flat) < 0.0
        return (np.where(inside, -d, d)).reshape(shape)

    def normal(pts):
        pts = np.asarray(pts, dtype=float)
        g = np.concatenate([pts[..., :1] / a**2, pts[..., 1:]], axis=-1)
        return g / np.maximum(np.linalg.norm(g, axis=-1, keepdims=True), 1e-300)

    charts = None
    if n == 2:
        def arc(t):
            t = np.asarray(t, dtype=float)
            return np.stack([a * np.cos(t), np.sin(t)], axis=-1)

        charts = (Chart(arc, 0.0, 2.0 * math.pi),)

    def support(e):
        e = np.asarray(e, dtype=float)
        return float(math.sqrt((a * e[0]) ** 2 + float(np.sum(e[1:] ** 2))))

    lo = -np.array([a] + [1.0] * (n - 1))
    return ImplicitDomain(
        level=level,
        bbox=np.stack([lo, -lo]),
        exact_sdf=sdf,
        boundary_param=charts,
        interior_ball_radius=1.0 / a,
        normal=normal,
        support_fn=support,
        recipe={"kind": "ellipsoid", "params": {"n": n, "eps": eps_str or _dec(eps)},
                "regularity": None},
    )


def ellipsoid(p, eps) -> ImplicitDomain:
    """Unit-ball stretch by 1+eps along the first axis, for params ``p``."""
    return _ellipsoid_domain(p.n, eps)


# ---------------------------------------------------------------------------
# bump-perturbed disk


def _smoothstep(v):
    """C-infinity monotone step: 0 for v <= 0, 1 for v >= 1."""
    v = np.asarray(v, dtype=float)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        e0 = np.where(v > 0.0, np.exp(-1.0 / np.maximum(v, 1e-300)), 0.0)
        e1 = np.where(v < 1.0, np.exp(-1.0 / np.maximum(1.0 - v, 1e-300)), 0.0)
    return e0 / (e0 + e1)


def odd_cutoff(t):
    """Smooth odd bump: equals 2t on [-1/4, 1/4], vanishes outside (-3/4, 3/4),
    and stays within [-1, 1]."""
    t = np.asarray(t, dtype=float)
    taper = 1.0 - _smoothstep((np.abs(t) - 0.25) * 2.0)
    return 2.0 * t * taper


def bump_profile(eps: float, alpha: float):
    """Lower-boundary graph of the bump-perturbed disk, with its derivative.

    Returns ``(psi, dpsi)``; the profile is the circle graph minus an odd
    bump of height ~eps centered at tau = eps^(1-1/alpha) with width
    eps^(1/alpha).
    """
    eps = float(eps)
    alpha = float(alpha)
    center = eps ** (1.0 - 1.0 / alpha)
    width = eps ** (1.0 / alpha)

    def psi(tau):
        tau = np.asarray(tau, dtype=float)
        return -np.sqrt(1.0 - tau * tau) - eps * odd_cutoff((tau - center) / width)

    def dpsi(tau):
        tau = np.asarray(tau, dtype=float)
        h = 1e-7
        bump_d = (odd_cutoff((tau - center) / width + h) -
                  odd_cutoff((tau - center) / width - h)) / (2.0 * h)
        return tau / np.sqrt(1.0 - tau * tau) - (eps / width) * bump_d

    return psi, dpsi


# Angular extent of the circular arc that the graph chart replaces:
# cos(theta) in (0, 1/2) and sin(theta) < -1/2 means theta in (3pi/2, 5pi/3).
_ARC_LO = 5.0 * math.pi / 3.0
_ARC_HI = 3.0 * math.pi / 2.0 + 2.0 * math.pi


def bump_domain(eps, alpha, hold_M: float = 16.0) -> ImplicitDomain:
    """Unit disk with a localized boundary bump of height ~eps.

    The boundary follows the unit circle except over the strip
    ``(0, 1/2) x (-3/2, -1/2)``, where it is the graph of ``bump_profile``.
    ``alpha`` controls the bump aspect ratio; the bump center sits at
    ``eps^(1-1/alpha)``, which is also the scale of the critical plane the
    moving-planes scan is expected to find.
    """
    epsf = float(eps)
    alphaf = float(alpha)
    if not alphaf > 1.0:
        raise DomainParameterError(f"bump aspect exponent must exceed 1, got {alpha!r}")
    if not 0.0 < epsf <= 0.05:
        raise DomainParameterError(f"bump height restricted to (0, 0.05], got {eps!r}")
    center = epsf ** (1.0 - 1.0 / alphaf)
    width = epsf ** (1.0 / alphaf)
    if center + width >= 0.5:
        raise DomainParameterError(
            f"bump support [{center - width:.3g}, {center + width:.3g}] leaves the strip; "
            "reduce eps")
    psi, dpsi = bump_profile(epsf, alphaf)

    def level(pts):
        pts = np.asarray(pts, dtype=float)
        x1, x2 = pts[..., 0], pts[..., 1]
        in_strip = (x1 > 0.0) & (x1 < 0.5) & (x2 > -1.5) & (x2 < -0.5)
        circ = np.hypot(x1, x2) - 1.0
        graph = psi(np.where(in_strip, x1, 0.0)) - x2
        return np.where(in_strip, graph, circ)

    def circle_chart(t):
        t = np.asarray(t, dtype=float)
        return np.stack([np.cos(t), np.sin(t)], axis=-1)

    def graph_chart(t):
        t = np.asarray(t, dtype=float)
        return np.stack([t, psi(t)], axis=-1)

    sup_lo = max(0.0, center - width)
    sup_hi = min(0.5, center + width)
    charts = (
        Chart(circle_chart, _ARC_LO, _ARC_HI),
        Chart(graph_chart, 0.0, 0.5),
        Chart(graph_chart, sup_lo, sup_hi, dense=True),
    )

    def normal(pts):
        pts = np.asarray(pts, dtype=float)
        x1, x2 = pts[..., 0], pts[..., 1]
        in_strip = (x1 > 0.0) & (x1 < 0.5) & (x2 > -1.5) & (x2 < -0.5)
        slope = dpsi(np.where(in_strip, x1, 0.0))
        g_graph = np.stack([slope, -np.ones_like(slope)], axis=-1)
        g_circ = pts
        g = np.where(in_strip[..., None], g_graph, g_circ)
        return g / np.maximum(np.linalg.norm(g, axis=-1, keepdims=True), 1e-300)

    # Bounding box for where the domain can deviate from the unit disk.
    taus = np.linspace(sup_lo, sup_hi, 4097)
    circ_y = -np.sqrt(1.0 - taus**2)
    psi_y = psi(taus)
    pad = 1e-3 * max(epsf, 1e-12)
    box = np.array([
        [max(0.0, sup_lo - 1e-3 * width), min(circ_y.min(), psi_y.min()) - pad],
        [min(0.5, sup_hi + 1e-3 * width), max(circ_y.max(), psi_y.max()) + pad],
    ])

    margin = 1.0 + 2.0 * epsf
    return ImplicitDomain(
        level=level,
        bbox=np.array([[-margin, -margin], [margin, margin]]),
        boundary_param=charts,
        regularity=Regularity(alpha=alphaf, M=float(hold_M), rho=0.125),
        normal=normal,
        disk_deviation=DiskDeviation(radius=1.0, boxes=(box,)),
        recipe={"kind": "bump", "params": {"eps": _dec(eps), "alpha": _dec(alpha)},
                "regularity": {"alpha": _dec(alpha), "M": _dec(hold_M), "rho": "0.125"}},
    )


# ---------------------------------------------------------------------------
# boundary sampling and distances


def boundary_samples(d: ImplicitDomain, n: int = 4096) -> np.ndarray:
    """Deterministic midpoint samples of every boundary chart.

    Dense charts receive a 4x allocation.  The total can exceed ``n``
    slightly; callers treat this as "at least n" coverage.
    """
    if not d.boundary_param:
        raise ProjectionError("domain has no boundary parametrization to sample")
    charts = d.boundary_param
    base = max(64, n // max(1, len(charts)))
    pieces = []
    for ch in charts:
        m = base * (4 if ch.dense else 1)
        t = ch.lo + (ch.hi - ch.lo) * (np.arange(m) + 0.5) / m
        pieces.append(np.asarray(ch.fn(t), dtype=float))
    return np.concatenate(pieces, axis=0)


def _chart_min_distance(d: ImplicitDomain, pts: np.ndarray, m_per_chart: int = 2048,
                        chunk: int = 2048) -> np.ndarray:
    """Distance from each point to the sampled-and-refined boundary."""
    pts = np.asarray(pts, dtype=float)
    flat = pts.reshape(-1, pts.shape[-1])
    best = np.full(flat.shape[0], np.inf)
    for ch in d.boundary_param:
        m = m_per_chart * (4 if ch.dense else 1)
        tgrid = ch.lo + (ch.hi - ch.lo) * (np.arange(m) + 0.5) / m
        nodes = np.asarray(ch.fn(tgrid), dtype=float)
        spacing = (ch.hi - ch.lo) / m
        for start in range(0, flat.shape[0], chunk):
            block = flat[start:start + chunk]
            d2 = np.sum((block[:, None, :] - nodes[None, :, :]) ** 2, axis=-1)
            idx = np.argmin(d2, axis=1)
            t0 = tgrid[idx]

            def gap(t, block=block):
                return np.linalg.norm(np.asarray(ch.fn(t), dtype=float) - block, axis=-1)

            lo = np.maximum(ch.lo, t0 - 1.5 * spacing)
            hi = np.minimum(ch.hi, t0 + 1.5 * spacing)
            _, dist = golden_min(gap, lo, hi)
            best[start:start + chunk] = np.minimum(best[start:start + chunk],
                                                   np.atleast_1d(dist))
    return best.reshape(pts.shape[:-1])


def boundary_distance(d: ImplicitDomain, x) -> np.ndarray:
    """Unsigned distance to the domain boundary (exact SDF when available)."""
    x = np.asarray(x, dtype=float)
    if d.exact_sdf is not None:
        out = np.abs(d.exact_sdf(x))
    elif d.boundary_param:
        out = _chart_min_distance(d, x)
    else:
        raise ProjectionError("no exact SDF and no boundary parametrization")
    if out.ndim == 0:
        return float(out)
    return out


def signed_distance(d: ImplicitDomain, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if d.exact_sdf is not None:
        return d.exact_sdf(x)
    dist = boundary_distance(d, x)
    return np.where(d.level(x) < 0.0, -dist, dist)


# ---------------------------------------------------------------------------
# erosion


def erode(d: ImplicitDomain, rho) -> ImplicitDomain:
    """Inner parallel set {x in domain : dist(x, boundary) > rho}.

    Requires ``rho`` below the domain's interior ball radius so the offset
    boundary is again a graph over the original one (the eroded SDF is then
    just the parent SDF shifted by rho).
    """
    rhof = float(rho)
    if d.interior_ball_radius is None:
        raise DomainParameterError("erosion needs a known interior ball radius")
    if not 0.0 < rhof < d.interior_ball_radius:
        raise DomainParameterError(
            f"erosion depth must lie in (0, {d.interior_ball_radius:g}), got {rho!r}")

    def level(pts):
        return signed_distance(d, pts) + rhof

    exact = None
    if d.exact_sdf is not None:
        def exact(pts, _sdf=d.exact_sdf):
            return _sdf(pts) + rhof

    charts = None
    if d.boundary_param and d.normal is not None:
        def offset(ch):
            def fn(t, _fn=ch.fn):
                q = np.asarray(_fn(t), dtype=float)
                return q - rhof * d.normal(q)
            return Chart(fn, ch.lo, ch.hi, ch.dense)

        charts = tuple(offset(ch) for ch in d.boundary_param)

    recipe = None
    if d.recipe is not None:
        recipe = {"kind": "eroded", "params": {"parent": d.recipe, "rho": _dec(rho)},
                  "regularity": None}
    return ImplicitDomain(
        level=level,
        bbox=d.bbox.copy(),
        exact_sdf=exact,
        boundary_param=charts,
        interior_ball_radius=d.interior_ball_radius - rhof,
        normal=d.normal,
        recipe=recipe,
    )


# ---------------------------------------------------------------------------
# shape metrics


def _refined_extremes(d: ImplicitDomain, center: np.ndarray, n: int = 4096):
    """(min, max) of |x - center| over the boundary, chart-refined."""
    lo_best, hi_best = np.inf, -np.inf
    for ch in d.boundary_param:
        m = max(256, n // max(1, len(d.boundary_param))) * (4 if ch.dense else 1)
        t = ch.lo + (ch.hi - ch.lo) * (np.arange(m) + 0.5) / m
        vals = np.linalg.norm(np.asarray(ch.fn(t), dtype=float) - center, axis=-1)
        spacing = (ch.hi - ch.lo) / m

        def gap(tt):
            return np.linalg.norm(np.asarray(ch.fn(tt), dtype=float) - center, axis=-1)

        for idx in np.argsort(vals)[:4]:
            t0 = t[idx]
            _, v = golden_min(gap, max(ch.lo, t0 - 2 * spacing), min(ch.hi, t0 + 2 * spacing))
            lo_best = min(lo_best, float(v))
        for idx in np.argsort(vals)[-4:]:
            t0 = t[idx]
            _, v = golden_max(gap, max(ch.lo, t0 - 2 * spacing), min(ch.hi, t0 + 2 * spacing))
            hi_best = max(hi_best, float(v))
    return lo_best, hi_best


def radial_extremes(d: ImplicitDomain, n: int = 4096):
    """(rho_i, rho_e): nearest and farthest boundary point from the origin."""
    origin = np.zeros(d.dim)
    return _refined_extremes(d, origin, n=n)


def shape_metrics(d: ImplicitDomain, n_boundary: int = 4096, n_starts: int = 20,
                  seed: int = 0) -> ShapeMetrics:
    """Ball-sandwich gap of the domain plus origin-anchored radial extremes.

    ``rho_shape`` minimizes (circumradius - inradius) over the center by
    multistart coordinate descent; starts are the boundary centroid plus
    seeded perturbations.
    """
    if not d.boundary_param:
        raise ProjectionError("shape metrics need a boundary parametrization")
    samples = boundary_samples(d, n_boundary)

    def objective(c):
        r = np.linalg.norm(samples - c, axis=-1)
        return float(r.max() - r.min())

    centroid = samples.mean(axis=0)
    diam = float(np.linalg.norm(d.bbox[1] - d.bbox[0]))
    rng = np.random.default_rng(seed)
    starts = [centroid]
    starts += [centroid + 0.05 * diam * rng.standard_normal(d.dim) for _ in range(n_starts)]
    best_c, best_val = None, np.inf
    for x0 in starts:
        c, val = coordinate_descent(objective, x0, step0=0.05 * diam, step_min=1e-10)
        if val < best_val:
            best_c, best_val = c, val
    r_in, r_out = _refined_extremes(d, best_c, n=n_boundary)
    rho_i, rho_e = radial_extremes(d, n=n_boundary)
    return ShapeMetrics(rho_shape=r_out - r_in, rho_i=rho_i, rho_e=rho_e, center=best_c)


# ---------------------------------------------------------------------------
# JSON recipes


def to_recipe(d: ImplicitDomain) -> dict:
    if d.recipe is None:
        raise DomainParameterError("domain carries no serializable recipe")
    return d.recipe


def from_recipe(recipe: dict) -> ImplicitDomain:
    kind = recipe.get("kind")
    params = recipe.get("params", {})
    if kind == "ball":
        center = [float(c) for c in params["center"]]
        dom = ball(center, float(params["r"]))
        fixed = {"kind": "ball", "params": {"center": list(params["center"]),
                                            "r": params["r"]}, "regularity": None}
        return replace(dom, recipe=fixed)
    if kind == "ellipsoid":
        return _ellipsoid_domain(int(params["n"]), float(params["eps"]),
                                 eps_str=params["eps"])
    if kind == "bump":
        reg = recipe.get("regularity") or {}
        dom = bump_domain(float(params["eps"]), float(params["alpha"]),
                          hold_M=float(reg.get("M", 16.0)))
        fixed = {"kind": "bump",
                 "params": {"eps": params["eps"], "alpha": params["alpha"]},
                 "regularity": {"alpha": params["alpha"],
                                "M": reg.get("M", "16.0"), "rho": "0.125"}}
        return replace(dom, recipe=fixed)
    if kind == "eroded":
        parent = from_recipe(params["parent"])
        dom = erode(parent, float(params["rho"]))
        fixed = {"kind": "eroded", "params": {"parent": to_recipe(parent),
                                              "rho": params["rho"]}, "regularity": None}
        return replace(dom, recipe=fixed)
    raise DomainParameterError(f"unknown domain recipe kind {kind!r}")
