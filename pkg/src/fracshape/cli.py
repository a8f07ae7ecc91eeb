"""Command-line front end.

Every subcommand runs from a reproducible config: numeric flags are kept
as decimal strings and echoed verbatim into the JSON summary, artifact
file names derive from a content hash of {command, params, seed}, and
re-running the same config reproduces every output byte.  Validation
failures exit with status 2 and a machine-readable JSON object on
standard error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .domains import ball, bump_domain, boundary_distance, ellipsoid
from .experiments import (LEMMA_FIELDS, PROBE_FIELDS, SCAN_FIELDS, config_hash,
                          counterexample_scan, geometric_lemma_check,
                          stability_probe, write_table)
from .frlap import frlap_eval, torsion_ball, torsion_ellipsoid
from .measures import boundary_weighted_integral, halton_points, slab_measure
from .movingplanes import critical_lambda, to_record
from .seminorm import OptimBudget, ellipsoid_ratio_limit, ellipsoid_seminorm
from .specfun import FracParams, gamma_ns


class CliError(ValueError):
    """Invalid invocation; reported as JSON on stderr with exit code 2."""


@dataclass
class RunConfig:
    """One reproducible invocation: subcommand, decimal-string params, seed."""

    command: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    output_path: str = "."

    def to_json(self) -> str:
        return json.dumps({"command": self.command, "params": self.params,
                           "seed": self.seed, "output_path": self.output_path},
                          sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        raw = json.loads(text)
        known = {"command", "params", "seed", "output_path"}
        unknown = set(raw) - known
        if unknown:
            raise CliError(f"unknown config keys: {sorted(unknown)}")
        if "command" not in raw:
            raise CliError("config is missing 'command'")
        params = {str(k): v if isinstance(v, str) else str(v)
                  for k, v in raw.get("params", {}).items()}
        return cls(command=str(raw["command"]), params=params,
                   seed=int(raw.get("seed", 0)),
                   output_path=str(raw.get("output_path", ".")))


# flag table per subcommand; None marks a required flag
_SPECS = {
    "constants": {"n": "2", "s": "0.5"},
    "torsion-check": {"domain": "ball", "s": "0.5", "points": "20",
                      "min-dist": "0.2"},
    "seminorm-ratio": {"s": "0.5", "eps": None, "n-pairs": "100000"},
    "critical-plane": {"domain": None, "e": "1,0", "tol": "1e-6"},
    "slab-measure": {"domain": None, "e": "1,0", "gamma": "0.2",
                     "tol": "1e-6", "n": "200000"},
    "boundary-integral": {"domain": None, "s": "0.5", "n": "200000"},
    "counterexample-scan": {"alpha": "2", "eps": "1e-3,3e-4,1e-4,3e-5,1e-5",
                            "gamma": "0.2", "tol": "1e-8", "n": "200000"},
    "stability-probe": {"s": "0.5", "eps": "0.02,0.01,0.005",
                        "n-pairs": "100000"},
    "lemma-check": {"alpha": "2", "eps": "1e-3,1e-4,1e-5", "gamma": "0.2",
                    "tol": "1e-8", "n": "200000"},
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures into the JSON path
        raise CliError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="fracshape", description=__doc__)
    sub = parser.add_subparsers(dest="command")
    for name, spec in _SPECS.items():
        sp = sub.add_parser(name, description=f"run the {name} operation")
        for key, default in spec.items():
            sp.add_argument(f"--{key}", type=str, default=default)
        sp.add_argument("--config", type=str, default=None,
                        help="JSON RunConfig; its values override flags")
        sp.add_argument("--seed", type=str, default="0")
        sp.add_argument("--out", type=str, default=".",
                        help="directory for CSV/JSON artifacts")
    return parser


def _collect_config(args) -> RunConfig:
    spec = _SPECS[args.command]
    params = {}
    for key in spec:
        val = getattr(args, key.replace("-", "_"))
        if val is not None:
            params[key] = val
    cfg = RunConfig(command=args.command, params=params,
                    seed=_as_int(args.seed, "seed", lo=None),
                    output_path=args.out)
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except json.JSONDecodeError as exc:
            raise CliError(f"config is not valid JSON: {exc}") from exc
        if raw.get("command", args.command) != args.command:
            raise CliError(f"config command {raw.get('command')!r} does not match "
                           f"subcommand {args.command!r}")
        extra = set(raw.get("params", {})) - set(spec)
        if extra:
            raise CliError(f"config params not accepted by {args.command}: {sorted(extra)}")
        for k, v in raw.get("params", {}).items():
            cfg.params[k] = v if isinstance(v, str) else str(v)
        if "seed" in raw:
            cfg.seed = int(raw["seed"])
        if "output_path" in raw:
            cfg.output_path = str(raw["output_path"])
    missing = [k for k, d in spec.items() if d is None and k not in cfg.params]
    if missing:
        raise CliError(f"{args.command} requires --{missing[0]}")
    return cfg


# ---------------------------------------------------------------------------
# decimal-string parsing with range checks


def _as_float(text, name, lo=None, hi=None, lo_open=True, hi_open=True) -> float:
    try:
        v = float(str(text))
    except ValueError as exc:
        raise CliError(f"{name} is not a number: {text!r}") from exc
    if not np.isfinite(v):
        raise CliError(f"{name} must be finite, got {text!r}")
    if lo is not None and (v <= lo if lo_open else v < lo):
        raise CliError(f"{name}={text} out of range (must be {'>' if lo_open else '>='} {lo})")
    if hi is not None and (v >= hi if hi_open else v > hi):
        raise CliError(f"{name}={text} out of range (must be {'<' if hi_open else '<='} {hi})")
    return v


def _as_int(text, name, lo=1) -> int:
    try:
        v = int(str(text), 10)
    except ValueError as exc:
        raise CliError(f"{name} is not an integer: {text!r}") from exc
    if lo is not None and v < lo:
        raise CliError(f"{name}={text} out of range (must be >= {lo})")
    return v


def _as_float_list(text, name, **kw):
    items = [t for t in str(text).split(",") if t.strip()]
    if not items:
        raise CliError(f"{name} must be a comma-separated list of numbers")
    return [_as_float(t, name, **kw) for t in items]


def _as_direction(text, name="e") -> np.ndarray:
    vals = _as_float_list(text, name)
    if len(vals) != 2:
        raise CliError(f"{name} must have two components, got {text!r}")
    v = np.asarray(vals, dtype=float)
    if not np.linalg.norm(v) > 0.0:
        raise CliError(f"{name} must be a nonzero direction")
    return v


def _as_s(text) -> float:
    return _as_float(text, "s", lo=0.0, hi=1.0)


def _parse_domain(text: str):
    parts = str(text).split(":")
    kind = parts[0]
    if kind == "ball":
        r = _as_float(parts[1], "ball radius", lo=0.0) if len(parts) > 1 else 1.0
        return ball(np.zeros(2), r)
    if kind == "ellipsoid":
        if len(parts) != 2:
            raise CliError("ellipsoid domain is spelled ellipsoid:EPS")
        eps = _as_float(parts[1], "ellipsoid stretch", lo=0.0, hi=0.25)
        return ellipsoid(FracParams(2, 0.5), eps)
    if kind == "bump":
        if len(parts) not in (2, 3):
            raise CliError("bump domain is spelled bump:EPS or bump:EPS:ALPHA")
        eps = _as_float(parts[1], "bump height", lo=0.0, hi=0.05, hi_open=False)
        alpha = _as_float(parts[2], "bump aspect", lo=1.0) if len(parts) > 2 else 2.0
        return bump_domain(eps, alpha)
    raise CliError(f"unknown domain {text!r} (ball[:R], ellipsoid:EPS, bump:EPS[:ALPHA])")


# ---------------------------------------------------------------------------
# subcommand bodies; each returns a JSON-ready results dict and may write
# artifacts through _emit


def _emit(cfg: RunConfig, results: dict, rows=None, fieldnames=None):
    summary = {"command": cfg.command, "params": cfg.params, "seed": cfg.seed,
               "results": results}
    if rows is not None:
        stem = f"{cfg.command}-{config_hash({'command': cfg.command, 'params': cfg.params, 'seed': cfg.seed})}"
        out = Path(cfg.output_path)
        out.mkdir(parents=True, exist_ok=True)
        csv_path, json_path = out / f"{stem}.csv", out / f"{stem}.json"
        write_table(csv_path, rows, fieldnames)
        summary["artifacts"] = [str(csv_path), str(json_path)]
        json_path.write_text(json.dumps(summary, sort_keys=True, indent=2) + "\n")
    print(json.dumps(summary, sort_keys=True, indent=2))
    return 0


def _fit_record(fit):
    if fit is None:
        return None
    return {"slope": fit.slope, "intercept": fit.intercept, "r2": fit.r2,
            "points": [list(pt) for pt in fit.points]}


def _cmd_constants(cfg):
    n = _as_int(cfg.params["n"], "n", lo=1)
    s = _as_s(cfg.params["s"])
    p = FracParams(n, s)
    return _emit(cfg, {"n": n, "s": s, "gamma_ns": gamma_ns(p), "c_ns": p.c_ns})


def _cmd_torsion_check(cfg):
    s = _as_s(cfg.params["s"])
    k = _as_int(cfg.params["points"], "points")
    min_dist = _as_float(cfg.params["min-dist"], "min-dist", lo=0.0)
    domain_str = str(cfg.params["domain"])
    p = FracParams(2, s)
    dom = _parse_domain(domain_str)
    parts = domain_str.split(":")
    if parts[0] == "ball":
        if len(parts) > 1 and float(parts[1]) != 1.0:
            raise CliError("torsion profile is defined on the unit ball")
        f = torsion_ball(p)
    elif parts[0] == "ellipsoid":
        f = torsion_ellipsoid(p, float(parts[1]))
    else:
        raise CliError("torsion-check supports ball and ellipsoid:EPS domains")
    lo, hi = dom.bbox
    u = halton_points(65536, 2, cfg.seed)
    pts = lo + (hi - lo) * u
    keep = dom.contains(pts)
    pts = pts[keep]
    pts = pts[boundary_distance(dom, pts) >= min_dist][:k]
    if len(pts) < k:
        raise CliError(f"could not place {k} interior points at distance {min_dist}")
    rows, worst = [], 0.0
    for x in pts:
        r = frlap_eval(f, x)
        worst = max(worst, abs(r.value - 1.0))
        rows.append({"x1": float(x[0]), "x2": float(x[1]), "value": r.value,
                     "error": r.error, "converged": r.converged})
    return _emit(cfg, {"points": len(rows), "max_abs_dev": worst},
                 rows=rows, fieldnames=("x1", "x2", "value", "error", "converged"))


def _cmd_seminorm_ratio(cfg):
    s = _as_s(cfg.params["s"])
    eps = _as_float(cfg.params["eps"], "eps", lo=0.0, hi=0.25)
    n_pairs = _as_int(cfg.params["n-pairs"], "n-pairs", lo=1000)
    p = FracParams(2, s)
    res = ellipsoid_seminorm(p, eps, budget=OptimBudget(n_pairs=n_pairs, seed=cfg.seed))
    limit = ellipsoid_ratio_limit(p)
    ratio = res.value / eps
    return _emit(cfg, {"seminorm": res.value, "ratio": ratio, "limit": limit,
                       "rel_gap": abs(ratio - limit) / limit,
                       "converged": res.converged})


def _cmd_critical_plane(cfg):
    dom = _parse_domain(cfg.params["domain"])
    e = _as_direction(cfg.params["e"])
    tol = _as_float(cfg.params["tol"], "tol", lo=0.0, hi=0.1)
    res = critical_lambda(dom, e, tol=tol, seed=cfg.seed)
    return _emit(cfg, {"plane": to_record(res)})


def _cmd_slab_measure(cfg):
    dom = _parse_domain(cfg.params["domain"])
    e = _as_direction(cfg.params["e"])
    gamma = _as_float(cfg.params["gamma"], "gamma", lo=0.0, hi=0.25, hi_open=False)
    tol = _as_float(cfg.params["tol"], "tol", lo=0.0, hi=0.1)
    n = _as_int(cfg.params["n"], "n", lo=100)
    res = critical_lambda(dom, e, tol=tol, seed=cfg.seed)
    est = slab_measure(dom, res, gamma, n, seed=cfg.seed)
    return _emit(cfg, {"plane": to_record(res),
                       "slab": {"value": est.value, "error": est.error,
                                "method": est.method, "n_samples": est.n_samples,
                                "flag": est.flag}})


def _cmd_boundary_integral(cfg):
    dom = _parse_domain(cfg.params["domain"])
    s = _as_s(cfg.params["s"])
    n = _as_int(cfg.params["n"], "n", lo=100)
    est = boundary_weighted_integral(dom, s, n, seed=cfg.seed)
    return _emit(cfg, {"value": est.value, "error": est.error,
                       "method": est.method, "flag": est.flag})


def _cmd_counterexample_scan(cfg):
    alpha = _as_float(cfg.params["alpha"], "alpha", lo=1.0)
    gamma = _as_float(cfg.params["gamma"], "gamma", lo=0.0, hi=0.25)
    tol = _as_float(cfg.params["tol"], "tol", lo=0.0, hi=0.1)
    n = _as_int(cfg.params["n"], "n", lo=100)
    eps = _as_float_list(cfg.params["eps"], "eps", lo=0.0, hi=0.05, hi_open=False)
    scan = counterexample_scan(alpha, eps, gamma, tol=tol, n_slab=n, seed=cfg.seed)
    return _emit(cfg, {"lambda_fit": _fit_record(scan.lambda_fit),
                       "slab_fit": _fit_record(scan.slab_fit)},
                 rows=scan.rows, fieldnames=SCAN_FIELDS)


def _cmd_stability_probe(cfg):
    s = _as_s(cfg.params["s"])
    eps = _as_float_list(cfg.params["eps"], "eps", lo=0.0, hi=0.25)
    n_pairs = _as_int(cfg.params["n-pairs"], "n-pairs", lo=1000)
    p = FracParams(2, s)
    probe = stability_probe(p, eps, budget=OptimBudget(n_pairs=n_pairs, seed=cfg.seed),
                            seed=cfg.seed)
    return _emit(cfg, {"fit": _fit_record(probe.fit)},
                 rows=probe.rows, fieldnames=PROBE_FIELDS)


def _cmd_lemma_check(cfg):
    alpha = _as_float(cfg.params["alpha"], "alpha", lo=1.0)
    tol = _as_float(cfg.params["tol"], "tol", lo=0.0, hi=0.1)
    n = _as_int(cfg.params["n"], "n", lo=100)
    eps = _as_float_list(cfg.params["eps"], "eps", lo=0.0, hi=0.05, hi_open=False)
    gammas = _as_float_list(cfg.params["gamma"], "gamma", lo=0.0, hi=0.25, hi_open=False)
    table = geometric_lemma_check(alpha, eps, gammas, tol=tol, n_slab=n, seed=cfg.seed)
    clean = [r for r in table.rows if not r["flag"]]
    results = {"rows": len(table.rows), "flagged": len(table.rows) - len(clean)}
    if clean:
        results["ratio_thm52_band"] = [min(r["ratio_thm52"] for r in clean),
                                       max(r["ratio_thm52"] for r in clean)]
    return _emit(cfg, results, rows=table.rows, fieldnames=LEMMA_FIELDS)


_DISPATCH = {
    "constants": _cmd_constants,
    "torsion-check": _cmd_torsion_check,
    "seminorm-ratio": _cmd_seminorm_ratio,
    "critical-plane": _cmd_critical_plane,
    "slab-measure": _cmd_slab_measure,
    "boundary-integral": _cmd_boundary_integral,
    "counterexample-scan": _cmd_counterexample_scan,
    "stability-probe": _cmd_stability_probe,
    "lemma-check": _cmd_lemma_check,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise CliError(f"missing subcommand (one of {', '.join(_SPECS)})")
        cfg = _collect_config(args)
        return _DISPATCH[cfg.command](cfg)
    except (CliError, ValueError, OSError) as exc:
        payload = {"error": str(exc),
                   "command": getattr(args, "command", None) if "args" in locals() else None}
        print(json.dumps(payload, sort_keys=True), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
