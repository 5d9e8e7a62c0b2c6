"""Command-line interface.

Every command writes one JSON record per invocation to stdout (``curve``
writes CSV instead) and a short human-readable summary to stderr.

Exit codes: 0 success, 2 invalid input or model-domain error, 3 numerical
failure (no root, no convergence, too many failed draws).
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import warnings

import numpy as np

from . import adjust, iv, pvf, solver, uncertainty
from .errors import ConfigError, DomainError, FrailtyError, NumericalError
from .sim import study

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_NUMERICAL = 3

FAMILY_CHOICES = pvf.FAMILY_KINDS


class UsageError(DomainError):
    pass


def _fmt(x):
    return "" if x is None else format(float(x), ".17g")


def _clean(obj):
    """Non-finite floats become null so the record stays strict JSON."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return float(obj) if np.isfinite(obj) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _dump(record):
    return json.dumps(_clean(record), allow_nan=False)


def family_from_args(args):
    kind = args.family
    m = getattr(args, "m", None)
    q = getattr(args, "nonsusceptible", None)
    if kind == pvf.HOUGAARD:
        if m is None:
            raise UsageError("--family hougaard requires --m in (-1, 0)")
        if q is not None:
            raise UsageError("--nonsusceptible only applies to --family compound-poisson")
        return pvf.PvfFamily.hougaard(m)
    if kind == pvf.COMPOUND_POISSON:
        if q is None:
            raise UsageError("--family compound-poisson requires --nonsusceptible in (0, 1)")
        if m is not None:
            raise UsageError("--m only applies to --family hougaard")
        return pvf.PvfFamily.compound_poisson(q)
    if m is not None or q is not None:
        raise UsageError(f"--family {kind} takes neither --m nor --nonsusceptible")
    return pvf.PvfFamily(kind)


def _add_family(p):
    p.add_argument("--family", choices=FAMILY_CHOICES, default=pvf.GAMMA)
    p.add_argument("--m", type=float, help="Hougaard shape in (-1, 0)")
    p.add_argument("--nonsusceptible", type=float,
                   help="compound Poisson non-susceptible fraction in (0, 1)")


def _estimate(value, lo, hi, name, scale):
    if (lo is None) != (hi is None):
        raise UsageError(f"give both --{name}-lo and --{name}-hi, or neither")
    if lo is None:
        return uncertainty.SummaryEstimate.exact(value, scale)
    return uncertainty.SummaryEstimate(value, lo, hi, scale)


def _inputs(args):
    skip = {"func", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def cmd_solve_nu(args):
    family = family_from_args(args)
    params = solver.solve_nu(family, solver.FrailtySummary(args.trr, args.s))
    h0 = pvf.invert_survival(params, args.s)
    results = {"family": family.label, "nu": params.nu, "rho": params.rho, "m": params.m,
               "variance": pvf.variance(params), "h0": h0}
    summary = f"{family.label}: nu = {params.nu:.4f}, Var(U) = {pvf.variance(params):.4f}"
    return results, summary, None


def cmd_adjust(args):
    family = family_from_args(args)
    r_mar = _estimate(args.rmar, args.rmar_lo, args.rmar_hi, "rmar", uncertainty.LOG)
    params = solver.solve_nu(family, solver.FrailtySummary(args.trr, args.s))
    h0 = pvf.invert_survival(params, args.s)
    results = {"family": family.label, "nu": params.nu, "variance": pvf.variance(params),
               "h0": h0, "ci": args.ci}
    seed = None
    if args.ci == "plugin":
        point, lo, hi = uncertainty.plugin_ci(family, r_mar, args.trr, args.s)
        results.update(r_causal=point, lo=lo, hi=hi)
    else:
        seed = args.seed
        trr = _estimate(args.trr, args.trr_lo, args.trr_hi, "trr", uncertainty.LOG)
        s = _estimate(args.s, args.s_lo, args.s_hi, "s", uncertainty.IDENTITY)
        cfg = uncertainty.CiConfig(n_draws=args.draws, seed=seed, workers=study.thread_count())
        ci = uncertainty.numeric_ci(family, r_mar, trr, s, cfg)
        results.update(r_causal=ci.point, lo=ci.lo, hi=ci.hi, n_failed=ci.n_failed,
                       draws=args.draws)
    summary = (f"{family.label}: causal HR {results['r_causal']:.2f} "
               f"[{results['lo']:.2f}, {results['hi']:.2f}] ({args.ci} CI)")
    return results, summary, seed


def _grid(args, default_from, default_to):
    if args.grid:
        return [float(v) for v in args.grid.split(",") if v.strip()]
    lo = default_from if args.grid_from is None else args.grid_from
    hi = default_to if args.grid_to is None else args.grid_to
    return list(np.linspace(lo, hi, args.grid_points))


def cmd_curve(args):
    family = family_from_args(args)
    if args.kind == "truncation":
        if args.r is None:
            raise UsageError("--kind truncation requires --r")
        # default grid stops just above the lowest attainable survival
        points = adjust.hazard_ratio_curve(family, args.variance, args.r,
                                           _grid(args, 1.0, family.floor + 0.001))
        header = "s,r_mar"
    else:
        if args.rmar is None or args.s is None:
            raise UsageError("--kind trr requires --rmar and --s")
        points = adjust.trr_sensitivity_curve(family, args.s, args.rmar,
                                              _grid(args, 1.03, 1.4))
        header = "trr,r_causal"
    lines = [header] + [f"{_fmt(p.x)},{_fmt(p.y)}" for p in points]
    warn = [p.warning for p in points if p.warning]
    if all(p.y is None for p in points):
        raise DomainError("no grid point could be evaluated")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if warn:
        sys.stderr.write(_dump({"command": "curve", "warnings": warn}) + "\n")
    return None, f"{len(points)} points, {len(warn)} skipped", None


def _config(args):
    try:
        cfg = study.load_config(args.config)
    except OSError as exc:
        raise ConfigError(f"cannot read config {args.config!r}: {exc.strerror}") from exc
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    return cfg


def cmd_simulate(args):
    cfg = _config(args)
    if args.reps < 1:
        raise UsageError("--reps must be positive")
    config = dataclasses.asdict(cfg)
    if args.reps == 1:
        res = study.run_scenario(cfg)
        results = {
            "config": config,
            "r_mar": res.cox.hr, "r_mar_lo": res.cox.lo, "r_mar_hi": res.cox.hi,
            "n_events": res.cox.n_events,
            "trr": res.trr.value, "trr_lo": res.trr.lo, "trr_hi": res.trr.hi,
            "survival": res.survival.value, "survival_lo": res.survival.lo,
            "survival_hi": res.survival.hi,
            "r_adjusted": res.adjusted.point, "r_adjusted_lo": res.adjusted.lo,
            "r_adjusted_hi": res.adjusted.hi, "n_failed_draws": res.adjusted.n_failed,
        }
        summary = (f"marginal HR {res.cox.hr:.3f} [{res.cox.lo:.3f}, {res.cox.hi:.3f}], "
                   f"adjusted {res.adjusted.point:.3f} "
                   f"[{res.adjusted.lo:.3f}, {res.adjusted.hi:.3f}]")
    else:
        report = study.coverage_study(cfg, args.reps, workers=study.thread_count())
        results = {"config": config, **dataclasses.asdict(report)}
        summary = "\n".join([
            f"Simulations               {report.n_reps} ({report.n_failed} failed)",
            f"r_cau                     {cfg.r_cau:g}",
            f"h0                        {cfg.h0:g}",
            f"nu                        {cfg.nu:.6g}",
            f"t1                        {cfg.t1:g}",
            f"Median r_mar(t1)          {report.median_r_mar:.3f}",
            f"Median r_adjusted(t1)     {report.median_r_adjusted:.3f}",
            f"Coverage 95% CI mar       {report.coverage_marginal:.3f}",
            f"Coverage 95% CI adjusted  {report.coverage_adjusted:.3f}",
        ])
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(_clean(results), fh, indent=2, allow_nan=False)
            fh.write("\n")
    return results, summary, cfg.seed


def cmd_iv(args):
    hr = uncertainty.SummaryEstimate(args.adjusted_hr, args.lo, args.hi, uncertainty.LOG)
    est = iv.iv_estimate(iv.IvInput(hr, args.bg, args.g1, args.g2))
    results = {"beta_a": est.beta_a, "beta_lo": est.beta_lo, "beta_hi": est.beta_hi,
               "hr_per_unit": est.hr_per_unit, "lo": est.lo, "hi": est.hi}
    summary = f"HR per exposure unit {est.hr_per_unit:.2f} [{est.lo:.2f}, {est.hi:.2f}]"
    return results, summary, None


def build_parser():
    parser = argparse.ArgumentParser(
        prog="frailhaz",
        description="Frailty-adjusted (causal) hazard ratios from marginal Cox "
                    "estimates and twin-study summary data.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve-nu", help="frailty parameter from TRR(t1) and S(t1)")
    _add_family(p)
    p.add_argument("--trr", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    p.set_defaults(func=cmd_solve_nu)

    p = sub.add_parser("adjust", help="causal hazard ratio with a confidence interval")
    _add_family(p)
    p.add_argument("--rmar", type=float, required=True)
    p.add_argument("--rmar-lo", type=float)
    p.add_argument("--rmar-hi", type=float)
    p.add_argument("--trr", type=float, required=True)
    p.add_argument("--trr-lo", type=float)
    p.add_argument("--trr-hi", type=float)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--s-lo", type=float)
    p.add_argument("--s-hi", type=float)
    p.add_argument("--ci", choices=("plugin", "numeric"), default="plugin")
    p.add_argument("--draws", type=int, default=uncertainty.CiConfig.n_draws)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_adjust)

    p = sub.add_parser("curve", help="CSV data for hazard-ratio curves")
    _add_family(p)
    p.add_argument("--kind", choices=("truncation", "trr"), required=True)
    p.add_argument("--r", type=float, help="causal HR (truncation curve)")
    p.add_argument("--variance", type=float, default=1.0,
                   help="frailty variance (truncation curve, default 1)")
    p.add_argument("--rmar", type=float, help="marginal HR (trr curve)")
    p.add_argument("--s", type=float, help="survival at t1 (trr curve)")
    p.add_argument("--grid-from", type=float)
    p.add_argument("--grid-to", type=float)
    p.add_argument("--grid-points", type=int, default=101)
    p.add_argument("--grid", help="explicit comma-separated grid; overrides --grid-*")
    p.add_argument("--out")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("simulate", help="scenario run or coverage study")
    p.add_argument("--config", required=True, help="key = value scenario file")
    p.add_argument("--reps", type=int, default=500)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="write the JSON report here as well")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("iv", help="Mendelian-randomisation per-unit estimate")
    p.add_argument("--adjusted-hr", type=float, required=True)
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--bg", type=float, required=True, help="instrument effect on exposure")
    p.add_argument("--g1", type=float, default=1.0)
    p.add_argument("--g2", type=float, default=0.0)
    p.set_defaults(func=cmd_iv)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    record = {"command": args.command, "inputs": _inputs(args)}
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            results, summary, seed = args.func(args)
    except FrailtyError as exc:
        code = EXIT_NUMERICAL if isinstance(exc, NumericalError) else EXIT_DOMAIN
        record["error"] = {"kind": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, ConfigError) and exc.key:
            record["error"]["key"] = exc.key
        sys.stdout.write(_dump(record) + "\n")
        sys.stderr.write(f"error: {exc}\n")
        return code
    if summary:
        sys.stderr.write(summary + "\n")
    if results is None:
        return EXIT_OK
    record["results"] = results
    record["warnings"] = [str(w.message) for w in caught]
    if seed is not None:
        record["seed"] = seed
    sys.stdout.write(_dump(record) + "\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
