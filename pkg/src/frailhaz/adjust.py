"""Conversion between marginal and frailty-conditional hazard ratios.

Among survivors at a time with cumulative baseline hazard H0, a constant
frailty-conditional hazard ratio ``r`` shows up as the marginal ratio

    r_mar = r * ((1 + H0/nu) / (1 + r H0/nu)) ** (m + 1)

The inverse map is closed form for gamma (m = 0) and inverse Gaussian
(m = -1/2) and is found numerically otherwise.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, FrailtyError, OutOfRangeError, UnsupportedFamilyError
from .pvf import COMPOUND_POISSON, GAMMA, INVERSE_GAUSSIAN, PvfFamily, invert_survival
from .roots import find_roots
from .solver import FrailtySummary, solve_nu

log = logging.getLogger(__name__)

R_MIN = 1e-6
R_MAX = 1e6


def _positive(x, name):
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0.0)):
        raise DomainError(f"{name} must be positive")
    return x


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def marginal_from_causal(params, h0, r):
    """Marginal hazard ratio among survivors implied by the causal ratio ``r``."""
    r = _positive(r, "hazard ratio")
    h0 = np.asarray(h0, dtype=float)
    if np.any(h0 < 0.0):
        raise DomainError("cumulative hazard must be nonnegative")
    if params.degenerate:
        return _out(r * np.ones_like(h0))
    x = h0 / params.nu
    return _out(r * np.exp((params.m + 1.0) * (np.log1p(x) - np.log1p(r * x))))


def _log_marginal_residual(m, x, log_r_mar):
    # log of the marginal ratio at causal ratio exp(u), minus the target
    def f(u):
        return u + (m + 1.0) * (np.log1p(x) - np.log1p(np.exp(u) * x)) - log_r_mar
    return f


def _causal_general(params, h0, r_mar):
    x = h0 / params.nu
    m = params.m
    hi = math.log(R_MAX)
    if m > 0.0 and x > 0.0:
        # r_mar(r) peaks at r = 1 / (m x) and then falls towards r**-m; the
        # branch through r = r_mar at H0 = 0 is the increasing one.
        hi = min(hi, -math.log(m * x))
    f = _log_marginal_residual(m, x, math.log(r_mar))
    root, f_lo, f_hi = find_roots(f, math.log(R_MIN), hi, ftol=1e-14, xtol=1e-14)
    if np.isnan(root[0]):
        raise OutOfRangeError(
            f"marginal HR {r_mar:g} is not attainable for {params.family.label} "
            f"with nu={params.nu:.6g}, H0={h0:.6g}")
    return math.exp(root[0])


def causal_from_marginal(params, h0, r_mar):
    """Frailty-conditional hazard ratio reproducing the marginal ratio ``r_mar``.

    Raises ``OutOfRangeError`` if ``r_mar`` cannot arise from any causal ratio
    under ``params`` at ``h0``: the summary inputs are then inconsistent with
    the model.
    """
    r_mar = float(r_mar)
    h0 = float(h0)
    if not r_mar > 0.0:
        raise DomainError(f"marginal hazard ratio must be positive, got {r_mar}")
    if h0 < 0.0:
        raise DomainError(f"cumulative hazard must be nonnegative, got {h0}")
    if params.degenerate or h0 == 0.0 or r_mar == 1.0:
        return r_mar
    x = h0 / params.nu
    kind = params.family.kind
    if kind == GAMMA:
        denom = 1.0 + x * (1.0 - r_mar)
        if denom <= 0.0:
            raise OutOfRangeError(
                f"marginal HR {r_mar:g} is not attainable under gamma frailty with "
                f"nu={params.nu:.6g}, H0={h0:.6g} (upper limit {(1.0 + x) / x:.6g})")
        return r_mar / denom
    if kind == INVERSE_GAUSSIAN:
        # r^2 (1 + x) - r r_mar^2 x - r_mar^2 = 0; the roots have a negative
        # product, so exactly one is positive.
        a = 1.0 + x
        b = r_mar * r_mar * x
        return (b + math.sqrt(b * b + 4.0 * a * r_mar * r_mar)) / (2.0 * a)
    return _causal_general(params, h0, r_mar)


def causal_from_marginal_many(family, nu, h0, r_mar):
    """Elementwise :func:`causal_from_marginal` over arrays of ``nu``, ``h0``
    and ``r_mar`` within one family; NaN marks unattainable inputs."""
    nu, h0, r_mar = np.broadcast_arrays(np.asarray(nu, dtype=float),
                                        np.asarray(h0, dtype=float),
                                        np.asarray(r_mar, dtype=float))
    with np.errstate(all="ignore"):
        x = h0 / nu
        if family.kind == GAMMA:
            denom = 1.0 + x * (1.0 - r_mar)
            out = np.where(denom > 0.0, r_mar / denom, np.nan)
        elif family.kind == INVERSE_GAUSSIAN:
            a = 1.0 + x
            b = r_mar * r_mar * x
            out = (b + np.sqrt(b * b + 4.0 * a * r_mar * r_mar)) / (2.0 * a)
        else:
            out = _causal_general_many(family, nu, x, r_mar)
    # the null maps to itself exactly, whatever the rounding above
    out[np.isfinite(x) & (r_mar == 1.0)] = 1.0
    return out


def _causal_general_many(family, nu, x, r_mar):
    if family.kind == COMPOUND_POISSON:
        m = nu / -math.log(family.q)
        hi = np.minimum(math.log(R_MAX), -np.log(m * x))
    else:
        m = np.full(nu.shape, family.m)
        hi = np.full(nu.shape, math.log(R_MAX))
    ok = np.isfinite(x) & (x > 0.0) & (r_mar > 0.0)
    x_safe = np.where(ok, x, 1.0)
    f = _log_marginal_residual(m, x_safe, np.log(np.where(ok, r_mar, 1.0)))
    root, _, _ = find_roots(f, np.full(nu.shape, math.log(R_MIN)), hi,
                            ftol=1e-14, xtol=1e-14)
    return np.where(ok, np.exp(root), np.nan)


def causal_from_marginal_at_median(params, r_mar, s_median=0.5):
    """Gamma-frailty adjustment evaluated at the median event time.

    Follow-up from the time origin can be summarised by the hazard at which
    half of the population has had the event; ``s_median`` overrides the 0.5.
    """
    if params.family.kind != GAMMA:
        raise UnsupportedFamilyError(
            "the median-time heuristic is only established for gamma frailty")
    return causal_from_marginal(params, invert_survival(params, s_median), r_mar)


def asymptotic_marginal(params, r):
    """Limit of the marginal hazard ratio as follow-up time grows: ``r**-m``."""
    r = float(_positive(r, "hazard ratio"))
    if params.degenerate:
        return r
    if params.family.kind == GAMMA:
        return 1.0
    return r ** (-params.m)


@dataclass(frozen=True)
class CurvePoint:
    x: float
    y: float | None
    warning: str | None = None


def hazard_ratio_curve(family: PvfFamily, variance, r, grid):
    """Marginal hazard ratio as a function of the surviving population fraction.

    Each grid value ``s`` in (0, 1] is a population survival; the frailty has
    Var(U) = ``variance``. Points at or below the compound Poisson floor get
    ``y=None`` and a warning instead of a value.
    """
    params = family.with_variance(variance)
    out = []
    for s in grid:
        s = float(s)
        if not 0.0 < s <= 1.0:
            raise DomainError(f"survival fraction must lie in (0, 1], got {s}")
        if s <= family.floor:
            msg = f"s={s:g} is not above the non-susceptible fraction {family.floor:g}"
            log.info(msg)
            out.append(CurvePoint(s, None, msg))
            continue
        h0 = invert_survival(params, s)
        out.append(CurvePoint(s, marginal_from_causal(params, h0, r)))
    return out


def trr_sensitivity_curve(family: PvfFamily, s_t1, r_mar, trr_grid):
    """Causal hazard ratio as a function of TRR(t1) at fixed S(t1) and r_mar.

    Failing grid points are recorded with ``y=None`` and the error message.
    """
    out = []
    for t in trr_grid:
        t = float(t)
        try:
            params = solve_nu(family, FrailtySummary(t, s_t1), diagnose=False)
            h0 = invert_survival(params, s_t1)
            out.append(CurvePoint(t, causal_from_marginal(params, h0, r_mar)))
        except FrailtyError as exc:
            log.info("TRR=%g: %s", t, exc)
            out.append(CurvePoint(t, None, f"{type(exc).__name__}: {exc}"))
    return out
