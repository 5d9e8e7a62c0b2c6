"""Recover the frailty parameter ``nu`` from twin and population summaries.

Given the twin recurrence risk TRR(t1) and the population survival S(t1),
the cumulative baseline hazard is eliminated through S and the remaining
one-parameter equation is solved for ``nu`` on a log scale over
``[1e-8, 1e8]``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, DomainError, NoRootError
from .pvf import COMPOUND_POISSON, GAMMA, PvfFamily, PvfParams
from .roots import find_roots

NU_MIN = 1e-8
NU_MAX = 1e8
DEGENERATE_TRR = 1.0 + 1e-12

# failure kinds reported by solve_nu_many
FAIL_DEGENERATE = "degenerate"
FAIL_SUMMARY = "invalid-summary"
FAIL_NO_ROOT = "no-root"


class MultipleRootWarning(UserWarning):
    """The residual is not monotone in nu; the root may not be unique."""


@dataclass(frozen=True)
class FrailtySummary:
    """Twin recurrence risk and population survival at the entry time t1.

    ``t1`` is a label only; all computations go through ``s_t1``.
    """

    trr_t1: float
    s_t1: float
    t1: float | None = None

    def __post_init__(self):
        if not 0.0 < self.s_t1 < 1.0:
            raise DomainError(f"S(t1) must lie in (0, 1), got {self.s_t1}")
        if not self.trr_t1 > 0.0:
            raise DomainError(f"TRR(t1) must be positive, got {self.trr_t1}")
        if self.trr_t1 > 1.0 / self.s_t1:
            raise DomainError(
                f"TRR(t1)={self.trr_t1} exceeds 1/S(t1)={1.0 / self.s_t1:.6g}; "
                "the conditional survival would exceed one")


def _gamma_residual(nu, s, trr):
    # S^2 TRR - (1 / (1 + 2 (1 - S^(1/nu)) / S^(1/nu)))^nu, using
    # 1 + 2 (1 - e^-x) / e^-x = e^x (1 - expm1(-x)) with x = -log(S) / nu
    x = -np.log(s) / nu
    return s * s * trr - s * np.exp(-nu * np.log1p(-np.expm1(-x)))


def _general_log_trr(family, nu, s):
    """log TRR implied by (family, nu) at population survival ``s``.

    Algebraically rho * (1 - 2 w^m + (w / (2 - w))^m) with w = nu / (nu + H0)
    and H0 the hazard at which survival equals ``s``. Here w^m = 1 + log(s)/rho
    so H0 never has to be formed, which keeps small-m compound Poisson and
    huge-nu candidates finite.
    """
    log_s = np.log(s)
    if family.kind == COMPOUND_POISSON:
        rho = -math.log(family.q)
        m = nu / rho
    else:
        m = family.m
        rho = nu / m
    z = np.log1p(log_s / rho)
    one_minus_w = -np.expm1(z / m)
    return -log_s + rho * np.exp(z) * np.expm1(-m * np.log1p(one_minus_w))


def _residual(family, s, trr):
    if family.kind == GAMMA:
        return lambda log_nu: _gamma_residual(np.exp(log_nu), s, trr)
    log_target = np.log(trr)
    return lambda log_nu: log_target - _general_log_trr(family, np.exp(log_nu), s)


def _check_monotone(family, s, trr, n=50):
    grid = np.linspace(math.log(NU_MIN), math.log(NU_MAX), n)
    r = _residual(family, np.full(n, s), np.full(n, trr))(grid)
    d = np.diff(r)
    tol = 1e-12 * max(1.0, float(np.nanmax(np.abs(r))))
    if np.any(d > tol) and np.any(d < -tol):
        warnings.warn(
            f"{family.label}: TRR residual is not monotone in nu for "
            f"TRR={trr:g}, S={s:g}; the root may not be unique",
            MultipleRootWarning, stacklevel=3)


def solve_nu(family: PvfFamily, summary: FrailtySummary, *, diagnose=True) -> PvfParams:
    """Find the frailty parameters reproducing ``summary`` within ``family``.

    Raises
    ------
    DegenerateError
        TRR is (numerically) one, i.e. Var(U) = 0.
    DomainError
        S(t1) is at or below the compound Poisson non-susceptible fraction.
    NoRootError
        No ``nu`` in [1e-8, 1e8] matches the TRR.
    """
    s, trr = summary.s_t1, summary.trr_t1
    if trr <= DEGENERATE_TRR:
        raise DegenerateError(f"TRR(t1)={trr} implies no frailty variance")
    if s <= family.floor:
        raise DomainError(
            f"S(t1)={s} is not above the non-susceptible fraction {family.floor}")
    f = _residual(family, np.array([s]), np.array([trr]))
    x, f_lo, f_hi = find_roots(f, math.log(NU_MIN), math.log(NU_MAX))
    if np.isnan(x[0]):
        raise NoRootError(
            f"{family.label}: no nu in [{NU_MIN:g}, {NU_MAX:g}] reproduces "
            f"TRR={trr:g} at S={s:g} (residual {f_lo[0]:.4g} at nu={NU_MIN:g}, "
            f"{f_hi[0]:.4g} at nu={NU_MAX:g})",
            f_lo=float(f_lo[0]), f_hi=float(f_hi[0]))
    if diagnose:
        _check_monotone(family, s, trr)
    return family.params(math.exp(x[0]))


def solve_nu_many(family: PvfFamily, trr, s):
    """Vectorised :func:`solve_nu` that never raises.

    Returns ``(nu, failure)`` where ``nu`` is NaN wherever ``failure`` holds
    one of the ``FAIL_*`` kinds (``None`` on success).
    """
    trr, s = np.broadcast_arrays(np.asarray(trr, dtype=float), np.asarray(s, dtype=float))
    failure = np.full(trr.shape, None, dtype=object)
    bad_summary = ~((s > family.floor) & (s < 1.0)) | ~(trr * s <= 1.0)
    degenerate = ~bad_summary & ~(trr > DEGENERATE_TRR)
    failure[bad_summary] = FAIL_SUMMARY
    failure[degenerate] = FAIL_DEGENERATE
    ok = failure == None  # noqa: E711 - elementwise on an object array
    # park invalid entries on a harmless problem; their results are discarded
    s_safe = np.where(ok, s, 0.5)
    trr_safe = np.where(ok, trr, 1.1)
    with np.errstate(all="ignore"):
        x, _, _ = find_roots(_residual(family, s_safe, trr_safe),
                             np.full(s.shape, math.log(NU_MIN)),
                             np.full(s.shape, math.log(NU_MAX)))
    nu = np.exp(x)
    no_root = ok & np.isnan(nu)
    failure[no_root] = FAIL_NO_ROOT
    nu[~ok] = np.nan
    return nu, failure
