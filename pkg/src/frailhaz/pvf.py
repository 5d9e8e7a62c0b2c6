"""Power variance function (PVF) frailty distributions.

Every distribution here is standardised to E(U) = 1 and described by three
numbers ``(nu, rho, m)`` tied together by ``m * rho / nu == 1``. The Laplace
transform is

    L(c) = exp(-(nu / m) * (1 - (nu / (nu + c)) ** m))

and the gamma distribution is the limit ``m -> 0``, where
``L(c) = (nu / (nu + c)) ** nu``. Gamma has its own code path because the
general expression is 0/0 at ``m = 0``.

All functions accept scalars or numpy arrays for the hazard/transform
argument and return the same shape. ``nu = inf`` is accepted for every family
and means a degenerate frailty (U = 1 almost surely).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

GAMMA = "gamma"
INVERSE_GAUSSIAN = "inverse-gaussian"
HOUGAARD = "hougaard"
COMPOUND_POISSON = "compound-poisson"

FAMILY_KINDS = (GAMMA, INVERSE_GAUSSIAN, HOUGAARD, COMPOUND_POISSON)


@dataclass(frozen=True)
class PvfFamily:
    """A PVF family reduced to the single free parameter ``nu``.

    Hougaard families fix the shape ``m`` in (-1, 0). Compound Poisson
    families fix the non-susceptible fraction ``q`` in (0, 1), which pins
    ``rho = -log(q)`` and leaves ``m = nu / rho`` free.
    """

    kind: str
    m: float | None = None
    q: float | None = None

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise DomainError(f"unknown PVF family {self.kind!r}")
        if self.kind == HOUGAARD:
            if self.m is None or not -1.0 < self.m < 0.0:
                raise DomainError(f"Hougaard shape m must lie in (-1, 0), got {self.m}")
        elif self.kind == INVERSE_GAUSSIAN:
            object.__setattr__(self, "m", -0.5)
        elif self.m is not None:
            raise DomainError(f"shape m is only set by the user for Hougaard, not {self.kind}")
        if self.kind == COMPOUND_POISSON:
            if self.q is None or not 0.0 < self.q < 1.0:
                raise DomainError(
                    f"non-susceptible fraction must lie in (0, 1), got {self.q}")
        elif self.q is not None:
            raise DomainError(f"non-susceptible fraction only applies to compound Poisson")

    @classmethod
    def gamma(cls):
        return cls(GAMMA)

    @classmethod
    def inverse_gaussian(cls):
        return cls(INVERSE_GAUSSIAN)

    @classmethod
    def hougaard(cls, m):
        return cls(HOUGAARD, m=float(m))

    @classmethod
    def compound_poisson(cls, q):
        return cls(COMPOUND_POISSON, q=float(q))

    @property
    def label(self):
        if self.kind == HOUGAARD:
            return f"hougaard(m={self.m:g})"
        if self.kind == COMPOUND_POISSON:
            return f"compound-poisson(q={self.q:g})"
        return self.kind

    @property
    def floor(self):
        """Lowest attainable population survival (the non-susceptible mass)."""
        return self.q if self.kind == COMPOUND_POISSON else 0.0

    def params(self, nu):
        """Complete parameter set for a given ``nu``."""
        nu = float(nu)
        if not nu > 0.0:
            raise DomainError(f"nu must be positive, got {nu}")
        if self.kind == GAMMA:
            return PvfParams(self, nu, math.inf, 0.0)
        if self.kind == COMPOUND_POISSON:
            rho = -math.log(self.q)
            return PvfParams(self, nu, rho, nu / rho)
        return PvfParams(self, nu, nu / self.m, self.m)

    def nu_for_variance(self, var):
        """The ``nu`` giving Var(U) == var."""
        if not var > 0.0:
            raise DomainError(f"variance must be positive, got {var}")
        if self.kind == GAMMA:
            return 1.0 / var
        if self.kind == COMPOUND_POISSON:
            # Var = 1/rho + 1/nu, so Var(U) cannot go below 1/rho.
            rho = -math.log(self.q)
            if var <= 1.0 / rho:
                raise DomainError(
                    f"compound Poisson with q={self.q} needs Var(U) > {1.0 / rho:.6g}")
            return 1.0 / (var - 1.0 / rho)
        return (self.m + 1.0) / var

    def with_variance(self, var):
        return self.params(self.nu_for_variance(var))


@dataclass(frozen=True)
class PvfParams:
    family: PvfFamily
    nu: float
    rho: float
    m: float

    def __post_init__(self):
        if not self.nu > 0.0:
            raise DomainError(f"nu must be positive, got {self.nu}")
        if self.m <= -1.0:
            raise DomainError(f"m must exceed -1, got {self.m}")
        if self.family.kind != GAMMA and math.isfinite(self.nu):
            if not self.m * self.rho > 0.0:
                raise DomainError("m and rho must share a sign")
            if abs(self.m * self.rho / self.nu - 1.0) > 1e-12:
                raise DomainError("E(U) = 1 requires m * rho / nu == 1")

    @property
    def degenerate(self):
        return math.isinf(self.nu)


def _nonneg(x, name):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0) or np.any(np.isnan(x)):
        raise DomainError(f"{name} must be nonnegative")
    return x


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def log_laplace(params, c):
    """Natural log of the Laplace transform E[exp(-c U)]."""
    c = _nonneg(c, "Laplace argument")
    nu = params.nu
    if math.isinf(nu):
        return _out(-c)
    with np.errstate(over="ignore"):
        if params.family.kind == GAMMA:
            out = -nu * np.log1p(c / nu)
        else:
            # (nu/m) * ((nu/(nu+c))**m - 1), written to survive small m
            out = (nu / params.m) * np.expm1(-params.m * np.log1p(c / nu))
    return _out(out)


def laplace(params, c):
    """Laplace transform E[exp(-c U)] of the frailty."""
    return _out(np.exp(log_laplace(params, c)))


def survival(params, h0):
    """Population survival S = L(H0) at cumulative baseline hazard ``h0``."""
    return laplace(params, h0)


def invert_survival(params, s):
    """Cumulative baseline hazard H0 at which the population survival is ``s``.

    Raises ``DomainError`` for ``s`` outside (floor, 1], where the floor is the
    non-susceptible fraction for compound Poisson and 0 otherwise.
    """
    s = np.asarray(s, dtype=float)
    floor = params.family.floor
    if np.any(~(s > floor)) or np.any(s > 1.0):
        if floor > 0.0:
            raise DomainError(
                f"survival must lie in ({floor:g}, 1]; survival at or below the "
                "non-susceptible fraction is unreachable")
        raise DomainError("survival must lie in (0, 1]")
    log_s = np.log(s)
    nu = params.nu
    if math.isinf(nu):
        return _out(-log_s)
    with np.errstate(over="ignore"):
        if params.family.kind == GAMMA:
            h = nu * np.expm1(-log_s / nu)
        else:
            z = np.log1p(log_s / params.rho)
            h = nu * np.expm1(-z / params.m)
    return _out(h)


def hazard_at_survival(family, nu, s):
    """:func:`invert_survival` vectorised over ``nu`` within one family.

    No domain checks; invalid combinations give NaN or inf.
    """
    nu = np.asarray(nu, dtype=float)
    log_s = np.log(np.asarray(s, dtype=float))
    with np.errstate(all="ignore"):
        if family.kind == GAMMA:
            return _out(nu * np.expm1(-log_s / nu))
        if family.kind == COMPOUND_POISSON:
            rho = -math.log(family.q)
            m = nu / rho
        else:
            m = family.m
            rho = nu / m
        return _out(nu * np.expm1(-np.log1p(log_s / rho) / m))


def log_trr(params, h0):
    h0 = _nonneg(h0, "cumulative hazard")
    return _out(log_laplace(params, 2.0 * h0) - 2.0 * np.asarray(log_laplace(params, h0)))


def trr(params, h0):
    """Twin recurrence risk L(2 H0) / L(H0)**2."""
    return _out(np.exp(log_trr(params, h0)))


def variance(params):
    if params.degenerate:
        return 0.0
    return (params.m + 1.0) / params.nu


def asymptotic_survival(params):
    """Limit of the population survival as H0 grows without bound."""
    if params.family.kind == COMPOUND_POISSON and not params.degenerate:
        return math.exp(-params.rho)
    return 0.0
