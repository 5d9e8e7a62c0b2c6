"""Confidence intervals for the frailty-adjusted hazard ratio.

Two routes are offered. ``plugin_ci`` treats TRR(t1) and S(t1) as known and
maps the bounds of the marginal hazard ratio through the (monotone)
adjustment. ``numeric_ci`` propagates the sampling error of all three summary
inputs by simulation: log r_mar and log TRR are drawn from normals on the log
scale, S from a normal on its natural scale, and each draw is pushed through
the full solve-then-adjust pipeline. The interval is read off the empirical
quantiles of the successful draws.
"""
from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.stats import norm

from .adjust import causal_from_marginal, causal_from_marginal_many
from .errors import DomainError, TooManyFailuresError
from .pvf import PvfFamily, hazard_at_survival, invert_survival
from .solver import FrailtySummary, solve_nu, solve_nu_many

LOG = "log"
IDENTITY = "identity"

Z975 = norm.ppf(0.975)
S_CLAMP = 1e-6
BLOCK = 1024
MAX_FAILED_FRACTION = 0.2

FAIL_OUT_OF_RANGE = "out-of-range"


@dataclass(frozen=True)
class SummaryEstimate:
    """Point estimate with a 95% confidence interval.

    ``scale`` says where the estimate is approximately normal: ``"log"`` for
    ratios (hazard ratios, recurrence risks), ``"identity"`` for proportions.
    A collapsed interval (``lo == value == hi``) means "treat as known".
    """

    value: float
    lo: float
    hi: float
    scale: str = LOG

    def __post_init__(self):
        if self.scale not in (LOG, IDENTITY):
            raise DomainError(f"unknown scale {self.scale!r}")
        if not self.lo <= self.value <= self.hi:
            raise DomainError(
                f"need lo <= value <= hi, got {self.lo}, {self.value}, {self.hi}")
        if self.scale == LOG and not self.lo > 0.0:
            raise DomainError("log-scale estimates must be positive")

    @classmethod
    def exact(cls, value, scale=LOG):
        return cls(value, value, value, scale)

    @property
    def sd(self):
        """Standard deviation on ``scale``, from the lower half-width."""
        if self.scale == LOG:
            return (math.log(self.value) - math.log(self.lo)) / Z975
        return (self.value - self.lo) / Z975


@dataclass(frozen=True)
class CiConfig:
    n_draws: int = 10_000
    alpha: float = 0.05
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.n_draws < 100:
            raise DomainError(f"n_draws must be at least 100, got {self.n_draws}")
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")


class Interval(NamedTuple):
    point: float
    lo: float
    hi: float


class NumericCi(NamedTuple):
    point: float
    lo: float
    hi: float
    n_failed: int


def point_estimate(family, r_mar, trr, s):
    params = solve_nu(family, FrailtySummary(trr, s))
    return causal_from_marginal(params, invert_survival(params, s), r_mar)


def plugin_ci(family: PvfFamily, r_mar: SummaryEstimate, trr_value, s_value):
    """Interval from the marginal-HR bounds alone, TRR and S taken as exact."""
    params = solve_nu(family, FrailtySummary(trr_value, s_value))
    h0 = invert_survival(params, s_value)
    point, a, b = (causal_from_marginal(params, h0, v)
                   for v in (r_mar.value, r_mar.lo, r_mar.hi))
    return Interval(point, min(a, b), max(a, b))


def _block_normals(seed, block):
    # every draw's normals depend only on (seed, draw index)
    ss = np.random.SeedSequence(seed, spawn_key=(block,))
    return np.random.Generator(np.random.Philox(ss)).standard_normal((BLOCK, 3))


def draw_inputs(r_mar, trr, s, seed, n_draws, workers=1):
    """Simulated (r_mar, TRR, S) triples, shape ``(n_draws, 3)``."""
    n_blocks = -(-n_draws // BLOCK)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            blocks = list(pool.map(lambda k: _block_normals(seed, k), range(n_blocks)))
    else:
        blocks = [_block_normals(seed, k) for k in range(n_blocks)]
    z = np.concatenate(blocks)[:n_draws]
    out = np.empty_like(z)
    out[:, 0] = np.exp(math.log(r_mar.value) + r_mar.sd * z[:, 0])
    out[:, 1] = np.exp(math.log(trr.value) + trr.sd * z[:, 1])
    out[:, 2] = np.clip(s.value + s.sd * z[:, 2], S_CLAMP, 1.0 - S_CLAMP)
    return out


def adjust_draws(family, draws):
    """Push each simulated triple through solve-then-adjust.

    Returns the causal hazard ratios (NaN on failure) and the failure kinds.
    """
    r_mar, trr, s = draws.T
    nu, failure = solve_nu_many(family, trr, s)
    ok = failure == None  # noqa: E711
    r = np.full(len(draws), np.nan)
    if ok.any():
        h0 = hazard_at_survival(family, nu[ok], s[ok])
        r[ok] = causal_from_marginal_many(family, nu[ok], h0, r_mar[ok])
    unattainable = ok & np.isnan(r)
    failure[unattainable] = FAIL_OUT_OF_RANGE
    return r, failure


def numeric_ci(family: PvfFamily, r_mar: SummaryEstimate, trr: SummaryEstimate,
               s: SummaryEstimate, cfg: CiConfig = CiConfig()) -> NumericCi:
    """Simulation interval accounting for uncertainty in r_mar, TRR and S.

    Draws that the solver or the adjustment reject are dropped and counted in
    ``n_failed``; more than 20% rejected raises ``TooManyFailuresError``.
    """
    if s.scale != IDENTITY:
        raise DomainError("S(t1) must be given on the identity scale")
    point = point_estimate(family, r_mar.value, trr.value, s.value)
    draws = draw_inputs(r_mar, trr, s, cfg.seed, cfg.n_draws, cfg.workers)
    r, failure = adjust_draws(family, draws)
    kinds = Counter(k for k in failure if k is not None)
    n_failed = sum(kinds.values())
    if n_failed > MAX_FAILED_FRACTION * cfg.n_draws:
        dominant = kinds.most_common(1)[0][0]
        raise TooManyFailuresError(
            f"{n_failed} of {cfg.n_draws} draws failed (mostly {dominant}); "
            "the interval would be unreliable", n_failed, dominant)
    lo, hi = np.quantile(r[~np.isnan(r)], [cfg.alpha / 2.0, 1.0 - cfg.alpha / 2.0])
    return NumericCi(point, float(lo), float(hi), n_failed)
