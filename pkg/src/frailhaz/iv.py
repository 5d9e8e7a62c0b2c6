"""Mendelian-randomisation estimate of a per-unit exposure effect.

A genetic instrument G shifts the exposure by ``b_g`` per unit of G. If the
frailty-adjusted hazard ratio between instrument levels ``g1`` and ``g2`` is
HR_G, the log hazard ratio per unit of exposure is

    beta_a = log(HR_G) / (b_g * (g1 - g2))

Intervals are mapped through the same (monotone) formula; uncertainty in
``b_g`` is not propagated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInstrumentError, DomainError, SingularDesignError
from .uncertainty import SummaryEstimate


@dataclass(frozen=True)
class IvInput:
    adjusted_hr: SummaryEstimate
    b_g: float
    g1: float = 1.0
    g2: float = 0.0

    def __post_init__(self):
        if self.g1 == self.g2:
            raise DomainError("instrument levels g1 and g2 must differ")
        if self.b_g == 0.0:
            raise DegenerateInstrumentError("instrument has no effect on the exposure")


@dataclass(frozen=True)
class IvEstimate:
    beta_a: float
    beta_lo: float
    beta_hi: float

    @property
    def hr_per_unit(self):
        return math.exp(self.beta_a)

    @property
    def lo(self):
        return math.exp(self.beta_lo)

    @property
    def hi(self):
        return math.exp(self.beta_hi)


def iv_estimate(inp: IvInput) -> IvEstimate:
    denom = inp.b_g * (inp.g1 - inp.g2)
    if abs(denom) < 1e-12:
        raise DegenerateInstrumentError(
            f"instrument contrast b_g * (g1 - g2) = {denom:g} is too small")
    hr = inp.adjusted_hr
    a = math.log(hr.lo) / denom
    b = math.log(hr.hi) / denom
    return IvEstimate(math.log(hr.value) / denom, min(a, b), max(a, b))


def instrument_strength(exposure_by_g):
    """OLS slope of exposure on instrument, with its standard error.

    ``exposure_by_g`` is a sequence of ``(g, a)`` pairs. For a binary
    instrument the slope is the difference in mean exposure.
    """
    data = np.asarray(exposure_by_g, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2 or len(data) < 3:
        raise DomainError("need at least three (g, a) pairs")
    g, a = data[:, 0], data[:, 1]
    gc = g - g.mean()
    sxx = np.dot(gc, gc)
    if sxx == 0.0:
        raise SingularDesignError("instrument takes a single value")
    slope = np.dot(gc, a - a.mean()) / sxx
    resid = a - a.mean() - slope * gc
    s2 = np.dot(resid, resid) / (len(g) - 2)
    return float(slope), float(math.sqrt(s2 / sxx))
