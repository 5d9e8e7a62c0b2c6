"""Frailty-adjusted hazard ratios from marginal estimates and twin summaries."""
from .adjust import (asymptotic_marginal, causal_from_marginal, causal_from_marginal_at_median,
                     hazard_ratio_curve, marginal_from_causal, trr_sensitivity_curve)
from .errors import DomainError, FrailtyError, NumericalError
from .iv import IvEstimate, IvInput, instrument_strength, iv_estimate
from .pvf import PvfFamily, PvfParams, invert_survival, laplace, survival, trr, variance
from .solver import FrailtySummary, solve_nu
from .uncertainty import CiConfig, SummaryEstimate, numeric_ci, plugin_ci, point_estimate

__version__ = "0.1.0"
