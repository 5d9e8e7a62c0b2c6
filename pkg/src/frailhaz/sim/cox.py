"""Cox proportional hazards fit for a single binary covariate.

With one 0/1 covariate the Breslow log partial likelihood only depends on the
numbers at risk in each arm at each distinct event time:

    l(b) = b * D1 - sum_t d_t * log(n0_t + n1_t * exp(b))

where D1 is the number of events among the exposed. Newton's method on ``b``
converges in a handful of steps since ``l`` is concave.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from ..errors import DomainError, NoEventsError, NonConvergenceError, SeparationError

Z975 = norm.ppf(0.975)
MAXITER = 50


@dataclass(frozen=True)
class CoxFit:
    log_hr: float
    se: float
    n: int
    n_events: int

    @property
    def hr(self):
        return math.exp(self.log_hr)

    @property
    def lo(self):
        return math.exp(self.log_hr - Z975 * self.se)

    @property
    def hi(self):
        return math.exp(self.log_hr + Z975 * self.se)


def risk_sets(time, event, exposed):
    """Distinct event times with event counts and arm-wise numbers at risk."""
    time = np.asarray(time, dtype=float)
    event = np.asarray(event, dtype=bool)
    exposed = np.asarray(exposed, dtype=bool)
    t_events, d = np.unique(time[event], return_counts=True)
    t0 = np.sort(time[~exposed])
    t1 = np.sort(time[exposed])
    n0 = len(t0) - np.searchsorted(t0, t_events, side="left")
    n1 = len(t1) - np.searchsorted(t1, t_events, side="left")
    return d, n0, n1, int(np.count_nonzero(event & exposed))


def partial_loglik(beta, d, n0, n1, d1):
    return beta * d1 - np.sum(d * np.log(n0 + n1 * math.exp(beta)))


def fit_cox_binary(time, event, exposed):
    """Maximum partial-likelihood log hazard ratio of exposed vs unexposed.

    Ties use the Breslow approximation. Raises ``NoEventsError`` without
    events, ``SeparationError`` when the maximum is at +/- infinity, and
    ``NonConvergenceError`` after 50 Newton steps.
    """
    exposed = np.asarray(exposed, dtype=bool)
    if exposed.all() or not exposed.any():
        raise DomainError("both exposure arms must be present")
    d, n0, n1, d1 = risk_sets(time, event, exposed)
    n_events = int(d.sum())
    if n_events == 0:
        raise NoEventsError("no events in the sample")
    # score at -inf and +inf; a finite maximum needs a sign change
    if not (d1 - d[n0 == 0].sum() > 0 and d1 - d[n1 > 0].sum() < 0):
        raise SeparationError(
            f"{d1} of {n_events} events are in the exposed arm; "
            "the partial likelihood has no finite maximum")

    beta = 0.0
    ll = partial_loglik(beta, d, n0, n1, d1)
    for _ in range(MAXITER):
        e = n1 * math.exp(beta)
        p = e / (n0 + e)
        score = d1 - np.dot(d, p)
        info = np.dot(d, p * (1.0 - p))
        if abs(score) < 1e-10:
            break
        step = score / info
        new = beta + step
        new_ll = partial_loglik(new, d, n0, n1, d1)
        while new_ll < ll and abs(step) > 1e-12:
            step *= 0.5
            new = beta + step
            new_ll = partial_loglik(new, d, n0, n1, d1)
        beta, ll = new, new_ll
        if abs(step) < 1e-12:
            break
    else:
        raise NonConvergenceError(f"Cox fit did not converge in {MAXITER} iterations")
    e = n1 * math.exp(beta)
    p = e / (n0 + e)
    info = np.dot(d, p * (1.0 - p))
    return CoxFit(float(beta), float(1.0 / math.sqrt(info)), len(exposed), n_events)


def fit_cohort(cohort):
    return fit_cox_binary(cohort.observed_time, cohort.event, cohort.exposed)
