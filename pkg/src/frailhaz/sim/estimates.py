"""Summary estimators fed to the adjustment: twin recurrence risk and survival."""
from __future__ import annotations

import math

import numpy as np

from ..errors import DegenerateError, DomainError
from ..uncertainty import IDENTITY, LOG, Z975, SummaryEstimate


def estimate_trr(pairs):
    """Twin recurrence risk with a Wald interval on the log scale.

    ``pairs`` is an ``(n, 2)`` boolean array of survival indicators with the
    index twin first. The estimate is P(co-twin survives | index survives)
    divided by P(index survives), and the standard error of its log is
    ``sqrt(1/a - 1/n1 + 1/b - 1/n2)``.
    """
    pairs = np.asarray(pairs, dtype=bool)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise DomainError("pairs must have shape (n, 2)")
    n2 = len(pairs)
    index_survived = pairs[:, 0]
    b = n1 = int(index_survived.sum())
    a = int(pairs[index_survived, 1].sum())
    if n1 == 0 or a == 0:
        raise DegenerateError("no surviving index twins with a surviving co-twin")
    rr = (a / n1) / (b / n2)
    se = math.sqrt(1.0 / a - 1.0 / n1 + 1.0 / b - 1.0 / n2)
    return SummaryEstimate(rr, rr * math.exp(-Z975 * se), rr * math.exp(Z975 * se), LOG)


def estimate_survival(survived):
    """Proportion surviving with a normal-approximation interval, clamped to [0, 1]."""
    survived = np.asarray(survived, dtype=bool)
    n = len(survived)
    if n < 30:
        raise DomainError(f"need at least 30 subjects, got {n}")
    p = survived.mean()
    half = Z975 * math.sqrt(p * (1.0 - p) / n)
    return SummaryEstimate(float(p), max(0.0, p - half), min(1.0, p + half), IDENTITY)
