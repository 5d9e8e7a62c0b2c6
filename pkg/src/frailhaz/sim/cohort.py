"""Frailty-heterogeneous cohorts with left truncation and administrative censoring."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError


def sample_frailty_gamma(nu, n, rng):
    """Gamma frailties with mean 1 and variance ``1/nu`` (shape nu, scale 1/nu)."""
    if not nu > 0.0:
        raise DomainError(f"nu must be positive, got {nu}")
    return rng.gamma(shape=nu, scale=1.0 / nu, size=n)


def sample_event_time(u, h0, r, rng):
    """Exponential event times with rate ``h0 * u * r`` by inversion.

    ``W`` is drawn on (0, 1] so the log never sees an exact zero. Zero
    frailty gives an infinite time (never has the event).
    """
    u = np.asarray(u, dtype=float)
    w = 1.0 - rng.random(u.shape)
    with np.errstate(divide="ignore"):
        return -np.log(w) / (h0 * u * r)


@dataclass(frozen=True)
class Individual:
    frailty: float
    exposed: bool
    event_time: float
    entry: float
    observed_time: float
    event: bool


@dataclass(frozen=True)
class Cohort:
    """Survivors to ``entry`` followed for at most ``delta`` time units.

    ``observed_time`` is measured from entry; censoring is administrative.
    """

    frailty: np.ndarray
    exposed: np.ndarray
    event_time: np.ndarray
    entry: float
    delta: float

    @property
    def observed_time(self):
        return np.minimum(self.event_time - self.entry, self.delta)

    @property
    def event(self):
        return self.event_time - self.entry < self.delta

    def __len__(self):
        return len(self.event_time)

    def __getitem__(self, i):
        return Individual(float(self.frailty[i]), bool(self.exposed[i]),
                          float(self.event_time[i]), self.entry,
                          float(self.observed_time[i]), bool(self.event[i]))


def simulate_cohort(n_per_arm, h0, nu, r, t1, delta, rng):
    """Two exposure arms, left truncated at ``t1`` and censored ``delta`` later."""
    u = sample_frailty_gamma(nu, 2 * n_per_arm, rng)
    exposed = np.repeat([False, True], n_per_arm)
    t = sample_event_time(u, h0, np.where(exposed, r, 1.0), rng)
    keep = t > t1
    return Cohort(u[keep], exposed[keep], t[keep], float(t1), float(delta))


def simulate_twin_survival(n_pairs, h0, nu, t1, rng):
    """Survival to ``t1`` for unexposed monozygotic pairs sharing a frailty.

    Column 0 is a randomly designated index twin, column 1 the co-twin.
    """
    u = sample_frailty_gamma(nu, n_pairs, rng)
    times = sample_event_time(np.column_stack([u, u]), h0, 1.0, rng)
    survived = times > t1
    swap = rng.random(n_pairs) < 0.5
    survived[swap] = survived[swap][:, ::-1]
    return survived


def simulate_survey(n, h0, nu, t1, rng):
    """Survival to ``t1`` in an independent unexposed sample."""
    u = sample_frailty_gamma(nu, n, rng)
    return sample_event_time(u, h0, 1.0, rng) > t1
