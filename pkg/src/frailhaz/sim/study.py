"""Scenario runs and coverage studies of the full adjustment pipeline.

One scenario replication draws three independent samples from a population
with gamma frailty: a left-truncated two-arm cohort (marginal hazard ratio by
Cox regression), a twin registry (TRR at the entry time) and a survey
(survival to the entry time). The three summaries go through the numeric
interval procedure, and a coverage study repeats this with independent seeds.
"""
from __future__ import annotations

import dataclasses
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .. import pvf
from ..errors import ConfigError, DomainError, FrailtyError
from ..uncertainty import CiConfig, LOG, NumericCi, SummaryEstimate, numeric_ci
from .cohort import simulate_cohort, simulate_survey, simulate_twin_survival
from .cox import CoxFit, fit_cohort
from .estimates import estimate_survival, estimate_trr

log = logging.getLogger(__name__)

MAX_FAILED_REPS = 0.05


@dataclass(frozen=True)
class ScenarioConfig:
    n_per_arm: int = 10_000
    n_twin_pairs: int = 10_000
    n_survey: int = 10_000
    h0: float = 0.002
    nu: float = 1.0 / 9.0
    r_cau: float = 0.8
    t1: float = 50.0
    delta: float = 1.0
    seed: int = 0
    n_draws: int = 10_000

    def __post_init__(self):
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if f.name == "seed":
                if v < 0:
                    raise DomainError("seed must be nonnegative")
            elif not (v > 0 and np.isfinite(v)):
                raise DomainError(f"{f.name} must be positive and finite, got {v}")

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    @property
    def frailty(self):
        return pvf.PvfFamily.gamma().params(self.nu)

    def true_survival(self):
        return pvf.survival(self.frailty, self.h0 * self.t1)

    def true_trr(self):
        return pvf.trr(self.frailty, self.h0 * self.t1)


CONFIG_KEYS = {f.name: f.type for f in dataclasses.fields(ScenarioConfig)}


def _parse_value(key, text):
    if key in ("n_per_arm", "n_twin_pairs", "n_survey", "seed", "n_draws"):
        value = float(text)
        if value != int(value):
            raise DomainError(f"{key} must be an integer, got {text!r}")
        return int(value)
    return float(Fraction(text)) if "/" in text else float(text)


def parse_config(text):
    """Parse flat ``key = value`` lines; ``#`` starts a comment.

    Keys are the :class:`ScenarioConfig` field names; ``nu`` may be written as
    a fraction such as ``1/9``.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}", key)
        try:
            values[key] = _parse_value(key, value)
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"line {lineno}: bad value {value!r} for key {key!r}", key)
    return ScenarioConfig(**values)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


@dataclass(frozen=True)
class ScenarioResult:
    cox: CoxFit
    trr: SummaryEstimate
    survival: SummaryEstimate
    adjusted: NumericCi

    def covers(self, r):
        return (self.cox.lo <= r <= self.cox.hi, self.adjusted.lo <= r <= self.adjusted.hi)


def _streams(seed, rep=None):
    ss = np.random.SeedSequence(seed) if rep is None else np.random.SeedSequence(seed, spawn_key=(rep,))
    cohort, twins, survey = (np.random.default_rng(s) for s in ss.spawn(3))
    ci_seed = int(ss.generate_state(1, np.uint64)[0])
    return cohort, twins, survey, ci_seed


def run_scenario(cfg: ScenarioConfig, rep=None) -> ScenarioResult:
    """One replication: simulate the three samples and adjust.

    ``rep`` selects an independent substream of ``cfg.seed``; ``None`` uses the
    seed directly.
    """
    rng_cohort, rng_twins, rng_survey, ci_seed = _streams(cfg.seed, rep)
    cohort = simulate_cohort(cfg.n_per_arm, cfg.h0, cfg.nu, cfg.r_cau, cfg.t1, cfg.delta,
                             rng_cohort)
    cox = fit_cohort(cohort)
    trr = estimate_trr(simulate_twin_survival(cfg.n_twin_pairs, cfg.h0, cfg.nu, cfg.t1, rng_twins))
    surv = estimate_survival(simulate_survey(cfg.n_survey, cfg.h0, cfg.nu, cfg.t1, rng_survey))
    r_mar = SummaryEstimate(cox.hr, cox.lo, cox.hi, LOG)
    adjusted = numeric_ci(pvf.PvfFamily.gamma(), r_mar, trr, surv,
                          CiConfig(n_draws=cfg.n_draws, seed=ci_seed))
    return ScenarioResult(cox, trr, surv, adjusted)


@dataclass(frozen=True)
class CoverageReport:
    n_reps: int
    n_failed: int
    median_r_mar: float
    median_r_adjusted: float
    coverage_marginal: float
    coverage_adjusted: float
    median_trr: float
    median_survival: float


def _rep(args):
    cfg, rep = args
    try:
        res = run_scenario(cfg, rep)
    except FrailtyError as exc:
        return rep, None, f"{type(exc).__name__}: {exc}"
    return rep, res, None


def thread_count():
    """Worker count from ``FRAILHAZ_THREADS`` (0 or unset means all CPUs)."""
    n = int(os.environ.get("FRAILHAZ_THREADS", "0") or 0)
    return n if n > 0 else (os.cpu_count() or 1)


def run_replications(cfg, n_reps, workers=None):
    """Results of ``n_reps`` replications in replication order."""
    workers = thread_count() if workers is None else workers
    jobs = [(cfg, i) for i in range(n_reps)]
    if workers > 1 and n_reps > 1:
        with ProcessPoolExecutor(workers) as pool:
            out = list(pool.map(_rep, jobs, chunksize=max(1, n_reps // (4 * workers))))
    else:
        out = [_rep(j) for j in jobs]
    return out


def summarise(cfg, outcomes):
    ok = [res for _, res, _ in outcomes if res is not None]
    failed = [(rep, err) for rep, res, err in outcomes if res is None]
    for rep, err in failed:
        log.warning("replication %d failed: %s", rep, err)
    if len(failed) > MAX_FAILED_REPS * len(outcomes):
        raise FrailtyError(f"{len(failed)} of {len(outcomes)} replications failed")
    covers = np.array([res.covers(cfg.r_cau) for res in ok])
    return CoverageReport(
        n_reps=len(outcomes),
        n_failed=len(failed),
        median_r_mar=float(np.median([res.cox.hr for res in ok])),
        median_r_adjusted=float(np.median([res.adjusted.point for res in ok])),
        coverage_marginal=float(covers[:, 0].mean()),
        coverage_adjusted=float(covers[:, 1].mean()),
        median_trr=float(np.median([res.trr.value for res in ok])),
        median_survival=float(np.median([res.survival.value for res in ok])),
    )


def coverage_study(cfg: ScenarioConfig, n_reps, workers=None) -> CoverageReport:
    """Repeat :func:`run_scenario` and report medians and 95% CI coverage of ``r_cau``.

    Results do not depend on ``workers``: replication ``i`` always uses
    substream ``i`` of ``cfg.seed``.
    """
    if n_reps < 1:
        raise DomainError("n_reps must be positive")
    return summarise(cfg, run_replications(cfg, n_reps, workers))
