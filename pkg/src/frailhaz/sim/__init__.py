from .cohort import (Cohort, Individual, sample_event_time, sample_frailty_gamma,
                     simulate_cohort, simulate_survey, simulate_twin_survival)
from .cox import CoxFit, fit_cohort, fit_cox_binary
from .estimates import estimate_survival, estimate_trr
from .study import (CoverageReport, ScenarioConfig, ScenarioResult, coverage_study,
                    load_config, parse_config, run_scenario)

__all__ = [
    "Cohort", "Individual", "sample_event_time", "sample_frailty_gamma",
    "simulate_cohort", "simulate_survey", "simulate_twin_survival",
    "CoxFit", "fit_cohort", "fit_cox_binary",
    "estimate_survival", "estimate_trr",
    "CoverageReport", "ScenarioConfig", "ScenarioResult", "coverage_study",
    "load_config", "parse_config", "run_scenario",
]
