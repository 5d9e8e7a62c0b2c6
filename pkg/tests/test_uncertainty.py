import math

import numpy as np
import pytest

from conftest import FAMILIES
from frailhaz import pvf, uncertainty
from frailhaz.errors import DomainError, TooManyFailuresError
from frailhaz.uncertainty import (IDENTITY, LOG, CiConfig, SummaryEstimate, draw_inputs,
                                  numeric_ci, plugin_ci, point_estimate)

R_MAR = SummaryEstimate(0.68, 0.54, 0.87)
TRR = SummaryEstimate(1.27, 1.20, 1.34)
S = SummaryEstimate.exact(0.56, IDENTITY)


def test_summary_estimate_validation():
    with pytest.raises(DomainError):
        SummaryEstimate(1.0, 1.1, 1.2)
    with pytest.raises(DomainError):
        SummaryEstimate(0.5, 0.0, 1.0, LOG)
    with pytest.raises(DomainError):
        SummaryEstimate(0.5, 0.4, 0.6, "logit")
    assert SummaryEstimate(0.5, 0.0, 1.0, IDENTITY).sd == pytest.approx(0.5 / 1.959964, rel=1e-6)
    assert SummaryEstimate.exact(2.0).sd == 0.0


def test_sd_uses_lower_half_width():
    est = SummaryEstimate(1.27, 1.20, 1.34)
    assert est.sd == pytest.approx(math.log(1.27 / 1.20) / uncertainty.Z975)


def test_config_validation():
    with pytest.raises(DomainError):
        CiConfig(n_draws=99)
    with pytest.raises(DomainError):
        CiConfig(alpha=1.0)


def test_plugin_interval_brackets_point(family):
    point, lo, hi = plugin_ci(family, R_MAR, 1.27, 0.56)
    assert lo < point < hi
    assert point == pytest.approx(point_estimate(family, 0.68, 1.27, 0.56))


def test_exact_inputs_collapse_interval():
    fam = pvf.PvfFamily.gamma()
    ci = numeric_ci(fam, SummaryEstimate.exact(0.68), SummaryEstimate.exact(1.27), S,
                    CiConfig(n_draws=500))
    assert ci.lo == pytest.approx(ci.point, rel=1e-12)
    assert ci.hi == pytest.approx(ci.point, rel=1e-12)
    assert ci.n_failed == 0


def test_null_marginal_gives_null_point():
    ci = numeric_ci(pvf.PvfFamily.gamma(), SummaryEstimate.exact(1.0), TRR, S,
                    CiConfig(n_draws=500))
    assert ci.point == 1.0 and ci.lo == 1.0 and ci.hi == 1.0


def test_numeric_ci_deterministic():
    fam = pvf.PvfFamily.hougaard(-0.125)
    a = numeric_ci(fam, R_MAR, TRR, S, CiConfig(n_draws=3000, seed=11))
    b = numeric_ci(fam, R_MAR, TRR, S, CiConfig(n_draws=3000, seed=11))
    c = numeric_ci(fam, R_MAR, TRR, S, CiConfig(n_draws=3000, seed=12))
    assert a == b
    assert a != c


def test_draws_independent_of_workers_and_prefix_stable():
    a = draw_inputs(R_MAR, TRR, S, 5, 3000, workers=1)
    b = draw_inputs(R_MAR, TRR, S, 5, 3000, workers=3)
    c = draw_inputs(R_MAR, TRR, S, 5, 1500)
    np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(a[:1500], c)


def test_numeric_ci_independent_of_workers():
    fam = pvf.PvfFamily.gamma()
    a = numeric_ci(fam, R_MAR, TRR, S, CiConfig(n_draws=2500, workers=1))
    b = numeric_ci(fam, R_MAR, TRR, S, CiConfig(n_draws=2500, workers=4))
    assert a == b


def test_draw_distribution():
    s = SummaryEstimate(0.56, 0.52, 0.60, IDENTITY)
    d = draw_inputs(R_MAR, TRR, s, 0, 200_000)
    assert np.log(d[:, 0]).mean() == pytest.approx(math.log(0.68), abs=2e-3)
    assert np.log(d[:, 0]).std() == pytest.approx(R_MAR.sd, rel=0.01)
    assert np.log(d[:, 1]).std() == pytest.approx(TRR.sd, rel=0.01)
    assert d[:, 2].mean() == pytest.approx(0.56, abs=1e-3)
    assert d[:, 2].std() == pytest.approx(s.sd, rel=0.01)


def test_survival_draws_clamped():
    s = SummaryEstimate(0.5, 0.0, 1.0, IDENTITY)
    d = draw_inputs(R_MAR, TRR, s, 0, 20_000)
    assert d[:, 2].min() >= uncertainty.S_CLAMP
    assert d[:, 2].max() <= 1.0 - uncertainty.S_CLAMP


def test_failures_counted(family):
    ci = numeric_ci(family, R_MAR, TRR, S, CiConfig(n_draws=10_000))
    assert 0 <= ci.n_failed <= 0.2 * 10_000
    assert ci.lo < ci.point < ci.hi


def test_too_many_failures():
    # TRR draws far beyond what the inverse Gaussian can produce at S = 0.56
    trr = SummaryEstimate(1.39, 1.25, 1.55)
    with pytest.raises(TooManyFailuresError) as info:
        numeric_ci(pvf.PvfFamily.inverse_gaussian(), R_MAR, trr, S, CiConfig(n_draws=1000))
    assert info.value.dominant == "no-root"
    assert info.value.n_failed > 200


def test_survival_must_be_identity_scale():
    with pytest.raises(DomainError):
        numeric_ci(pvf.PvfFamily.gamma(), R_MAR, TRR, SummaryEstimate.exact(0.56),
                   CiConfig(n_draws=200))


def test_vectorised_pipeline_matches_scalar():
    fam = pvf.PvfFamily.compound_poisson(0.1)
    d = draw_inputs(R_MAR, TRR, SummaryEstimate(0.56, 0.52, 0.60, IDENTITY), 3, 200)
    r, failure = uncertainty.adjust_draws(fam, d)
    for (rm, t, s), ri, fi in zip(d, r, failure):
        if fi is None:
            assert ri == pytest.approx(point_estimate(fam, rm, t, s), rel=1e-7)


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.label)
def test_wider_than_plugin(fam):
    _, plo, phi = plugin_ci(fam, R_MAR, 1.27, 0.56)
    ci = numeric_ci(fam, R_MAR, TRR, S)
    assert ci.lo < plo
