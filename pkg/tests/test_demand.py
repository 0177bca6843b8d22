import warnings

import numpy as np
import pytest

from capdemand import (
    AboveChokeWarning,
    DemandCurve,
    EstimationError,
    EstimationSample,
    choke_price,
    fit_ols,
    from_fit,
    quantity_at,
    round_to_millions,
)


def test_from_fit(sample):
    fit = fit_ols(sample)
    curve = from_fit(fit)
    assert curve.a == fit.intercept and curve.b == -fit.slope
    assert curve.provenance == "fitted" and curve.fit is fit
    assert curve.a == pytest.approx(483.509e6, rel=1e-3)
    assert curve.b == pytest.approx(6.6215e6, rel=1e-3)


def test_from_fit_rejects_upward_slope():
    fit = fit_ols(EstimationSample.from_arrays([1, 2, 3], [1, 2, 3.5]))
    with pytest.raises(EstimationError, match="not negative"):
        from_fit(fit)


def test_specified_curve_validation():
    DemandCurve.specified(483.509e6, 6.621e6)
    for a, b in [(1.0, 0.0), (1.0, -2.0), (0.0, 1.0), (float("nan"), 1.0)]:
        with pytest.raises(ValueError):
            DemandCurve.specified(a, b)


@pytest.mark.parametrize("p, q_millions", [(23, 331.226), (15, 384.194), (14, 390.815)])
def test_predicted_volumes(paper_curve, p, q_millions):
    assert quantity_at(paper_curve, p) == pytest.approx(q_millions * 1e6, abs=1e3)


def test_zero_price_is_intercept(paper_curve):
    assert quantity_at(paper_curve, 0) == paper_curve.a


def test_choke_price(paper_curve):
    assert choke_price(paper_curve) == pytest.approx(73.027, abs=1e-3)
    assert choke_price(DemandCurve.specified(100, 100)) == 1.0
    assert quantity_at(paper_curve, choke_price(paper_curve)) == pytest.approx(0.0, abs=1.0)


def test_above_choke_clamps_with_warning(paper_curve):
    with pytest.warns(AboveChokeWarning):
        assert quantity_at(paper_curve, 80.0) == 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        quantity_at(paper_curve, 70.0)


def test_negative_price_rejected(paper_curve):
    with pytest.raises(ValueError):
        quantity_at(paper_curve, -0.01)


def test_round_trip_coefficients(paper_curve):
    q0 = quantity_at(paper_curve, 0)
    q1 = quantity_at(paper_curve, 1)
    assert q0 == paper_curve.a
    assert q0 - q1 == pytest.approx(paper_curve.b, rel=1e-12)


def test_fitted_values_match(sample):
    fit = fit_ols(sample)
    curve = from_fit(fit)
    for p, yhat in zip(fit.prices, fit.fitted):
        assert quantity_at(curve, p) == pytest.approx(yhat, rel=1e-12)


def test_strictly_decreasing_below_choke(paper_curve):
    ps = np.linspace(0, choke_price(paper_curve), 200, endpoint=False)
    qs = [quantity_at(paper_curve, p) for p in ps]
    assert all(b < a for a, b in zip(qs, qs[1:]))


def test_round_to_millions(sample):
    curve = round_to_millions(from_fit(fit_ols(sample)))
    assert curve.a == 483_509_000.0
    assert curve.b == 6_621_000.0
    assert curve.provenance == "fitted"


def test_to_dict(paper_curve):
    assert paper_curve.to_dict() == {
        "a_cad_per_year": 483_509_000.0,
        "b_cad_per_year_per_dollar": 6_621_000.0,
        "base_year": 2012,
        "provenance": "specified",
    }
