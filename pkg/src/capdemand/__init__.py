"""Linear demand estimation and consumer-surplus counterfactuals for fee-capped credit markets."""

from .demand import AboveChokeWarning, DemandCurve, choke_price, from_fit, quantity_at, round_to_millions
from .errors import CapDemandError, EstimationError, MarketDataError, ScenarioError
from .fdist import betainc, f_sf
from .market_data import (
    BASE_YEAR,
    EstimationSample,
    MarketRecord,
    MarketSeries,
    builtin_series,
    deflate,
    filter_window,
    implied_deflator,
    load_market_csv,
    parse_market_csv,
    serialize_market_csv,
)
from .ols import DEFAULT_HC_FLAVOR, HcFlavor, OlsFit, fit_ols, hc_covariance, wald_f
from .welfare import Method, Scenario, WelfareResult, cs_change_closed, cs_change_quadrature, run_scenarios

__version__ = "0.1.0"
