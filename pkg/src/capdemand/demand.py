"""Linear inverse demand Q = a - b p."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from decimal import ROUND_DOWN, Decimal
from typing import Optional

from .errors import EstimationError
from .market_data import BASE_YEAR
from .ols import OlsFit

FITTED = "fitted"
SPECIFIED = "specified"


class AboveChokeWarning(UserWarning):
    """Demand evaluated at a price where the linear curve would go negative."""


@dataclass(frozen=True, eq=False)
class DemandCurve:
    """Annual real loan volume as a linear function of the fee per $100.

    Parameters
    ----------
    a : float
        Volume at a zero fee, base-year CAD per year.
    b : float
        Volume lost per extra dollar of fee, CAD per year per $ (per $100
        borrowed). Must be positive.
    base_year : int
        Year of the real dollars.
    provenance : str
        ``"fitted"`` (``fit`` holds the regression) or ``"specified"``.
    """

    a: float
    b: float
    base_year: int = BASE_YEAR
    provenance: str = SPECIFIED
    fit: Optional[OlsFit] = None

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0):
            raise ValueError(f"demand intercept a must be positive, got {self.a!r}")
        if not (math.isfinite(self.b) and self.b > 0):
            raise ValueError(f"demand slope b must be positive, got {self.b!r}")
        if self.provenance not in (FITTED, SPECIFIED):
            raise ValueError(f"unknown provenance {self.provenance!r}")

    @classmethod
    def specified(cls, a: float, b: float, base_year: int = BASE_YEAR) -> "DemandCurve":
        return cls(float(a), float(b), base_year, SPECIFIED)

    @classmethod
    def _unchecked(cls, a: float, b: float, base_year: int = BASE_YEAR) -> "DemandCurve":
        # Skips the b > 0 check; used to build flat-demand oracles in tests.
        curve = object.__new__(cls)
        for name, value in (("a", float(a)), ("b", float(b)), ("base_year", base_year),
                            ("provenance", SPECIFIED), ("fit", None)):
            object.__setattr__(curve, name, value)
        return curve

    def to_dict(self) -> dict:
        return {
            "a_cad_per_year": self.a,
            "b_cad_per_year_per_dollar": self.b,
            "base_year": self.base_year,
            "provenance": self.provenance,
        }

    def __repr__(self):
        return f"DemandCurve(a={self.a!r}, b={self.b!r}, base_year={self.base_year}, provenance={self.provenance!r})"


def from_fit(fit: OlsFit, base_year: int = BASE_YEAR) -> DemandCurve:
    """Demand curve from a regression of quantity on price.

    Raises
    ------
    EstimationError
        If the fitted slope is not negative.
    """
    if not fit.slope < 0:
        raise EstimationError(
            f"fitted slope {fit.slope:.6g} is not negative: demand is not downward-sloping"
        )
    if not fit.intercept > 0:
        raise EstimationError(f"fitted intercept {fit.intercept:.6g} is not positive")
    return DemandCurve(fit.intercept, -fit.slope, base_year, FITTED, fit)


def round_to_millions(curve: DemandCurve, decimals: int = 3) -> DemandCurve:
    """Coefficients cut to ``decimals`` places in millions of CAD.

    Digits beyond the last kept place are dropped (rounded toward zero), so a
    fitted intercept of 483,509,626 becomes 483.509 million.
    """
    quantum = Decimal(1).scaleb(-decimals)

    def cut(x):
        m = Decimal(repr(x)) / Decimal(1_000_000)
        return float(m.quantize(quantum, rounding=ROUND_DOWN) * 1_000_000)

    return DemandCurve(cut(curve.a), cut(curve.b), curve.base_year, curve.provenance, curve.fit)


def choke_price(curve: DemandCurve) -> float:
    """Fee at which predicted volume reaches zero, a / b."""
    if curve.b == 0:
        return math.inf
    return curve.a / curve.b


def _quantity(curve, p):
    return max(curve.a - curve.b * p, 0.0)


def quantity_at(curve: DemandCurve, p: float) -> float:
    """Predicted annual volume at fee ``p``; zero (with a warning) above the choke price."""
    if not math.isfinite(p) or p < 0:
        raise ValueError(f"price must be a non-negative number, got {p!r}")
    if p > choke_price(curve):
        warnings.warn(
            f"price {p} is above the choke price {choke_price(curve):.6g}; quantity clamped to 0",
            AboveChokeWarning, stacklevel=2,
        )
        return 0.0
    return _quantity(curve, p)
