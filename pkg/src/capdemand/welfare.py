"""
Consumer-surplus changes from moving the fee cap.

Fees are quoted per $100 borrowed, so integrating volume over the fee is
scaled by 1/100 to get dollars. Each route (closed form, trapezoid) divides by
``PER_100`` exactly once, at the end.
"""

from __future__ import annotations

import enum
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .demand import DemandCurve, choke_price, quantity_at
from .errors import ScenarioError

PER_100 = 100.0


class Method(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class Scenario:
    """A move of the effective fee from ``p_from`` to ``p_to`` (CAD per $100)."""

    label: str
    p_from: float
    p_to: float

    def __post_init__(self):
        for name in ("p_from", "p_to"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)) or value < 0:
                raise ScenarioError(f"{name} must be a non-negative number, got {value!r}", self.label)

    @classmethod
    def parse(cls, text: str, label=None) -> "Scenario":
        """Build from ``"P1:P2"``, e.g. ``"23:15"``."""
        try:
            a, b = text.split(":")
            p_from, p_to = float(a), float(b)
        except ValueError:
            raise ScenarioError(f"expected P1:P2, got {text!r}", label or text) from None
        return cls(label or f"{_short(p_from)}->{_short(p_to)}", p_from, p_to)


def _short(x):
    return str(int(x)) if float(x).is_integer() else repr(float(x))


@dataclass(frozen=True)
class WelfareResult:
    scenario: Scenario
    q_from: float
    q_to: float
    delta_cs: float
    method: Method

    def to_dict(self) -> dict:
        return {
            "label": self.scenario.label,
            "p_from": self.scenario.p_from,
            "p_to": self.scenario.p_to,
            "q_from_cad": self.q_from,
            "q_to_cad": self.q_to,
            "delta_cs_cad": self.delta_cs,
            "method": self.method.value,
        }


def _quantities(curve, s):
    with warnings.catch_warnings():
        # above-choke clamping is reported once by the caller, not per evaluation
        warnings.simplefilter("ignore")
        return quantity_at(curve, s.p_from), quantity_at(curve, s.p_to)


def _warn_above_choke(curve, s):
    choke = choke_price(curve)
    if max(s.p_from, s.p_to) > choke:
        warnings.warn(
            f"scenario {s.label!r} reaches above the choke price {choke:.6g}; "
            "demand is taken as zero there",
            stacklevel=3,
        )


def _area(curve, lo, hi):
    # integral of the clamped demand over [lo, hi], lo <= hi
    hi = min(hi, choke_price(curve))
    if hi <= lo:
        return 0.0
    return (hi - lo) * (curve.a - 0.5 * curve.b * (hi + lo))


def cs_change_closed(curve: DemandCurve, s: Scenario) -> WelfareResult:
    """Change in annual consumer surplus when the fee moves from ``s.p_from`` to ``s.p_to``.

    Positive for a fee cut. Below the choke price this is
    ``(a (p1 - p2) - b/2 (p1^2 - p2^2)) / 100``; a stretch above the choke
    price contributes nothing.
    """
    if s.p_from < 0 or s.p_to < 0:
        raise ScenarioError("prices must be non-negative", s.label)
    _warn_above_choke(curve, s)
    q_from, q_to = _quantities(curve, s)
    p1, p2 = s.p_from, s.p_to
    choke = choke_price(curve)
    if max(p1, p2) <= choke:
        # a (p1 - p2) - b/2 (p1^2 - p2^2), factored to avoid cancellation when p1 ~ p2
        delta = (p1 - p2) * (curve.a - 0.5 * curve.b * (p1 + p2)) / PER_100
    elif p1 >= p2:
        delta = _area(curve, p2, p1) / PER_100
    else:
        delta = -_area(curve, p1, p2) / PER_100
    return WelfareResult(s, q_from, q_to, float(delta), Method.CLOSED_FORM)


def trapezoid(f, lo: float, hi: float, n_panels: int) -> float:
    """Composite trapezoid rule for a vectorized integrand on [lo, hi]."""
    if n_panels < 1:
        raise ValueError("n_panels must be at least 1")
    x = np.linspace(lo, hi, n_panels + 1)
    y = f(x)
    h = (hi - lo) / n_panels
    return float(h * (0.5 * y[0] + y[1:-1].sum() + 0.5 * y[-1]))


def cs_change_quadrature(curve: DemandCurve, s: Scenario, n_panels: int = 1) -> WelfareResult:
    """Trapezoid-rule counterpart of :func:`cs_change_closed`.

    Integrates the clamped demand curve over the fee interval with
    ``n_panels`` equal panels. Exact for any panel count while both prices
    stay below the choke price.
    """
    if n_panels < 1:
        raise ScenarioError(f"n_panels must be >= 1, got {n_panels}", s.label)
    _warn_above_choke(curve, s)
    q_from, q_to = _quantities(curve, s)

    def demand(p):
        return np.maximum(curve.a - curve.b * p, 0.0)

    area = trapezoid(demand, s.p_to, s.p_from, n_panels)
    return WelfareResult(s, q_from, q_to, area / PER_100, Method.QUADRATURE)


def run_scenarios(curve: DemandCurve, scenarios: Sequence[Scenario],
                  method=Method.CLOSED_FORM, n_panels: int = 1000,
                  max_workers: int = None) -> list:
    """Evaluate every scenario on ``curve``; results keep the input order.

    With ``max_workers`` > 1 scenarios run on a thread pool. Each evaluation
    is a pure function of its inputs, so the output is identical either way.

    Raises
    ------
    ScenarioError
        Wrapping the first failing scenario, with its label.
    """
    method = Method(method)
    scenarios = list(scenarios)
    if not scenarios:
        raise ScenarioError("no scenarios given")

    def one(s):
        try:
            if method is Method.CLOSED_FORM:
                return cs_change_closed(curve, s)
            return cs_change_quadrature(curve, s, n_panels)
        except ScenarioError:
            raise
        except (ValueError, ArithmeticError) as exc:
            raise ScenarioError(str(exc), s.label) from exc

    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(one, scenarios))
    return [one(s) for s in scenarios]

