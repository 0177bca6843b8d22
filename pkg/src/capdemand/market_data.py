"""
Annual market statistics: parsing, validation, deflation and sample windows.

Volumes are kept in whole CAD throughout; the "X.X Mil" presentation used
in published tables lives in :mod:`capdemand.formatting`.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import EstimationError, MarketDataError

BASE_YEAR = 2012
DEFAULT_CAP_TOLERANCE = 0.05

CSV_COLUMNS = ("year", "fee_per_100", "nominal_volume_cad", "real_volume_cad")
CAP_COLUMN = "cap_per_100"

# British Columbia, 2012-2023. Fee is CAD per $100 on a 14-day term; volumes
# are annual totals in CAD, published to the nearest 0.1 million.
BC_2012_2023 = (
    (2012, 21.50, 318_100_000, 318_100_000),
    (2013, 21.70, 351_400_000, 344_400_000),
    (2014, 21.90, 385_300_000, 370_300_000),
    (2015, 21.70, 340_900_000, 321_200_000),
    (2016, 21.70, 369_700_000, 341_500_000),
    (2017, 19.30, 397_300_000, 359_800_000),
    (2018, 16.82, 416_100_000, 369_500_000),
    (2019, 15.30, 441_500_000, 384_400_000),
    (2020, 14.92, 390_700_000, 333_500_000),
    (2021, 14.69, 271_500_000, 227_200_000),
    (2022, 14.85, 305_700_000, 250_800_000),
    (2023, 14.92, 327_200_000, 263_200_000),
)


@dataclass(frozen=True)
class MarketRecord:
    """One year of market statistics.

    Parameters
    ----------
    year : int
        Calendar year.
    fee : float
        Average borrowing cost, CAD per $100 borrowed on a 14-day term.
    nominal_volume : float
        Total annual loan volume, nominal CAD.
    real_volume : float
        Total annual loan volume, base-year CAD.
    cap : float, optional
        Regulated maximum fee per $100 in force that year.
    """

    year: int
    fee: float
    nominal_volume: float
    real_volume: float
    cap: Optional[float] = None

    def __post_init__(self):
        for name in ("fee", "nominal_volume", "real_volume"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise MarketDataError(f"{self.year}: {name} must be positive, got {value!r}")
        if self.cap is not None and (not math.isfinite(self.cap) or self.cap <= 0):
            raise MarketDataError(f"{self.year}: cap must be positive, got {self.cap!r}")

    def check_cap(self, tolerance: float = DEFAULT_CAP_TOLERANCE) -> None:
        """Raise if the fee overshoots the cap by more than ``tolerance`` (relative).

        Reported annual averages can sit slightly above the cap when the
        reporting cycle straddles a cap change, hence the tolerance.
        """
        if self.cap is None:
            return
        if self.fee > self.cap * (1.0 + tolerance):
            raise MarketDataError(
                f"{self.year}: fee {self.fee} exceeds cap {self.cap} by more than {tolerance:.0%}"
            )


@dataclass(frozen=True)
class MarketSeries:
    """Year-ordered collection of :class:`MarketRecord`."""

    records: tuple
    base_year: int = BASE_YEAR

    def __post_init__(self):
        records = tuple(self.records)
        object.__setattr__(self, "records", records)
        if not records:
            raise MarketDataError("no records")
        years = [r.year for r in records]
        if len(set(years)) != len(years):
            dup = sorted({y for y in years if years.count(y) > 1})
            raise MarketDataError(f"duplicate year(s): {dup}")
        if any(b <= a for a, b in zip(years, years[1:])):
            raise MarketDataError("years must be strictly increasing")
        for r in records:
            if r.year == self.base_year and r.real_volume != r.nominal_volume:
                raise MarketDataError(
                    f"{r.year}: real and nominal volume must agree in the base year"
                )

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def years(self) -> tuple:
        return tuple(r.year for r in self.records)

    def get(self, year: int) -> MarketRecord:
        for r in self.records:
            if r.year == year:
                return r
        raise KeyError(year)


@dataclass(frozen=True)
class EstimationSample:
    """(price, quantity) pairs ready for regression, with their provenance.

    Quantities are real volumes in base-year CAD; prices are fees per $100.
    """

    prices: tuple
    quantities: tuple
    years: tuple = ()
    window: Optional[tuple] = None
    excluded_years: tuple = field(default=())

    def __post_init__(self):
        prices = tuple(float(p) for p in self.prices)
        quantities = tuple(float(q) for q in self.quantities)
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "quantities", quantities)
        object.__setattr__(self, "years", tuple(self.years))
        object.__setattr__(self, "excluded_years", tuple(self.excluded_years))
        if len(prices) != len(quantities):
            raise EstimationError("prices and quantities differ in length")
        if self.years and len(self.years) != len(prices):
            raise EstimationError("years and prices differ in length")
        if len(prices) < 3:
            raise EstimationError(f"sample too small: {len(prices)} pairs, need at least 3")
        if not all(math.isfinite(v) for v in prices + quantities):
            raise EstimationError("sample contains non-finite values")
        if min(prices) == max(prices):
            raise EstimationError("all prices identical: slope not identified")

    @classmethod
    def from_arrays(cls, prices, quantities) -> "EstimationSample":
        return cls(tuple(np.asarray(prices, dtype=float)), tuple(np.asarray(quantities, dtype=float)))

    @property
    def n(self) -> int:
        return len(self.prices)

    @property
    def pairs(self) -> tuple:
        return tuple(zip(self.prices, self.quantities))

    def price_array(self) -> np.ndarray:
        return np.array(self.prices)

    def quantity_array(self) -> np.ndarray:
        return np.array(self.quantities)


def _parse_number(text, name, row):
    try:
        value = float(text)
    except ValueError:
        raise MarketDataError(f"cannot parse {name} {text!r}", row=row) from None
    if not math.isfinite(value):
        raise MarketDataError(f"{name} is not finite", row=row)
    return value


def parse_market_csv(text: str, base_year: int = BASE_YEAR,
                     cap_tolerance: float = DEFAULT_CAP_TOLERANCE) -> MarketSeries:
    """Parse market statistics from CSV text.

    The header must be ``year,fee_per_100,nominal_volume_cad,real_volume_cad``
    with an optional trailing ``cap_per_100`` column. Rows may appear in any
    order; the returned series is sorted by year. Blank lines are ignored.

    Raises
    ------
    MarketDataError
        On a bad header, a malformed row (the message carries the row
        number), a duplicate year, a non-positive fee or volume, or when
        there are no data rows.
    """
    reader = csv.reader(io.StringIO(text))
    header = None
    records = []
    for lineno, row in enumerate(reader, start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        cells = [cell.strip() for cell in row]
        if header is None:
            header = tuple(cells)
            if header not in (CSV_COLUMNS, CSV_COLUMNS + (CAP_COLUMN,)):
                raise MarketDataError(f"unexpected header {','.join(cells)!r}", row=lineno)
            continue
        if len(cells) != len(header):
            raise MarketDataError(f"expected {len(header)} fields, got {len(cells)}", row=lineno)
        try:
            year = int(cells[0])
        except ValueError:
            raise MarketDataError(f"cannot parse year {cells[0]!r}", row=lineno) from None
        fee = _parse_number(cells[1], "fee_per_100", lineno)
        nominal = _parse_number(cells[2], "nominal_volume_cad", lineno)
        real = _parse_number(cells[3], "real_volume_cad", lineno)
        cap = None
        if len(cells) == 5 and cells[4] != "":
            cap = _parse_number(cells[4], CAP_COLUMN, lineno)
        try:
            record = MarketRecord(year, fee, nominal, real, cap)
            record.check_cap(cap_tolerance)
        except MarketDataError as exc:
            raise MarketDataError(str(exc), row=lineno) from None
        records.append(record)
    if header is None or not records:
        raise MarketDataError("no records")
    records.sort(key=lambda r: r.year)
    return MarketSeries(tuple(records), base_year=base_year)


def _format_number(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def serialize_market_csv(series: MarketSeries) -> str:
    """Write a series back to canonical CSV (shortest round-tripping floats)."""
    has_cap = any(r.cap is not None for r in series)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS + ((CAP_COLUMN,) if has_cap else ()))
    for r in series:
        row = [str(r.year), repr(float(r.fee)),
               _format_number(r.nominal_volume), _format_number(r.real_volume)]
        if has_cap:
            row.append("" if r.cap is None else repr(float(r.cap)))
        writer.writerow(row)
    return buf.getvalue()


def builtin_series() -> MarketSeries:
    """The BC 2012-2023 fixture, built from the in-module constant (no file I/O)."""
    return MarketSeries(tuple(MarketRecord(*row) for row in BC_2012_2023))


def builtin_csv_text() -> str:
    """Contents of the packaged ``data/bc_2012_2023.csv`` fixture file."""
    return resources.files("capdemand").joinpath("data/bc_2012_2023.csv").read_text("utf-8")


def load_market_csv(path, **kwargs) -> MarketSeries:
    """Read and parse a CSV file, or the packaged fixture when ``path == "builtin"``."""
    if str(path) == "builtin":
        return builtin_series()
    with open(path, encoding="utf-8") as fh:
        return parse_market_csv(fh.read(), **kwargs)


def implied_deflator(record: MarketRecord) -> float:
    """Nominal-to-real price ratio recovered from the two volume columns."""
    if not record.real_volume > 0:
        raise MarketDataError(f"{record.year}: real volume must be positive")
    if not record.nominal_volume > 0:
        raise MarketDataError(f"{record.year}: nominal volume must be positive")
    return record.nominal_volume / record.real_volume


def deflate(nominal: float, deflator: float) -> float:
    """Convert a nominal amount to base-year CAD."""
    if not deflator > 0:
        raise ValueError(f"deflator must be positive, got {deflator!r}")
    return nominal / deflator


def filter_window(series: MarketSeries, window: Sequence[int],
                  excluded: Iterable[int] = ()) -> EstimationSample:
    """Select (fee, real volume) pairs for years in ``window`` minus ``excluded``.

    ``window`` is an inclusive ``(first_year, last_year)`` pair.

    Raises
    ------
    EstimationError
        If fewer than 3 pairs remain or every remaining fee is the same.
    """
    first, last = (int(y) for y in window)
    if first > last:
        raise ValueError(f"empty window {first}:{last}")
    excluded = tuple(sorted({int(y) for y in excluded}))
    chosen = [r for r in series if first <= r.year <= last and r.year not in excluded]
    return EstimationSample(
        prices=tuple(r.fee for r in chosen),
        quantities=tuple(r.real_volume for r in chosen),
        years=tuple(r.year for r in chosen),
        window=(first, last),
        excluded_years=excluded,
    )
