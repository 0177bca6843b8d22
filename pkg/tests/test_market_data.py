import pytest
from numpy.testing import assert_allclose

from capdemand import (
    EstimationError,
    MarketDataError,
    MarketRecord,
    builtin_series,
    deflate,
    filter_window,
    implied_deflator,
    load_market_csv,
    parse_market_csv,
    serialize_market_csv,
)
from capdemand.market_data import builtin_csv_text

HEADER = "year,fee_per_100,nominal_volume_cad,real_volume_cad\n"


def test_parse_rows():
    s = parse_market_csv(HEADER + "2012,21.50,318100000,318100000\n2019,15.30,441500000,384400000\n")
    assert s.records[0] == MarketRecord(2012, 21.5, 318_100_000, 318_100_000)
    assert s.records[1] == MarketRecord(2019, 15.3, 441_500_000, 384_400_000)


def test_parse_sorts_years():
    s = parse_market_csv(HEADER + "2014,20,3,2\n2013,20,3,2\n")
    assert s.years == (2013, 2014)


def test_empty_data_section():
    with pytest.raises(MarketDataError, match="no records"):
        parse_market_csv(HEADER)
    with pytest.raises(MarketDataError, match="no records"):
        parse_market_csv("")


@pytest.mark.parametrize("row, msg", [
    ("2013,abc,1,1", "fee_per_100"),
    ("2013,20,1", "expected 4 fields"),
    ("20x3,20,1,1", "year"),
    ("2013,20,0,1", "nominal_volume"),
    ("2013,-1,5,1", "fee"),
    ("2013,20,5,nan", "not finite"),
])
def test_malformed_row_reports_line(row, msg):
    with pytest.raises(MarketDataError, match=msg) as exc:
        parse_market_csv(HEADER + "2012,21.5,10,10\n" + row + "\n")
    assert exc.value.row == 3
    assert "row 3" in str(exc.value)


def test_duplicate_year():
    with pytest.raises(MarketDataError, match="duplicate"):
        parse_market_csv(HEADER + "2013,20,2,1\n2013,21,2,1\n")


def test_bad_header():
    with pytest.raises(MarketDataError, match="header"):
        parse_market_csv("yr,fee\n2012,1\n")


def test_base_year_volumes_must_agree():
    with pytest.raises(MarketDataError, match="base year"):
        parse_market_csv(HEADER + "2012,20,2,1\n")


def test_cap_column_optional_and_tolerance():
    text = HEADER.strip() + ",cap_per_100\n2016,21.70,2,1,23\n2017,19.30,2,1,17\n"
    # 2017 averages 19.30 against a cap of 17: a 13.5% overshoot
    with pytest.raises(MarketDataError, match="exceeds cap"):
        parse_market_csv(text)
    s = parse_market_csv(text, cap_tolerance=0.15)
    assert s.get(2017).cap == 17.0
    s = parse_market_csv(HEADER.strip() + ",cap_per_100\n2018,15.2,2,1,15\n2019,15,2,1,\n")
    assert s.get(2019).cap is None


def test_fixture_file_matches_constant():
    assert parse_market_csv(builtin_csv_text()) == builtin_series()
    assert load_market_csv("builtin") == builtin_series()


def test_fixture_table():
    s = builtin_series()
    assert s.years == tuple(range(2012, 2024))
    assert s.get(2018) == MarketRecord(2018, 16.82, 416_100_000, 369_500_000)


def test_round_trip(series):
    text = serialize_market_csv(series)
    assert parse_market_csv(text) == series
    assert serialize_market_csv(parse_market_csv(text)) == text


def test_round_trip_with_caps():
    text = HEADER.strip() + ",cap_per_100\n2013,20.125,2000000.5,1000000,23\n2014,15,3,2,\n"
    s = parse_market_csv(text)
    assert parse_market_csv(serialize_market_csv(s)) == s


def test_implied_deflator(series):
    assert implied_deflator(series.get(2012)) == 1.0
    assert implied_deflator(series.get(2013)) == pytest.approx(1.02033, abs=1e-4)
    assert implied_deflator(series.get(2023)) == pytest.approx(1.24316, abs=1e-4)
    for r in series:
        if r.year > 2012:
            assert implied_deflator(r) >= 1.0


def test_deflate():
    assert deflate(100, 1.0) == 100
    assert deflate(0, 2.0) == 0
    assert deflate(351.4e6, 1.02033) == pytest.approx(344.4e6, abs=0.05e6)
    with pytest.raises(ValueError):
        deflate(1.0, 0.0)
    with pytest.raises(ValueError):
        deflate(1.0, -1.0)


def test_deflate_inverts_deflator(series):
    for r in series:
        assert_allclose(deflate(r.nominal_volume, implied_deflator(r)), r.real_volume, rtol=1e-6)


def test_record_rejects_non_positive_real_volume():
    with pytest.raises(MarketDataError):
        MarketRecord(2013, 20.0, 1.0, 0.0)


def test_filter_window_paper_sample(series):
    s = filter_window(series, (2012, 2019))
    assert s.n == 8
    assert s.pairs[0] == (21.5, 318_100_000)
    assert s.pairs[-1] == (15.3, 384_400_000)
    assert s.window == (2012, 2019)
    assert s.excluded_years == ()


def test_filter_window_exclusion_equivalent(series):
    a = filter_window(series, (2012, 2019))
    b = filter_window(series, (2012, 2023), [2020, 2021, 2022, 2023])
    assert a.pairs == b.pairs
    assert b.excluded_years == (2020, 2021, 2022, 2023)


def test_filter_window_is_set_difference(series):
    full = filter_window(series, (2012, 2023))
    cut = filter_window(series, (2012, 2023), [2014, 2017, 2021])
    expected = [pq for y, pq in zip(full.years, full.pairs) if y not in (2014, 2017, 2021)]
    assert list(cut.pairs) == expected


def test_filter_window_too_small(series):
    with pytest.raises(EstimationError, match="too small"):
        filter_window(series, (2012, 2013))


def test_filter_window_identical_prices(series):
    # 2013, 2015, 2016 all averaged 21.70
    with pytest.raises(EstimationError, match="identical"):
        filter_window(series, (2013, 2016), [2014])
