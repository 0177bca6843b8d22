import math

import numpy as np
import pytest
from scipy import special

from capdemand import betainc, f_sf

from oracles import f_cdf_by_quadrature, t_tail_two_sided


def test_table_value():
    assert f_sf(6.395, 1, 6) == pytest.approx(0.0449, abs=5e-4)


@pytest.mark.parametrize("d1, d2", [(1, 1), (1, 6), (3, 10), (7, 2)])
def test_zero_statistic(d1, d2):
    assert f_sf(0.0, d1, d2) == 1.0


def test_f11_median():
    assert f_cdf_by_quadrature(1.0, 1, 1) == pytest.approx(0.5, abs=1e-10)
    assert f_sf(1.0, 1, 1) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("f, d1, d2", [(6.395, 1, 6), (0.3, 1, 3), (2.5, 2, 9), (12.0, 4, 20)])
def test_matches_density_quadrature(f, d1, d2):
    assert f_sf(f, d1, d2) == pytest.approx(1.0 - f_cdf_by_quadrature(f, d1, d2), abs=1e-9)


@pytest.mark.parametrize("f", [0.1, 0.5, 1.0, 2.0, 6.395, 10.0, 25.0, 50.0])
@pytest.mark.parametrize("d2", [1, 2, 3, 6, 15, 30])
def test_t_tail_identity(f, d2):
    assert abs(f_sf(f, 1, d2) - t_tail_two_sided(math.sqrt(f), d2)) < 1e-8


def test_betainc_against_scipy():
    rng = np.random.default_rng(7)
    for _ in range(300):
        a, b = rng.uniform(0.2, 40, size=2)
        x = rng.uniform()
        assert betainc(a, b, x) == pytest.approx(special.betainc(a, b, x), abs=1e-10)


def test_betainc_symmetry():
    for a, b, x in [(0.5, 3.0, 0.2), (3.0, 0.5, 0.9), (15.0, 0.5, 0.97)]:
        assert betainc(a, b, x) + betainc(b, a, 1 - x) == pytest.approx(1.0, abs=1e-13)


def test_betainc_endpoints():
    assert betainc(2.0, 3.0, 0.0) == 0.0
    assert betainc(2.0, 3.0, 1.0) == 1.0
    with pytest.raises(ValueError):
        betainc(2.0, 3.0, 1.5)
    with pytest.raises(ValueError):
        betainc(0.0, 3.0, 0.5)


def test_monotone_in_f():
    fs = np.linspace(0, 60, 400)
    for d1, d2 in [(1, 1), (1, 6), (5, 12)]:
        tail = [f_sf(f, d1, d2) for f in fs]
        assert all(b <= a for a, b in zip(tail, tail[1:]))


@pytest.mark.parametrize("bad", [math.inf, math.nan])
def test_non_finite_rejected(bad):
    with pytest.raises(ValueError):
        f_sf(bad, 1, 6)


def test_negative_rejected():
    with pytest.raises(ValueError):
        f_sf(-1.0, 1, 6)
