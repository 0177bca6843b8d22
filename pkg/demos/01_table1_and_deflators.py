"""
Market data and implied deflators
=================================

Load the British Columbia 2012-2023 fixture, recover the nominal-to-real
ratio each year, and carve out the 2012-2019 estimation window.
"""

from capdemand import builtin_series, filter_window, implied_deflator
from capdemand.formatting import mil_label

series = builtin_series()

# %%
# The nominal and real columns agree in 2012, so every later ratio is a
# cumulative price index relative to that year.
print(f"{'year':<6}{'fee':>7}{'nominal':>14}{'real':>14}{'deflator':>10}")
for r in series:
    print(f"{r.year:<6}{r.fee:>7.2f}{mil_label(r.nominal_volume):>14}"
          f"{mil_label(r.real_volume):>14}{implied_deflator(r):>10.5f}")

# %%
# 2020-2023 are left out of the regression sample. Both ways of asking for
# that give the same eight observations.
a = filter_window(series, (2012, 2019))
b = filter_window(series, (2012, 2023), excluded=[2020, 2021, 2022, 2023])
assert a.pairs == b.pairs
print(f"\n{a.n} observations, fees {min(a.prices)}-{max(a.prices)}")
