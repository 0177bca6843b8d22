"""
Fitting the demand regression
=============================

Regress real loan volume on the fee and compare the four
heteroskedasticity-consistent standard errors with the classical one.
"""

from capdemand import HcFlavor, builtin_series, filter_window, fit_ols

sample = filter_window(builtin_series(), (2012, 2019))
fit = fit_ols(sample)

print(f"slope     {fit.slope:>16,.0f}")
print(f"intercept {fit.intercept:>16,.0f}")
print(f"R^2       {fit.r_squared:>16.4f}   (n={fit.n})")

# %%
# With only eight points the leverage corrections matter: HC0 is smallest,
# HC3 largest. The classical standard error is larger than all of them here.
print(f"\n{'cov':<10}{'se(slope)':>14}{'se(const)':>16}{'F':>8}{'Prob>F':>9}")
for flavor in HcFlavor:
    f = fit_ols(sample, flavor)
    print(f"{flavor.value:<10}{f.se_slope:>14,.0f}{f.se_intercept:>16,.0f}{f.f_stat:>8.2f}{f.p_value:>9.4f}")
print(f"{'classical':<10}{fit.se_slope_classical:>14,.0f}{fit.se_intercept_classical:>16,.0f}"
      f"{fit.f_stat_classical:>8.2f}{fit.p_value_classical:>9.4f}")

# %%
# For a single regressor the classical Wald F is the ANOVA F.
print(f"\nR^2/(1-R^2)*(n-2) = {fit.r_squared / (1 - fit.r_squared) * fit.df2:.4f}")
