"""
Consumer surplus under lower fee caps
=====================================

Turn the fitted regression into a demand curve and price two cap cuts:
$23 -> $15 and $15 -> $14 per $100 borrowed.
"""

from capdemand import (
    Scenario,
    builtin_series,
    choke_price,
    filter_window,
    fit_ols,
    from_fit,
    quantity_at,
    round_to_millions,
    run_scenarios,
)

fit = fit_ols(filter_window(builtin_series(), (2012, 2019)))
full = from_fit(fit)
# three decimals in millions, as the published figures use
rounded = round_to_millions(full)

scenarios = [Scenario("23->15", 23, 15), Scenario("15->14", 15, 14), Scenario("23->14", 23, 14)]

for name, curve in [("rounded", rounded), ("full", full)]:
    print(f"{name}: a={curve.a / 1e6:.6f}M  b={curve.b / 1e6:.6f}M  choke={choke_price(curve):.3f}")
    for p in (23, 15, 14):
        print(f"  Q({p}) = {quantity_at(curve, p) / 1e6:.3f}M")
    for r in run_scenarios(curve, scenarios):
        print(f"  dCS {r.scenario.label:7s} {r.delta_cs / 1e6:8.4f}M per year")

# %%
# The trapezoid rule is exact on a line, so it makes a free cross-check.
check = run_scenarios(rounded, scenarios, method="quadrature", n_panels=1)
print("\nquadrature:", [f"{r.delta_cs / 1e6:.4f}" for r in check])
