"""
Command-line front end: ``capdemand fit | welfare | report``.

Machine output goes to stdout only; diagnostics go to stderr. Exit codes:
0 ok, 2 input/parse error, 3 estimation error, 4 scenario error,
5 output directory not writable.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from . import formatting as fmt
from .demand import DemandCurve, choke_price, from_fit, quantity_at, round_to_millions
from .errors import EstimationError, MarketDataError, ScenarioError
from .fdist import f_sf
from .market_data import MarketSeries, filter_window, implied_deflator, load_market_csv
from .ols import DEFAULT_HC_FLAVOR, HcFlavor, OlsFit, fit_ols
from .welfare import Method, Scenario, run_scenarios

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_ESTIMATION = 3
EXIT_SCENARIO = 4
EXIT_OUTPUT = 5

PAPER_ROUNDED = "paper_rounded"
FULL = "full"

DEFAULT_WINDOW = (2012, 2019)
DEFAULT_SCENARIOS = ("23:15", "15:14")
REPORT_PRICES = (23.0, 15.0, 14.0)

log = logging.getLogger("capdemand")


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    input_path: str = "builtin"
    window: Tuple[int, int] = DEFAULT_WINDOW
    excluded_years: List[int] = field(default_factory=list)
    hc_flavor: HcFlavor = DEFAULT_HC_FLAVOR
    scenarios: List[Scenario] = field(default_factory=list)
    output_format: str = "table"
    precision_mode: str = PAPER_ROUNDED
    a: Optional[float] = None
    b: Optional[float] = None
    method: Method = Method.CLOSED_FORM
    n_panels: int = 1000
    out_dir: str = "report"
    step: float = 0.5


# ---------------------------------------------------------------- parsing

def _window(text):
    try:
        first, last = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected Y1:Y2, got {text!r}") from None
    if first > last:
        raise argparse.ArgumentTypeError(f"empty window {text!r}")
    return first, last


def _years(text):
    try:
        return [int(y) for y in text.split(",") if y.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected Y[,Y...], got {text!r}") from None


def _positive(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capdemand",
        description="Linear demand estimation and consumer-surplus counterfactuals for fee caps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", default="builtin", metavar="PATH|builtin",
                        help="market CSV, or 'builtin' for the BC 2012-2023 fixture")
    common.add_argument("--window", type=_window, default=DEFAULT_WINDOW, metavar="Y1:Y2")
    common.add_argument("--exclude", type=_years, action="append", default=[], metavar="Y[,Y...]")
    common.add_argument("--hc", type=str.lower, choices=["hc0", "hc1", "hc2", "hc3"],
                        default=DEFAULT_HC_FLAVOR.value.lower())
    common.add_argument("--format", dest="output_format", choices=["table", "json", "csv"],
                        default="table")
    common.add_argument("--precision", choices=[PAPER_ROUNDED, FULL], default=PAPER_ROUNDED,
                        help="paper_rounded cuts fitted coefficients to 3 decimals in millions before welfare math")

    scen = argparse.ArgumentParser(add_help=False)
    scen.add_argument("--scenario", action="append", default=[], metavar="P1:P2",
                      help="fee change per $100, repeatable")
    scen.add_argument("--scenarios", dest="scenario_file", metavar="FILE",
                      help="JSON array of {label, p_from, p_to}")
    scen.add_argument("--a", type=_positive, help="demand intercept, CAD per year (skips fitting)")
    scen.add_argument("--b", type=_positive, help="demand slope magnitude, CAD per year per $")
    scen.add_argument("--method", choices=[m.value for m in Method], default=Method.CLOSED_FORM.value)
    scen.add_argument("--panels", type=int, default=1000, help="trapezoid panels for --method quadrature")

    sub.add_parser("fit", parents=[common], help="estimate the demand regression")
    sub.add_parser("welfare", parents=[common, scen], help="consumer-surplus change per scenario")
    rep = sub.add_parser("report", parents=[common, scen], help="write a reproduction bundle")
    rep.add_argument("--out", default="report", metavar="DIR")
    rep.add_argument("--step", type=_positive, default=0.5, help="fee step for demand_points.csv")
    return parser


def _load_scenario_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            items = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read scenario file: {exc}", EXIT_INPUT) from None
    except json.JSONDecodeError as exc:
        raise CliError(f"scenario file is not valid JSON: {exc}", EXIT_INPUT) from None
    if not isinstance(items, list):
        raise CliError("scenario file must hold a JSON array", EXIT_INPUT)
    out = []
    for i, item in enumerate(items):
        try:
            out.append(Scenario(str(item["label"]), float(item["p_from"]), float(item["p_to"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"entry {i} is malformed: {exc}") from None
    return out


def config_from_args(args) -> RunConfig:
    cfg = RunConfig(
        input_path=args.input,
        window=args.window,
        excluded_years=sorted({y for group in args.exclude for y in group}),
        hc_flavor=HcFlavor.parse(args.hc),
        output_format=args.output_format,
        precision_mode=args.precision,
    )
    if args.command in ("welfare", "report"):
        if (args.a is None) != (args.b is None):
            raise CliError("--a and --b must be given together", EXIT_INPUT)
        cfg.a, cfg.b = args.a, args.b
        cfg.method = Method(args.method)
        cfg.n_panels = args.panels
        scenarios = [Scenario.parse(s) for s in args.scenario]
        if args.scenario_file:
            scenarios.extend(_load_scenario_file(args.scenario_file))
        if not scenarios and args.command == "report":
            scenarios = [Scenario.parse(s) for s in DEFAULT_SCENARIOS]
        cfg.scenarios = scenarios
    if args.command == "report":
        cfg.out_dir = args.out
        cfg.step = args.step
    return cfg


# ---------------------------------------------------------------- pipeline

def _load(cfg) -> MarketSeries:
    try:
        return load_market_csv(cfg.input_path)
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(f"cannot read input: {exc}", EXIT_INPUT) from None


def _fit(cfg, series):
    sample = filter_window(series, cfg.window, cfg.excluded_years)
    return sample, fit_ols(sample, cfg.hc_flavor)


def _curve(cfg, fit=None) -> DemandCurve:
    if cfg.a is not None:
        # --a/--b are taken as given in either precision mode
        return DemandCurve.specified(cfg.a, cfg.b)
    curve = from_fit(fit)
    if cfg.precision_mode == PAPER_ROUNDED:
        try:
            curve = round_to_millions(curve, 3)
        except ValueError as exc:
            raise EstimationError(f"coefficients vanish when cut to 3 decimals in millions: {exc}") from None
    return curve


def _stars(p):
    if not p == p:
        return ""
    return "***" if p < 0.01 else "**" if p < 0.05 else "*" if p < 0.10 else ""


def _coef_p(coef, se, df2):
    if not se > 0:
        return float("nan")
    return f_sf((coef / se) ** 2, 1, df2)


def render_fit_table(fit: OlsFit, sample) -> str:
    flavor = fit.hc_flavor.value
    excluded = ",".join(str(y) for y in sample.excluded_years) or "none"
    window = f"{sample.window[0]}-{sample.window[1]}" if sample.window else "n/a"
    rows = [
        ("Borrowing cost (per $100)", fit.slope, fit.se_slope, fit.se_slope_classical),
        ("Constant", fit.intercept, fit.se_intercept, fit.se_intercept_classical),
    ]
    lines = [
        "DV: Real loan volume (2012 CAD)",
        f"Sample: {window} (excluded: {excluded})",
        f"{'':28s}{'Estimate':>18s}{'Robust SE (' + flavor + ')':>20s}{'Classical SE':>18s}",
    ]
    for name, coef, se_r, se_c in rows:
        stars = _stars(_coef_p(coef, se_r, fit.df2))
        lines.append(f"{name:28s}{fmt.grouped(coef) + stars:>18s}"
                     f"{'(' + fmt.grouped(se_r) + ')':>20s}{'(' + fmt.grouped(se_c) + ')':>18s}")
    lines += [
        f"{'Observations':28s}{fit.n:>18d}",
        f"{'R-squared':28s}{fmt.fixed(fit.r_squared, 4):>18s}",
        f"{'F-statistic (' + flavor + ' Wald)':28s}{fmt.fixed(fit.f_stat, 2):>18s}"
        f"    Prob > F {fmt.fixed(fit.p_value, 4)}   df ({fit.df1}, {fit.df2})",
        f"{'F-statistic (classical)':28s}{fmt.fixed(fit.f_stat_classical, 2):>18s}"
        f"    Prob > F {fmt.fixed(fit.p_value_classical, 4)}   df ({fit.df1}, {fit.df2})",
        "Stars use the robust SE: * p<0.10, ** p<0.05, *** p<0.01.",
    ]
    return "\n".join(lines) + "\n"


def fit_payload(fit: OlsFit, sample) -> dict:
    return {
        "robust": fit.to_dict(),
        "classical": fit.classical_dict(),
        "sample": {
            "window": list(sample.window) if sample.window else None,
            "excluded_years": list(sample.excluded_years),
            "years": list(sample.years),
        },
    }


def _csv(rows, header) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([row[h] for h in header])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


FIT_FIELDS = ("n", "k", "intercept", "slope", "se_intercept", "se_slope", "hc_flavor",
              "r_squared", "f_stat", "df1", "df2", "p_value")
WELFARE_FIELDS = ("label", "p_from", "p_to", "q_from_cad", "q_to_cad", "delta_cs_cad", "method")


def render_welfare_table(curve, results, precision_mode) -> str:
    lines = [
        f"Demand: Q = {fmt.millions(curve.a)}M - {fmt.millions(curve.b)}M * p"
        f"  ({curve.provenance}, {precision_mode}, {curve.base_year} CAD)",
        f"{'Scenario':12s}{'p_from':>8s}{'p_to':>8s}{'Q_from (M)':>14s}{'Q_to (M)':>14s}{'dCS (M/yr)':>14s}",
    ]
    for r in results:
        s = r.scenario
        lines.append(f"{s.label:12s}{fmt.fixed(s.p_from, 2):>8s}{fmt.fixed(s.p_to, 2):>8s}"
                     f"{fmt.millions(r.q_from, 3):>14s}{fmt.millions(r.q_to, 3):>14s}"
                     f"{fmt.millions(r.delta_cs, 2):>14s}")
    return "\n".join(lines) + "\n"


def demand_points_csv(curve: DemandCurve, step: float) -> str:
    """Plot-ready (fee, quantity) points from 0 up to and including the choke price."""
    choke = choke_price(curve)
    rows = []
    i = 0
    while i * step < choke:
        p = i * step
        rows.append((p, quantity_at(curve, p)))
        i += 1
    rows.append((choke, quantity_at(curve, choke)))
    lines = ["p_per_100,q_cad"]
    lines += [f"{fmt.fixed(p, 6)},{fmt.fixed(q, 2)}" for p, q in rows]
    return "\n".join(lines) + "\n"


def render_summary(series, sample, fit, curve, results, cfg) -> str:
    lines = ["Market statistics (fee per $100; volumes nominal and 2012 CAD)"]
    lines.append(f"{'Year':6s}{'Fee':>8s}{'Nominal':>14s}{'Real':>14s}{'Deflator':>10s}")
    for r in series:
        lines.append(f"{r.year:<6d}{fmt.fixed(r.fee, 2):>8s}{fmt.mil_label(r.nominal_volume):>14s}"
                     f"{fmt.mil_label(r.real_volume):>14s}{fmt.fixed(implied_deflator(r), 5):>10s}")
    lines.append("")
    if fit is not None:
        lines.append("Demand regression")
        lines.append(render_fit_table(fit, sample).rstrip("\n"))
        lines.append("")
    lines.append(f"Demand curve used for welfare ({cfg.precision_mode})")
    lines.append(f"  a = {fmt.millions(curve.a)} million, b = {fmt.millions(curve.b)} million per $,"
                 f" choke price = {fmt.fixed(choke_price(curve), 3)}")
    lines.append("Predicted volume")
    for p in REPORT_PRICES:
        lines.append(f"  Q({fmt.fixed(p, 0)}) = {fmt.millions(quantity_at(curve, p), 3)} million")
    lines.append("Consumer-surplus change per year (2012 CAD)")
    for r in results:
        lines.append(f"  {r.scenario.label}: {fmt.millions(r.delta_cs, 2)} million"
                     f" ({fmt.fixed(r.delta_cs, 2)} CAD)")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- commands

def cmd_fit(cfg: RunConfig, out) -> int:
    series = _load(cfg)
    sample, fit = _fit(cfg, series)
    if cfg.output_format == "json":
        out.write(_json(fit_payload(fit, sample)))
    elif cfg.output_format == "csv":
        out.write(_csv([fit.to_dict(), fit.classical_dict()], FIT_FIELDS))
    else:
        out.write(render_fit_table(fit, sample))
    return EXIT_OK


def _welfare_results(cfg):
    if not cfg.scenarios:
        raise ScenarioError("no scenarios given (use --scenario P1:P2)")
    series = sample = fit = None
    if cfg.a is None:
        series = _load(cfg)
        sample, fit = _fit(cfg, series)
    curve = _curve(cfg, fit)
    results = run_scenarios(curve, cfg.scenarios, cfg.method, cfg.n_panels)
    return series, sample, fit, curve, results


def cmd_welfare(cfg: RunConfig, out) -> int:
    _, _, _, curve, results = _welfare_results(cfg)
    rows = [r.to_dict() for r in results]
    if cfg.output_format == "json":
        out.write(_json(rows))
    elif cfg.output_format == "csv":
        out.write(_csv(rows, WELFARE_FIELDS))
    else:
        out.write(render_welfare_table(curve, results, cfg.precision_mode))
    return EXIT_OK


def cmd_report(cfg: RunConfig, out) -> int:
    series, sample, fit, curve, results = _welfare_results(cfg)
    if series is None:
        series = _load(cfg)
    files = {
        "fit.json": _json(fit_payload(fit, sample) if fit is not None else None),
        "welfare.json": _json({
            "curve": curve.to_dict(),
            "precision_mode": cfg.precision_mode,
            "results": [r.to_dict() for r in results],
        }),
        "demand_points.csv": demand_points_csv(curve, cfg.step),
        "summary.txt": render_summary(series, sample, fit, curve, results, cfg),
    }
    try:
        os.makedirs(cfg.out_dir, exist_ok=True)
        for name, text in files.items():
            with open(os.path.join(cfg.out_dir, name), "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write to {cfg.out_dir!r}: {exc}", EXIT_OUTPUT) from None
    if cfg.output_format == "json":
        out.write(_json({"out_dir": cfg.out_dir, "files": sorted(files)}))
    elif cfg.output_format == "csv":
        out.write(files["demand_points.csv"])
    else:
        out.write(files["summary.txt"])
    return EXIT_OK


COMMANDS = {"fit": cmd_fit, "welfare": cmd_welfare, "report": cmd_report}


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    handler = logging.StreamHandler(stderr)
    handler.setFormatter(logging.Formatter("capdemand: %(levelname)s: %(message)s"))
    root = logging.getLogger()
    root.addHandler(handler)
    logging.captureWarnings(True)
    try:
        parser = build_parser()
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            # argparse exits 2 on usage errors and 0 on --help
            return int(exc.code or 0)
        try:
            cfg = config_from_args(args)
            return COMMANDS[args.command](cfg, stdout)
        except CliError as exc:
            log.error("%s", exc)
            return exc.code
        except MarketDataError as exc:
            log.error("input error: %s", exc)
            return EXIT_INPUT
        except EstimationError as exc:
            log.error("estimation error: %s", exc)
            return EXIT_ESTIMATION
        except ScenarioError as exc:
            log.error("scenario error: %s", exc)
            return EXIT_SCENARIO
    finally:
        logging.captureWarnings(False)
        root.removeHandler(handler)


if __name__ == "__main__":
    sys.exit(main())
