"""Command-line entry point: ``stockfire <subcommand> [options]``.

Exit status is 0 on success, 1 on usage errors and 2 on data errors
(unparseable or out-of-range input files, I/O failures).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import corridor_sim as cs
from . import regime_engine as rg
from . import scenario_io as sio
from .errors import StockfireError

SUBCOMMANDS = ("pathways", "rank", "tipping-point", "allocate", "corridor", "table3")
SHIPPED_REGIMES = ("us_baseline", "china_delandfill", "ipcc_inventory")
DEMO_REGIME = "methane_credit_demo"
OUT_ENV = "STOCKFIRE_OUT"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _u64(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 bits: {text}")
    return v


def _u32_positive(text):
    v = int(text)
    if not 1 <= v < 2**32:
        raise argparse.ArgumentTypeError(f"expected an integer in [1, 2^32): {text}")
    return v


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--scenario", type=Path, help="scenario file (default: shipped reference corridor)")
    common.add_argument("--regime", type=Path, action="append", default=[], help="regime file, repeatable")
    common.add_argument("--trials", type=_u32_positive, default=1000, help="Monte Carlo trials (default 1000)")
    common.add_argument("--seed", type=_u64, default=42, help="master seed, 64-bit (default 42)")
    common.add_argument("--lambda-min", type=float, default=rg.DEFAULT_LAMBDA_RANGE[0],
                        help="low end of the methane-price search, $/tCO2e")
    common.add_argument("--lambda-max", type=float, default=rg.DEFAULT_LAMBDA_RANGE[1],
                        help="high end of the methane-price search, $/tCO2e")
    common.add_argument("--tol", type=float, default=0.01, help="bisection tolerance, $/tCO2e")
    common.add_argument("--out", type=Path, help=f"output directory (default: ${OUT_ENV} or ./out)")
    common.add_argument("--threads", type=_u32_positive, default=1, help="Monte Carlo worker threads")

    parser = _Parser(prog="stockfire", description="Landfill, WtE and remediation carbon balances "
                     "under accounting regimes, plus a corridor microgrid Monte Carlo.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "pathways": "per-tonne GHG balance of the three pathways",
        "rank": "private costs and ranking under each regime",
        "tipping-point": "methane price at which remediation breaks even",
        "allocate": "least-cost split of a tonne across pathways",
        "corridor": "Monte Carlo resilience metrics (writes resilience.json)",
        "table3": "reproduce the site-level comparison table",
    }
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def _resolve_regime(path: Path) -> Path:
    if path.exists():
        return path
    shipped = sio.DATA_DIR / path.name
    if shipped.exists():
        return shipped
    shipped = sio.DATA_DIR / f"{path.name}.regime"
    if shipped.exists():
        return shipped
    return path  # let the loader report it


def _load_regimes(paths, default=()):
    if not paths:
        paths = [Path(f"{name}.regime") for name in default]
    regimes = []
    for p in paths:
        p = _resolve_regime(p)
        if not p.exists():
            raise FileNotFoundError(f"regime file not found: {p}")
        regimes.append(rg.load_regime(p))
    return regimes


def _out_dir(args):
    if args.out is not None:
        return args.out
    return Path(os.environ.get(OUT_ENV, "out"))


def _fmt(x):
    return f"{x:12.4f}"


def _print_balances(balances, stdout):
    print(f"{'pathway':<18}{'direct':>12}{'energy_cr':>12}{'methane_cr':>12}{'net':>12}  tCO2e/t", file=stdout)
    for b in balances:
        print(f"{b.pathway_id.value:<18}{_fmt(b.direct_tco2e)}{_fmt(b.energy_credit_tco2e)}"
              f"{_fmt(b.methane_credit_tco2e)}{_fmt(b.net_tco2e)}", file=stdout)


def cmd_pathways(args, scenario, stdout):
    balances = sio.pathway_balances(scenario)
    _print_balances(balances, stdout)
    sio.write_report(sio.ReportBundle(pathways=balances), _out_dir(args))


def _incentives(scenario, regimes):
    rows = []
    for regime in regimes:
        for prof in sio.incentive_profiles(scenario, regime):
            rows.append((regime.name, prof))
    return rows


def cmd_rank(args, scenario, stdout):
    regimes = _load_regimes(args.regime, SHIPPED_REGIMES)
    for regime in regimes:
        profiles = sio.incentive_profiles(scenario, regime)
        by_id = {p.pathway_id: p for p in profiles}
        print(f"[{regime.name}] GWP{regime.gwp.years}, methane price {regime.methane_price:g} $/tCO2e", file=stdout)
        print(f"  {'rank':<5}{'pathway':<18}{'cost':>10}{'carbon':>10}{'energy':>10}{'tipping':>10}{'land':>10}{'capex':>10}", file=stdout)
        for i, pid in enumerate(rg.rank_pathways(profiles), start=1):
            p = by_id[pid]
            print(f"  {i:<5}{pid.value:<18}{p.private_cost:10.2f}{p.carbon_cost:10.2f}{p.energy_revenue:10.2f}"
                  f"{p.tipping_revenue:10.2f}{p.land_revenue:10.2f}{p.capex_opex:10.2f}", file=stdout)
    sio.write_report(sio.ReportBundle(pathways=sio.pathway_balances(scenario),
                                      incentives=_incentives(scenario, regimes)), _out_dir(args))


def cmd_tipping_point(args, scenario, stdout):
    regimes = _load_regimes(args.regime, (DEMO_REGIME,))
    lam_range = (args.lambda_min, args.lambda_max)
    for regime in regimes:
        lam = rg.tipping_point_lambda(scenario, regime, lam_range, args.tol)
        if lam is None:
            print(f"{regime.name}: none in range", file=stdout)
        else:
            print(f"{regime.name}: lambda* = {lam:.2f} $/tCO2e (GWP{regime.gwp.years})", file=stdout)


def cmd_allocate(args, scenario, stdout):
    if not args.regime:
        raise UsageError("allocate needs --regime")
    regime = _load_regimes(args.regime[:1])[0]
    profiles = sio.incentive_profiles(scenario, regime)
    alloc = rg.optimal_allocation(profiles, scenario.allocation.all_caps(), scenario.allocation.exogenous())
    print(f"[{regime.name}]", file=stdout)
    for pid, x in alloc.items():
        name = pid.value if hasattr(pid, "value") else pid
        print(f"  {name:<18}{x:8.4f}", file=stdout)


def cmd_corridor(args, scenario, stdout):
    metrics = cs.monte_carlo(scenario, args.trials, args.seed, workers=args.threads)
    out = _out_dir(args)
    out.mkdir(parents=True, exist_ok=True)
    sio._dump_json(metrics.to_dict(), out / "resilience.json")
    print(f"trials {metrics.trials}, seed {metrics.master_seed}", file=stdout)
    print(f"  CHP energy        {metrics.chp_energy_gwh:10.2f} GWh/yr ({100 * metrics.chp_share:.2f} % of DC)", file=stdout)
    print(f"  unserved energy   {metrics.unserved_bulk_gwh:10.4f} GWh/yr", file=stdout)
    print(f"  critical LOLH     {metrics.critical_lolh:10.4f} h/yr", file=stdout)
    print(f"  ride-through      mean {metrics.ride_through_mean_h:.1f} h, p95 {metrics.ride_through_p95_h:.1f} h, "
          f"max {metrics.ride_through_max_h:.0f} h", file=stdout)
    print(f"  transfer failures {metrics.island_transfer_failures} of {metrics.outage_events} outages", file=stdout)


def cmd_table3(args, scenario, stdout):
    report = sio.reproduce_table3(scenario)
    regimes = _load_regimes(args.regime) if args.regime else []
    sio.write_report(sio.ReportBundle(table3=report, pathways=sio.pathway_balances(scenario),
                                      incentives=_incentives(scenario, regimes)), _out_dir(args))
    print(f"baseline CH4     {report.baseline_ch4_tco2e_yr:12.0f} tCO2e/yr "
          f"(existing gas engines {sio.baseline_lfg_generation_gwh(scenario):.1f} GWh/yr)", file=stdout)
    print(f"project CH4      {report.project_ch4_tco2e_yr:12.0f} tCO2e/yr ({100 * report.reduction_pct:.1f} % lower)", file=stdout)
    print(f"land recovered   {report.land_ha:12.1f} ha", file=stdout)
    print(f"firm capacity    {report.firm_capacity_mw:12.1f} MW", file=stdout)
    print(f"generation       {report.annual_generation_gwh:12.1f} GWh/yr ({100 * report.dc_share_pct:.2f} % of DC demand)", file=stdout)


COMMANDS = {
    "pathways": cmd_pathways,
    "rank": cmd_rank,
    "tipping-point": cmd_tipping_point,
    "allocate": cmd_allocate,
    "corridor": cmd_corridor,
    "table3": cmd_table3,
}


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.lambda_min < args.lambda_max:
            raise UsageError("--lambda-min must be below --lambda-max")
        if not args.tol > 0:
            raise UsageError("--tol must be > 0")
        scenario = sio.load_scenario(args.scenario) if args.scenario else sio.reference_scenario()
        COMMANDS[args.command](args, scenario, stdout)
    except UsageError as exc:
        print(str(exc).rstrip(), file=stderr)
        return 1
    except (StockfireError, OSError) as exc:
        print(f"stockfire: {exc}", file=stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
